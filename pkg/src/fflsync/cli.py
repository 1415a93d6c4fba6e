"""Command-line entry point: ``fflsync simulate|sweep|isi-density|replay|presets``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .config import (
    PRESET_DIR,
    Experiment,
    from_dict,
    load_experiment,
    load_preset,
    sha256_file,
    write_manifest,
)
from .errors import ConfigValidationError, FFLError
from .measures import METRIC_NAMES, trial_metrics
from .sde import simulate
from .sweep import SweepResult, isi_density, sweep_1d, sweep_2d, sweep_lambda

log = logging.getLogger("fflsync")

OUT_ENV = "FFLSYNC_OUT"


def _fmt(v) -> str:
    if v is None or (isinstance(v, float) and np.isnan(v)):
        return "nan"
    return f"{v:.17g}" if isinstance(v, float) else str(v)


def _write_rows(path: Path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (float, np.floating)):
        return None if np.isnan(v) else float(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def _write_json(path: Path, doc):
    path.write_text(json.dumps(_jsonable(doc), indent=1) + "\n")
    return path


def _resolve(args) -> Experiment:
    if args.config and args.preset:
        raise ConfigValidationError("use --config or --preset, not both")
    if args.config:
        exp = load_experiment(args.config)
    elif args.preset:
        exp = load_preset(args.preset)
    else:
        exp = from_dict({})
    if args.seed is not None:
        exp = replace(exp, sim=replace(exp.sim, seed=args.seed))
    if args.trials is not None:
        if args.trials < 1:
            raise ConfigValidationError("--trials must be >= 1")
        exp = replace(exp, trials=args.trials)
    if args.format is not None:
        exp = replace(exp, output_format=args.format)
    return exp


def _out_dir(args, exp: Experiment) -> Path:
    out = args.out or exp.output_dir or os.environ.get(OUT_ENV) or "fflsync-out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_simulate(exp: Experiment, out: Path, threads: int = 1) -> list[Path]:
    """One seeded trial per motif: trajectory, output-node spikes and metrics."""
    outputs = []
    for label, motif in zip(exp.labels(), exp.motifs or (None,)):
        traj = simulate(exp.network(motif), exp.sim)
        path = out / f"trajectory_{label}.csv"
        traj.to_csv(path)
        outputs.append(path)

        m = trial_metrics(traj, exp.metrics)
        outputs.append(_write_rows(out / f"spikes_{label}.csv", ["peak_time"], ([t] for t in m.peak_times)))
        values = dict(zip(METRIC_NAMES, m.as_array().tolist()))
        values["spike_count"] = m.spike_count
        if exp.output_format == "json":
            outputs.append(_write_json(out / f"metrics_{label}.json", values))
        else:
            outputs.append(_write_rows(out / f"metrics_{label}.csv", ["metric", "value"], values.items()))
    return outputs


def _run_sweep(exp: Experiment, motif, threads: int) -> SweepResult:
    spec = exp.sweep_spec(motif)
    names = [a.name for a in spec.axes]
    if len(names) == 1:
        return sweep_1d(spec, smooth=exp.smooth_optimum, threads=threads)
    if names == ["delta1", "coupling_d"]:
        return sweep_2d(spec, smooth=exp.smooth_optimum, threads=threads)
    if names == ["delta1", "lambda0"]:
        return sweep_lambda(spec, smooth=exp.smooth_optimum, threads=threads)
    raise ConfigValidationError(
        f"unsupported axes {names}: use one axis, (delta1, coupling_d) or (delta1, lambda0)"
    )


def sweep_rows(label: str, res: SweepResult):
    """Long-format rows ``motif,axis1,axis2,metric,mean,stderr,n_defined``."""
    axes = res.axes
    for idx in np.ndindex(*res.spec.shape):
        a1 = axes[0].values[idx[0]]
        a2 = axes[1].values[idx[1]] if len(axes) > 1 else None
        for k, name in enumerate(METRIC_NAMES):
            yield (label, a1, "" if a2 is None else a2, name,
                   float(res.mean[idx + (k,)]), float(res.stderr[idx + (k,)]), int(res.n_defined[idx + (k,)]))


def optima_rows(label: str, res: SweepResult):
    axes = res.axes
    for name, opt in res.optima.items():
        if len(axes) == 1:
            yield (label, axes[0].name, "", "", name, *opt)
        else:
            for j, o in enumerate(opt):
                yield (label, axes[0].name, axes[1].name, axes[1].values[j], name, *o)


def sweep_document(label: str, res: SweepResult) -> dict:
    return {
        "motif": label,
        "axes": [{"name": a.name, "values": list(a.values)} for a in res.axes],
        "metrics": list(METRIC_NAMES),
        "mean": res.mean,
        "stderr": res.stderr,
        "n_defined": res.n_defined,
        "exclusion_counts": res.exclusion_counts,
        "optima": {k: [list(o) for o in v] if isinstance(v, list) else list(v) for k, v in res.optima.items()},
        "noise_averaged": res.noise_averaged,
    }


def cmd_sweep(exp: Experiment, out: Path, threads: int = 1) -> list[Path]:
    results = {}
    for label, motif in zip(exp.labels(), exp.motifs or (None,)):
        log.info("sweeping %s", label)
        results[label] = _run_sweep(exp, motif, threads)

    if exp.output_format == "json":
        doc = {"results": [sweep_document(k, r) for k, r in results.items()]}
        return [_write_json(out / "sweep.json", doc)]

    outputs = [
        _write_rows(out / "sweep.csv", ["motif", "axis1", "axis2", "metric", "mean", "stderr", "n_defined"],
                    (row for k, r in results.items() for row in sweep_rows(k, r))),
        _write_rows(out / "optima.csv", ["motif", "search_axis", "slice_axis", "slice_value", "metric", "x_opt", "value_opt"],
                    (row for k, r in results.items() for row in optima_rows(k, r))),
    ]
    if any(r.noise_averaged for r in results.values()):
        rows = []
        for k, r in results.items():
            for name, vals in r.noise_averaged.items():
                rows.extend((k, lam, name, float(v)) for lam, v in zip(r.axes[1].values, vals))
        outputs.append(_write_rows(out / "noise_averaged.csv", ["motif", "lambda0", "metric", "value"], rows))
    return outputs


def cmd_isi_density(exp: Experiment, out: Path, threads: int = 1) -> list[Path]:
    outputs = []
    for label, motif in zip(exp.labels(), exp.motifs or (None,)):
        base = exp.network(motif)
        for d1 in exp.isi.delta1:
            delta = np.array(base.noise_intensities)
            delta[0] = d1
            dens = isi_density(base.with_noise(delta), exp.sim, exp.trials, None,
                               exp.isi.bins, exp.isi.range, exp.metrics, threads)
            stem = f"isi_density_{label}_delta1={d1:g}"
            if exp.output_format == "json":
                outputs.append(_write_json(out / f"{stem}.json", {
                    "motif": label, "delta1": d1, "n_isis": dens.n_isis,
                    "bin_edges": dens.bin_edges, "densities": dens.densities}))
            else:
                rows = zip(dens.bin_edges[:-1], dens.bin_edges[1:], dens.densities)
                outputs.append(_write_rows(out / f"{stem}.csv", ["bin_left", "bin_right", "density"], rows))
    return outputs


COMMANDS = {"simulate": cmd_simulate, "sweep": cmd_sweep, "isi-density": cmd_isi_density}


def replay(manifest_path, out: Path, threads: int = 1) -> tuple[list[Path], dict]:
    """Re-run a manifest's command and compare checksums.

    Returns the produced files and ``{name: matches}``.
    """
    manifest = json.loads(Path(manifest_path).read_text())
    exp = from_dict(manifest["config"])
    outputs = COMMANDS[manifest["command"]](exp, out, threads)
    check = {p.name: sha256_file(p) == manifest["outputs"].get(p.name) for p in outputs}
    return outputs, check


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fflsync", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="experiment YAML file")
        p.add_argument("--preset", help="bundled experiment, e.g. fig3")
        p.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or ./fflsync-out)")
        p.add_argument("--seed", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--format", choices=("csv", "json"))
    p = sub.add_parser("replay", help="re-run a manifest and verify checksums")
    p.add_argument("manifest")
    p.add_argument("--out", required=True)
    p.add_argument("--threads", type=int, default=1)
    p = sub.add_parser("presets", help="list bundled experiment files")
    p.add_argument("--show", metavar="NAME")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "presets":
            if args.show:
                path = PRESET_DIR / f"{args.show}.yaml"
                if not path.exists():
                    load_preset(args.show)  # raises with the list of available presets
                print(path.read_text(), end="")
            else:
                for p in sorted(PRESET_DIR.glob("*.yaml")):
                    print(p.stem)
            return 0
        if args.command == "replay":
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            _, check = replay(args.manifest, out, args.threads)
            for name, ok in check.items():
                print(f"{'ok' if ok else 'MISMATCH'} {name}")
            return 0 if all(check.values()) else 1
        started = datetime.now(timezone.utc)
        exp = _resolve(args)
        out = _out_dir(args, exp)
        outputs = COMMANDS[args.command](exp, out, args.threads)
        manifest = write_manifest(out, args.command, exp, outputs, started, args.threads)
        for p in outputs + [manifest]:
            print(p)
        return 0
    except FFLError as exc:
        print(f"fflsync: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"fflsync: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
