"""Experiment files (YAML) and run manifests."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .errors import ConfigParseError, ConfigValidationError, FFLError
from .measures import MetricOptions
from .model import CouplingMatrix, MotifKind, NetworkConfig, OscillatorParams, build_motif
from .sde import SimParams
from .sweep import Axis, SweepSpec

PRESET_DIR = Path(__file__).parent / "presets"

TOP_KEYS = {"motif", "d", "coupling", "oscillator", "noise", "sim", "seed", "trials",
            "metrics", "sweep", "isi", "output"}
SIM_KEYS = {"dt", "t_end", "t_analysis_start", "init_std"}
AXIS_KEYS = {"name", "values", "log", "linear"}
SWEEP_KEYS = {"axes", "smooth_optimum"}
ISI_KEYS = {"delta1", "bins", "range"}
OUTPUT_KEYS = {"dir", "format"}


@dataclass(frozen=True)
class IsiSpec:
    delta1: tuple[float, ...] = (0.0023, 0.16, 1.35)
    bins: int = 60
    range: tuple[float, float] = (0.0, 12.0)


@dataclass(frozen=True, eq=False)
class Experiment:
    """A fully resolved experiment file.

    ``motifs`` is empty when an explicit coupling matrix is given; otherwise
    each listed motif is built with magnitude ``d``.
    """

    motifs: tuple[MotifKind, ...] = (MotifKind.T1,)
    d: float = 0.1
    coupling: CouplingMatrix | None = None
    oscillator: OscillatorParams = field(default_factory=OscillatorParams)
    noise: tuple[float, float, float] = (0.01, 0.01, 0.01)
    sim: SimParams = field(default_factory=SimParams)
    trials: int = 200
    metrics: MetricOptions = field(default_factory=MetricOptions)
    axes: tuple[Axis, ...] = ()
    smooth_optimum: bool = True
    isi: IsiSpec = field(default_factory=IsiSpec)
    output_dir: str | None = None
    output_format: str = "csv"

    @property
    def seed(self) -> int:
        return self.sim.seed

    def network(self, motif: MotifKind | None = None) -> NetworkConfig:
        if self.coupling is not None:
            coupling = self.coupling
        else:
            coupling = build_motif(motif or self.motifs[0], self.d)
        return NetworkConfig(self.oscillator, coupling, np.asarray(self.noise, dtype=float))

    def sweep_spec(self, motif: MotifKind | None = None) -> SweepSpec:
        if not self.axes:
            raise ConfigValidationError("experiment has no sweep axes")
        return SweepSpec(
            base_config=self.network(motif),
            axes=self.axes,
            motif=motif if self.coupling is None else None,
            sim=self.sim,
            n_trials=self.trials,
            base_seed=self.sim.seed,
            options=self.metrics,
        )

    def labels(self) -> list[str]:
        return [m.value for m in self.motifs] if self.coupling is None else ["custom"]

    def __eq__(self, other):
        if not isinstance(other, Experiment):
            return NotImplemented
        return to_dict(self) == to_dict(other)


def _check_keys(section: dict, allowed: set, where: str):
    if not isinstance(section, dict):
        raise ConfigValidationError(f"{where} must be a mapping")
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigValidationError(f"unknown key {unknown[0]!r} in {where}")


def _axis(raw: dict) -> Axis:
    _check_keys(raw, AXIS_KEYS, "sweep axis")
    if "name" not in raw:
        raise ConfigValidationError("sweep axis needs a name")
    grids = [k for k in ("values", "log", "linear") if k in raw]
    if len(grids) != 1:
        raise ConfigValidationError(f"axis {raw['name']!r} needs exactly one of values/log/linear")
    kind = grids[0]
    if kind == "values":
        return Axis(raw["name"], tuple(raw["values"]))
    lo, hi, n = raw[kind]
    if kind == "log":
        return Axis.logspace(raw["name"], lo, hi, n)
    return Axis.linspace(raw["name"], lo, hi, n)


def from_dict(doc: dict) -> Experiment:
    """Validate a parsed document and resolve every default."""
    if doc is None:
        doc = {}
    _check_keys(doc, TOP_KEYS, "experiment")
    try:
        motif = doc.get("motif", "T1")
        motifs = tuple(MotifKind(m) for m in (motif if isinstance(motif, list) else [motif]))
        d = float(doc.get("d", 0.1))
        coupling = None
        if doc.get("coupling") is not None:
            if "motif" in doc or "d" in doc:
                raise ConfigValidationError("give either motif/d or an explicit coupling matrix")
            coupling = CouplingMatrix(np.array(doc["coupling"], dtype=float))
            motifs = ()
        elif not (math.isfinite(d) and d > 0):
            raise ConfigValidationError(
                f"d must be a positive magnitude (the motif sets the edge signs), got {d}"
            )

        osc_raw = doc.get("oscillator", {}) or {}
        _check_keys(osc_raw, {f.name for f in fields(OscillatorParams)}, "oscillator")
        oscillator = OscillatorParams(**osc_raw)

        noise = tuple(float(v) for v in doc.get("noise", (0.01, 0.01, 0.01)))
        if len(noise) != 3 or any(not math.isfinite(v) or v < 0 for v in noise):
            raise ConfigValidationError(f"noise must be three finite values >= 0, got {noise}")

        sim_raw = doc.get("sim", {}) or {}
        _check_keys(sim_raw, SIM_KEYS, "sim")
        seed = doc.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise ConfigValidationError("seed must be an integer")
        sim = SimParams(**sim_raw, seed=seed)

        trials = doc.get("trials", 200)
        if not isinstance(trials, int) or trials < 1:
            raise ConfigValidationError("trials must be a positive integer")

        met_raw = doc.get("metrics", {}) or {}
        _check_keys(met_raw, {f.name for f in fields(MetricOptions)}, "metrics")
        metrics = MetricOptions(**met_raw)

        sweep_raw = doc.get("sweep", {}) or {}
        _check_keys(sweep_raw, SWEEP_KEYS, "sweep")
        axes = tuple(_axis(a) for a in sweep_raw.get("axes", []))
        smooth_optimum = bool(sweep_raw.get("smooth_optimum", True))

        isi_raw = doc.get("isi", {}) or {}
        _check_keys(isi_raw, ISI_KEYS, "isi")
        isi_default = IsiSpec()
        isi = IsiSpec(
            tuple(float(v) for v in isi_raw.get("delta1", isi_default.delta1)),
            int(isi_raw.get("bins", isi_default.bins)),
            tuple(float(v) for v in isi_raw.get("range", isi_default.range)),
        )
        if isi.bins < 2 or len(isi.range) != 2 or not isi.range[0] < isi.range[1]:
            raise ConfigValidationError("isi needs bins >= 2 and an increasing range")

        out_raw = doc.get("output", {}) or {}
        _check_keys(out_raw, OUTPUT_KEYS, "output")
        fmt = out_raw.get("format", "csv")
        if fmt not in ("csv", "json"):
            raise ConfigValidationError(f"output.format must be csv or json, got {fmt!r}")

        exp = Experiment(motifs, d, coupling, oscillator, noise, sim, trials, metrics,
                         axes, smooth_optimum, isi, out_raw.get("dir"), fmt)
        if axes:
            for m in motifs or (None,):
                exp.sweep_spec(m)
        return exp
    except ConfigValidationError:
        raise
    except FFLError as exc:
        raise ConfigValidationError(str(exc)) from exc
    except (TypeError, ValueError) as exc:
        raise ConfigValidationError(str(exc)) from exc


def parse_experiment(text: str) -> Experiment:
    try:
        doc = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line, col = (mark.line + 1, mark.column + 1) if mark else (None, None)
        raise ConfigParseError(f"invalid YAML: {exc.problem}", line, col) from exc
    except yaml.YAMLError as exc:
        raise ConfigParseError(f"invalid YAML: {exc}") from exc
    return from_dict(doc)


def load_experiment(path) -> Experiment:
    return parse_experiment(Path(path).read_text())


def load_preset(name: str) -> Experiment:
    path = PRESET_DIR / f"{name}.yaml"
    if not path.exists():
        available = ", ".join(sorted(p.stem for p in PRESET_DIR.glob("*.yaml")))
        raise ConfigValidationError(f"no preset {name!r}; available: {available}")
    return load_experiment(path)


def to_dict(exp: Experiment) -> dict:
    """Plain-data form with every default written out."""
    doc = {}
    if exp.coupling is not None:
        doc["coupling"] = exp.coupling.weights.tolist()
    else:
        doc["motif"] = [m.value for m in exp.motifs]
        doc["d"] = exp.d
    doc["oscillator"] = asdict(exp.oscillator)
    doc["noise"] = list(exp.noise)
    sim = asdict(exp.sim)
    doc["seed"] = sim.pop("seed")
    doc["sim"] = sim
    doc["trials"] = exp.trials
    doc["metrics"] = asdict(exp.metrics)
    doc["sweep"] = {
        "axes": [{"name": a.name, "values": list(a.values)} for a in exp.axes],
        "smooth_optimum": exp.smooth_optimum,
    }
    doc["isi"] = {"delta1": list(exp.isi.delta1), "bins": exp.isi.bins, "range": list(exp.isi.range)}
    doc["output"] = {"dir": exp.output_dir, "format": exp.output_format}
    return doc


def serialize_experiment(exp: Experiment) -> str:
    return yaml.safe_dump(to_dict(exp), sort_keys=False)


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def write_manifest(out_dir: Path, command: str, exp: Experiment, outputs, started: datetime, threads: int = 1) -> Path:
    out_dir = Path(out_dir)
    manifest = {
        "tool": "fflsync",
        "version": __version__,
        "command": command,
        "config": to_dict(exp),
        "seed": exp.seed,
        "threads": threads,
        "started": started.isoformat(),
        "finished": datetime.now(timezone.utc).isoformat(),
        "outputs": {Path(p).name: sha256_file(p) for p in outputs},
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n")
    return path
