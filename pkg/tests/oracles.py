"""Slow, literal reference implementations used only by the tests.

Everything here is written with plain loops straight from the model
equations and the metric definitions, sharing no code with the package.
"""

import math


def naive_drift(state, lambda0, alpha, gq, omega0, omega1, d):
    """``d[j][i]``: signal from node j into node i."""
    n = len(state) // 2
    out = []
    for i in range(n):
        xi, yi = state[2 * i], state[2 * i + 1]
        r = math.sqrt(xi ** 2 + yi ** 2)
        lam = lambda0 + alpha * r ** 2 + gq * r ** 4
        om = omega0 + omega1 * r ** 2
        cx = sum(d[j][i] * (state[2 * j] - xi) for j in range(n) if j != i)
        cy = sum(d[j][i] * (state[2 * j + 1] - yi) for j in range(n) if j != i)
        out.append(lam * xi - om * yi + cx)
        out.append(om * xi + lam * yi + cy)
    return out


def brute_force_prominent_peaks(values, min_prominence):
    """Indices of strict local maxima whose prominence >= ``min_prominence``."""
    n = len(values)
    found = []
    for i in range(1, n - 1):
        v = values[i]
        if not (values[i - 1] < v and values[i + 1] < v):
            continue
        left_min = v
        j = i - 1
        while j >= 0 and values[j] <= v:
            left_min = min(left_min, values[j])
            j -= 1
        right_min = v
        j = i + 1
        while j < n and values[j] <= v:
            right_min = min(right_min, values[j])
            j += 1
        if v - max(left_min, right_min) >= min_prominence:
            found.append(i)
    return found


def direct_sigma(xs, amps):
    M = len(xs)
    T = len(xs[0])
    total = 0.0
    for t in range(T):
        sq = sum((xs[i][t] / amps[i]) ** 2 for i in range(M)) / M
        mean = sum(xs[i][t] / amps[i] for i in range(M)) / M
        total += math.sqrt(max(sq - mean ** 2, 0.0))
    return total / T


def direct_gamma(phi1, phi3):
    T = len(phi1)
    s = sum(math.sin(phi1[t] - phi3[t]) for t in range(T)) / T
    c = sum(math.cos(phi1[t] - phi3[t]) for t in range(T)) / T
    return math.sqrt(s ** 2 + c ** 2)


def direct_cv(peak_times):
    K = len(peak_times)
    isi = [peak_times[k + 1] - peak_times[k] for k in range(K - 1)]
    m2 = sum(v ** 2 for v in isi) / (K - 1)
    m1 = sum(isi) / (K - 1)
    return math.sqrt(m2 - m1 ** 2) / m1
