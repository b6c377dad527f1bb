"""Trajectory sampling and plug-in estimators of the accuracy costs.

Paths are drawn in fixed-size chunks, each with its own generator seeded from
``(seed, chunk_index)``. The set of paths therefore depends only on the seed
and the path count, never on how many worker threads drew them.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import info
from .errors import ConfigurationError
from .model import ACCURACY_KINDS, WeightSpec, weight_arrays

CHUNK = 8192
N_BOOT = 32
_BOOT_STREAM = 0xB0075
ESTIMATORS = ("plugin", "plugin_miller_madow")


@dataclass(frozen=True)
class SampleConfig:
    n_paths: int = 100_000
    horizon: int = 1
    seed: int = 0
    estimator: str = "plugin"

    def __post_init__(self):
        if self.n_paths < 1:
            raise ConfigurationError("n_paths must be >= 1")
        if self.horizon < 1:
            raise ConfigurationError("horizon must be >= 1")
        if self.estimator not in ESTIMATORS:
            raise ConfigurationError(f"unknown estimator {self.estimator!r}; use one of {ESTIMATORS}")


@dataclass(frozen=True, eq=False)
class PathSet:
    """Sampled paths; ``omega[i, t]`` is the true and ``omega_pred[i, t]``
    the predicted observable of path ``i`` at step ``t``."""

    x0: np.ndarray
    omega: np.ndarray
    omega_pred: np.ndarray
    n_states: int
    m: int
    m_pred: int
    seed: int
    estimator: str = "plugin"

    @property
    def n_paths(self) -> int:
        return self.x0.shape[0]

    @property
    def horizon(self) -> int:
        return self.omega.shape[1] - 1


def _cdf(rows) -> np.ndarray:
    c = np.cumsum(np.asarray(rows, dtype=float), axis=1)
    return c / c[:, -1:]


def _draw(rng, cdf, states) -> np.ndarray:
    u = rng.random(states.shape[0])
    idx = np.sum(cdf[states] <= u[:, None], axis=1)
    return np.minimum(idx, cdf.shape[1] - 1)


def _sample_chunk(args):
    seed, chunk, size, tables, horizon = args
    p0, P, O, pi, phi, rho = tables
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, chunk])))
    x = _draw(rng, p0, np.zeros(size, dtype=np.intp))
    x0 = x.copy()
    y = _draw(rng, pi, x)
    om = np.empty((size, horizon + 1), dtype=np.intp)
    op = np.empty((size, horizon + 1), dtype=np.intp)
    for t in range(horizon + 1):
        om[:, t] = _draw(rng, O, x)
        op[:, t] = _draw(rng, rho, y)
        if t < horizon:
            x = _draw(rng, P, x)
            y = _draw(rng, phi, y)
    return x0, om, op


def sample_paths(sys, obs, triple, cfg: SampleConfig, workers: int = 1) -> PathSet:
    """Draw ``cfg.n_paths`` independent runs of the true process and of the
    compressed emulator started from the same x0."""
    tables = (_cdf(sys.initial[None, :]), _cdf(sys.transition), _cdf(obs.channel),
              _cdf(triple.pi), _cdf(triple.phi), _cdf(triple.rho))
    sizes = [min(CHUNK, cfg.n_paths - s) for s in range(0, cfg.n_paths, CHUNK)]
    jobs = [(cfg.seed, c, size, tables, cfg.horizon) for c, size in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_sample_chunk, jobs))
    else:
        parts = [_sample_chunk(j) for j in jobs]
    x0, om, op = (np.concatenate(p) for p in zip(*parts))
    return PathSet(x0, om, op, sys.n, obs.m, triple.rho.shape[1], cfg.seed, cfg.estimator)


# -- estimators ----------------------------------------------------------------


def _counts(a, b, na, nb) -> np.ndarray:
    return np.bincount(a * nb + b, minlength=na * nb).reshape(na, nb).astype(float)


def _mm_bits(table, n_eff) -> float:
    """Miller-Madow bias term (occupied bins - 1) / 2N, in bits."""
    return (np.count_nonzero(table) - 1) / (2.0 * n_eff * math.log(2))


def _mi(joint, n_eff, mm) -> float:
    value = info.mutual_information(joint)
    if mm:
        value += _mm_bits(joint.sum(axis=1), n_eff) + _mm_bits(joint.sum(axis=0), n_eff) - _mm_bits(joint, n_eff)
    return value


def _cond_ent(joint, n_eff, mm) -> float:
    value = info.conditional_entropy(joint, given=0)
    if mm:
        value += _mm_bits(joint, n_eff) - _mm_bits(joint.sum(axis=1), n_eff)
    return value


def _point(kind, ps: PathSet, idx, ts, ws, C, mm) -> float:
    x0, om, op = ps.x0[idx], ps.omega[idx], ps.omega_pred[idx]
    N = x0.shape[0]
    if kind == "expected":
        per_path = sum(wt * C[om[:, t], op[:, t]] for t, wt in zip(ts, ws))
        return float(np.mean(per_path))
    if kind == "expected_worst_case":
        total = 0.0
        for t, wt in zip(ts, ws):
            cost = C[om[:, t], op[:, t]]
            hits = np.bincount(x0, minlength=ps.n_states)
            sums = np.bincount(x0, weights=cost, minlength=ps.n_states)
            seen = hits > 0
            total += wt * np.max(sums[seen] / hits[seen])
        return float(total)
    if kind == "avg_mi":
        return -float(sum(wt * _mi(_counts(op[:, t], om[:, t], ps.m_pred, ps.m) / N, N, mm)
                          for t, wt in zip(ts, ws)))
    if kind in ("mi_of_avg", "cond_entropy"):
        joint = sum(wt * _counts(op[:, t], om[:, t], ps.m_pred, ps.m) / N for t, wt in zip(ts, ws))
        n_eff = N / float(np.sum(ws ** 2))
        if kind == "mi_of_avg":
            return -_mi(joint, n_eff, mm)
        return _cond_ent(joint, n_eff, mm)
    if kind == "kl":
        total = 0.0
        hits = np.bincount(x0, minlength=ps.n_states)
        for t, wt in zip(ts, ws):
            pred = _counts(x0, op[:, t], ps.n_states, ps.m_pred)
            true = _counts(x0, om[:, t], ps.n_states, ps.m)
            for s in np.flatnonzero(hits):
                total += wt * hits[s] / N * info.kl_divergence(pred[s] / hits[s], true[s] / hits[s])
        return float(total)
    raise ConfigurationError(f"unknown cost kind {kind!r}; use one of {ACCURACY_KINDS}")


def estimate_cost(paths: PathSet, cost_kind: str, w: WeightSpec, cost_matrix=None,
                  estimator: Optional[str] = None) -> tuple[float, float]:
    """Estimate one accuracy cost from sampled paths.

    Returns ``(estimate, standard_error)``. For the expected cost the error
    is the sample standard deviation over sqrt(n_paths); for every other
    kind it is the spread of a 32-resample bootstrap seeded from the paths'
    seed. ``plugin_miller_madow`` adds the Miller-Madow correction to the
    entropy-based kinds; KL and expected costs are always plug-in. An
    infinite KL estimate comes back as ``(inf, inf)``.
    """
    if cost_kind not in ACCURACY_KINDS:
        raise ConfigurationError(f"unknown cost kind {cost_kind!r}; use one of {ACCURACY_KINDS}")
    estimator = paths.estimator if estimator is None else estimator
    if estimator not in ESTIMATORS:
        raise ConfigurationError(f"unknown estimator {estimator!r}")
    mm = estimator == "plugin_miller_madow"
    ts, ws = weight_arrays(w)
    if ts[-1] > paths.horizon:
        raise ConfigurationError(f"weights reach t={ts[-1]} but paths stop at t={paths.horizon}")
    keep = ws > 0
    ts, ws = ts[keep], ws[keep]
    C = None
    if cost_kind.startswith("expected"):
        if cost_matrix is None:
            raise ConfigurationError("expected-cost estimation needs a cost matrix")
        C = np.asarray(cost_matrix, dtype=float)

    N = paths.n_paths
    everything = np.arange(N)
    est = _point(cost_kind, paths, everything, ts, ws, C, mm)
    if math.isinf(est):
        return est, math.inf
    if cost_kind == "expected":
        per_path = sum(wt * C[paths.omega[:, t], paths.omega_pred[:, t]] for t, wt in zip(ts, ws))
        se = float(np.std(per_path, ddof=1) / math.sqrt(N)) if N > 1 else 0.0
        return est, se
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([paths.seed, _BOOT_STREAM])))
    boots = np.array([_point(cost_kind, paths, rng.integers(0, N, size=N), ts, ws, C, mm)
                      for _ in range(N_BOOT)])
    boots = boots[np.isfinite(boots)]
    se = float(np.std(boots, ddof=1)) if boots.size > 1 else 0.0
    return est, se


def within_tolerance(exact: float, estimate: float, stderr: float, floor: float = 0.02) -> bool:
    """``|estimate - exact| <= max(3 * stderr, floor)``; two equal infinities pass."""
    if math.isinf(exact) or math.isinf(estimate):
        return exact == estimate
    return abs(estimate - exact) <= max(3.0 * stderr, floor)
