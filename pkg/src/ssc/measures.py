"""Quantities derived from compressions rather than used to choose them:
compression complexity, cross-scale information flow, and two baselines
built on other Bayes nets for comparison.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import info
from .accuracy import avg_mi_cost
from .errors import ConfigurationError, DegenerateBaselineError
from .model import identity_triple, weight_arrays
from .optimize import OptimizationResult, objective_K, optimize
from .propagation import lagged_joint, macro_level, predicted_observable_dists

NONNEGATIVE_KINDS = ("expected", "expected_worst_case", "cond_entropy", "kl")


def _require_nonnegative(cfg):
    if cfg.accuracy_kind not in NONNEGATIVE_KINDS or (cfg.accuracy_kind == "kl" and cfg.kl_negate):
        raise ConfigurationError(
            f"accuracy kind {cfg.accuracy_kind!r} can be negative, so K ratios are meaningless; "
            "use 'cond_entropy' (or 'expected', 'kl')")


@dataclass
class Complexity:
    """Outcome of :func:`compression_complexity`.

    ``value`` is the ratio ``min K / K(identity)``, or the bare minimum when
    ``normalized=False``. The minimum is over induced triples of hard
    partitions (plus the identity triple itself), not over all triples.
    """

    value: float
    min_K: float
    identity_K: float
    best: OptimizationResult
    normalized: bool = True
    search_class: str = "induced_partitions"


def compression_complexity(sys, obs, w, cfg, model, opt=None, normalized: bool = True) -> Complexity:
    """Ratio of the best achievable objective to the identity compression's.

    An instance whose identity compression already has ``K = 0`` cannot be
    improved on and is reported as fully incompressible (1.0).
    """
    _require_nonnegative(cfg)
    best = optimize(sys, obs, w, cfg, model, opt)
    k_id = objective_K(sys, obs, identity_triple(sys, obs), w, cfg, model).K
    k_min = min(best.k_value, k_id)
    if not normalized:
        value = k_min
    elif k_id == 0:
        value = 1.0
    else:
        value = k_min / k_id
    return Complexity(float(value), float(k_min), float(k_id), best, normalized)


def normalized_improvement(sys, obs, w, cfg, model, triple) -> float:
    """``(K(triple) - K(identity)) / K(identity)``; near -1 is a large gain."""
    _require_nonnegative(cfg)
    k_id = objective_K(sys, obs, identity_triple(sys, obs), w, cfg, model).K
    if k_id == 0:
        raise DegenerateBaselineError("identity compression has K = 0; improvement ratio undefined")
    k = objective_K(sys, obs, triple, w, cfg, model).K
    return float((k - k_id) / k_id)


def info_flow_cond_ent(sys, obs, triple, w, lag: int = 1) -> float:
    """Negated weighted average over t >= lag of H(W_t | W'_{t-lag}).

    Weights are renormalized over the steps that have a lagged partner.
    """
    ts, ws = weight_arrays(w)
    keep = (ts >= lag) & (ws > 0)
    if not np.any(keep):
        raise ConfigurationError(f"weight has no support at t >= lag={lag}")
    ts, ws = ts[keep], ws[keep] / ws[keep].sum()
    total = 0.0
    for t, wt in zip(ts, ws):
        joint = lagged_joint(sys, obs, triple, int(t), lag).matrix
        total += wt * info.conditional_entropy(joint, given=0)
    return -float(total)


def info_flow_mi(sys, obs, triple, w) -> float:
    """Negated weighted average of I(W'_t ; W_t); the same number as the
    averaged-MI accuracy cost, read as information flow across scales."""
    return avg_mi_cost(sys, obs, triple, w)


def recompression_conditional_mi(sys, pi, t: int) -> float:
    """I(Y_t ; X_0 | Y_0) when Y_t is obtained by applying ``pi`` afresh to
    X_t, i.e. y_0 <- x_0 -> x_t -> y_t. No macro dynamics is involved."""
    if t < 1:
        raise ConfigurationError("recompression conditional MI needs t >= 1")
    pi = np.asarray(pi, dtype=float)
    Pt = np.array(sys.transition)
    for _ in range(t - 1):
        Pt = Pt @ sys.transition
    yt_given_x0 = Pt @ pi  # (n, k)
    # joint[y_t, x_0, y_0]
    joint = np.einsum("x,xa,xb->bxa", sys.initial, pi, yt_given_x0)
    return info.conditional_mutual_information(joint)


def ssc_net_transfer_entropy(sys, triple, t: int) -> float:
    """I(X_{t+1} ; Y_t | X_t) under the compression's own Bayes net, where
    y_t descends from x_0 only through pi and phi. Always 0 up to rounding;
    kept as an executable check of that claim."""
    if t < 0:
        raise ConfigurationError("t must be >= 0")
    n = sys.n
    macro_given_x0 = predicted_observable_dists(macro_level(triple), t)[t]  # P(y_t | x_0)
    Pt = np.eye(n)
    for _ in range(t):
        Pt = Pt @ sys.transition
    # P(x_t, y_t) = sum_x0 p0(x0) P^t(x_t|x0) P(y_t|x0)
    xt_yt = np.einsum("x,xa,xb->ab", sys.initial, Pt, macro_given_x0)
    # joint[x_{t+1}, y_t, x_t]
    joint = np.einsum("ab,ac->cba", xt_yt, sys.transition)
    return info.conditional_mutual_information(joint)
