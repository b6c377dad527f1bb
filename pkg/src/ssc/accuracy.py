"""Accuracy costs: how badly the compressed model's predictions of the
observable track the true observable, weighted over future timesteps.

Every public cost takes ``(sys, obs, triple, w)``. Internally they share one
:class:`Tables` bundle so that the true-process propagation is done once per
evaluation; the optimizer reuses the true half of it across partitions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import info
from .errors import ConfigurationError
from .model import ACCURACY_KINDS, MarkovSystem, Observable, WeightSpec, weight_arrays
from .propagation import (
    averaged_joint_from_tables,
    joint_from_tables,
    joint_at_time,
    predicted_observable_dists,
    true_observable_dists,
)


@dataclass(frozen=True, eq=False)
class Tables:
    initial: np.ndarray
    q: np.ndarray  # (T+1, n, m) true observable given x0
    r: np.ndarray  # (T+1, n, m') predicted observable given x0
    ts: np.ndarray
    ws: np.ndarray

    @classmethod
    def build(cls, sys: MarkovSystem, obs: Observable, triple, w: WeightSpec, q=None, weights=None):
        ts, ws = weight_arrays(w) if weights is None else weights
        t_max = int(ts[-1])
        if q is None:
            q = true_observable_dists(sys, obs, t_max)
        r = predicted_observable_dists(triple, t_max)
        return cls(sys.initial, q, r, ts, ws)

    def joint(self, t):
        return joint_from_tables(self.initial, self.r[t], self.q[t], t)

    def averaged_joint(self):
        return averaged_joint_from_tables(self.initial, self.r, self.q, self.ts, self.ws)


# -- per-time terms ------------------------------------------------------------


def _expected_terms(tab: Tables, C, aggregate) -> np.ndarray:
    support = tab.initial > 0
    out = np.empty(tab.ts.size)
    for i, t in enumerate(tab.ts):
        # per_x0[x0] = sum_{w, w'} q(w|x0) C(w, w') r(w'|x0)
        per_x0 = np.einsum("xa,ab,xb->x", tab.q[t], C, tab.r[t])
        if aggregate == "mean":
            out[i] = tab.initial @ per_x0
        else:
            out[i] = per_x0[support].max()
    return out


def _mi_terms(tab: Tables) -> np.ndarray:
    return np.array([info.mutual_information(tab.joint(t).matrix) for t in tab.ts])


def _cond_entropy_terms(tab: Tables) -> np.ndarray:
    return np.array([info.conditional_entropy(tab.joint(t).matrix, given=0) for t in tab.ts])


def _smooth(p, eps):
    p = p + eps
    return p / p.sum()


def _kl_terms(tab: Tables, smoothing: float) -> np.ndarray:
    out = np.zeros(tab.ts.size)
    for i, (t, wt) in enumerate(zip(tab.ts, tab.ws)):
        if wt == 0:
            continue
        total = 0.0
        for x0 in np.flatnonzero(tab.initial > 0):
            r, q = tab.r[t, x0], tab.q[t, x0]
            if smoothing > 0:
                r, q = _smooth(r, smoothing), _smooth(q, smoothing)
            total += tab.initial[x0] * info.kl_divergence(r, q)
        out[i] = total
    return out


def _weighted(ws, terms) -> float:
    mask = ws > 0  # keeps 0 * inf out of the sum
    return float(np.sum(ws[mask] * terms[mask]))


def _require_cost_matrix(obs):
    if obs.cost_matrix is None:
        raise ConfigurationError("expected-cost accuracy needs an observable with a cost_matrix")
    return obs.cost_matrix


# -- public costs --------------------------------------------------------------


def expected_cost(sys, obs, triple, w, aggregate: str = "mean") -> float:
    """Weighted expected accuracy-function cost of the predictions.

    ``aggregate='worst_case'`` replaces the average over initial states by a
    maximum, taken separately at each timestep over states with nonzero
    initial probability.
    """
    if aggregate not in ("mean", "worst_case"):
        raise ConfigurationError(f"aggregate must be 'mean' or 'worst_case', got {aggregate!r}")
    C = _require_cost_matrix(obs)
    tab = Tables.build(sys, obs, triple, w)
    return _weighted(tab.ws, _expected_terms(tab, C, aggregate))


def mi_per_time(sys, obs, triple, t: int) -> float:
    """I(W'_t ; W_t) in bits."""
    return info.mutual_information(joint_at_time(sys, obs, triple, t).matrix)


def avg_mi_cost(sys, obs, triple, w) -> float:
    """Negated weighted average of the per-time mutual informations."""
    tab = Tables.build(sys, obs, triple, w)
    return -_weighted(tab.ws, _mi_terms(tab))


def mi_of_avg_cost(sys, obs, triple, w) -> float:
    """Negated mutual information of the time-averaged joint. Unlike
    :func:`avg_mi_cost` this forces one time-invariant decoding."""
    tab = Tables.build(sys, obs, triple, w)
    return -info.mutual_information(tab.averaged_joint().matrix)


def cond_entropy_cost(sys, obs, triple, w) -> float:
    """H(W | W') under the time-averaged joint, in bits."""
    tab = Tables.build(sys, obs, triple, w)
    return info.conditional_entropy(tab.averaged_joint().matrix, given=0)


def kl_cost(sys, obs, triple, w, smoothing: float = 0.0, negate: bool = False) -> float:
    """Weighted average over t and x0 of KL[predicted || true] observable
    distributions given x0.

    Returns ``inf`` when a prediction puts mass where the truth has none and
    ``smoothing`` is 0. With ``smoothing > 0`` both distributions get that
    much extra mass on every value and are renormalized first. ``negate``
    flips the sign of the result.
    """
    tab = Tables.build(sys, obs, triple, w)
    value = _weighted(tab.ws, _kl_terms(tab, smoothing))
    return -value if negate else value


def accuracy_from_tables(kind: str, tab: Tables, obs: Observable, *, smoothing=0.0, negate=False) -> float:
    if kind == "expected":
        return _weighted(tab.ws, _expected_terms(tab, _require_cost_matrix(obs), "mean"))
    if kind == "expected_worst_case":
        return _weighted(tab.ws, _expected_terms(tab, _require_cost_matrix(obs), "worst_case"))
    if kind == "avg_mi":
        return -_weighted(tab.ws, _mi_terms(tab))
    if kind == "mi_of_avg":
        return -info.mutual_information(tab.averaged_joint().matrix)
    if kind == "cond_entropy":
        return info.conditional_entropy(tab.averaged_joint().matrix, given=0)
    if kind == "kl":
        value = _weighted(tab.ws, _kl_terms(tab, smoothing))
        return -value if negate else value
    raise ConfigurationError(f"unknown accuracy kind {kind!r}; use one of {ACCURACY_KINDS}")


def accuracy_cost(kind, sys, obs, triple, w, *, smoothing=0.0, negate=False) -> float:
    """Dispatch on an accuracy-kind name (see ``ACCURACY_KINDS``)."""
    tab = Tables.build(sys, obs, triple, w)
    return accuracy_from_tables(kind, tab, obs, smoothing=smoothing, negate=negate)


def per_time_diagnostics(kind, sys, obs, triple, w, *, smoothing=0.0) -> list[dict]:
    """One record per included timestep.

    For costs that are weighted sums over time the ``value`` is the summand at
    that step. For the two time-averaged-joint costs, which do not decompose,
    it is the same functional evaluated on that step's joint alone.
    """
    tab = Tables.build(sys, obs, triple, w)
    if kind == "expected":
        terms = _expected_terms(tab, _require_cost_matrix(obs), "mean")
    elif kind == "expected_worst_case":
        terms = _expected_terms(tab, _require_cost_matrix(obs), "worst_case")
    elif kind in ("avg_mi", "mi_of_avg"):
        terms = -_mi_terms(tab)
    elif kind == "cond_entropy":
        terms = _cond_entropy_terms(tab)
    elif kind == "kl":
        terms = _kl_terms(tab, smoothing)
    else:
        raise ConfigurationError(f"unknown accuracy kind {kind!r}")
    return [{"t": int(t), "weight": float(wt), "value": float(v)} for t, wt, v in zip(tab.ts, tab.ws, terms)]
