"""Time-indexed distributions over true and predicted observables.

Everything downstream is built from two stacks of conditional tables,

    q_t[x0, w]  = P(w_t = w | x0)         (true process, then the channel)
    r_t[x0, w'] = P(w'_t = w' | x0)       (pi, then phi t times, then rho)

and joints over (predicted, true) observables obtained by averaging their
product over the initial distribution. Matrix powers are never formed; each
step is one matrix product applied to the previous table.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ConfigurationError
from .model import CompressionTriple, MarkovSystem, Observable, WeightSpec, weight_arrays

log = logging.getLogger(__name__)

DRIFT_TOL = 1e-10


class NumericalDriftWarning(RuntimeWarning):
    """A joint distribution's total drifted from 1 and was renormalized."""


@dataclass(frozen=True, eq=False)
class JointDist:
    """Joint over (predicted, true) observables; rows index the prediction."""

    matrix: np.ndarray
    t: Union[int, str]
    warnings: tuple = ()

    @property
    def predicted_marginal(self) -> np.ndarray:
        return self.matrix.sum(axis=1)

    @property
    def true_marginal(self) -> np.ndarray:
        return self.matrix.sum(axis=0)


def _checked_joint(matrix: np.ndarray, t) -> JointDist:
    total = matrix.sum()
    notes = ()
    if abs(total - 1.0) > DRIFT_TOL:
        msg = f"joint at t={t} sums to {total!r}; renormalized"
        warnings.warn(msg, NumericalDriftWarning, stacklevel=3)
        log.warning(msg)
        matrix = matrix / total
        notes = (msg,)
    matrix.setflags(write=False)
    return JointDist(matrix, t, notes)


def true_observable_dists(sys: MarkovSystem, obs: Observable, t_max: int) -> np.ndarray:
    """Stack ``q[t]`` for t = 0..t_max, shape (t_max+1, n, m)."""
    out = np.empty((t_max + 1, sys.n, obs.m))
    cur = np.array(obs.channel)
    out[0] = cur
    for t in range(1, t_max + 1):
        cur = sys.transition @ cur
        out[t] = cur
    return out


def predicted_observable_dists(triple: CompressionTriple, t_max: int) -> np.ndarray:
    """Stack ``r[t]`` for t = 0..t_max, shape (t_max+1, n, m')."""
    n = triple.pi.shape[0]
    out = np.empty((t_max + 1, n, triple.rho.shape[1]))
    macro = np.array(triple.pi)
    out[0] = macro @ triple.rho
    for t in range(1, t_max + 1):
        macro = macro @ triple.phi
        out[t] = macro @ triple.rho
    return out


def true_observable_dist(sys: MarkovSystem, obs: Observable, t: int) -> np.ndarray:
    """Rows are P(w_t | x0); ``t = 0`` returns the channel itself."""
    _check_t(t)
    return true_observable_dists(sys, obs, t)[t]


def predicted_observable_dist(triple: CompressionTriple, t: int) -> np.ndarray:
    """Rows are P(w'_t | x0) = (pi . phi^t . rho)[x0]."""
    _check_t(t)
    return predicted_observable_dists(triple, t)[t]


def _check_t(t):
    if t < 0:
        raise ConfigurationError(f"timestep must be >= 0, got {t}")


def joint_from_tables(initial: np.ndarray, r: np.ndarray, q: np.ndarray, t) -> JointDist:
    """sum_x0 p0(x0) r(w'|x0) q(w|x0), as a (m', m) matrix."""
    return _checked_joint((r * initial[:, None]).T @ q, t)


def joint_at_time(sys: MarkovSystem, obs: Observable, triple: CompressionTriple, t: int) -> JointDist:
    _check_t(t)
    q = true_observable_dists(sys, obs, t)[t]
    r = predicted_observable_dists(triple, t)[t]
    return joint_from_tables(sys.initial, r, q, t)


def lagged_joint(sys, obs, triple, t: int, lag: int = 1) -> JointDist:
    """Joint of the prediction at ``t - lag`` with the true observable at ``t``."""
    if lag < 0 or t < lag:
        raise ConfigurationError(f"need t >= lag >= 0, got t={t}, lag={lag}")
    q = true_observable_dists(sys, obs, t)[t]
    r = predicted_observable_dists(triple, t - lag)[t - lag]
    return joint_from_tables(sys.initial, r, q, t)


def averaged_joint_from_tables(initial, r_stack, q_stack, ts, ws) -> JointDist:
    # one product over the stacked (t, x0) axis instead of a loop over t
    r = r_stack[ts] * (ws[:, None, None] * initial[None, :, None])
    q = q_stack[ts]
    total = r.reshape(-1, r.shape[2]).T @ q.reshape(-1, q.shape[2])
    return _checked_joint(total, "averaged")


def time_averaged_joint(sys, obs, triple, w: WeightSpec) -> JointDist:
    """The W-weighted mixture of the per-time joints."""
    ts, ws = weight_arrays(w)
    q = true_observable_dists(sys, obs, int(ts[-1]))
    r = predicted_observable_dists(triple, int(ts[-1]))
    return averaged_joint_from_tables(sys.initial, r, q, ts, ws)


def macro_level(triple: CompressionTriple) -> CompressionTriple:
    """Same compression with ``rho`` replaced by the identity on macrostates,
    so joints are taken over (y_t, w_t) rather than (w'_t, w_t)."""
    return CompressionTriple(triple.pi, triple.phi, np.eye(triple.k))
