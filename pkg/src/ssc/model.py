"""Domain objects: the microscopic process, what we observe of it, how
future timesteps are weighted, and the compression triple that emulates it.

Constructors only coerce inputs to read-only float64 arrays. They do not
reject bad probabilities; :func:`validate_system` and :func:`validate_triple`
report every problem instead, so that a caller (or the CLI) can show all of
them at once.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError, EmptySupportError

STOCHASTIC_TOL = 1e-12

ACCURACY_KINDS = ("expected", "expected_worst_case", "avg_mi", "mi_of_avg", "cond_entropy", "kl")
COMP_KINDS = ("cardinality", "sparsity", "init_entropy_plus_sparsity")
WEIGHT_KINDS = ("geometric", "uniform")


def _frozen(a, ndim) -> np.ndarray:
    arr = np.array(a, dtype=np.float64)
    if arr.ndim != ndim:
        raise ConfigurationError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class MarkovSystem:
    """Time-homogeneous first-order Markov chain over ``n`` microstates.

    Parameters
    ----------
    transition : array (n, n)
        ``transition[x, x1] = P(x_{t+1}=x1 | x_t=x)``.
    initial : array (n,)
        Distribution of the microstate at time 0.
    """

    transition: np.ndarray
    initial: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "transition", _frozen(self.transition, 2))
        object.__setattr__(self, "initial", _frozen(self.initial, 1))

    @property
    def n(self) -> int:
        return self.transition.shape[0]


@dataclass(frozen=True, eq=False)
class Observable:
    """Observation channel ``channel[x, w] = O(w | x)`` and optional accuracy
    function ``cost_matrix[w, w_pred] = C(w, w_pred)``."""

    channel: np.ndarray
    cost_matrix: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "channel", _frozen(self.channel, 2))
        if self.cost_matrix is not None:
            object.__setattr__(self, "cost_matrix", _frozen(self.cost_matrix, 2))

    @property
    def m(self) -> int:
        return self.channel.shape[1]


@dataclass(frozen=True)
class WeightSpec:
    """Distribution over future timesteps, truncated at ``horizon``.

    ``geometric`` puts mass proportional to ``(1 - gamma)**t`` on each
    included step; ``uniform`` spreads it evenly. Step 0 is only included
    when ``include_t0`` is set.
    """

    kind: str = "uniform"
    horizon: int = 1
    gamma: Optional[float] = None
    include_t0: bool = False

    def __post_init__(self):
        if self.kind not in WEIGHT_KINDS:
            raise ConfigurationError(f"unknown weight kind {self.kind!r}; use one of {WEIGHT_KINDS}")
        if int(self.horizon) != self.horizon or self.horizon < 0:
            raise ConfigurationError(f"horizon must be a nonnegative integer, got {self.horizon!r}")
        if self.kind == "geometric":
            if self.gamma is None or not (0.0 < self.gamma <= 1.0):
                raise ConfigurationError(f"geometric weights need gamma in (0, 1], got {self.gamma!r}")

    @property
    def t_min(self) -> int:
        return 0 if self.include_t0 else 1

    def truncation_bound(self) -> float:
        """Upper bound ``(1 - gamma)**horizon`` on the discarded tail mass of
        the untruncated geometric discount; 0 for uniform windows."""
        if self.kind == "uniform":
            return 0.0
        return float((1.0 - self.gamma) ** self.horizon)


@dataclass(frozen=True, eq=False)
class CompressionTriple:
    """Compression ``pi`` (n, k), macro dynamics ``phi`` (k, k) and
    prediction map ``rho`` (k, m)."""

    pi: np.ndarray
    phi: np.ndarray
    rho: np.ndarray

    def __post_init__(self):
        for name in ("pi", "phi", "rho"):
            object.__setattr__(self, name, _frozen(getattr(self, name), 2))

    @property
    def k(self) -> int:
        return self.phi.shape[0]


@dataclass(frozen=True)
class ObjectiveConfig:
    """Which accuracy and computation costs enter ``K = kappa*C + alpha*E``.

    ``kl_smoothing`` and ``kl_negate`` only matter for ``accuracy_kind='kl'``;
    ``argmin_rho`` asks induced triples to predict with the cost-minimizing
    observable instead of the Bayes posterior.
    """

    accuracy_kind: str = "cond_entropy"
    comp_model: str = "cardinality"
    kappa: float = 1.0
    alpha: float = 1.0
    kl_smoothing: float = 0.0
    kl_negate: bool = False
    argmin_rho: bool = False

    def __post_init__(self):
        if self.accuracy_kind not in ACCURACY_KINDS:
            raise ConfigurationError(f"unknown accuracy kind {self.accuracy_kind!r}; use one of {ACCURACY_KINDS}")
        if self.comp_model not in COMP_KINDS:
            raise ConfigurationError(f"unknown computation model {self.comp_model!r}; use one of {COMP_KINDS}")
        for name in ("kappa", "alpha"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ConfigurationError(f"{name} must be finite and >= 0, got {v!r}")
        if self.kappa == 0 and self.alpha == 0:
            raise ConfigurationError("at least one of kappa, alpha must be positive")
        if self.kl_smoothing < 0:
            raise ConfigurationError("kl_smoothing must be >= 0")


# -- validation --------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str
    where: str
    message: str

    def as_dict(self) -> dict:
        return {"kind": self.kind, "where": self.where, "message": self.message}


@dataclass
class ValidationReport:
    """Every violated invariant, plus non-fatal warnings. Valid iff no violations."""

    violations: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.valid

    def __len__(self):
        return len(self.violations)

    def add(self, kind, where, message):
        self.violations.append(Violation(kind, where, message))

    def as_dict(self) -> dict:
        return {
            "valid": self.valid,
            "violations": [v.as_dict() for v in self.violations],
            "warnings": [v.as_dict() for v in self.warnings],
        }


def _check_stochastic_matrix(report, name, a, shape=None):
    if shape is not None and a.shape != shape:
        report.add("dimension", name, f"{name} has shape {a.shape}, expected {shape}")
        return
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        report.add("dimension", name, f"{name} must be a nonempty matrix, got shape {a.shape}")
        return
    if not np.all(np.isfinite(a)):
        rows = sorted(set(np.argwhere(~np.isfinite(a))[:, 0].tolist()))
        report.add("finite", name, f"{name} has non-finite entries in rows {rows}")
        return
    for i, j in np.argwhere((a < 0) | (a > 1)):
        report.add("range", f"{name}[{i},{j}]", f"{name}[{i},{j}] = {a[i, j]!r} outside [0, 1]")
    sums = a.sum(axis=1)
    for i in np.flatnonzero(np.abs(sums - 1.0) > STOCHASTIC_TOL):
        report.add("row_sum", f"{name}[{i}]", f"row {i} of {name} sums to {sums[i]!r}, not 1")


def _check_distribution(report, name, v, n):
    if v.shape != (n,):
        report.add("dimension", name, f"{name} has shape {v.shape}, expected ({n},)")
        return
    if not np.all(np.isfinite(v)):
        report.add("finite", name, f"{name} has non-finite entries")
        return
    for i in np.flatnonzero((v < 0) | (v > 1)):
        report.add("range", f"{name}[{i}]", f"{name}[{i}] = {v[i]!r} outside [0, 1]")
    s = v.sum()
    if abs(s - 1.0) > STOCHASTIC_TOL:
        report.add("sum", name, f"{name} sums to {s!r}, not 1")


def validate_system(sys: MarkovSystem, obs: Observable) -> ValidationReport:
    """Check a system and its observable; never raises on bad values."""
    report = ValidationReport()
    n = sys.transition.shape[0]
    if n < 1:
        report.add("dimension", "transition", "need at least one microstate")
        return report
    _check_stochastic_matrix(report, "transition", sys.transition, (n, n))
    _check_distribution(report, "initial", sys.initial, n)
    if obs.channel.shape[0] != n:
        report.add("dimension", "channel", f"channel has {obs.channel.shape[0]} rows, expected {n}")
    else:
        _check_stochastic_matrix(report, "channel", obs.channel)
    C = obs.cost_matrix
    if C is not None:
        m = obs.channel.shape[1]
        if C.shape != (m, m):
            report.add("dimension", "cost_matrix", f"cost_matrix has shape {C.shape}, expected ({m}, {m})")
        elif not np.all(np.isfinite(C)):
            report.add("finite", "cost_matrix", "cost_matrix has non-finite entries")
        else:
            for i, j in np.argwhere(C < 0):
                report.add("range", f"cost_matrix[{i},{j}]", f"cost_matrix[{i},{j}] = {C[i, j]!r} is negative")
            for i in np.flatnonzero(np.diag(C) > C.min(axis=1)):
                report.warnings.append(Violation(
                    "cost_diagonal", f"cost_matrix[{i},{i}]",
                    f"C({i},{i}) = {C[i, i]!r} exceeds the row minimum {C[i].min()!r}"))
    return report


def validate_triple(triple: CompressionTriple, sys: MarkovSystem, obs: Observable) -> ValidationReport:
    """Check that a triple is stochastic and fits the system's dimensions."""
    report = ValidationReport()
    n, m = sys.transition.shape[0], obs.channel.shape[1]
    k = triple.phi.shape[0]
    if k < 1:
        report.add("dimension", "phi", "need at least one macrostate")
        return report
    _check_stochastic_matrix(report, "pi", triple.pi, (n, k))
    _check_stochastic_matrix(report, "phi", triple.phi, (k, k))
    _check_stochastic_matrix(report, "rho", triple.rho, (k, m))
    return report


# -- constructors ------------------------------------------------------------


def weight_vector(w: WeightSpec) -> list[tuple[int, float]]:
    """``(t, W(t))`` for every included timestep, normalized to sum to 1.

    >>> weight_vector(WeightSpec("uniform", horizon=2))
    [(1, 0.5), (2, 0.5)]
    """
    ts, ws = weight_arrays(w)
    return [(int(t), float(v)) for t, v in zip(ts, ws)]


def weight_arrays(w: WeightSpec) -> tuple[np.ndarray, np.ndarray]:
    ts = np.arange(w.t_min, w.horizon + 1)
    if ts.size == 0:
        raise EmptySupportError(f"no timesteps in [{w.t_min}, {w.horizon}]")
    if w.kind == "uniform":
        raw = np.ones(ts.size)
    else:
        # 0**0 == 1 keeps gamma=1 meaningful when t=0 is included
        raw = np.power(1.0 - w.gamma, ts.astype(float))
    total = raw.sum()
    if total <= 0:
        raise EmptySupportError("weights vanish on every included timestep")
    return ts, raw / total


def identity_triple(sys: MarkovSystem, obs: Observable) -> CompressionTriple:
    """The null compression: keep every microstate and reuse the true dynamics."""
    return CompressionTriple(np.eye(sys.n), sys.transition, obs.channel)


def singleton_triple(sys: MarkovSystem, obs: Observable, rho=None) -> CompressionTriple:
    """Compress everything into one macrostate.

    Without ``rho`` the single macrostate always predicts the observable value
    that is most probable under the initial distribution (lowest index on ties).
    """
    if rho is None:
        marginal = sys.initial @ obs.channel
        rho = np.zeros(obs.m)
        rho[int(np.argmax(marginal))] = 1.0
    return CompressionTriple(np.ones((sys.n, 1)), np.ones((1, 1)), np.reshape(rho, (1, obs.m)))
