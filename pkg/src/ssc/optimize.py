"""The combined objective ``K = kappa * computation + alpha * accuracy`` and
searches over hard partitions of the microstates.

The search space is restricted to *induced* triples: a partition fixes
``pi`` as a block indicator, ``phi`` is the block-aggregated transition
matrix under a reference weighting of the microstates, and ``rho`` is the
posterior of the observable within each block (or the cost-minimizing value
under that posterior). Partitions are represented as restricted growth
strings, which also fixes every tie-break in this module.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterator, NamedTuple, Optional, Sequence

import numpy as np

from .accuracy import Tables, accuracy_from_tables
from .computation import CompCostModel, cost_at_horizon, expected_horizon
from .errors import ConfigurationError, PartitionSizeError
from .model import (
    CompressionTriple,
    MarkovSystem,
    ObjectiveConfig,
    Observable,
    WeightSpec,
    weight_arrays,
)
from .propagation import true_observable_dists

MAX_EXHAUSTIVE_N = 12
REF_DISTS = ("w_averaged_occupancy", "stationary", "uniform")


# -- objective -----------------------------------------------------------------


class ObjectiveValue(NamedTuple):
    K: float
    accuracy: float
    computation: float


def _combine(kappa, comp, alpha, acc) -> float:
    # a zero weight silences its term even when the cost is infinite
    total = 0.0
    if kappa:
        total += kappa * comp
    if alpha:
        total += alpha * acc
    return float(total)


def _objective_from_tables(tab, sys, obs, triple, cfg, model, horizon) -> ObjectiveValue:
    acc = accuracy_from_tables(cfg.accuracy_kind, tab, obs, smoothing=cfg.kl_smoothing, negate=cfg.kl_negate)
    comp = cost_at_horizon(model, triple, horizon, sys.initial)
    return ObjectiveValue(_combine(cfg.kappa, comp, cfg.alpha, acc), acc, comp)


def objective_K(sys: MarkovSystem, obs: Observable, triple: CompressionTriple, w: WeightSpec,
                cfg: ObjectiveConfig, model: CompCostModel) -> ObjectiveValue:
    """Evaluate ``K`` and its two components for one triple."""
    if cfg.accuracy_kind.startswith("expected") and obs.cost_matrix is None:
        raise ConfigurationError(f"accuracy kind {cfg.accuracy_kind!r} needs a cost_matrix")
    tab = Tables.build(sys, obs, triple, w)
    return _objective_from_tables(tab, sys, obs, triple, cfg, model, expected_horizon(w))


# -- partitions ----------------------------------------------------------------


def canonical(labels: Sequence[int]) -> tuple:
    """Relabel blocks in order of first occurrence."""
    seen: dict = {}
    return tuple(seen.setdefault(b, len(seen)) for b in labels)


@dataclass(frozen=True)
class Partition:
    """Set partition of ``range(n)`` as a restricted growth string."""

    assignment: tuple

    def __post_init__(self):
        object.__setattr__(self, "assignment", canonical(int(b) for b in self.assignment))

    @classmethod
    def from_blocks(cls, blocks) -> "Partition":
        n = sum(len(b) for b in blocks)
        labels = [-1] * n
        for i, block in enumerate(blocks):
            for x in block:
                labels[x] = i
        if -1 in labels:
            raise ConfigurationError(f"blocks {blocks!r} do not cover range({n})")
        return cls(tuple(labels))

    @property
    def n(self) -> int:
        return len(self.assignment)

    @property
    def k(self) -> int:
        return max(self.assignment) + 1 if self.assignment else 0

    def blocks(self) -> list[list[int]]:
        out = [[] for _ in range(self.k)]
        for x, b in enumerate(self.assignment):
            out[b].append(x)
        return out

    def indicator(self) -> np.ndarray:
        return _indicator(self.assignment, self.k)


def enumerate_partitions(n: int, k_max: Optional[int] = None) -> Iterator[Partition]:
    """Every partition of ``range(n)`` into at most ``k_max`` blocks, in
    lexicographic restricted-growth-string order."""
    if n > MAX_EXHAUSTIVE_N:
        raise PartitionSizeError(
            f"exhaustive enumeration is limited to n <= {MAX_EXHAUSTIVE_N} (got n={n}); use annealing instead")
    if n < 1:
        return
    k_max = n if k_max is None else k_max
    if k_max < 1:
        raise ConfigurationError("k_max must be >= 1")
    labels = [0] * n

    def rec(i, used):
        if i == n:
            yield Partition(tuple(labels))
            return
        for b in range(min(used + 1, k_max)):
            labels[i] = b
            yield from rec(i + 1, max(used, b + 1))

    yield from rec(1, 1)


def lumpability_test(partition: Partition, sys: MarkovSystem, tol: float = 1e-10) -> bool:
    """Strong lumpability: within each block all states have the same
    probability of jumping into each block."""
    into_blocks = sys.transition @ partition.indicator()
    for block in partition.blocks():
        rows = into_blocks[block]
        if np.max(rows.max(axis=0) - rows.min(axis=0)) > tol:
            return False
    return True


# -- induced triples -----------------------------------------------------------


def stationary_distribution(P: np.ndarray) -> np.ndarray:
    """A stationary vector of ``P`` from the least-squares solution of
    ``s (P - I) = 0, sum(s) = 1``; one of many for reducible chains."""
    n = P.shape[0]
    A = np.vstack([P.T - np.eye(n), np.ones((1, n))])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    s = np.linalg.lstsq(A, b, rcond=None)[0]
    s = np.clip(s, 0.0, None)
    return s / s.sum()


def reference_weights(sys: MarkovSystem, w: WeightSpec, ref_dist: str = "w_averaged_occupancy") -> np.ndarray:
    if ref_dist == "uniform":
        return np.full(sys.n, 1.0 / sys.n)
    if ref_dist == "stationary":
        return stationary_distribution(sys.transition)
    if ref_dist == "w_averaged_occupancy":
        ts, ws = weight_arrays(w)
        occ = np.zeros(sys.n)
        cur = np.array(sys.initial)
        for t in range(int(ts[-1]) + 1):
            if t >= ts[0]:
                occ += ws[t - ts[0]] * cur
            cur = cur @ sys.transition
        return occ
    raise ConfigurationError(f"unknown ref_dist {ref_dist!r}; use one of {REF_DISTS}")


def _indicator(assignment, k) -> np.ndarray:
    ind = np.zeros((len(assignment), k))
    ind[np.arange(len(assignment)), assignment] = 1.0
    return ind


def _induce(ind: np.ndarray, sys, obs, wref, argmin_rho=False) -> CompressionTriple:
    mass = wref @ ind
    within = ind * wref[:, None]
    empty = mass <= 0
    if np.any(empty):
        within[:, empty] = ind[:, empty]
        mass = within.sum(axis=0)
    within = within / mass  # column b: weights of the states in block b
    phi = within.T @ sys.transition @ ind
    rho = within.T @ obs.channel
    if argmin_rho:
        if obs.cost_matrix is None:
            raise ConfigurationError("argmin_rho needs a cost_matrix")
        expected = rho @ obs.cost_matrix  # expected[b, w'] = sum_w P(w|b) C(w, w')
        rho = np.zeros_like(rho)
        rho[np.arange(rho.shape[0]), np.argmin(expected, axis=1)] = 1.0
    # rows of phi, rho are convex combinations of stochastic rows; remove rounding
    phi = phi / phi.sum(axis=1, keepdims=True)
    rho = rho / rho.sum(axis=1, keepdims=True)
    return CompressionTriple(ind, phi, rho)


def induced_triple(partition: Partition, sys: MarkovSystem, obs: Observable, w: WeightSpec,
                   ref_dist: str = "w_averaged_occupancy", argmin_rho: bool = False) -> CompressionTriple:
    """Triple induced by a hard partition.

    ``phi`` aggregates the transition matrix over blocks weighting each
    state by ``ref_dist`` (uniform within a block that has no reference
    mass); ``rho`` is the same-weighted posterior of the observable per
    block, or with ``argmin_rho`` a point mass on the value of least expected
    cost under that posterior (lowest index on ties).
    """
    if partition.n != sys.n:
        raise ConfigurationError(f"partition covers {partition.n} states, system has {sys.n}")
    return _induce(partition.indicator(), sys, obs, reference_weights(sys, w, ref_dist), argmin_rho)


# -- search --------------------------------------------------------------------


@dataclass(frozen=True)
class OptimizerConfig:
    method: str = "exhaustive"
    k_max: Optional[int] = None
    anneal_iters: int = 20000
    t0: float = 1.0
    cooling: float = 0.995
    seed: int = 0
    ref_dist: str = "w_averaged_occupancy"
    record_trace: bool = False

    def __post_init__(self):
        if self.method not in ("exhaustive", "anneal"):
            raise ConfigurationError(f"unknown method {self.method!r}")
        if not 0.0 < self.cooling < 1.0:
            raise ConfigurationError("cooling must lie in (0, 1)")
        if self.anneal_iters < 1:
            raise ConfigurationError("anneal_iters must be >= 1")
        if self.k_max is not None and self.k_max < 1:
            raise ConfigurationError("k_max must be >= 1")
        if self.ref_dist not in REF_DISTS:
            raise ConfigurationError(f"unknown ref_dist {self.ref_dist!r}")

    def resolved_k_max(self, n: int) -> int:
        k = n if self.k_max is None else self.k_max
        if not 1 <= k <= n:
            raise ConfigurationError(f"k_max must lie in [1, {n}], got {k}")
        return k


@dataclass
class OptimizationResult:
    best_triple: CompressionTriple
    best_partition: Partition
    k_value: float
    accuracy_component: float
    computation_component: float
    evaluations: int
    method: str
    trace: Optional[list] = field(default=None, repr=False)


class _Evaluator:
    """Scores partitions for one optimization run. The true-process tables
    and reference weights do not depend on the partition, so they are built
    once; scores are memoized by restricted growth string."""

    def __init__(self, sys, obs, w, cfg, model, ref_dist):
        if cfg.accuracy_kind.startswith("expected") and obs.cost_matrix is None:
            raise ConfigurationError(f"accuracy kind {cfg.accuracy_kind!r} needs a cost_matrix")
        self.sys, self.obs, self.w, self.cfg, self.model = sys, obs, w, cfg, model
        self.weights = weight_arrays(w)
        self.horizon = expected_horizon(w)
        self.q = true_observable_dists(sys, obs, int(self.weights[0][-1]))
        self.wref = reference_weights(sys, w, ref_dist)
        self.cache: dict = {}

    def __call__(self, assignment: tuple):
        hit = self.cache.get(assignment)
        if hit is None:
            ind = _indicator(assignment, max(assignment) + 1)
            triple = _induce(ind, self.sys, self.obs, self.wref, self.cfg.argmin_rho)
            tab = Tables.build(self.sys, self.obs, triple, self.w, q=self.q, weights=self.weights)
            value = _objective_from_tables(tab, self.sys, self.obs, triple, self.cfg, self.model, self.horizon)
            hit = self.cache[assignment] = (value, triple)
        return hit


def _result(ev, assignment, method, trace=None) -> OptimizationResult:
    value, triple = ev(assignment)
    return OptimizationResult(triple, Partition(assignment), value.K, value.accuracy, value.computation,
                              len(ev.cache), method, trace)


def exhaustive_optimize(sys, obs, w, cfg: ObjectiveConfig, model: CompCostModel,
                        opt: OptimizerConfig = OptimizerConfig()) -> OptimizationResult:
    """Global minimum of K over all induced triples with at most ``k_max``
    blocks; the first partition in enumeration order wins ties."""
    if sys.n > MAX_EXHAUSTIVE_N:
        raise PartitionSizeError(
            f"exhaustive search is limited to n <= {MAX_EXHAUSTIVE_N} (got n={sys.n}); use method='anneal'")
    k_max = opt.resolved_k_max(sys.n)
    ev = _Evaluator(sys, obs, w, cfg, model, opt.ref_dist)
    best, best_K = None, math.inf
    trace = [] if opt.record_trace else None
    for i, part in enumerate(enumerate_partitions(sys.n, k_max)):
        K = ev(part.assignment)[0].K
        if trace is not None:
            trace.append((i, K))
        if best is None or K < best_K:
            best, best_K = part.assignment, K
    return _result(ev, best, "exhaustive", trace)


def anneal_optimize(sys, obs, w, cfg: ObjectiveConfig, model: CompCostModel,
                    opt: OptimizerConfig = OptimizerConfig()) -> OptimizationResult:
    """Simulated annealing over partitions with single-state relocation moves.

    The chain starts from a seeded random partition into at most ``k_max``
    blocks; iteration 0 evaluates it and each later iteration proposes one
    move. Temperature at iteration ``i`` is ``t0 * cooling**i``. The best
    partition ever visited is returned.
    """
    n = sys.n
    k_max = opt.resolved_k_max(n)
    rng = np.random.default_rng(opt.seed)
    ev = _Evaluator(sys, obs, w, cfg, model, opt.ref_dist)

    current = canonical(rng.integers(0, k_max, size=n).tolist())
    cur_K = ev(current)[0].K
    best, best_K = current, cur_K
    trace = [(0, cur_K)] if opt.record_trace else None

    for i in range(1, opt.anneal_iters):
        temperature = opt.t0 * opt.cooling ** i
        k = max(current) + 1
        x = int(rng.integers(n))
        # label k means "open a fresh block"
        b = int(rng.integers(k + 1 if k < k_max else k))
        proposal = list(current)
        proposal[x] = b
        proposal = canonical(proposal)
        if proposal != current:
            new_K = ev(proposal)[0].K
            if new_K <= cur_K:
                accept = True
            elif math.isinf(new_K) or temperature <= 0:
                accept = False
            else:
                accept = rng.random() < math.exp(-(new_K - cur_K) / temperature)
            if accept:
                current, cur_K = proposal, new_K
                if cur_K < best_K:
                    best, best_K = current, cur_K
        if trace is not None:
            trace.append((i, cur_K))
    return _result(ev, best, "anneal", trace)


def optimize(sys, obs, w, cfg, model, opt: Optional[OptimizerConfig] = None) -> OptimizationResult:
    opt = OptimizerConfig() if opt is None else opt
    if opt.method == "exhaustive":
        return exhaustive_optimize(sys, obs, w, cfg, model, opt)
    return anneal_optimize(sys, obs, w, cfg, model, opt)


# -- Pareto sweep --------------------------------------------------------------


@dataclass
class ParetoSweep:
    runs: list  # (alpha, OptimizationResult) in input order
    front: list  # indices into runs that are not dominated

    def front_points(self) -> list[tuple[float, float]]:
        return [(self.runs[i][1].computation_component, self.runs[i][1].accuracy_component) for i in self.front]


def non_dominated(points: Sequence[tuple[float, float]]) -> list[int]:
    """Indices of points no other point beats in both coordinates (<= in
    both and < in at least one); equal points do not dominate each other."""
    keep = []
    for i, (c, a) in enumerate(points):
        dominated = any(
            c2 <= c and a2 <= a and (c2 < c or a2 < a)
            for j, (c2, a2) in enumerate(points) if j != i)
        if not dominated:
            keep.append(i)
    return keep


def pareto_sweep(sys, obs, w, cfg_base: ObjectiveConfig, model, alphas: Sequence[float],
                 opt: OptimizerConfig = OptimizerConfig()) -> ParetoSweep:
    """Minimize ``computation + alpha * accuracy`` for each alpha and keep the
    non-dominated (computation, accuracy) pairs."""
    if len(alphas) == 0:
        raise ConfigurationError("pareto_sweep needs at least one alpha")
    runs = []
    for a in alphas:
        cfg = replace(cfg_base, kappa=1.0, alpha=float(a))
        runs.append((float(a), optimize(sys, obs, w, cfg, model, opt)))
    points = [(r.computation_component, r.accuracy_component) for _, r in runs]
    return ParetoSweep(runs, non_dominated(points))
