"""Computation-cost proxies for running a compressed model.

Three models are offered:

``cardinality``
    ``log2(k) * E_w[t]``: bits needed to describe the macrostate, once per
    expected step.
``sparsity``
    ``nnz(pi)/n + E_w[t] * nnz(phi)/k + nnz(rho)/k``: average number of
    nonzero entries touched per row at each stage of the pipeline, so a
    slightly larger but much sparser ``phi`` can be cheaper.
``init_entropy_plus_sparsity``
    ``H(Y_0)`` under the initial distribution pushed through ``pi``, plus the
    per-step and prediction terms of ``sparsity``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import info
from .errors import ConfigurationError
from .model import COMP_KINDS, CompressionTriple, MarkovSystem, WeightSpec, weight_arrays


@dataclass(frozen=True)
class CompCostModel:
    kind: str = "cardinality"
    nnz_threshold: float = 1e-12

    def __post_init__(self):
        if self.kind not in COMP_KINDS:
            raise ConfigurationError(f"unknown computation model {self.kind!r}; use one of {COMP_KINDS}")
        if not self.nnz_threshold >= 0:
            raise ConfigurationError("nnz_threshold must be >= 0")


def expected_horizon(w: WeightSpec) -> float:
    ts, ws = weight_arrays(w)
    return float(ws @ ts)


def nnz(a, threshold: float = 1e-12) -> int:
    """Entries whose magnitude exceeds ``threshold``."""
    return int(np.count_nonzero(np.abs(a) > threshold))


def init_entropy(triple: CompressionTriple, initial) -> float:
    """H(Y_0) in bits for y_0 ~ initial @ pi."""
    return info.entropy(np.asarray(initial) @ triple.pi)


def computation_cost(model: CompCostModel, triple: CompressionTriple, w: WeightSpec,
                     sys: Optional[MarkovSystem] = None) -> float:
    """Cost of ``triple`` under ``model``; ``sys`` supplies the initial
    distribution and is only needed by ``init_entropy_plus_sparsity``."""
    if model.kind == "init_entropy_plus_sparsity" and sys is None:
        raise ConfigurationError("init_entropy_plus_sparsity needs the system's initial distribution")
    return cost_at_horizon(model, triple, expected_horizon(w), None if sys is None else sys.initial)


def cost_at_horizon(model: CompCostModel, triple: CompressionTriple, horizon: float, initial=None) -> float:
    k = triple.k
    if model.kind == "cardinality":
        return float(np.log2(k) * horizon)
    n = triple.pi.shape[0]
    thr = model.nnz_threshold
    step_and_readout = horizon * nnz(triple.phi, thr) / k + nnz(triple.rho, thr) / k
    if model.kind == "sparsity":
        return nnz(triple.pi, thr) / n + step_and_readout
    return init_entropy(triple, initial) + step_and_readout
