"""Named benchmark systems.

======  ==========================================================
SWAP2   two frozen states; emulator swaps them every step
IID4    four states redrawn uniformly at every step
LUMP4   four states, strongly lumpable into blocks {0,1} and {2,3}
CYL     piston at 10 heights x 5 gas configurations, slides down
RING8   lazy clockwise-biased walk on 8 sites, observed as 4 arcs
======  ==========================================================
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigurationError
from .model import CompressionTriple, MarkovSystem, Observable, WeightSpec
from .optimize import Partition, induced_triple

NAMES = ("SWAP2", "IID4", "LUMP4", "CYL", "RING8")

LUMP4_P = np.array([
    [0.1, 0.2, 0.3, 0.4],
    [0.3, 0.0, 0.5, 0.2],
    [0.25, 0.25, 0.25, 0.25],
    [0.4, 0.1, 0.2, 0.3],
])
LUMP4_BLOCKS = [[0, 1], [2, 3]]

CYL_POSITIONS = 10
CYL_NUISANCE = 5

RING_SITES = 8
RING_ARCS = 4
RING_MOVES = {0: 0.2, 1: 0.6, -1: 0.2}  # stay, clockwise, counter-clockwise


@dataclass(frozen=True, eq=False)
class Example:
    name: str
    system: MarkovSystem
    observable: Observable
    weight: WeightSpec
    reference: Optional[CompressionTriple] = None
    partition: Optional[Partition] = None


def _swap2():
    sys = MarkovSystem(np.eye(2), [0.5, 0.5])
    obs = Observable(np.eye(2), 1.0 - np.eye(2))
    w = WeightSpec("uniform", horizon=1, include_t0=True)
    ref = CompressionTriple(np.eye(2), [[0.0, 1.0], [1.0, 0.0]], np.eye(2))
    return Example("SWAP2", sys, obs, w, ref)


def _iid4():
    sys = MarkovSystem(np.full((4, 4), 0.25), np.full(4, 0.25))
    obs = Observable(np.eye(4), 1.0 - np.eye(4))
    w = WeightSpec("uniform", horizon=1)
    ref = CompressionTriple(np.ones((4, 1)), [[1.0]], np.full((1, 4), 0.25))
    return Example("IID4", sys, obs, w, ref, Partition((0, 0, 0, 0)))


def _lump4():
    sys = MarkovSystem(LUMP4_P, np.full(4, 0.25))
    part = Partition.from_blocks(LUMP4_BLOCKS)
    obs = Observable(part.indicator(), 1.0 - np.eye(2))
    w = WeightSpec("uniform", horizon=5, include_t0=True)
    ref = induced_triple(part, sys, obs, w)
    return Example("LUMP4", sys, obs, w, ref, part)


def _cyl():
    nz, ng = CYL_POSITIONS, CYL_NUISANCE
    down = np.zeros((nz, nz))
    for z in range(nz):
        down[z, max(z - 1, 0)] = 1.0
    P = np.kron(down, np.full((ng, ng), 1.0 / ng))  # state index = z * ng + g
    p0 = np.zeros(nz * ng)
    p0[(nz - 1) * ng:] = 1.0 / ng
    project = np.kron(np.eye(nz), np.ones((ng, 1)))
    z = np.arange(nz)
    obs = Observable(project, np.abs(z[:, None] - z[None, :]).astype(float))
    w = WeightSpec("uniform", horizon=20)
    ref = CompressionTriple(project, down, np.eye(nz))
    part = Partition(tuple(np.repeat(np.arange(nz), ng)))
    return Example("CYL", MarkovSystem(P, p0), obs, w, ref, part)


def _ring8():
    n, arcs = RING_SITES, RING_ARCS
    P = np.zeros((n, n))
    for x in range(n):
        for step, p in RING_MOVES.items():
            P[x, (x + step) % n] += p
    width = n // arcs
    part = Partition(tuple(x // width for x in range(n)))
    a = np.arange(arcs)
    gap = np.abs(a[:, None] - a[None, :])
    obs = Observable(part.indicator(), np.minimum(gap, arcs - gap).astype(float))
    sys = MarkovSystem(P, np.full(n, 1.0 / n))
    # short discounted horizon that still scores t=0: under the expected cost
    # with least-cost predictions, sweeping alpha walks through 1, 2, 4, 8 blocks
    w = WeightSpec("geometric", horizon=2, gamma=0.5, include_t0=True)
    return Example("RING8", sys, obs, w, induced_triple(part, sys, obs, w), part)


_BUILDERS = {"SWAP2": _swap2, "IID4": _iid4, "LUMP4": _lump4, "CYL": _cyl, "RING8": _ring8}


def build_example(name: str) -> Example:
    try:
        return _BUILDERS[name.upper()]()
    except KeyError:
        raise ConfigurationError(f"unknown example {name!r}; choose from {NAMES}") from None
