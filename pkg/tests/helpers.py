"""Random instances and a brute-force trajectory oracle shared by the tests."""
from __future__ import annotations

import itertools
import math

import numpy as np

from ssc.model import CompressionTriple, MarkovSystem, Observable, WeightSpec


def stochastic(rng, rows, cols, sparsity=0.0):
    """Random row-stochastic matrix; each entry is zeroed with prob ``sparsity``
    but every row keeps at least one positive entry."""
    a = rng.dirichlet(np.ones(cols), size=rows)
    if sparsity > 0:
        mask = rng.random((rows, cols)) < sparsity
        mask[np.arange(rows), rng.integers(0, cols, rows)] = False
        a = np.where(mask, 0.0, a)
        a /= a.sum(axis=1, keepdims=True)
    return a


def random_weight(rng, horizon):
    if rng.random() < 0.5:
        return WeightSpec("uniform", horizon=horizon, include_t0=bool(rng.random() < 0.5))
    return WeightSpec("geometric", horizon=horizon, gamma=float(rng.uniform(0.1, 0.9)),
                      include_t0=bool(rng.random() < 0.5))


def random_instance(rng, n=(2, 4), m=(2, 3), k=(1, 3), horizon=(1, 3), sparsity=0.3):
    """(system, observable, triple, weight) with sizes drawn from the given
    inclusive ranges."""
    n_ = int(rng.integers(n[0], n[1] + 1))
    m_ = int(rng.integers(m[0], m[1] + 1))
    k_ = int(rng.integers(k[0], k[1] + 1))
    T = int(rng.integers(horizon[0], horizon[1] + 1))
    sys = MarkovSystem(stochastic(rng, n_, n_, sparsity), rng.dirichlet(np.ones(n_)))
    C = rng.uniform(0, 1, (m_, m_))
    np.fill_diagonal(C, 0.0)
    obs = Observable(stochastic(rng, n_, m_, sparsity), C)
    triple = CompressionTriple(stochastic(rng, n_, k_, sparsity), stochastic(rng, k_, k_, sparsity),
                               stochastic(rng, k_, m_, sparsity))
    return sys, obs, triple, random_weight(rng, T)


# -- oracle -----------------------------------------------------------------------
# Everything below uses plain Python floats and explicit path enumeration so it
# shares no code path with the library.


def _weights(w):
    t0 = 0 if w.include_t0 else 1
    ts = list(range(t0, w.horizon + 1))
    if w.kind == "uniform":
        raw = [1.0] * len(ts)
    else:
        raw = [(1 - w.gamma) ** t for t in ts]
    z = sum(raw)
    return [(t, v / z) for t, v in zip(ts, raw)]


def _path_prob(start, kernel, path):
    p = start
    for a, b in zip(path, path[1:]):
        p *= kernel[a][b]
    return p


def oracle_joints(sys, obs, triple, T):
    """joints[t][x0][(w', w)] = P(x0, W'_t = w', W_t = w), built by summing over
    every microstate path x0..xT and every macrostate path y0..yT."""
    P, p0, O = sys.transition.tolist(), sys.initial.tolist(), obs.channel.tolist()
    pi, phi, rho = triple.pi.tolist(), triple.phi.tolist(), triple.rho.tolist()
    n, m, k, mp = len(p0), len(O[0]), len(phi), len(rho[0])
    true_ = [[[0.0] * m for _ in range(n)] for _ in range(T + 1)]  # [t][x0][w]
    pred = [[[0.0] * mp for _ in range(n)] for _ in range(T + 1)]  # [t][x0][w']
    for xs in itertools.product(range(n), repeat=T + 1):
        for t in range(T + 1):
            pr = _path_prob(1.0, P, xs[: t + 1])
            if pr == 0.0:
                continue
            for w in range(m):
                true_[t][xs[0]][w] += pr * O[xs[t]][w] / n ** (T - t)
    for x0 in range(n):
        for ys in itertools.product(range(k), repeat=T + 1):
            for t in range(T + 1):
                pr = _path_prob(pi[x0][ys[0]], phi, ys[: t + 1])
                if pr == 0.0:
                    continue
                for w in range(mp):
                    pred[t][x0][w] += pr * rho[ys[t]][w] / k ** (T - t)
    joints = []
    for t in range(T + 1):
        per = []
        for x0 in range(n):
            per.append({(a, b): p0[x0] * pred[t][x0][a] * true_[t][x0][b]
                        for a in range(mp) for b in range(m)})
        joints.append(per)
    return joints, true_, pred


def _H(ps):
    return -sum(p * math.log2(p) for p in ps if p > 0)


def _mi(joint):
    ra, rb = {}, {}
    for (a, b), p in joint.items():
        ra[a] = ra.get(a, 0.0) + p
        rb[b] = rb.get(b, 0.0) + p
    return max(_H(ra.values()) + _H(rb.values()) - _H(joint.values()), 0.0)


def _cond_ent(joint):
    ra = {}
    for (a, _), p in joint.items():
        ra[a] = ra.get(a, 0.0) + p
    return _H(joint.values()) - _H(ra.values())


def _collapse(per_x0):
    out = {}
    for d in per_x0:
        for key, p in d.items():
            out[key] = out.get(key, 0.0) + p
    return out


def oracle_costs(sys, obs, triple, w):
    """Every accuracy cost by enumeration. Returns a dict keyed by kind."""
    ws = _weights(w)
    T = w.horizon
    joints, true_, pred = oracle_joints(sys, obs, triple, T)
    p0 = sys.initial.tolist()
    C = obs.cost_matrix.tolist() if obs.cost_matrix is not None else None
    out = {}
    if C is not None:
        exp_mean = exp_worst = 0.0
        for t, wt in ws:
            per = []
            for x0 in range(len(p0)):
                c = sum(p * C[b][a] for (a, b), p in joints[t][x0].items())
                per.append(c / p0[x0] if p0[x0] > 0 else None)
            exp_mean += wt * sum(p0[x] * per[x] for x in range(len(p0)) if per[x] is not None)
            exp_worst += wt * max(v for v in per if v is not None)
        out["expected"] = exp_mean
        out["expected_worst_case"] = exp_worst
    out["avg_mi"] = -sum(wt * _mi(_collapse(joints[t])) for t, wt in ws)
    avg = {}
    for t, wt in ws:
        for key, p in _collapse(joints[t]).items():
            avg[key] = avg.get(key, 0.0) + wt * p
    out["mi_of_avg"] = -_mi(avg)
    out["cond_entropy"] = _cond_ent(avg)
    kl = 0.0
    for t, wt in ws:
        for x0, px in enumerate(p0):
            if px == 0:
                continue
            r, q = pred[t][x0], true_[t][x0]
            for a in range(len(r)):
                if r[a] == 0:
                    continue
                if a >= len(q) or q[a] == 0:
                    kl = math.inf
                    break
                kl += wt * px * r[a] * math.log2(r[a] / q[a])
    out["kl"] = kl
    return out
