"""Entropy and mutual information of discrete distributions, in bits.

All functions use the convention ``0 * log 0 = 0`` and accept unnormalized
nonnegative arrays only where stated.
"""
import numpy as np


def entropy(p) -> float:
    """Shannon entropy of a probability vector (any shape, flattened)."""
    p = np.asarray(p, dtype=float).ravel()
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)))


def mutual_information(joint) -> float:
    """I(A;B) for a 2-d joint ``joint[a, b]``.

    Summed term by term rather than as ``H(A) + H(B) - H(A,B)`` so that
    product distributions give 0 up to rounding; tiny negative values from
    rounding are clipped.
    """
    joint = np.asarray(joint, dtype=float)
    pa = joint.sum(axis=1)
    pb = joint.sum(axis=0)
    a, b = np.nonzero(joint > 0)
    j = joint[a, b]
    # differences of logs stay finite for subnormal masses where ratios overflow
    mi = np.sum(j * (np.log2(j) - np.log2(pa[a]) - np.log2(pb[b])))
    return float(max(mi, 0.0))


def conditional_entropy(joint, given: int = 0) -> float:
    """H(B | A) when ``given=0`` (condition on rows), H(A | B) when ``given=1``."""
    joint = np.asarray(joint, dtype=float)
    if given == 1:
        joint = joint.T
    pa = joint.sum(axis=1)
    a, b = np.nonzero(joint > 0)
    j = joint[a, b]
    return float(np.sum(j * (np.log2(pa[a]) - np.log2(j))))


def conditional_mutual_information(joint) -> float:
    """I(A;B | C) for a 3-d joint ``joint[a, b, c]``."""
    joint = np.asarray(joint, dtype=float)
    pc = joint.sum(axis=(0, 1))
    pac = joint.sum(axis=1)
    pbc = joint.sum(axis=0)
    a, b, c = np.nonzero(joint > 0)
    j = joint[a, b, c]
    total = np.sum(j * (np.log2(j) + np.log2(pc[c]) - np.log2(pac[a, c]) - np.log2(pbc[b, c])))
    return float(max(total, 0.0))


def kl_divergence(p, q) -> float:
    """KL[p || q] in bits; ``inf`` when p has mass where q has none."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    mask = p > 0
    if np.any(q[mask] <= 0):
        return float("inf")
    return float(max(np.sum(p[mask] * (np.log2(p[mask]) - np.log2(q[mask]))), 0.0))
