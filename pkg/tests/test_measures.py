import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import random_instance, stochastic
from ssc.accuracy import avg_mi_cost, mi_per_time
from ssc.computation import CompCostModel
from ssc.corpus import build_example
from ssc.errors import ConfigurationError, DegenerateBaselineError
from ssc.measures import (
    compression_complexity,
    info_flow_cond_ent,
    info_flow_mi,
    normalized_improvement,
    recompression_conditional_mi,
    ssc_net_transfer_entropy,
)
from ssc.model import (
    CompressionTriple,
    MarkovSystem,
    ObjectiveConfig,
    Observable,
    WeightSpec,
    identity_triple,
    singleton_triple,
)

CARD = CompCostModel("cardinality")


@pytest.mark.parametrize("kappa, alpha", [(1.0, 1.0), (0.2, 1.0), (3.0, 0.5)])
def test_iid4_complexity_closed_form(kappa, alpha):
    ex = build_example("IID4")
    cx = compression_complexity(ex.system, ex.observable, ex.weight,
                                ObjectiveConfig("cond_entropy", kappa=kappa, alpha=alpha), CARD, None)
    # identity: accuracy 2 bits, computation log2(4) * E[t] with E[t] = 1
    assert cx.value == pytest.approx(alpha * 2 / (alpha * 2 + kappa * 2 * 1), abs=1e-12)
    assert cx.best.best_partition.k == 1 and cx.search_class == "induced_partitions"


def test_unnormalized_complexity_is_min_k():
    ex = build_example("IID4")
    cx = compression_complexity(ex.system, ex.observable, ex.weight, ObjectiveConfig("cond_entropy"), CARD, None,
                                normalized=False)
    assert cx.value == pytest.approx(2.0) and not cx.normalized


def test_cylinder_more_compressible_than_iid():
    cfg = ObjectiveConfig("expected", kappa=0.1, alpha=1.0)
    iid = build_example("IID4")
    cyl = build_example("CYL")
    c_iid = compression_complexity(iid.system, iid.observable, iid.weight, cfg, CARD, None).value
    # CYL has 50 states, far past exhaustive range; the z-partition is known
    k_id = normalized_improvement(cyl.system, cyl.observable, cyl.weight, cfg, CARD, cyl.reference)
    assert 1 + k_id < c_iid


def test_complexity_of_zero_baseline_is_one():
    sys = MarkovSystem([[0.0, 1.0], [1.0, 0.0]], [0.5, 0.5])
    obs = Observable(np.eye(2))
    cx = compression_complexity(sys, obs, WeightSpec("uniform", horizon=2),
                                ObjectiveConfig("cond_entropy", kappa=0.0, alpha=1.0), CARD, None)
    assert cx.value == 1.0 and cx.identity_K == 0.0


def test_signed_costs_are_rejected():
    ex = build_example("IID4")
    for cfg in (ObjectiveConfig("avg_mi"), ObjectiveConfig("mi_of_avg"), ObjectiveConfig("kl", kl_negate=True)):
        with pytest.raises(ConfigurationError):
            compression_complexity(ex.system, ex.observable, ex.weight, cfg, CARD, None)


def test_normalized_improvement():
    ex = build_example("IID4")
    cfg = ObjectiveConfig("cond_entropy", kappa=1000.0, alpha=1.0)
    ident = identity_triple(ex.system, ex.observable)
    assert normalized_improvement(ex.system, ex.observable, ex.weight, cfg, CARD, ident) == 0.0
    single = singleton_triple(ex.system, ex.observable)
    assert normalized_improvement(ex.system, ex.observable, ex.weight, cfg, CARD, single) < -0.99
    worse = CompressionTriple(np.eye(4), np.eye(4), np.eye(4))
    assert normalized_improvement(ex.system, ex.observable, ex.weight, ObjectiveConfig("kl"), CARD, worse) > 0


def test_degenerate_baseline():
    sys = MarkovSystem([[0.0, 1.0], [1.0, 0.0]], [0.5, 0.5])
    obs = Observable(np.eye(2))
    with pytest.raises(DegenerateBaselineError):
        normalized_improvement(sys, obs, WeightSpec("uniform", horizon=1),
                               ObjectiveConfig("cond_entropy", kappa=0.0), CARD, identity_triple(sys, obs))


def test_info_flow_examples():
    swap = build_example("SWAP2")
    at1 = WeightSpec("uniform", horizon=1)
    assert info_flow_cond_ent(swap.system, swap.observable, swap.reference, at1) == pytest.approx(0.0, abs=1e-12)
    iid = build_example("IID4")
    ident = identity_triple(iid.system, iid.observable)
    assert info_flow_cond_ent(iid.system, iid.observable, ident, at1) == pytest.approx(-2.0)
    with pytest.raises(ConfigurationError):
        info_flow_cond_ent(iid.system, iid.observable, ident, WeightSpec("uniform", horizon=0, include_t0=True))
    assert info_flow_mi(swap.system, swap.observable, swap.reference, swap.weight) == pytest.approx(-1.0)


def test_info_flow_mi_is_avg_mi_exactly():
    rng = np.random.default_rng(3)
    for _ in range(20):
        sys, obs, tri, w = random_instance(rng)
        assert info_flow_mi(sys, obs, tri, w) == avg_mi_cost(sys, obs, tri, w)


def test_info_flow_single_support_is_minus_mi():
    ex = build_example("LUMP4")
    w = WeightSpec("uniform", horizon=3)
    single = WeightSpec("geometric", horizon=1, gamma=0.5)
    assert info_flow_mi(ex.system, ex.observable, ex.reference, single) == pytest.approx(
        -mi_per_time(ex.system, ex.observable, ex.reference, 1))
    assert info_flow_cond_ent(ex.system, ex.observable, ex.reference, w, lag=1) <= 0


def test_recompression_examples():
    lump = build_example("LUMP4")
    block_pi = lump.partition.indicator()
    assert recompression_conditional_mi(lump.system, block_pi, 1) < 1e-12
    perm = MarkovSystem(np.eye(3)[[1, 2, 0]], [0.2, 0.3, 0.5])
    assert recompression_conditional_mi(perm, np.eye(3), 2) < 1e-12
    with pytest.raises(ConfigurationError):
        recompression_conditional_mi(perm, np.eye(3), 0)


def test_recompression_is_positive_for_a_leaky_partition():
    lump = build_example("LUMP4")
    bad = np.eye(2)[[0, 1, 0, 1]]
    assert recompression_conditional_mi(lump.system, bad, 1) > 1e-3


def test_noise_pi_with_drifting_macro_marginal():
    # noise pi still scores 0 under the conditional-MI criterion, but when the
    # macro chain is not stationary from the uniform start the time-averaged
    # joint is a mixture of products and H(W | W') dips below H(W)
    from ssc import info
    from ssc.accuracy import cond_entropy_cost
    from ssc.propagation import time_averaged_joint

    sys = MarkovSystem([[0.5, 0.5], [0.1, 0.9]], [1.0, 0.0])
    obs = Observable(np.eye(2))
    noise = CompressionTriple(np.full((2, 2), 0.5), [[1.0, 0.0], [1.0, 0.0]], np.eye(2))
    w = WeightSpec("uniform", horizon=2, include_t0=True)
    h = info.entropy(time_averaged_joint(sys, obs, noise, w).true_marginal)
    assert recompression_conditional_mi(sys, noise.pi, 1) < 1e-12
    assert cond_entropy_cost(sys, obs, noise, w) < h - 1e-3


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_transfer_entropy_vanishes(seed):
    rng = np.random.default_rng(seed)
    sys, _, tri, _ = random_instance(rng, n=(2, 6), k=(1, 4))
    for t in range(4):
        assert ssc_net_transfer_entropy(sys, tri, t) <= 1e-10


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), kind=st.sampled_from(["cond_entropy", "expected", "kl"]))
def test_complexity_in_unit_interval(seed, kind):
    rng = np.random.default_rng(seed)
    n, m = int(rng.integers(2, 6)), int(rng.integers(2, 4))
    sys = MarkovSystem(stochastic(rng, n, n, 0.3), rng.dirichlet(np.ones(n)))
    C = 1 - np.eye(m)
    obs = Observable(stochastic(rng, n, m, 0.3), C)
    cfg = ObjectiveConfig(kind, kappa=float(rng.uniform(0.1, 2)), alpha=1.0, kl_smoothing=1e-12)
    cx = compression_complexity(sys, obs, WeightSpec("uniform", horizon=2), cfg, CARD, None)
    assert 0.0 <= cx.value <= 1.0 + 1e-12


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_recompression_noise_is_zero(seed):
    rng = np.random.default_rng(seed)
    n, k = int(rng.integers(2, 6)), int(rng.integers(1, 4))
    sys = MarkovSystem(stochastic(rng, n, n, 0.3), rng.dirichlet(np.ones(n)))
    for t in (1, 2, 3):
        assert recompression_conditional_mi(sys, np.full((n, k), 1 / k), t) <= 1e-10
