import numpy as np
import pytest

from sampler.chain import init_chain, make_rng
from sampler.coupling import (
    _cdf,
    advance_coupled,
    coupled_sweep,
    holley_ordering_check,
    init_coupled_pair,
    neighbor_multisets,
)
from utils.data_models import CoupledPair, Parameters
from utils.errors import OrderingViolationError


def test_equal_pinning_keeps_chains_identical():
    params = Parameters(beta=0.6, h=0.3, N=8)
    pair = init_coupled_pair(params, 0.3, seed=4)
    advance_coupled(pair, 60)
    np.testing.assert_array_equal(pair.lower_h_chain.heights, pair.higher_h_chain.heights)
    assert pair.sweep_count == 60


def test_ordering_survives_coupled_sweeps(h_w):
    params = Parameters(beta=1.0, h=0.0, N=8)
    pair = init_coupled_pair(params, h_w, cap=6, seed=7)
    for _ in range(200):
        coupled_sweep(pair)
        assert (pair.higher_h_chain.heights <= pair.lower_h_chain.heights).all()
    assert pair.lower_h_chain.sweep_count == pair.higher_h_chain.sweep_count == 200


def test_ordered_initial_fields_stay_ordered():
    params = Parameters(beta=0.4, h=0.0, N=5)
    lower = np.full((5, 5), 6)
    higher = np.zeros((5, 5), dtype=int)
    pair = init_coupled_pair(params, 2.0, cap=10, seed=1, lower_initial=lower, higher_initial=higher)
    advance_coupled(pair, 100)
    assert (pair.higher_h_chain.heights <= pair.lower_h_chain.heights).all()


def test_pair_validation():
    params = Parameters(beta=1.0, h=0.5, N=3)
    with pytest.raises(ValueError):
        init_coupled_pair(params, 0.1)
    with pytest.raises(ValueError):
        init_coupled_pair(
            params, 1.0, cap=4,
            lower_initial=np.zeros((3, 3), dtype=int), higher_initial=np.ones((3, 3), dtype=int),
        )


def test_reversed_pinning_reports_violation():
    # strong pinning on the dominating chain breaks the order almost at once
    params = Parameters(beta=0.2, h=5.0, N=4)
    lower = init_chain(params, cap=12, seed=0)
    higher = init_chain(params.with_h(0.0), cap=12, seed=0)
    pair = CoupledPair(lower_h_chain=lower, higher_h_chain=higher, seed=0, rng=make_rng(0))
    with pytest.raises(OrderingViolationError) as info:
        advance_coupled(pair, 100)
    error = info.value
    assert 1 <= error.site[0] <= 4 and 1 <= error.site[1] <= 4
    assert error.h_pair == (5.0, 0.0)
    assert len(error.lower_h_neighbors) == 4
    assert error.sweep >= 1


def test_neighbor_multisets():
    tuples = neighbor_multisets(3)
    assert len(tuples) == 35
    assert all(list(t) == sorted(t) for t in tuples)


def test_holley_ordering_has_no_violations(h_w):
    grid = [f * h_w for f in (0.0, 0.25, 0.5, 0.75, 1.0)] + [2.0]
    checked, violations = holley_ordering_check(1.0, grid, caps=(3, 8))
    assert checked > 0
    assert violations == []


def test_cdf_drops_when_neighbours_rise():
    # raising the neighbours pushes the conditional law up
    low, high = _cdf((0, 0, 0, 0), 1.0, 0.0, 5), _cdf((3, 3, 3, 3), 1.0, 0.0, 5)
    assert (low - high > 0).any()
    assert (high - low <= 1e-12).all()
