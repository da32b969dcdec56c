import math

import numpy as np
import pytest

from lattice.parameters import critical_h
from lattice.sos_model import level_counts_between, log_weight_array
from oracle.enumeration import (
    all_states,
    decode_states,
    encode_states,
    enumerate_partition_function,
    exact_distribution,
    exact_event_probability,
    exact_expectation,
    is_increasing_event,
    log_partition_function,
    per_field,
)
from oracle.identities import partition_upper_bound
from utils.data_models import CappedSpace, HeightField, Parameters
from utils.errors import BudgetExceededError


def zero_count(block):
    return (block == 0).sum(axis=(-2, -1))


def test_single_site_partition_function():
    params = Parameters(beta=1.0, h=0.5, N=1)
    Z = enumerate_partition_function(CappedSpace(N=1, cap=2), params)
    assert Z == pytest.approx(math.exp(0.5) + math.exp(-4) + math.exp(-8), rel=1e-14)


@pytest.mark.parametrize("h", [0.0, 0.3, 2.0])
def test_zero_cap_has_one_state(h):
    Z = enumerate_partition_function(CappedSpace(N=1, cap=0), Parameters(beta=1.3, h=h, N=1))
    assert Z == pytest.approx(math.exp(h))


@pytest.mark.parametrize("N, cap", [(1, 5), (2, 1), (2, 3), (3, 1)])
@pytest.mark.parametrize("beta, h", [(0.5, 0.0), (1.0, 0.2), (2.0, 1.0)])
def test_partition_function_below_closed_bound(N, cap, beta, h):
    params = Parameters(beta=beta, h=h, N=N)
    assert enumerate_partition_function(CappedSpace(N=N, cap=cap), params) <= partition_upper_bound(params)


def test_partition_function_chunking_and_threads(monkeypatch):
    params = Parameters(beta=0.7, h=0.4, N=2)
    space = CappedSpace(N=2, cap=4)
    reference = log_partition_function(space, params)
    monkeypatch.setattr("config.ORACLE_CHUNK", 37)
    assert log_partition_function(space, params, workers=3) == pytest.approx(reference, rel=1e-14)


def test_budget_is_enforced():
    space = CappedSpace(N=4, cap=3, budget=1000)
    with pytest.raises(BudgetExceededError) as info:
        enumerate_partition_function(space, Parameters(beta=1.0, N=4))
    assert info.value.size == 4 ** 16
    assert info.value.budget == 1000


def test_event_probability_basics():
    space = CappedSpace(N=2, cap=2)
    params = Parameters(beta=1.0, h=0.3, N=2)
    assert exact_event_probability(space, params, lambda b: np.ones(len(b), dtype=bool)) == pytest.approx(1.0)

    def has_zero(block):
        return zero_count(block) > 0

    p = exact_event_probability(space, params, has_zero)
    q = exact_event_probability(space, params, lambda b: ~has_zero(b))
    assert p + q == pytest.approx(1.0, abs=1e-12)


def test_all_zero_probability_on_sixteen_states():
    space = CappedSpace(N=2, cap=1)
    params = Parameters(beta=1.0, h=0.0, N=2)
    states = all_states(space)
    assert len(states) == 16
    Z = math.fsum(np.exp(log_weight_array(states, 1.0, 0.0)))
    flat_zero = exact_event_probability(space, params, lambda b: (b == 0).all(axis=(-2, -1)))
    assert flat_zero == pytest.approx(1.0 / Z, rel=1e-13)
    assert enumerate_partition_function(space, params) == pytest.approx(Z, rel=1e-13)


def test_expectations():
    space = CappedSpace(N=2, cap=2)
    params = Parameters(beta=1.0, h=0.2, N=2)
    assert exact_expectation(space, params, lambda b: np.ones(len(b))) == pytest.approx(1.0)
    f = zero_count
    g = lambda b: b.sum(axis=(-2, -1))  # noqa: E731
    total = exact_expectation(space, params, lambda b: f(b) + g(b))
    assert total == pytest.approx(exact_expectation(space, params, f) + exact_expectation(space, params, g), abs=1e-12)


def test_contact_grows_with_pinning(h_w):
    space = CappedSpace(N=2, cap=2)
    low = exact_expectation(space, Parameters(beta=1.0, h=0.0, N=2), zero_count)
    high = exact_expectation(space, Parameters(beta=1.0, h=0.5 * h_w, N=2), zero_count)
    assert high >= low


def test_exact_distribution_is_normalised_weight():
    space = CappedSpace(N=2, cap=2)
    params = Parameters(beta=0.8, h=0.1, N=2)
    pi = exact_distribution(space, params)
    assert pi.sum() == pytest.approx(1.0)
    Z = enumerate_partition_function(space, params)
    weights = np.exp(log_weight_array(all_states(space), 0.8, 0.1))
    np.testing.assert_allclose(pi, weights / Z, rtol=1e-12)


def test_state_codes_follow_row_major_order():
    states = decode_states(np.array([0, 1, 3, 8]), N=2, base=3)
    assert states[1].tolist() == [[0, 0], [0, 1]]
    assert states[2].tolist() == [[0, 0], [1, 0]]
    assert states[3].tolist() == [[0, 0], [2, 2]]
    np.testing.assert_array_equal(encode_states(states, 3), [0, 1, 3, 8])


def test_per_field_adapter():
    space = CappedSpace(N=2, cap=1)
    params = Parameters(beta=1.0, h=critical_h(1.0), N=2)
    batched = exact_event_probability(space, params, lambda b: zero_count(b) >= 2)
    scalar = exact_event_probability(space, params, per_field(lambda f: int((f.heights == 0).sum()) >= 2))
    assert batched == pytest.approx(scalar, rel=1e-14)
    assert per_field(lambda f: f.N)(np.zeros((3, 2, 2), dtype=int)).tolist() == [2, 2, 2]
    assert isinstance(HeightField.constant(2), HeightField)


def test_is_increasing_event():
    space = CappedSpace(N=2, cap=2)
    assert is_increasing_event(space, lambda b: level_counts_between(b, 2, 2) >= 1)
    assert not is_increasing_event(space, lambda b: zero_count(b) >= 1)


def test_increasing_event_monotone_in_h(h_w):
    space = CappedSpace(N=2, cap=2)

    def raised(block):
        return level_counts_between(block, 1, 2) >= 3

    probabilities = [
        exact_event_probability(space, Parameters(beta=1.0, h=h, N=2), raised)
        for h in (0.0, 0.25 * h_w, 0.5 * h_w, h_w, 2.0)
    ]
    assert all(b <= a for a, b in zip(probabilities, probabilities[1:]))
