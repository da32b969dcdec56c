from itertools import product
import math

import pytest

from lattice.parameters import critical_h
from oracle.identities import partition_upper_bound, relative_gap, spike_energy, verify_spike_identity
from utils.data_models import Parameters
from utils.errors import DomainError


def test_spike_identity_flat_neighbours():
    lhs, rhs = verify_spike_identity((0, 0, 0, 0), 1.0)
    assert lhs == pytest.approx(1.0 / (1.0 - math.exp(-4.0)), rel=1e-14)
    assert rhs == pytest.approx(math.exp(critical_h(1.0)), rel=1e-14)


def test_spike_identity_unit_neighbours():
    lhs, rhs = verify_spike_identity((1, 1, 1, 1), 1.0)
    assert rhs == pytest.approx(math.exp(critical_h(1.0) - 4.0), rel=1e-14)
    assert relative_gap(lhs, rhs) <= 1e-10


@pytest.mark.parametrize("beta", [1.0, 1.5, 2.0, 3.0])
def test_spike_identity_grid(beta):
    worst = max(relative_gap(*verify_spike_identity(x, beta)) for x in product(range(6), repeat=4))
    assert worst <= 1e-10


def test_spike_rhs_scaling():
    _, base = verify_spike_identity((2, 0, 1, 3), 1.5)
    _, raised = verify_spike_identity((3, 0, 1, 3), 1.5)
    assert base / raised == pytest.approx(math.exp(1.5), rel=1e-12)


def test_spike_identity_rejects_bad_input():
    with pytest.raises(DomainError):
        verify_spike_identity((0, -1, 0, 0), 1.0)
    with pytest.raises(DomainError):
        verify_spike_identity((0, 0, 0), 1.0)
    with pytest.raises(DomainError):
        verify_spike_identity((0, 0, 0, 0), 0.0)


def test_spike_energy():
    assert spike_energy((1, 2, 3, 4), 0) == 10
    assert spike_energy((1, 2, 3, 4), -2) == 18


def test_partition_upper_bound_formula():
    params = Parameters(beta=1.0, h=0.25, N=3)
    per_site = (1 + math.exp(-2.0)) / (1 - math.exp(-2.0))
    assert partition_upper_bound(params) == pytest.approx(math.exp(0.25 * 9) * per_site ** 9, rel=1e-12)


def test_relative_gap():
    assert relative_gap(0.0, 0.0) == 0.0
    assert relative_gap(1.0, 2.0) == pytest.approx(0.5)
