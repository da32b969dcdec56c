import math

import pytest

from lattice.parameters import critical_h, critical_h_bounds, default_cap, kappa, typical_heights
from oracle.identities import critical_h_identity, kappa_identity
from utils.data_models import Parameters
from utils.errors import DomainError


def test_critical_h_at_beta_one():
    assert critical_h(1.0) == pytest.approx(-math.log(1 - math.exp(-4.0)), rel=1e-14)
    assert critical_h(1.0) == pytest.approx(0.0184845, rel=1e-5)


def test_critical_h_decreases_in_beta():
    values = [critical_h(b) for b in (0.5, 1.0, 1.5, 2.0, 3.0, 10.0)]
    assert all(b < a for a, b in zip(values, values[1:]))
    assert critical_h(50.0) > 0


@pytest.mark.parametrize("beta", [1.0, 1.5, 2.0, 3.0])
def test_critical_h_identity(beta):
    lhs, rhs = critical_h_identity(beta)
    assert lhs == pytest.approx(rhs, rel=1e-14)


@pytest.mark.parametrize("beta", [0.0, -1.0])
def test_critical_h_rejects_nonpositive_beta(beta):
    with pytest.raises(DomainError):
        critical_h(beta)


@pytest.mark.parametrize("beta", [0.1, 1.0, 4.0])
def test_critical_h_bounds(beta):
    lower, upper = critical_h_bounds(beta)
    assert lower <= critical_h(beta) <= upper
    assert upper == pytest.approx(math.log(16 * (math.exp(4 * beta) + 1) / (math.exp(4 * beta) - 1)))


def test_kappa_at_zero_pinning():
    params = Parameters(beta=1.0, h=0.0, N=10, delta=1.0)
    assert kappa(params) == pytest.approx(5.0 / math.log(1 + math.exp(-4.0)), rel=1e-12)


@pytest.mark.parametrize("fraction", [0.0, 0.3, 0.9, 0.999])
@pytest.mark.parametrize("delta", [0.5, 1.0, 2.0])
def test_kappa_defining_identity(h_w, fraction, delta):
    params = Parameters(beta=1.0, h=fraction * h_w, N=4, delta=delta)
    lhs, rhs = kappa_identity(params)
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_kappa_blows_up_toward_h_w(h_w):
    values = [kappa(Parameters(beta=1.0, h=f * h_w, N=4)) for f in (0.0, 0.5, 0.9, 0.99, 0.999)]
    assert all(b > a for a, b in zip(values, values[1:]))
    with pytest.raises(DomainError):
        kappa(Parameters(beta=1.0, h=h_w, N=4))


@pytest.mark.parametrize(
    "N, expected",
    [(1, (0, 0)), (54, (0, 0)), (55, (1, 0)), (404, (1, 1)), (10**6, (3, 2))],
)
def test_typical_heights(N, expected):
    assert typical_heights(Parameters(beta=1.0, N=N)) == expected


def test_typical_height_ordering():
    for N in range(1, 2000, 37):
        H, H_w = typical_heights(Parameters(beta=0.3, N=N))
        assert H_w <= H


def test_default_cap():
    assert default_cap(16, 1.0) == math.ceil(math.log(16) / 2) + 8
    assert default_cap(1, 1.0) == 8


def test_parameters_validation():
    with pytest.raises(ValueError):
        Parameters(beta=0.0, N=2)
    with pytest.raises(ValueError):
        Parameters(beta=1.0, h=-0.1, N=2)
    with pytest.raises(ValueError):
        Parameters(beta=1.0, N=0)
    assert Parameters(beta=1.0, N=2).with_h(0.5).h == 0.5
