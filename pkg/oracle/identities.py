"""Closed-form identities behind the criticality argument and the partition-function bound"""
from typing import Sequence, Tuple
import math

from lattice.parameters import contact_log_base, critical_h, kappa
from utils.data_models import Parameters
from utils.errors import DomainError


def spike_energy(x: Sequence[int], k: int) -> int:
    return sum(abs(xi - k) for xi in x)


def verify_spike_identity(x: Sequence[int], beta: float) -> Tuple[float, float]:
    """
    Сумма по k ≤ 0 от exp(−β Σ|xᵢ − k|) против exp(h_w − β Σxᵢ)

    The left side sums k ∈ [−max(x), 0] term by term and adds the geometric tail
    below −max(x), where every |xᵢ − k| grows by one per unit step down.
    """
    x = tuple(int(v) for v in x)
    if len(x) != 4 or any(v < 0 for v in x):
        raise DomainError(f"x must be four nonnegative integers, got {x}")
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta}")

    depth = max(x)
    finite = [math.exp(-beta * spike_energy(x, k)) for k in range(-depth, 1)]
    tail = math.exp(-beta * spike_energy(x, -depth - 1)) / (-math.expm1(-4.0 * beta))
    lhs = math.fsum(finite + [tail])
    rhs = math.exp(critical_h(beta) - beta * sum(x))
    return lhs, rhs


def partition_upper_bound(params: Parameters) -> float:
    """e^{hN²}((1+e^{−2β})/(1−e^{−2β}))^{N²}"""
    sites = params.N * params.N
    per_site = math.log1p(math.exp(-2.0 * params.beta)) - math.log1p(-math.exp(-2.0 * params.beta))
    return math.exp(sites * (params.h + per_site))


def kappa_identity(params: Parameters) -> Tuple[float, float]:
    """(log of (e^{−h}+e^{−4β})^κ e^{−4β}, δ); both sides agree by definition of κ"""
    value = kappa(params)
    return value * contact_log_base(params.beta, params.h) - 4.0 * params.beta, params.delta


def critical_h_identity(beta: float) -> Tuple[float, float]:
    """(e^{−h_w}, 1 − e^{−4β})"""
    return math.exp(-critical_h(beta)), -math.expm1(-4.0 * beta)


def relative_gap(lhs: float, rhs: float) -> float:
    scale = max(abs(lhs), abs(rhs))
    return abs(lhs - rhs) / scale if scale > 0 else 0.0
