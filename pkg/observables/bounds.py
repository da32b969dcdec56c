"""
Правые части вероятностных оценок, печатаемые рядом с эмпирическими частотами.

Values are clipped to [0, 1]; an exponent ≥ 0 makes the bound trivial. They are
reported, never asserted against Monte Carlo frequencies.
"""
import math

from lattice.parameters import kappa, typical_heights
from utils.data_models import Parameters


def _probability(log_value: float) -> float:
    return 1.0 if log_value >= 0 else math.exp(log_value)


def downward_bound(params: Parameters, m: int) -> float:
    """3·exp(−min(½e^{2βm} − 4β(1+κ), δ)·N), h < h_w"""
    rate = min(0.5 * math.exp(2 * params.beta * m) - 4 * params.beta * (1 + kappa(params)), params.delta)
    return min(1.0, 3.0 * _probability(-rate * params.N))


def contact_bound(params: Parameters) -> float:
    """P(|φ⁻¹(0)| ≥ κN) ≤ e^{−δN}"""
    return _probability(-params.delta * params.N)


def non_isolated_bound(params: Parameters, C: float) -> float:
    """P(|q₂₊| ≥ CN) ≤ exp(−N(C/20·e^{−6β} − 4β)) at h = h_w"""
    return _probability(-params.N * (C / 20.0 * math.exp(-6 * params.beta) - 4 * params.beta))


def critical_downward_bound(params: Parameters, m: int, C: float) -> float:
    """2·exp(4βN + 4βCN^{4/3} − ½e^{2βm}N^{4/3}) at h = h_w"""
    n43 = params.N ** (4.0 / 3.0)
    exponent = 4 * params.beta * params.N + 4 * params.beta * C * n43 - 0.5 * math.exp(2 * params.beta * m) * n43
    return min(1.0, 2.0 * _probability(exponent))


def isolated_zero_prediction(params: Parameters) -> float:
    """Heuristic mean of |q₁| at criticality: N²e^{−4βH_w}"""
    _, H_w = typical_heights(params)
    return params.N ** 2 * math.exp(-4 * params.beta * H_w)
