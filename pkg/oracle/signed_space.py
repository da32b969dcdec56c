"""
Пространство Ω*_N (отрицательные высоты только в изолированных узлах) и
проверка того, что его мера при h = h_w маргинализуется в ℙ_N^{β,h_w}.
"""
import logging
import math
from typing import List

import numpy as np

from lattice.parameters import critical_h
from lattice.sos_model import hamiltonian_array, zero_masks
from oracle.enumeration import decode_states, encode_states, exact_distribution
from utils.data_models import CappedSpace, Parameters, SignedDistribution
from utils.errors import BudgetExceededError, DomainError
import config

logger = logging.getLogger(__name__)


def isolation_mask(heights: np.ndarray) -> np.ndarray:
    """True for every field of the stack that belongs to Ω*_N"""
    heights = np.asarray(heights)
    negative = heights <= -1
    pad = [(0, 0)] * (heights.ndim - 2) + [(1, 1), (1, 1)]
    padded = np.pad(heights, pad, constant_values=1)
    bad = np.zeros_like(negative)
    for shifted in (padded[..., :-2, 1:-1], padded[..., 2:, 1:-1], padded[..., 1:-1, :-2], padded[..., 1:-1, 2:]):
        bad |= negative & (shifted < 1)
    return ~bad.any(axis=(-2, -1))


def signed_log_weight_array(heights: np.ndarray, beta: float, h: float) -> np.ndarray:
    """−βℋ(ψ) + h|q₂₊(ψ)|; isolated zeros receive no reward"""
    _, non_isolated = zero_masks(heights)
    return -beta * hamiltonian_array(heights) + h * non_isolated.sum(axis=(-2, -1))


def signed_states(space: CappedSpace) -> np.ndarray:
    """Every ψ ∈ Ω*_N with heights in [−D, M], in code order"""
    if space.size > space.budget:
        raise BudgetExceededError(space.size, space.budget)
    base = space.levels
    total = base ** space.site_count
    kept: List[np.ndarray] = []
    for start in range(0, total, config.ORACLE_CHUNK):
        stop = min(start + config.ORACLE_CHUNK, total)
        block = decode_states(np.arange(start, stop, dtype=np.int64), space.N, base, offset=space.depth)
        kept.append(block[isolation_mask(block)])
    return np.concatenate(kept)


def enumerate_signed_space(space: CappedSpace, params: Parameters) -> SignedDistribution:
    """
    Перебор ψ ∈ Ω*_N с высотами в [−D, M]

    Raises:
        BudgetExceededError: если (M+D+1)^{N²} больше бюджета
        DomainError: если h ≠ h_w(β)
    """
    h_w = critical_h(params.beta)
    if not math.isclose(params.h, h_w, rel_tol=1e-12, abs_tol=0.0):
        raise DomainError(f"the signed measure is defined at h = h_w = {h_w}, got h = {params.h}")
    states = signed_states(space)
    logger.debug("signed space N=%d M=%d D=%d: %d states", space.N, space.cap, space.depth, len(states))
    return SignedDistribution(
        space=space,
        states=states,
        log_weights=signed_log_weight_array(states, params.beta, h_w),
    )


def marginal_on_nonnegative(distribution: SignedDistribution) -> np.ndarray:
    """ψ ↦ max(ψ, 0) pushed to the capped Ω_N, indexed by its state code"""
    space = distribution.space
    base = space.cap + 1
    codes = encode_states(np.maximum(distribution.states, 0), base)
    return np.bincount(codes, weights=distribution.probabilities, minlength=base ** space.site_count)


def verify_marginalization(N: int, M: int, D: int, beta: float) -> float:
    """
    max_φ |ℙ_N^{β,h_w}(φ) − P̃_N({ψ : max(ψ,0) = φ})| на глубине усечения D

    The discrepancy vanishes as D → ∞; at finite D each isolated zero misses a
    relative mass of at most e^{−4β(D+1)}/(1 − e^{−4β}).
    """
    params = Parameters(beta=beta, h=critical_h(beta), N=N)
    signed = enumerate_signed_space(CappedSpace(N=N, cap=M, depth=D), params)
    target = exact_distribution(CappedSpace(N=N, cap=M), params)
    return float(np.abs(marginal_on_nonnegative(signed) - target).max())


def marginalization_tail_bound(beta: float, depth: int) -> float:
    return math.exp(-4.0 * beta * (depth + 1)) / -math.expm1(-4.0 * beta)
