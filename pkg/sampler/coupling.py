"""
Монотонная связка двух цепей (h₁ ≤ h₂) и численная проверка условия Холли.

Both chains read the same uniform at every site update; with inverse-CDF
sampling the pointwise order higher_h ≤ lower_h survives each update exactly
when the conditional CDFs are ordered, which holley_ordering_check verifies
over a finite grid of neighbour tuples and pinning values.
"""
from itertools import combinations_with_replacement
from typing import Iterable, List, Optional, Sequence, Tuple
import logging

import numpy as np

from sampler.chain import init_chain, make_rng, block_size
from sampler.kernels import color_classes, conditional_cdf, coupled_sweep_block
from utils.data_models import CoupledPair, Parameters
from utils.errors import OrderingViolationError

logger = logging.getLogger(__name__)

CDF_TOLERANCE = 1e-12


def init_coupled_pair(
    params: Parameters,
    higher_h: float,
    cap: Optional[int] = None,
    seed: int = 0,
    lower_initial: Optional[np.ndarray] = None,
    higher_initial: Optional[np.ndarray] = None,
) -> CoupledPair:
    """
    Пара цепей: params.h = h₁ для доминирующей цепи, higher_h = h₂ ≥ h₁

    Both chains start from φ ≡ 0 unless explicit, ordered fields are given.
    """
    if higher_h < params.h:
        raise ValueError(f"need h1 <= h2, got h1={params.h}, h2={higher_h}")
    lower = init_chain(params, cap=cap, seed=seed, heights=lower_initial)
    higher = init_chain(params.with_h(higher_h), cap=lower.cap, seed=seed, heights=higher_initial)
    if (higher.heights > lower.heights).any():
        raise ValueError("initial fields must satisfy higher_h field <= lower_h field pointwise")
    return CoupledPair(lower_h_chain=lower, higher_h_chain=higher, seed=seed, rng=make_rng(seed))


def _neighbors(heights: np.ndarray, row: int, col: int) -> Tuple[int, int, int, int]:
    padded = np.pad(heights, 1)
    r, c = row + 1, col + 1
    return (int(padded[r - 1, c]), int(padded[r + 1, c]), int(padded[r, c - 1]), int(padded[r, c + 1]))


def advance_coupled(pair: CoupledPair, sweeps: int) -> CoupledPair:
    """
    Runs `sweeps` coupled sweeps in place

    Raises:
        OrderingViolationError: если после обновления узла higher_h > lower_h
    """
    lower, higher = pair.lower_h_chain, pair.higher_h_chain
    N = lower.params.N
    black, white = color_classes(N)
    hits = np.zeros(2, dtype=np.int64)
    remaining = sweeps
    while remaining > 0:
        count = min(remaining, block_size(N))
        uniforms = pair.rng.random((count, N * N))
        sweep, site = coupled_sweep_block(
            lower.heights, higher.heights, uniforms, black, white,
            lower.params.beta, lower.params.h, higher.params.h, lower.cap, hits,
        )
        lower.cap_hit_count += int(hits[0])
        higher.cap_hit_count += int(hits[1])
        hits[:] = 0
        if sweep >= 0:
            row, col = divmod(int(site), N)
            raise OrderingViolationError(
                site=(row + 1, col + 1),
                lower_h_neighbors=_neighbors(lower.heights, row, col),
                higher_h_neighbors=_neighbors(higher.heights, row, col),
                h_pair=(lower.params.h, higher.params.h),
                sweep=pair.sweep_count + int(sweep) + 1,
            )
        for chain in (lower, higher):
            chain.update_count += count * N * N
            chain.sweep_count += count
        pair.sweep_count += count
        remaining -= count
    return pair


def coupled_sweep(pair: CoupledPair) -> CoupledPair:
    return advance_coupled(pair, 1)


def neighbor_multisets(max_height: int = 3) -> List[Tuple[int, ...]]:
    """Sorted 4-tuples over [0, max_height]; 35 of them for max_height = 3"""
    return list(combinations_with_replacement(range(max_height + 1), 4))


def _cdf(neighbors: Sequence[int], beta: float, h: float, cap: int) -> np.ndarray:
    return conditional_cdf(*neighbors, beta, h, cap, np.empty(cap + 1))


def holley_ordering_check(
    beta: float,
    h_grid: Iterable[float],
    caps: Iterable[int] = (3, 8, 40),
    max_height: int = 3,
) -> Tuple[int, List[dict]]:
    """
    Проверка упорядоченности условных функций распределения

    For sorted tuples lo ≤ hi componentwise and h₁ ≤ h₂ on the grid, require
    CDF(hi, h₁)(k) ≤ CDF(lo, h₂)(k) + 1e-12 for every k. Componentwise order of
    sorted tuples is exactly the existence of ordered arrangements, and the
    conditional depends on the neighbours only through their multiset.

    Returns:
        (число проверенных сравнений, список нарушений)
    """
    tuples = neighbor_multisets(max_height)
    pairs = [
        (lo, hi) for lo in tuples for hi in tuples
        if all(a <= b for a, b in zip(lo, hi))
    ]
    grid = sorted(float(h) for h in h_grid)
    checked = 0
    violations: List[dict] = []
    for cap in caps:
        cache = {(t, h): _cdf(t, beta, h, cap) for t in tuples for h in grid}
        for i, h1 in enumerate(grid):
            for h2 in grid[i:]:
                for lo, hi in pairs:
                    gap = cache[(hi, h1)] - cache[(lo, h2)]
                    checked += 1
                    if (gap > CDF_TOLERANCE).any():
                        violations.append({
                            "cap": cap, "h1": h1, "h2": h2,
                            "lower_neighbors": lo, "higher_neighbors": hi,
                            "max_gap": float(gap.max()),
                        })
    if violations:
        logger.error("Holley check: %d violations out of %d comparisons", len(violations), checked)
    else:
        logger.debug("Holley check: %d comparisons, no violations", checked)
    return checked, violations
