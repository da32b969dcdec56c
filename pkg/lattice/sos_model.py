"""
Энергия SOS-модели, логарифм гиббсовского веса и комбинаторика нулевого множества.

Array helpers accept stacks of shape (..., N, N) so that the oracle can evaluate
whole enumeration chunks at once; the HeightField functions wrap them.
"""
from typing import Iterable, Tuple

import numpy as np

from utils.data_models import HeightField, LevelCensus, Parameters, Site, ZeroClassification


def hamiltonian_array(heights: np.ndarray) -> np.ndarray:
    """
    Σ|φ(x)-φ(y)| над внутренними рёбрами плюс Σ|φ(x)| над парами (узел, внешний сосед)

    Works verbatim for signed heights. Returns int64 of shape heights.shape[:-2].
    """
    heights = np.asarray(heights, dtype=np.int64)
    pad = [(0, 0)] * (heights.ndim - 2) + [(1, 1), (1, 1)]
    padded = np.pad(heights, pad)
    horizontal = np.abs(np.diff(padded[..., 1:-1, :], axis=-1)).sum(axis=(-2, -1))
    vertical = np.abs(np.diff(padded[..., :, 1:-1], axis=-2)).sum(axis=(-2, -1))
    return horizontal + vertical


def log_weight_array(heights: np.ndarray, beta: float, h: float) -> np.ndarray:
    heights = np.asarray(heights)
    zeros = (heights == 0).sum(axis=(-2, -1))
    return -beta * hamiltonian_array(heights) + h * zeros


def zero_neighbor_mask(heights: np.ndarray) -> np.ndarray:
    """True where some in-box lattice neighbour sits at height 0 (outside sites ignored)"""
    zero = np.asarray(heights) == 0
    pad = [(0, 0)] * (zero.ndim - 2) + [(1, 1), (1, 1)]
    padded = np.pad(zero, pad, constant_values=False)
    return (
        padded[..., :-2, 1:-1] | padded[..., 2:, 1:-1] | padded[..., 1:-1, :-2] | padded[..., 1:-1, 2:]
    )


def zero_masks(heights: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(isolated, non_isolated) boolean masks of the zero set"""
    zero = np.asarray(heights) == 0
    touching = zero_neighbor_mask(heights)
    return zero & ~touching, zero & touching


def hamiltonian(field: HeightField) -> int:
    return int(hamiltonian_array(field.heights))


def log_weight(field: HeightField, params: Parameters) -> float:
    """−β·ℋ(φ) + h·|φ⁻¹(0)|, логарифм ненормированного веса"""
    energy = hamiltonian(field)
    zeros = int((field.heights == 0).sum())
    return -params.beta * float(energy) + params.h * zeros


def _sites(mask: np.ndarray) -> frozenset:
    rows, cols = np.nonzero(mask)
    return frozenset((int(r) + 1, int(c) + 1) for r, c in zip(rows, cols))


def classify_zeros(field: HeightField) -> ZeroClassification:
    """Разбиение φ⁻¹(0) на q₁ и q₂₊ по соседям внутри квадрата"""
    isolated, non_isolated = zero_masks(field.heights)
    return ZeroClassification(isolated=_sites(isolated), non_isolated=_sites(non_isolated))


def level_census(field: HeightField) -> LevelCensus:
    levels, counts = np.unique(field.heights, return_counts=True)
    return LevelCensus(
        counts={int(level): int(count) for level, count in zip(levels, counts)},
        total=field.N * field.N,
    )


def level_counts_between(heights: np.ndarray, low: int, high: int) -> np.ndarray:
    """|φ⁻¹([low, high])| for a stack of fields"""
    heights = np.asarray(heights)
    return ((heights >= low) & (heights <= high)).sum(axis=(-2, -1))


def edge_boundary(sites: Iterable[Site]) -> int:
    """|𝒩(A)|: рёбра ℤ² ровно с одним концом в A"""
    members = set(sites)
    return sum(
        1
        for (r, c) in members
        for neighbor in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1))
        if neighbor not in members
    )


def symmetries(heights: np.ndarray):
    """The eight images of a square array under the dihedral group"""
    for k in range(4):
        rotated = np.rot90(heights, k)
        yield rotated
        yield rotated.T
