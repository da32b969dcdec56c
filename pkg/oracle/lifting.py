"""
Отображения подъёма U_A и V_A: энергетические неравенства, подсчёт нулей и инъективность.

U_A (A ⊆ zeros) keeps A at 0 and raises every other site by one.
V_A (A ⊆ φ⁻¹(ℓ)) keeps zeros, sends A to 1 and raises the rest by one.
The signed variant applies U_A to ψ ∈ Ω*_N with A ⊆ q₂₊(ψ).
"""
from itertools import combinations
from typing import Iterable, Iterator, Optional, Tuple
import logging

import numpy as np

from lattice.sos_model import hamiltonian_array, zero_masks
from oracle.enumeration import all_states, encode_states
from oracle.signed_space import isolation_mask, signed_states
from utils.data_models import CappedSpace, LiftingReport

logger = logging.getLogger(__name__)


def lift_zeros(heights: np.ndarray, subset: np.ndarray) -> np.ndarray:
    """U_A: 0 на A, +1 вне A"""
    heights = np.asarray(heights, dtype=np.int64)
    return np.where(subset, 0, heights + 1)


def lift_level(heights: np.ndarray, subset: np.ndarray) -> np.ndarray:
    """V_A: нули остаются нулями, A -> 1, остальные +1"""
    heights = np.asarray(heights, dtype=np.int64)
    return np.where(heights == 0, 0, np.where(subset, 1, heights + 1))


def recover_lifted_set(lifted: np.ndarray) -> np.ndarray:
    """A = {x : (U_Aψ)(x) = 0 and some in-box neighbour of x is in {0, 1}}"""
    lifted = np.asarray(lifted)
    low = (lifted == 0) | (lifted == 1)
    padded = np.pad(low, 1, constant_values=False)
    near_low = padded[:-2, 1:-1] | padded[2:, 1:-1] | padded[1:-1, :-2] | padded[1:-1, 2:]
    return (lifted == 0) & near_low


def edge_boundary_mask(subset: np.ndarray) -> int:
    """|𝒩(A)| for a boolean mask, counting edges that leave the box"""
    subset = np.asarray(subset, dtype=bool)
    padded = np.pad(subset, 1, constant_values=False)
    horizontal = np.count_nonzero(padded[1:-1, 1:] != padded[1:-1, :-1])
    vertical = np.count_nonzero(padded[1:, 1:-1] != padded[:-1, 1:-1])
    return int(horizontal + vertical)


def subsets_of(mask: np.ndarray) -> Iterator[np.ndarray]:
    """Все подмножества узлов, отмеченных в mask"""
    sites = list(zip(*np.nonzero(mask)))
    for size in range(len(sites) + 1):
        for chosen in combinations(sites, size):
            subset = np.zeros(mask.shape, dtype=bool)
            for site in chosen:
                subset[site] = True
            yield subset


def random_subset(rng: np.random.Generator, mask: np.ndarray) -> np.ndarray:
    return mask & (rng.random(mask.shape) < 0.5)


def random_fields(rng: np.random.Generator, N: int, cap: int, count: int) -> np.ndarray:
    """Small random fields; half of the sites are forced to 0 so zero sets are rich"""
    heights = rng.integers(0, cap + 1, size=(count, N, N))
    return np.where(rng.random((count, N, N)) < 0.5, 0, heights)


def random_signed_fields(rng: np.random.Generator, N: int, cap: int, depth: int, count: int) -> np.ndarray:
    """Random elements of Ω*_N: isolated zeros are pushed to random negative depths"""
    fields = random_fields(rng, N, cap, count)
    isolated, _ = zero_masks(fields)
    depths = rng.integers(0, depth + 1, size=fields.shape)
    return np.where(isolated, -depths, fields)


def _check_zero_lift(heights: np.ndarray, subset: np.ndarray, report: LiftingReport) -> None:
    N = heights.shape[0]
    lifted = lift_zeros(heights, subset)
    energy, lifted_energy = hamiltonian_array(heights), hamiltonian_array(lifted)
    size = int(subset.sum())
    if lifted_energy > energy + 4 * size + 4 * N:
        report.violations.append(f"U_A energy: {lifted_energy} > {energy} + 4*{size} + 4*{N}")
    zeros, lifted_zeros = int((heights == 0).sum()), int((lifted == 0).sum())
    if zeros - lifted_zeros != int(((heights == 0) & ~subset).sum()):
        report.violations.append(f"U_A zero count: {zeros} - {lifted_zeros} != |zeros minus A|")


def _check_level_lift(heights: np.ndarray, level: int, subset: np.ndarray, report: LiftingReport) -> None:
    N = heights.shape[0]
    lifted = lift_level(heights, subset)
    energy, lifted_energy = hamiltonian_array(heights), hamiltonian_array(lifted)
    zeros = int((heights == 0).sum())
    size = int(subset.sum())
    if lifted_energy > energy + 4 * N + 4 * zeros + 4 * level * size:
        report.violations.append(
            f"V_A energy at level {level}: {lifted_energy} > {energy} + 4*{N} + 4*{zeros} + 4*{level}*{size}"
        )
    if int((lifted == 0).sum()) != zeros:
        report.violations.append("V_A changed the number of zeros")


def _check_signed_lift(psi: np.ndarray, subset: np.ndarray, report: LiftingReport) -> None:
    N = psi.shape[0]
    lifted = lift_zeros(psi, subset)
    energy, lifted_energy = hamiltonian_array(psi), hamiltonian_array(lifted)
    boundary = edge_boundary_mask(subset)
    if lifted_energy > energy + 4 * N + boundary:
        report.violations.append(f"signed U_A energy: {lifted_energy} > {energy} + 4*{N} + {boundary}")
    if not isolation_mask(lifted):
        report.violations.append("signed U_A left Ω*_N")
    if not np.array_equal(recover_lifted_set(lifted), subset):
        report.violations.append("signed U_A: subset not recoverable from the image")


def verify_lifting_inequalities(
    fields: Iterable[np.ndarray],
    rng: np.random.Generator,
    signed_fields: Optional[Iterable[np.ndarray]] = None,
) -> LiftingReport:
    """
    Случайные пары (φ, A): неравенства для U_A и V_A, подсчёт нулей; для ψ ∈ Ω*_N: U_A на q₂₊

    Violations are collected in the report instead of raised.
    """
    report = LiftingReport()
    for heights in fields:
        heights = np.asarray(heights, dtype=np.int64)
        _check_zero_lift(heights, random_subset(rng, heights == 0), report)
        levels = np.unique(heights[heights >= 1])
        if len(levels):
            level = int(rng.choice(levels))
            _check_level_lift(heights, level, random_subset(rng, heights == level), report)
        report.pairs_checked += 1

    for psi in signed_fields or ():
        psi = np.asarray(psi, dtype=np.int64)
        _, non_isolated = zero_masks(psi)
        _check_signed_lift(psi, random_subset(rng, non_isolated), report)
        report.pairs_checked += 1

    if report.violations:
        logger.warning("lifting check: %d violations in %d pairs", len(report.violations), report.pairs_checked)
    return report


def _all_unique(codes: Iterable[int]) -> Tuple[bool, int]:
    seen = set()
    total = 0
    for code in codes:
        total += 1
        if code in seen:
            return False, total
        seen.add(code)
    return True, total


def zero_lift_injective(space: CappedSpace) -> Tuple[bool, int]:
    """(φ, A) ↦ U_Aφ is injective over the capped space and every A ⊆ φ⁻¹(0)"""
    base = space.cap + 2

    def codes():
        for heights in all_states(space):
            for subset in subsets_of(heights == 0):
                yield int(encode_states(lift_zeros(heights, subset), base)[0])

    return _all_unique(codes())


def level_lift_injective(space: CappedSpace, level: int) -> Tuple[bool, int]:
    """(φ, A) ↦ V_Aφ is injective over the capped space and every A ⊆ φ⁻¹(ℓ)"""
    base = space.cap + 2

    def codes():
        for heights in all_states(space):
            for subset in subsets_of(heights == level):
                yield int(encode_states(lift_level(heights, subset), base)[0])

    return _all_unique(codes())


def signed_lift_injective(space: CappedSpace) -> Tuple[bool, int]:
    """(ψ, A) ↦ U_Aψ is injective over Ω*_N (truncated) and every A ⊆ q₂₊(ψ)"""
    base = space.cap + space.depth + 2

    def codes():
        for psi in signed_states(space):
            _, non_isolated = zero_masks(psi)
            for subset in subsets_of(non_isolated):
                yield int(encode_states(lift_zeros(psi, subset), base, offset=space.depth)[0])

    return _all_unique(codes())

