import numpy as np
import pytest

from lattice.sos_model import (
    classify_zeros,
    edge_boundary,
    hamiltonian,
    hamiltonian_array,
    level_census,
    log_weight,
    symmetries,
)
from utils.data_models import HeightField, Parameters, SignedField


def naive_hamiltonian(heights: np.ndarray) -> int:
    """Edge-by-edge recount with the zero boundary written out explicitly"""
    N = heights.shape[0]

    def value(r, c):
        return int(heights[r, c]) if 0 <= r < N and 0 <= c < N else 0

    total = 0
    for r in range(N):
        for c in range(N):
            # right and down edges inside the box, plus every edge to the outside
            if c + 1 < N:
                total += abs(value(r, c) - value(r, c + 1))
            if r + 1 < N:
                total += abs(value(r, c) - value(r + 1, c))
            for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                if not (0 <= r + dr < N and 0 <= c + dc < N):
                    total += abs(value(r, c))
    return total


@pytest.mark.parametrize(
    "heights, expected",
    [
        (np.zeros((2, 2)), 0),
        (np.ones((2, 2)), 8),
        (np.array([[3]]), 12),
    ],
)
def test_hamiltonian_examples(heights, expected):
    assert hamiltonian(HeightField(heights=heights)) == expected


def test_hamiltonian_matches_naive_recount(rng):
    fields = rng.integers(0, 6, size=(200, 3, 3))
    energies = hamiltonian_array(fields)
    assert energies.shape == (200,)
    for heights, energy in zip(fields, energies):
        assert energy == naive_hamiltonian(heights)


def test_hamiltonian_invariant_under_square_symmetries(rng):
    heights = rng.integers(0, 5, size=(4, 4))
    energy = hamiltonian(HeightField(heights=heights))
    images = list(symmetries(heights))
    assert len(images) == 8
    for image in images:
        assert hamiltonian(HeightField(heights=image)) == energy


def test_hamiltonian_extends_to_signed_heights():
    # a single site at -2 has four boundary neighbours
    assert int(hamiltonian_array(np.array([[-2]]))) == 8


@pytest.mark.parametrize(
    "heights, h, expected",
    [
        (np.zeros((2, 2)), 0.5, 2.0),
        (np.ones((2, 2)), 0.5, -8.0),
        (np.array([[0]]), 0.7, 0.7),
    ],
)
def test_log_weight_examples(heights, h, expected):
    params = Parameters(beta=1.0, h=h, N=heights.shape[0])
    assert log_weight(HeightField(heights=heights), params) == pytest.approx(expected)


def test_log_weight_difference_tracks_energy_and_zeros(rng):
    params = Parameters(beta=0.8, h=0.37, N=5)
    for _ in range(100):
        before = HeightField(heights=rng.integers(0, 4, size=(5, 5)))
        changed = before.heights.copy()
        r, c = rng.integers(0, 5, size=2)
        changed[r, c] = rng.integers(0, 4)
        after = HeightField(heights=changed)
        delta_energy = hamiltonian(after) - hamiltonian(before)
        delta_zeros = level_census(after).counts.get(0, 0) - level_census(before).counts.get(0, 0)
        assert log_weight(after, params) - log_weight(before, params) == pytest.approx(
            -params.beta * delta_energy + params.h * delta_zeros, abs=1e-9
        )


def test_zero_classes_partition_the_zero_set(rng):
    for N in (1, 2, 3, 6):
        for _ in range(50):
            field = HeightField(heights=np.where(rng.random((N, N)) < 0.5, 0, rng.integers(1, 3, size=(N, N))))
            zeros = classify_zeros(field)
            assert not zeros.isolated & zeros.non_isolated
            assert len(zeros.isolated) + len(zeros.non_isolated) == level_census(field).counts.get(0, 0)


def test_classify_zeros_all_zero():
    zeros = classify_zeros(HeightField.constant(2, 0))
    assert zeros.isolated == frozenset()
    assert zeros.non_isolated == {(1, 1), (1, 2), (2, 1), (2, 2)}


def test_classify_zeros_isolated_center():
    heights = np.ones((3, 3), dtype=int)
    heights[1, 1] = 0
    zeros = classify_zeros(HeightField(heights=heights))
    assert zeros.isolated == {(2, 2)}
    assert zeros.non_isolated == frozenset()


def test_classify_zeros_adjacent_pair():
    heights = np.ones((3, 3), dtype=int)
    heights[0, 0] = heights[0, 1] = 0
    zeros = classify_zeros(HeightField(heights=heights))
    assert zeros.isolated == frozenset()
    assert zeros.non_isolated == {(1, 1), (1, 2)}


def test_boundary_zero_ignores_outside_sites():
    # corner zero touches the wall only; it stays isolated
    heights = np.full((3, 3), 2)
    heights[0, 0] = 0
    assert classify_zeros(HeightField(heights=heights)).isolated == {(1, 1)}


def test_level_census_examples(rng):
    assert level_census(HeightField.constant(2, 0)).counts == {0: 4}
    census = level_census(HeightField(heights=[[0, 1], [1, 2]]))
    assert census.counts == {0: 1, 1: 2, 2: 1}
    assert census.count_between(1, 2) == 3
    assert census.count_between(low=2) == 1
    for heights in rng.integers(0, 7, size=(100, 5, 5)):
        assert sum(level_census(HeightField(heights=heights)).counts.values()) == 25


def test_field_validation():
    with pytest.raises(ValueError):
        HeightField(heights=[[0, -1], [0, 0]])
    with pytest.raises(ValueError):
        HeightField(heights=np.zeros((2, 3)))
    field = HeightField.constant(2, 1)
    assert field.at(1, 1) == 1
    assert field.at(0, 1) == 0


def test_signed_field_requires_isolated_negatives():
    SignedField(heights=[[-3, 1], [1, 1]])
    with pytest.raises(ValueError):
        SignedField(heights=[[-1, 0], [1, 1]])
    assert SignedField(heights=[[-3, 1], [1, 2]]).positive_part().heights.tolist() == [[0, 1], [1, 2]]


@pytest.mark.parametrize(
    "sites, expected",
    [
        ([], 0),
        ([(0, 0)], 4),
        ([(0, 0), (0, 1)], 6),
        ([(0, 0), (0, 1), (1, 0), (1, 1)], 8),
    ],
)
def test_edge_boundary(sites, expected):
    assert edge_boundary(sites) == expected
