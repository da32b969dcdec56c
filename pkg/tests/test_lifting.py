import numpy as np
import pytest

from lattice.sos_model import edge_boundary, hamiltonian_array
from oracle.lifting import (
    edge_boundary_mask,
    level_lift_injective,
    lift_level,
    lift_zeros,
    random_fields,
    random_signed_fields,
    recover_lifted_set,
    signed_lift_injective,
    subsets_of,
    verify_lifting_inequalities,
    zero_lift_injective,
)
from oracle.signed_space import isolation_mask
from utils.data_models import CappedSpace


def test_empty_lift_raises_everything():
    heights = np.array([[0, 2], [1, 0]])
    np.testing.assert_array_equal(lift_zeros(heights, np.zeros((2, 2), dtype=bool)), heights + 1)


def test_lift_keeping_all_zeros():
    heights = np.array([[0, 2], [1, 0]])
    lifted = lift_zeros(heights, heights == 0)
    np.testing.assert_array_equal(lifted, [[0, 3], [2, 0]])


def test_level_lift():
    heights = np.array([[0, 2], [2, 3]])
    subset = np.array([[False, True], [False, False]])
    np.testing.assert_array_equal(lift_level(heights, subset), [[0, 1], [3, 4]])


def test_zero_lift_energy_bound(rng):
    for N in (2, 3, 4):
        for heights in random_fields(rng, N, 4, 200):
            subset = heights == 0
            subset &= rng.random(subset.shape) < 0.5
            bound = hamiltonian_array(heights) + 4 * subset.sum() + 4 * N
            assert hamiltonian_array(lift_zeros(heights, subset)) <= bound


def test_random_lifting_pairs_have_no_violations(rng):
    fields = [f for N in (2, 3, 4) for f in random_fields(rng, N, 4, 1700)]
    signed = [f for N in (2, 3, 4) for f in random_signed_fields(rng, N, 4, 3, 500)]
    assert all(isolation_mask(psi).all() for psi in signed)
    report = verify_lifting_inequalities(fields, rng, signed_fields=signed)
    assert report.pairs_checked == len(fields) + len(signed)
    assert report.passed, report.violations[:3]


def test_recover_lifted_set():
    psi = np.array([
        [0, 0, 2],
        [2, 2, -1],
        [0, 2, 2],
    ])
    # (1,1) and (1,2) are the non-isolated zeros; keep only (1,1) in A
    subset = np.zeros((3, 3), dtype=bool)
    subset[0, 0] = True
    lifted = lift_zeros(psi, subset)
    assert lifted[1, 2] == 0
    np.testing.assert_array_equal(recover_lifted_set(lifted), subset)


def test_edge_boundary_mask_matches_site_count(rng):
    for _ in range(50):
        mask = rng.random((4, 4)) < 0.4
        sites = list(zip(*np.nonzero(mask)))
        assert edge_boundary_mask(mask) == edge_boundary(sites)


def test_subsets_of():
    mask = np.array([[True, False], [True, True]])
    subsets = list(subsets_of(mask))
    assert len(subsets) == 8
    assert all(not (s & ~mask).any() for s in subsets)


def test_lifts_are_injective():
    space = CappedSpace(N=2, cap=2)
    ok, images = zero_lift_injective(space)
    assert ok
    assert images > 81
    for level in (1, 2):
        assert level_lift_injective(space, level)[0]
    assert signed_lift_injective(CappedSpace(N=2, cap=2, depth=1))[0]


@pytest.mark.slow
def test_injectivity_on_three_by_three():
    assert zero_lift_injective(CappedSpace(N=3, cap=1))[0]
    assert level_lift_injective(CappedSpace(N=3, cap=1), 1)[0]
