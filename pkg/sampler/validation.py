"""
Проверки сэмплера против точного перебора на крошечных решётках.

The half-sweep kernels are built explicitly: a colour class is resampled
jointly, each site from its own conditional, so K_c(φ, φ') is the product of
the site conditionals when φ and φ' agree off the class and 0 otherwise.
"""
from itertools import product
from typing import Tuple

import numpy as np

from oracle.enumeration import all_states, encode_states, exact_distribution, site_powers
from sampler.chain import block_size, conditional_distribution, make_rng
from sampler.kernels import color_classes, sweep_block_histogram, sweep_replicas
from utils.data_models import CappedSpace, Parameters


def _padded_neighbors(heights: np.ndarray, flat: int) -> Tuple[int, int, int, int]:
    N = heights.shape[0]
    padded = np.pad(heights, 1)
    r, c = divmod(flat, N)
    r, c = r + 1, c + 1
    return (int(padded[r - 1, c]), int(padded[r + 1, c]), int(padded[r, c - 1]), int(padded[r, c + 1]))


def half_sweep_kernel(params: Parameters, cap: int, sites: np.ndarray) -> np.ndarray:
    """Transition matrix of one colour class update, indexed by state code"""
    space = CappedSpace(N=params.N, cap=cap)
    states = all_states(space)
    base = cap + 1
    kernel = np.zeros((len(states), len(states)))
    for code, heights in enumerate(states):
        conditionals = [conditional_distribution(_padded_neighbors(heights, int(x)), params, cap) for x in sites]
        for values in product(range(base), repeat=len(sites)):
            target = heights.copy().reshape(-1)
            probability = 1.0
            for x, value, conditional in zip(sites, values, conditionals):
                target[x] = value
                probability *= conditional[value]
            kernel[code, int(encode_states(target.reshape(heights.shape), base)[0])] += probability
    return kernel


def sweep_kernels(params: Parameters, cap: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(K_black, K_white, K_black @ K_white)"""
    black, white = color_classes(params.N)
    k_black = half_sweep_kernel(params, cap, black)
    k_white = half_sweep_kernel(params, cap, white)
    return k_black, k_white, k_black @ k_white


def detailed_balance_gap(pi: np.ndarray, kernel: np.ndarray) -> float:
    """max |π_i K_ij − π_j K_ji|"""
    flow = pi[:, None] * kernel
    return float(np.abs(flow - flow.T).max())


def stationarity_gap(pi: np.ndarray, kernel: np.ndarray) -> float:
    return float(np.abs(pi @ kernel - pi).max())


def tv_distance(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p, dtype=float) - np.asarray(q, dtype=float)).sum())


def _blocks(total: int, size: int):
    while total > 0:
        count = min(size, total)
        yield count
        total -= count


def empirical_state_law(
    params: Parameters,
    cap: int,
    samples: int,
    thinning: int = 10,
    burn_in: int = 0,
    seed: int = 0,
) -> np.ndarray:
    """
    Эмпирический закон состояний по `samples` прореженным снимкам одной цепи

    Uses the same Philox stream and sweep order as run_chain, so the snapshots
    coincide with run_chain's kept fields for the same seed.
    """
    N = params.N
    black, white = color_classes(N)
    base = cap + 1
    counts = np.zeros(base ** (N * N), dtype=np.int64)
    discarded = np.zeros_like(counts)
    powers = site_powers(N, base)
    heights = np.zeros((N, N), dtype=np.int64)
    rng = make_rng(seed)
    block = max(thinning, (block_size(N) // thinning) * thinning)

    for count in _blocks(burn_in, block):
        sweep_block_histogram(heights, rng.random((count, N * N)), black, white,
                              params.beta, params.h, cap, 1, 0, discarded, powers)
    done = 0
    for count in _blocks(samples * thinning, block):
        sweep_block_histogram(heights, rng.random((count, N * N)), black, white,
                              params.beta, params.h, cap, thinning, done, counts, powers)
        done += count
    return counts / max(counts.sum(), 1)


def stationarity_replicas(params: Parameters, cap: int, replicas: int, seed: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """
    Start `replicas` fields from the exact capped law, apply one sweep to each
    and return (exact law, empirical law after the sweep).
    """
    space = CappedSpace(N=params.N, cap=cap)
    pi = exact_distribution(space, params)
    states = all_states(space)
    rng = make_rng(seed)
    stack = states[rng.choice(len(pi), size=replicas, p=pi)].copy()
    black, white = color_classes(params.N)
    sweep_replicas(stack, rng.random((replicas, params.N * params.N)), black, white, params.beta, params.h, cap)
    counts = np.bincount(encode_states(stack, cap + 1), minlength=len(pi))
    return pi, counts / replicas

