"""
Точный перебор усечённого пространства Ω_N ∩ [0, M]^{Λ_N}.

States are indexed by their base-(M+1) code in row-major site order (first site
most significant). Every sum is taken chunk by chunk with math.fsum and the
chunk partials are combined in index order, so results do not depend on the
number of worker threads.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterator, List, Optional, Tuple
import logging
import math

import numpy as np

from lattice.sos_model import log_weight_array
from utils.data_models import CappedSpace, HeightField, Parameters
from utils.errors import BudgetExceededError
import config

logger = logging.getLogger(__name__)

# vectorised over a stack of fields of shape (B, N, N)
BatchPredicate = Callable[[np.ndarray], np.ndarray]
BatchFunctional = Callable[[np.ndarray], np.ndarray]


def check_budget(space: CappedSpace) -> None:
    if space.size > space.budget:
        raise BudgetExceededError(space.size, space.budget)


def site_powers(N: int, base: int) -> np.ndarray:
    return base ** np.arange(N * N - 1, -1, -1, dtype=np.int64)


def decode_states(codes: np.ndarray, N: int, base: int, offset: int = 0) -> np.ndarray:
    """Коды состояний -> массив высот (B, N, N); offset сдвигает цифры (для знаковых высот)"""
    codes = np.asarray(codes, dtype=np.int64)
    digits = (codes[:, None] // site_powers(N, base)) % base
    return (digits - offset).reshape(-1, N, N)


def encode_states(heights: np.ndarray, base: int, offset: int = 0) -> np.ndarray:
    heights = np.asarray(heights, dtype=np.int64)
    N = heights.shape[-1]
    flat = heights.reshape(-1, N * N) + offset
    return flat @ site_powers(N, base)


def iter_chunks(space: CappedSpace, chunk: Optional[int] = None) -> Iterator[Tuple[int, np.ndarray]]:
    """Yield (first_code, heights) blocks covering the capped nonnegative space"""
    check_budget(space)
    chunk = chunk or config.ORACLE_CHUNK
    base = space.cap + 1
    total = base ** space.site_count
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        yield start, decode_states(np.arange(start, stop, dtype=np.int64), space.N, base)


def all_states(space: CappedSpace) -> np.ndarray:
    return np.concatenate([block for _, block in iter_chunks(space)])


def _log_shift(space: CappedSpace, params: Parameters) -> float:
    # energies are nonnegative, so h·N² bounds every log-weight from above
    return params.h * space.site_count


def _weighted_sums(
    space: CappedSpace,
    params: Parameters,
    values: Optional[BatchFunctional] = None,
    workers: int = 1,
) -> Tuple[float, float]:
    """(Σ w·e^{-shift}, Σ w·f·e^{-shift}) over the whole capped space"""
    shift = _log_shift(space, params)

    def partial(block: np.ndarray) -> Tuple[float, float]:
        weights = np.exp(log_weight_array(block, params.beta, params.h) - shift)
        weighted = weights * np.asarray(values(block), dtype=float) if values is not None else weights
        return math.fsum(weights), math.fsum(weighted)

    blocks = (block for _, block in iter_chunks(space))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials: List[Tuple[float, float]] = list(pool.map(partial, blocks))
    else:
        partials = [partial(block) for block in blocks]

    total = math.fsum(p[0] for p in partials)
    weighted_total = math.fsum(p[1] for p in partials)
    return total, weighted_total


def log_partition_function(space: CappedSpace, params: Parameters, workers: int = 1) -> float:
    total, _ = _weighted_sums(space, params, workers=workers)
    return _log_shift(space, params) + math.log(total)


def enumerate_partition_function(space: CappedSpace, params: Parameters, workers: int = 1) -> float:
    """
    Z = Σ_φ exp(−βℋ(φ) + h|φ⁻¹(0)|) по усечённому пространству

    Raises:
        BudgetExceededError: если (M+1)^{N²} больше бюджета
    """
    return math.exp(log_partition_function(space, params, workers=workers))


def exact_event_probability(
    space: CappedSpace,
    params: Parameters,
    predicate: BatchPredicate,
    workers: int = 1,
) -> float:
    """P(predicate) под усечённой мерой; predicate получает стек полей (B, N, N)"""
    total, hits = _weighted_sums(
        space, params, values=lambda block: np.asarray(predicate(block), dtype=bool), workers=workers
    )
    return hits / total


def exact_expectation(
    space: CappedSpace,
    params: Parameters,
    functional: BatchFunctional,
    workers: int = 1,
) -> float:
    total, weighted = _weighted_sums(space, params, values=functional, workers=workers)
    return weighted / total


def exact_distribution(space: CappedSpace, params: Parameters) -> np.ndarray:
    """Probabilities of every capped state, indexed by state code"""
    states = all_states(space)
    log_w = log_weight_array(states, params.beta, params.h)
    weights = np.exp(log_w - log_w.max())
    return weights / math.fsum(weights)


def per_field(fn: Callable[[HeightField], float]) -> Callable[[np.ndarray], np.ndarray]:
    """Lift a HeightField-level predicate or functional to the batch form"""

    def batched(block: np.ndarray) -> np.ndarray:
        return np.array([fn(HeightField(heights=heights)) for heights in block])

    return batched


def is_increasing_event(space: CappedSpace, predicate: BatchPredicate) -> bool:
    """Check that membership is closed under raising a single site by one (within the cap)"""
    states = all_states(space)
    inside = np.asarray(predicate(states), dtype=bool)
    n_sites = space.site_count
    flat = states.reshape(len(states), n_sites)
    for site in range(n_sites):
        raisable = inside & (flat[:, site] < space.cap)
        if not raisable.any():
            continue
        raised = flat[raisable].copy()
        raised[:, site] += 1
        if not np.asarray(predicate(raised.reshape(-1, space.N, space.N)), dtype=bool).all():
            return False
    return True
