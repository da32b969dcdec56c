"""
Динамика heat-bath для ℙ_N^{β,h}: состояние цепи, шахматные свипы и run_chain.

Each chain owns a numpy Philox generator seeded from its recorded seed. Every
sweep consumes exactly N² uniforms in row-major site order, so the trajectory
depends only on (seed, params, N, cap, schedule).
"""
from typing import Callable, Dict, Mapping, Optional, Tuple
import logging

import numpy as np
from numba import set_num_threads

from lattice.parameters import default_cap, typical_heights
from sampler.kernels import color_classes, conditional_cdf, sweep_block
from utils.data_models import ChainState, Parameters, SampleStream
import config

logger = logging.getLogger(__name__)

Hook = Callable[[np.ndarray], float]


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based stream: one Philox key per seed"""
    return np.random.Generator(np.random.Philox(int(seed)))


def set_threads(threads: int) -> None:
    """0 keeps numba's default thread count"""
    if threads > 0:
        set_num_threads(threads)


def initial_heights(params: Parameters, cap: int, initial: str = "zero") -> np.ndarray:
    """φ ≡ 0 or φ ≡ H (clipped to the cap)"""
    if initial == "zero":
        value = 0
    elif initial == "typical":
        value = min(typical_heights(params)[0], cap)
    else:
        raise ValueError(f"unknown initial condition: {initial}")
    return np.full((params.N, params.N), value, dtype=np.int64)


def init_chain(
    params: Parameters,
    cap: Optional[int] = None,
    seed: int = 0,
    initial: str = "zero",
    heights: Optional[np.ndarray] = None,
) -> ChainState:
    """
    Создает новую цепь

    Args:
        params: Параметры модели
        cap: Потолок высоты M (по умолчанию default_cap)
        seed: Зерно потока Philox
        initial: "zero" или "typical"
        heights: Явное начальное поле (перекрывает initial)

    Returns:
        ChainState со счётчиками на нуле
    """
    cap = cap if cap is not None else default_cap(params.N, params.beta)
    if heights is None:
        heights = initial_heights(params, cap, initial)
        label = initial
    else:
        heights = np.array(heights, dtype=np.int64)
        label = "explicit"
        if heights.shape != (params.N, params.N) or heights.min() < 0 or heights.max() > cap:
            raise ValueError(f"initial field must be {params.N}x{params.N} with heights in [0, {cap}]")
    return ChainState(heights=heights, params=params, cap=cap, seed=seed, rng=make_rng(seed), initial=label)


def conditional_distribution(neighbors: Tuple[int, int, int, int], params: Parameters, cap: int) -> np.ndarray:
    """
    p(k) ∝ exp(−β Σᵢ|k − nᵢ| + h·1{k=0}) on [0, cap]

    Neighbours outside the box are passed as 0.
    """
    if len(neighbors) != 4:
        raise ValueError("exactly four neighbour heights are required")
    cdf = conditional_cdf(*(int(n) for n in neighbors), params.beta, params.h, int(cap), np.empty(cap + 1))
    return np.diff(cdf, prepend=0.0)


def block_size(N: int) -> int:
    return max(1, config.UNIFORM_BLOCK // (N * N))


def advance(state: ChainState, sweeps: int) -> ChainState:
    """Runs `sweeps` checkerboard sweeps in place"""
    N = state.params.N
    black, white = color_classes(N)
    remaining = sweeps
    while remaining > 0:
        count = min(remaining, block_size(N))
        uniforms = state.rng.random((count, N * N))
        hits = sweep_block(state.heights, uniforms, black, white, state.params.beta, state.params.h, state.cap)
        state.cap_hit_count += int(hits)
        state.update_count += count * N * N
        state.sweep_count += count
        remaining -= count
    return state


def heat_bath_sweep(state: ChainState) -> ChainState:
    """One sweep: every black site, then every white site, each by inverse CDF"""
    return advance(state, 1)


def cap_warning(state: ChainState) -> Optional[str]:
    fraction = state.cap_hit_fraction
    if fraction > config.CAP_HIT_THRESHOLD:
        return (
            f"cap {state.cap} was hit in {fraction:.3g} of updates "
            f"(threshold {config.CAP_HIT_THRESHOLD:g}); raise the cap for beta={state.params.beta}, N={state.params.N}"
        )
    return None


def chain_metadata(state: ChainState) -> Dict[str, object]:
    return {
        "seed": state.seed,
        "generator": "Philox",
        "beta": state.params.beta,
        "h": state.params.h,
        "N": state.params.N,
        "cap": state.cap,
        "initial": state.initial,
        "sweep_count": state.sweep_count,
        "update_count": state.update_count,
        "cap_hit_count": state.cap_hit_count,
        "cap_hit_fraction": state.cap_hit_fraction,
        "cap_warning": cap_warning(state),
    }


def run_chain(
    params: Parameters,
    cap: Optional[int],
    sweeps: int,
    burn_in: int,
    thinning: int,
    seed: int,
    hooks: Optional[Mapping[str, Hook]] = None,
    initial: str = "zero",
    keep_fields: bool = False,
) -> SampleStream:
    """
    Запускает цепь и собирает прореженные значения наблюдаемых

    Sweeps s = burn_in + thinning, burn_in + 2·thinning, ... ≤ sweeps are kept;
    sweeps == burn_in gives an empty stream with full metadata.

    Args:
        hooks: name -> function of the height array, evaluated at kept sweeps
        keep_fields: store a copy of every kept field
    """
    if sweeps < burn_in or burn_in < 0:
        raise ValueError(f"need sweeps >= burn_in >= 0, got sweeps={sweeps}, burn_in={burn_in}")
    if thinning < 1:
        raise ValueError("thinning must be positive")
    hooks = dict(hooks or {})
    state = init_chain(params, cap=cap, seed=seed, initial=initial)
    stream = SampleStream()

    advance(state, burn_in)
    kept, tail = divmod(sweeps - burn_in, thinning)
    for _ in range(kept):
        advance(state, thinning)
        record: Dict[str, float] = {"sweep_index": state.sweep_count}
        for name, hook in hooks.items():
            record[name] = float(hook(state.heights))
        stream.records.append(record)
        if keep_fields:
            stream.fields.append(state.heights.copy())
    advance(state, tail)

    stream.metadata = {
        **chain_metadata(state),
        "sweeps": sweeps,
        "burn_in": burn_in,
        "thinning": thinning,
        "kept": kept,
        "observables": list(hooks),
    }
    if stream.metadata["cap_warning"]:
        logger.warning(stream.metadata["cap_warning"])
    return stream
