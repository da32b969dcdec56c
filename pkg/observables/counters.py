"""
Наблюдаемые: превышения уровней, нули, модальная высота и индикаторы событий.

Every counter accepts a HeightField or a bare (N, N) height array, so the same
functions serve as run_chain hooks and as field-level operations.
"""
from typing import Callable, Dict, Iterable, Tuple, Union
import math

import numpy as np

from lattice.parameters import critical_h, kappa, typical_heights
from lattice.sos_model import level_counts_between, zero_masks
from utils.data_models import HeightField, Parameters

FieldLike = Union[HeightField, np.ndarray]


def _heights(field: FieldLike) -> np.ndarray:
    return field.heights if isinstance(field, HeightField) else np.asarray(field)


def upward_excess(field: FieldLike, params: Parameters, m: int) -> int:
    """|φ⁻¹([H+m, ∞))|"""
    H, _ = typical_heights(params)
    return int((_heights(field) >= H + m).sum())


def downward_excess(field: FieldLike, params: Parameters, m: int, critical: bool = False) -> int:
    """
    |φ⁻¹([0, H−m])|, или |φ⁻¹([1, H_w−m])| в критическом режиме

    An empty window (H−m < 0, or H_w−m < 1) counts nothing.
    """
    H, H_w = typical_heights(params)
    if critical:
        return int(level_counts_between(_heights(field), 1, H_w - m))
    return int(level_counts_between(_heights(field), 0, H - m))


def zero_counts(field: FieldLike) -> Tuple[int, int, int]:
    """(|q₁|, |q₂₊|, |φ⁻¹(0)|)"""
    isolated, non_isolated = zero_masks(_heights(field))
    q1, q2 = int(isolated.sum()), int(non_isolated.sum())
    return q1, q2, q1 + q2


def typical_level_fraction(field: FieldLike, params: Parameters) -> float:
    """Доля узлов на уровнях {H−1, H}, H из typical_heights"""
    H, _ = typical_heights(params)
    heights = _heights(field)
    return float(level_counts_between(heights, H - 1, H) / heights.size)


def mode_heights(field: FieldLike) -> Tuple[int, float, float]:
    """
    (mode, fraction at mode, fraction at mode − 1)

    Ties go to the larger height.
    """
    heights = _heights(field)
    counts = np.bincount(heights.ravel())
    mode = len(counts) - 1 - int(np.argmax(counts[::-1]))
    total = heights.size
    below = counts[mode - 1] / total if mode >= 1 else 0.0
    return mode, float(counts[mode] / total), float(below)


def theorem_events(field: FieldLike, params: Parameters, m: int, C: float) -> Dict[str, bool]:
    """
    Индикаторы событий с порогами в точности как в утверждениях

    upward      |φ⁻¹([H+m,∞))| > e^{−2βm}N²
    downward    |φ⁻¹([0,H−m])| > 2e^{−2βm}N²
    q2plus      |q₂₊| ≥ CN
    critical    |φ⁻¹(0)| ≤ CN^{4/3} and |φ⁻¹([1,H_w−m])| ≥ 2e^{−2βm}N²
    contact     |φ⁻¹(0)| ≥ κN, only when h < h_w
    """
    N = params.N
    area = float(N * N)
    decay = math.exp(-2.0 * params.beta * m)
    _, q2, zeros = zero_counts(field)
    events = {
        "upward": upward_excess(field, params, m) > decay * area,
        "downward": downward_excess(field, params, m) > 2.0 * decay * area,
        "q2plus": q2 >= C * N,
        "critical": (
            zeros <= C * N ** (4.0 / 3.0)
            and downward_excess(field, params, m, critical=True) >= 2.0 * decay * area
        ),
    }
    if params.h < critical_h(params.beta):
        events["contact"] = zeros >= kappa(params) * N
    return events


Hook = Callable[[np.ndarray], float]


def make_hooks(params: Parameters, ms: Iterable[int], Cs: Iterable[float]) -> Dict[str, Hook]:
    """
    Набор наблюдаемых для run_chain

    Column names are stable: counters first, then one column per (event, m, C).
    """
    ms, Cs = list(ms), list(Cs)
    hooks: Dict[str, Hook] = {
        "zeros": lambda h: zero_counts(h)[2],
        "q1": lambda h: zero_counts(h)[0],
        "q2plus": lambda h: zero_counts(h)[1],
        "mode": lambda h: mode_heights(h)[0],
        "mode_fraction": lambda h: mode_heights(h)[1],
        "two_level_fraction": lambda h: typical_level_fraction(h, params),
        "mode_two_level_fraction": lambda h: sum(mode_heights(h)[1:]),
        "mean_height": lambda h: float(np.mean(h)),
    }
    for m in ms:
        hooks[f"upward_excess_m{m}"] = lambda h, m=m: upward_excess(h, params, m)
        hooks[f"downward_excess_m{m}"] = lambda h, m=m: downward_excess(h, params, m)
        hooks[f"critical_downward_m{m}"] = lambda h, m=m: downward_excess(h, params, m, critical=True)
        for C in Cs:
            for name in theorem_events(np.zeros((params.N, params.N), dtype=np.int64), params, m, C):
                hooks[f"event_{name}_m{m}_C{C:g}"] = (
                    lambda h, m=m, C=C, name=name: float(theorem_events(h, params, m, C)[name])
                )
    return hooks
