"""Ряды наблюдаемых и оценка стандартной ошибки методом batch means"""
from typing import Dict, Iterable, List, Sequence, Tuple
import math

import numpy as np
import pandas as pd

from utils.data_models import BatchMeansSummary, ObservableSeries, SampleStream
import config


def batch_means(values: Sequence[float], min_batches: int = config.MIN_BATCHES) -> BatchMeansSummary:
    """
    Среднее и стандартная ошибка по непересекающимся пакетам

    Batch length b = ⌊√n⌋; if that leaves fewer than min_batches batches,
    b = ⌊n / min_batches⌋. With n < min_batches the error is NaN.

    Args:
        values: Коррелированный ряд
        min_batches: Минимальное число пакетов

    Returns:
        BatchMeansSummary(mean, stderr, batches)
    """
    data = np.asarray(values, dtype=float)
    n = len(data)
    mean = float(data.mean()) if n else math.nan
    if n < min_batches:
        return BatchMeansSummary(mean=mean, stderr=math.nan, batches=0)
    size = math.isqrt(n)
    if n // size < min_batches:
        size = n // min_batches
    count = n // size
    means = data[: count * size].reshape(count, size).mean(axis=1)
    stderr = float(means.std(ddof=1) / math.sqrt(count))
    return BatchMeansSummary(mean=mean, stderr=stderr, batches=count)


def build_series(name: str, values: Iterable[float]) -> ObservableSeries:
    values = [float(v) for v in values]
    return ObservableSeries(name=name, values=values, summary=batch_means(values))


def series_from_stream(stream: SampleStream) -> Dict[str, ObservableSeries]:
    """One series per observable column (sweep_index excluded)"""
    names: List[str] = list(stream.metadata.get("observables", []))
    return {name: build_series(name, (r[name] for r in stream.records)) for name in names}


def stream_frame(stream: SampleStream, **labels) -> pd.DataFrame:
    """Records as a DataFrame with constant label columns (N, h, seed, ...) in front"""
    frame = pd.DataFrame.from_records(stream.records)
    if frame.empty:
        frame = pd.DataFrame(columns=["sweep_index", *stream.metadata.get("observables", [])])
    for position, (key, value) in enumerate(labels.items()):
        frame.insert(position, key, value)
    return frame


def paired_difference(first: Sequence[float], second: Sequence[float]) -> BatchMeansSummary:
    """Batch means of first − second for two series sampled at the same sweeps"""
    a, b = np.asarray(first, dtype=float), np.asarray(second, dtype=float)
    return batch_means(a - b)


def separated(summary: BatchMeansSummary, sigmas: float = 2.0) -> bool:
    """mean > sigmas·stderr (False when the error is unknown)"""
    if not math.isfinite(summary.stderr):
        return False
    return summary.mean > sigmas * summary.stderr


def worst_rise(means: Sequence[float], stderrs: Sequence[float], sigmas: float = 2.0) -> float:
    """
    Largest step b − a − sigmas·√(σ_a² + σ_b²) between consecutive estimates

    Positive means a rise beyond the error bars. Unknown (NaN) errors count as zero.
    """
    errors = [0.0 if not math.isfinite(e) else float(e) for e in stderrs]
    rises = [
        b - a - sigmas * math.hypot(ea, eb)
        for a, b, ea, eb in zip(means, means[1:], errors, errors[1:])
    ]
    return max(rises) if rises else -math.inf


def fit_exponent(sides: Sequence[float], values: Sequence[float]) -> Tuple[float, float]:
    """Least-squares slope and intercept of log(value) against log(N)"""
    x = np.log(np.asarray(sides, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept)
