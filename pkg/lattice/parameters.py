"""Замкнутые формулы для параметров модели: h_w, κ, типичные высоты и потолок высоты"""
import math
from typing import Tuple

from utils.data_models import Parameters
from utils.errors import DomainError
import config


def critical_h(beta: float) -> float:
    """
    Критическое значение пиннинга h_w(β) = log(e^{4β} / (e^{4β} - 1))

    Computed as -log1p(-e^{-4β}) so that large β never overflows.
    """
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta}")
    return -math.log1p(-math.exp(-4.0 * beta))


def critical_h_bounds(beta: float) -> Tuple[float, float]:
    """Two-sided bounds on h_w valid for every β > 0 (the lower one is sharp for large β)"""
    lower = critical_h(beta)
    upper = math.log(16.0) + math.log1p(math.exp(-4.0 * beta)) + lower
    return lower, upper


def contact_log_base(beta: float, h: float) -> float:
    """log(e^{-h} + e^{-4β}), positive exactly when h < h_w(β)"""
    return math.log1p(math.expm1(-h) + math.exp(-4.0 * beta))


def kappa(params: Parameters) -> float:
    """
    κ(β, h, δ) = (4β + δ) / log(e^{-h} + e^{-4β})

    Raises:
        DomainError: если h >= h_w(β) (знаменатель неположителен)
    """
    if params.h >= critical_h(params.beta):
        raise DomainError(
            f"kappa requires h < h_w(beta): h={params.h}, h_w={critical_h(params.beta)}"
        )
    denominator = contact_log_base(params.beta, params.h)
    if denominator <= 0:
        raise DomainError(f"log(e^-h + e^-4beta) is not positive at h={params.h}")
    return (4.0 * params.beta + params.delta) / denominator


def typical_heights(params: Parameters) -> Tuple[int, int]:
    """(H, H_w) = (⌊log N / 4β⌋, ⌊log N / 6β⌋)"""
    log_n = math.log(params.N)
    return math.floor(log_n / (4.0 * params.beta)), math.floor(log_n / (6.0 * params.beta))


def default_cap(N: int, beta: float) -> int:
    """Sampler height cap ⌈log N / 2β⌉ + margin"""
    return math.ceil(math.log(N) / (2.0 * beta)) + config.CAP_MARGIN
