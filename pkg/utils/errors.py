"""Исключения, общие для всех модулей воркбенча"""
from typing import Optional, Sequence


class SOSError(Exception):
    """Base class for every error raised by the workbench"""


class DomainError(SOSError, ValueError):
    """Input outside the domain of an operation (h >= h_w for kappa, negative heights, ...)"""


class ConfigError(SOSError, ValueError):
    """Invalid experiment configuration"""


class BudgetExceededError(SOSError):
    """Exhaustive enumeration would exceed the configured state budget"""

    def __init__(self, size: int, budget: int):
        self.size = size
        self.budget = budget
        super().__init__(f"enumeration of {size} states exceeds budget {budget}")


class OrderingViolationError(SOSError):
    """Coupled chains lost pointwise ordering after a site update"""

    def __init__(
        self,
        site: tuple,
        lower_h_neighbors: Sequence[int],
        higher_h_neighbors: Sequence[int],
        h_pair: tuple,
        sweep: Optional[int] = None,
    ):
        self.site = site
        self.lower_h_neighbors = tuple(int(v) for v in lower_h_neighbors)
        self.higher_h_neighbors = tuple(int(v) for v in higher_h_neighbors)
        self.h_pair = h_pair
        self.sweep = sweep
        super().__init__(
            f"ordering violated at site {site} (sweep {sweep}): "
            f"neighbors h1-chain={self.lower_h_neighbors}, h2-chain={self.higher_h_neighbors}, "
            f"h=({h_pair[0]:.6g}, {h_pair[1]:.6g})"
        )
