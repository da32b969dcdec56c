"""Загрузка конфигурации эксперимента: файл TOML, умолчания эксперимента и флаги CLI"""
from pathlib import Path
from typing import Any, Dict, Mapping, Optional
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from pydantic import ValidationError

from lattice.parameters import critical_h
from utils.data_models import ExperimentConfig
from utils.errors import ConfigError

logger = logging.getLogger(__name__)

# Defaults sized for desk-scale runs; file values and CLI flags override them.
EXPERIMENT_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "oracle-verify": {"beta": 1.0, "h": [1.0], "N": [2], "sweeps": 0, "burn_in": 0},
    "sampler-validate": {
        "beta": 1.0, "h": [0.0, 1.0], "N": [2], "cap": 1,
        "sweeps": 10_000_010, "burn_in": 10, "thinning": 10,
    },
    "domination": {
        "beta": 1.0, "h": [0.0, 0.5, 1.0], "N": [16], "sweeps": 100_000, "burn_in": 1_000, "thinning": 10,
    },
    "subcritical-height": {
        "beta": 1.0, "h": [0.0, 0.5, 0.9], "N": [64, 128, 256],
        "sweeps": 20_000, "burn_in": 2_000, "thinning": 20, "m": [1, 2, 3],
    },
    "critical-zeros": {
        "beta": 1.0, "h": [1.0], "N": [32, 64, 128],
        "sweeps": 20_000, "burn_in": 2_000, "thinning": 20, "C": [1.0, 2.0],
    },
    "critical-height-explore": {
        "beta": 1.0, "h": [1.0], "N": [32, 64, 128], "sweeps": 20_000, "burn_in": 2_000, "thinning": 20,
    },
}

LIST_KEYS = ("h", "N", "m", "C")


class ConfigLoader:
    """Utility класс для сборки ExperimentConfig"""

    @staticmethod
    def read_file(path: Path) -> Dict[str, Any]:
        """
        Чтение плоского TOML-файла

        Raises:
            ConfigError: если файл отсутствует, не парсится или содержит таблицы
        """
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            with open(path, "rb") as f:
                data = tomllib.load(f)
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"cannot parse {path}: {e}") from e
        nested = [key for key, value in data.items() if isinstance(value, dict)]
        if nested:
            raise ConfigError(f"config file must be flat key = value, found tables: {nested}")
        return data

    @staticmethod
    def merge(
        file_values: Mapping[str, Any],
        overrides: Mapping[str, Any],
    ) -> Dict[str, Any]:
        """CLI > file > experiment defaults; None overrides are ignored"""
        cli = {key: value for key, value in overrides.items() if value is not None}
        experiment = cli.get("experiment", file_values.get("experiment"))
        if experiment is None:
            raise ConfigError("no experiment given (set `experiment` in the file or pass --experiment)")
        if experiment not in EXPERIMENT_DEFAULTS:
            raise ConfigError(f"unknown experiment {experiment!r}; choose from {sorted(EXPERIMENT_DEFAULTS)}")
        merged: Dict[str, Any] = {**EXPERIMENT_DEFAULTS[experiment], **file_values, **cli}
        for key in LIST_KEYS:
            if key in merged and not isinstance(merged[key], (list, tuple)):
                merged[key] = [merged[key]]
        return merged

    @staticmethod
    def build(values: Mapping[str, Any]) -> ExperimentConfig:
        try:
            cfg = ExperimentConfig(**values)
        except ValidationError as e:
            raise ConfigError(str(e)) from e
        cfg.resolved_h = [resolve_h(cfg, cfg.beta, value) for value in cfg.h]
        logger.debug("resolved h for %s: %s", cfg.experiment, cfg.resolved_h)
        return cfg

    @staticmethod
    def load(path: Optional[Path] = None, **overrides) -> ExperimentConfig:
        """
        Полная загрузка конфигурации

        Args:
            path: Путь к TOML-файлу (необязателен)
            **overrides: Значения флагов CLI (None = не задано)

        Returns:
            ExperimentConfig с заполненным resolved_h
        """
        file_values = ConfigLoader.read_file(path) if path is not None else {}
        return ConfigLoader.build(ConfigLoader.merge(file_values, overrides))


def resolve_h(cfg: ExperimentConfig, beta: float, value: Optional[float] = None) -> float:
    """
    Абсолютное значение h или доля от h_w(β)

    A fraction of exactly 1.0 returns critical_h(beta) itself.
    """
    value = cfg.h[0] if value is None else float(value)
    if cfg.h_mode == "absolute":
        return value
    if value == 1.0:
        return critical_h(beta)
    return value * critical_h(beta)
