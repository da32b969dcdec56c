"""Запись артефактов запуска: config.json, series.csv, summary.json, verify.json"""
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List
import json
import logging
import math

import numpy as np
import pandas as pd

from utils.data_models import ExperimentConfig, RunInfo, VerificationRecord, sanitize_filename
import config

logger = logging.getLogger(__name__)


def _jsonable(value: Any) -> Any:
    """numpy scalars, paths and non-finite floats into plain JSON values"""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, (Path, datetime)):
        return str(value)
    return value


class ReportWriter:
    """Единый писатель артефактов одного запуска"""

    @staticmethod
    def create_run_dir(cfg: ExperimentConfig) -> RunInfo:
        """
        Создает директорию {experiment}_{timestamp} внутри cfg.out

        Returns:
            RunInfo с путём и временем старта
        """
        started = datetime.now()
        name = sanitize_filename(f"{cfg.experiment}_{started.strftime('%Y%m%d_%H%M%S_%f')}")
        run_dir = Path(cfg.out) / name
        run_dir.mkdir(parents=True, exist_ok=False)
        return RunInfo(run_dir=run_dir, started_at=started)

    @staticmethod
    def header(cfg: ExperimentConfig, info: RunInfo) -> Dict[str, Any]:
        """Fully resolved config and code version, embedded in every JSON file"""
        return {
            "config": _jsonable(cfg.model_dump(mode="json")),
            "code_version": info.code_version,
            "started_at": info.started_at.isoformat(),
        }

    @staticmethod
    def _write_json(path: Path, payload: Dict[str, Any]) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(_jsonable(payload), f, indent=2, ensure_ascii=False, sort_keys=False)
            f.write("\n")

    @staticmethod
    def write_config(cfg: ExperimentConfig, info: RunInfo) -> Path:
        path = info.run_dir / config.RUN_FILES["config"]
        ReportWriter._write_json(path, ReportWriter.header(cfg, info))
        return path

    @staticmethod
    def write_series(rows: List[Dict[str, Any]], info: RunInfo) -> Path:
        """
        series.csv: одна строка на сохранённый снимок

        Only data goes into the CSV body, so identical configs give
        byte-identical files.
        """
        path = info.run_dir / config.RUN_FILES["series"]
        frame = pd.DataFrame.from_records(rows) if rows else pd.DataFrame()
        frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
        return path

    @staticmethod
    def write_summary(summary: Dict[str, Any], cfg: ExperimentConfig, info: RunInfo) -> Path:
        path = info.run_dir / config.RUN_FILES["summary"]
        ReportWriter._write_json(path, {**ReportWriter.header(cfg, info), "summary": summary})
        return path

    @staticmethod
    def write_verify(checks: List[VerificationRecord], cfg: ExperimentConfig, info: RunInfo) -> Path:
        path = info.run_dir / config.RUN_FILES["verify"]
        payload = {
            **ReportWriter.header(cfg, info),
            "checks": [check.to_json_dict() for check in checks],
            "hard_failures": sum(1 for c in checks if c.hard and not c.passed),
        }
        ReportWriter._write_json(path, payload)
        return path

    @staticmethod
    def list_runs(out: Path = None) -> List[Dict[str, Any]]:
        """Archived runs with their experiment, start time and hard-failure count"""
        out = Path(out or config.OUTPUT_DIR)
        runs = []
        if not out.exists():
            return runs
        for run_dir in sorted(p for p in out.iterdir() if p.is_dir()):
            entry = {"run": run_dir.name, "experiment": "", "started_at": "", "hard_failures": None}
            config_file = run_dir / config.RUN_FILES["config"]
            verify_file = run_dir / config.RUN_FILES["verify"]
            try:
                with open(config_file, "r", encoding="utf-8") as f:
                    header = json.load(f)
                entry["experiment"] = header["config"]["experiment"]
                entry["started_at"] = header["started_at"]
                if verify_file.exists():
                    with open(verify_file, "r", encoding="utf-8") as f:
                        entry["hard_failures"] = json.load(f).get("hard_failures")
            except (OSError, KeyError, json.JSONDecodeError) as e:
                logger.debug("skipping %s: %s", run_dir, e)
                continue
            runs.append(entry)
        return runs
