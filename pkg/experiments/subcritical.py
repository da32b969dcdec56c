"""Эксперимент subcritical-height: концентрация высоты и частоты событий при h < h_w"""
from typing import Any, Dict, List
import logging
import math

from experiments.base import ChainExperiment
from lattice.parameters import critical_h
from observables.bounds import contact_bound, downward_bound
from utils.data_models import ExperimentConfig, ExperimentOutcome, Parameters, VerificationRecord
from utils.errors import DomainError

logger = logging.getLogger(__name__)

TWO_LEVEL_THRESHOLD = 0.8
UPWARD_EVENT_M = 3
UPWARD_EVENT_THRESHOLD = 0.05


class SubcriticalHeightExperiment(ChainExperiment):
    """Агент докритического режима"""

    name = "subcritical-height"

    def execute(self, cfg: ExperimentConfig) -> ExperimentOutcome:
        h_w = critical_h(cfg.beta)
        if any(h >= h_w for h in cfg.resolved_h):
            raise DomainError(f"subcritical-height needs h < h_w = {h_w}, got {cfg.resolved_h}")

        results = self.run_grid(cfg)
        rows: List[Dict[str, Any]] = []
        runs: List[Dict[str, Any]] = []
        checks: List[VerificationRecord] = []
        for result in results:
            rows += result["rows"]
            run = self.run_summary(result, cfg)
            params = Parameters(beta=cfg.beta, h=run["h"], N=run["N"], delta=cfg.delta)
            run["bounds"] = {
                "contact": contact_bound(params),
                **{f"downward_m{m}": downward_bound(params, m) for m in cfg.m},
            }
            runs.append(run)
            checks += self.concentration_checks(run, cfg)
            cap_record = self.cap_check(result)
            if cap_record is not None:
                checks.append(cap_record)
        return ExperimentOutcome(series_rows=rows, summary={"runs": runs}, checks=checks)

    @staticmethod
    def concentration_checks(run: Dict[str, Any], cfg: ExperimentConfig) -> List[VerificationRecord]:
        """
        Качественные проверки (мягкие): двухуровневая доля, редкость события вверх,
        геометрическое убывание средних upward_excess(m)/N²
        """
        labels = {"N": run["N"], "h": run["h"], "beta": cfg.beta, "H": run["H"]}
        means = run["means"]
        records = [VerificationRecord(
            check_name="two_level_fraction",
            parameters={**labels, "levels": [run["H"] - 1, run["H"]]},
            lhs=means["two_level_fraction"], rhs=TWO_LEVEL_THRESHOLD,
            passed=means["two_level_fraction"] > TWO_LEVEL_THRESHOLD, hard=False,
        )]
        event = f"event_upward_m{UPWARD_EVENT_M}_C{cfg.C[0]:g}"
        if event in run["event_frequencies"]:
            frequency = run["event_frequencies"][event]
            records.append(VerificationRecord(
                check_name="upward_event_frequency",
                parameters={**labels, "m": UPWARD_EVENT_M},
                lhs=frequency, rhs=UPWARD_EVENT_THRESHOLD,
                passed=frequency < UPWARD_EVENT_THRESHOLD, hard=False,
            ))
        ratio_bound = math.exp(-cfg.beta)
        ms = sorted(cfg.m)
        for m, nxt in zip(ms, ms[1:]):
            upper, lower = means[f"upward_excess_m{m}"], means[f"upward_excess_m{nxt}"]
            ratio = lower / upper if upper > 0 else 0.0
            records.append(VerificationRecord(
                check_name="upward_excess_geometric_decay",
                parameters={**labels, "m": [m, nxt]},
                lhs=ratio, rhs=ratio_bound ** (nxt - m),
                passed=ratio <= ratio_bound ** (nxt - m), hard=False,
            ))
        return records
