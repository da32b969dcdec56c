"""
Эксперименты в критической точке h = h_w: нули (critical-zeros) и
исследование типичной высоты (critical-height-explore).

Every check here is exploratory: it is written to verify.json but never
changes the exit status.
"""
from typing import Any, Dict, List
import logging
import math

from experiments.base import ChainExperiment
from lattice.parameters import critical_h
from observables.bounds import critical_downward_bound, isolated_zero_prediction, non_isolated_bound
from observables.series import fit_exponent
from utils.data_models import ExperimentConfig, ExperimentOutcome, Parameters, VerificationRecord
from utils.errors import DomainError

logger = logging.getLogger(__name__)

EXPONENT_CEILING = 2.0
EXPONENT_PIN = 1.5
ISOLATED_DOMINANCE = 2.0


def _require_critical(cfg: ExperimentConfig) -> None:
    h_w = critical_h(cfg.beta)
    off = [h for h in cfg.resolved_h if not math.isclose(h, h_w, rel_tol=1e-12)]
    if off:
        raise DomainError(f"critical experiments run at h = h_w = {h_w}; got {off}")


def _exploratory(name: str, parameters: Dict[str, Any], lhs: float, rhs: float, passed: bool) -> VerificationRecord:
    return VerificationRecord(
        check_name=name, parameters=parameters, lhs=lhs, rhs=rhs,
        passed=passed, hard=False, exploratory=True,
    )


class CriticalZerosExperiment(ChainExperiment):
    """Агент критических нулей: рост |q₂₊| и преобладание |q₁|"""

    name = "critical-zeros"

    def execute(self, cfg: ExperimentConfig) -> ExperimentOutcome:
        _require_critical(cfg)
        results = self.run_grid(cfg)
        rows: List[Dict[str, Any]] = []
        runs: List[Dict[str, Any]] = []
        checks: List[VerificationRecord] = []
        for result in results:
            rows += result["rows"]
            run = self.run_summary(result, cfg)
            params = Parameters(beta=cfg.beta, h=run["h"], N=run["N"], delta=cfg.delta)
            run["bounds"] = {
                **{f"q2plus_C{C:g}": non_isolated_bound(params, C) for C in cfg.C},
                **{f"critical_m{m}_C{C:g}": critical_downward_bound(params, m, C) for m in cfg.m for C in cfg.C},
            }
            runs.append(run)
            cap_record = self.cap_check(result)
            if cap_record is not None:
                checks.append(cap_record)

        runs_by_N = sorted(runs, key=lambda r: r["N"])
        sides = [r["N"] for r in runs_by_N]
        q2 = [r["means"]["q2plus"] for r in runs_by_N]
        positive = [(n, v) for n, v in zip(sides, q2) if v > 0]
        exponent = math.nan
        if len(positive) >= 2:
            exponent, _ = fit_exponent([n for n, _ in positive], [v for _, v in positive])
        checks.append(_exploratory(
            "q2plus_growth_exponent", {"N": sides, "mean_q2plus": q2},
            exponent, EXPONENT_PIN,
            math.isfinite(exponent) and exponent < EXPONENT_CEILING and exponent <= EXPONENT_PIN,
        ))
        largest = runs_by_N[-1]
        q1_mean, q2_mean = largest["means"]["q1"], largest["means"]["q2plus"]
        checks.append(_exploratory(
            "isolated_dominate_non_isolated", {"N": largest["N"]},
            q1_mean, ISOLATED_DOMINANCE * q2_mean, q1_mean >= ISOLATED_DOMINANCE * q2_mean,
        ))
        summary = {"runs": runs, "q2plus_exponent": exponent}
        return ExperimentOutcome(series_rows=rows, summary=summary, checks=checks)


class CriticalHeightExploreExperiment(ChainExperiment):
    """Агент исследования типичной высоты H_w (эвристика, без жёстких проверок)"""

    name = "critical-height-explore"

    def execute(self, cfg: ExperimentConfig) -> ExperimentOutcome:
        _require_critical(cfg)
        results = self.run_grid(cfg)
        rows: List[Dict[str, Any]] = []
        runs: List[Dict[str, Any]] = []
        checks: List[VerificationRecord] = []
        for result in results:
            rows += result["rows"]
            run = self.run_summary(result, cfg)
            params = Parameters(beta=cfg.beta, h=run["h"], N=run["N"], delta=cfg.delta)
            prediction = isolated_zero_prediction(params)
            run["predictions"] = {"isolated_zeros": prediction, "mode": run["H_w"]}
            runs.append(run)
            labels = {"N": run["N"], "H_w": run["H_w"], "initial": run["initial"]}
            checks.append(_exploratory(
                "mode_vs_H_w", labels, run["means"]["mode"], float(run["H_w"]),
                abs(run["means"]["mode"] - run["H_w"]) <= 1.0,
            ))
            q1 = run["means"]["q1"]
            ratio = q1 / prediction if prediction > 0 else math.nan
            checks.append(_exploratory(
                "isolated_zeros_vs_prediction", labels, q1, prediction,
                math.isfinite(ratio) and 0.1 <= ratio <= 10.0,
            ))
            cap_record = self.cap_check(result)
            if cap_record is not None:
                checks.append(cap_record)
        return ExperimentOutcome(series_rows=rows, summary={"runs": runs}, checks=checks)
