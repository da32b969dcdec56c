"""Эксперимент sampler-validate: цепь против точного закона на крошечной решётке"""
from typing import Any, Dict, List
import logging

from pydantic import BaseModel

from experiments.base import Experiment, job_seeds, run_jobs
from oracle.enumeration import check_budget, decode_states, exact_distribution
from sampler.chain import set_threads
from sampler.validation import (
    detailed_balance_gap,
    empirical_state_law,
    stationarity_gap,
    sweep_kernels,
    tv_distance,
)
from utils.data_models import CappedSpace, ExperimentConfig, ExperimentOutcome, Parameters, VerificationRecord

logger = logging.getLogger(__name__)

TV_THRESHOLD = 0.01
KERNEL_TOLERANCE = 1e-10


class ValidationJob(BaseModel):
    params: Parameters
    cap: int
    samples: int
    burn_in: int
    thinning: int
    seed: int
    threads: int = 0


def validation_job(job: ValidationJob) -> Dict[str, Any]:
    set_threads(job.threads)
    space = CappedSpace(N=job.params.N, cap=job.cap)
    pi = exact_distribution(space, job.params)
    k_black, k_white, k_full = sweep_kernels(job.params, job.cap)
    empirical = empirical_state_law(
        job.params, job.cap, job.samples, thinning=job.thinning, burn_in=job.burn_in, seed=job.seed
    )
    return {
        "exact": pi.tolist(),
        "empirical": empirical.tolist(),
        "tv_distance": tv_distance(empirical, pi),
        "detailed_balance_black": detailed_balance_gap(pi, k_black),
        "detailed_balance_white": detailed_balance_gap(pi, k_white),
        "stationarity_full_sweep": stationarity_gap(pi, k_full),
    }


class SamplerValidateExperiment(Experiment):
    """Агент проверки сэмплера: TV-расстояние и проверки ядра"""

    name = "sampler-validate"

    def execute(self, cfg: ExperimentConfig) -> ExperimentOutcome:
        cap = cfg.cap if cfg.cap is not None else 1
        samples = (cfg.sweeps - cfg.burn_in) // cfg.thinning
        grid = [(N, h) for N in cfg.N for h in cfg.resolved_h]
        for N, _ in grid:
            check_budget(CappedSpace(N=N, cap=cap))
        seeds = job_seeds(cfg.seed, len(grid))
        jobs = [
            ValidationJob(
                params=Parameters(beta=cfg.beta, h=h, N=N, delta=cfg.delta),
                cap=cap, samples=samples, burn_in=cfg.burn_in, thinning=cfg.thinning,
                seed=seed, threads=cfg.threads,
            )
            for (N, h), seed in zip(grid, seeds)
        ]
        results = run_jobs(validation_job, jobs, cfg.workers)

        rows: List[Dict[str, Any]] = []
        checks: List[VerificationRecord] = []
        runs = []
        for job, result in zip(jobs, results):
            N, h = job.params.N, job.params.h
            states = decode_states(list(range(len(result["exact"]))), N, cap + 1)
            for code, (exact, empirical) in enumerate(zip(result["exact"], result["empirical"])):
                rows.append({
                    "N": N, "h": h, "seed": job.seed, "state_code": code,
                    "state": "".join(str(v) for v in states[code].ravel()),
                    "exact": exact, "empirical": empirical,
                })
            labels = {"N": N, "M": cap, "beta": cfg.beta, "h": h, "samples": samples, "thinning": cfg.thinning}
            checks.append(VerificationRecord(
                check_name="tv_distance_vs_enumeration", parameters=labels,
                lhs=result["tv_distance"], rhs=TV_THRESHOLD, discrepancy=result["tv_distance"],
                passed=result["tv_distance"] < TV_THRESHOLD,
            ))
            for key in ("detailed_balance_black", "detailed_balance_white", "stationarity_full_sweep"):
                checks.append(VerificationRecord(
                    check_name=key, parameters=labels,
                    lhs=result[key], rhs=KERNEL_TOLERANCE, discrepancy=result[key],
                    passed=result[key] <= KERNEL_TOLERANCE,
                ))
            runs.append({
                "N": N, "h": h, "cap": cap, "seed": job.seed, "samples": samples,
                **{k: result[k] for k in ("tv_distance", "detailed_balance_black",
                                          "detailed_balance_white", "stationarity_full_sweep")},
            })
            logger.info("N=%d h=%.6g: TV=%.4g", N, h, result["tv_distance"])
        return ExperimentOutcome(series_rows=rows, summary={"runs": runs}, checks=checks)
