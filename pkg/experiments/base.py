"""
Общая часть экспериментов: узел-агент, пул заданий и прогон одной цепи.

Jobs over the (N, h) grid are independent; each owns its chain and seed. The
pool returns results in submission order and every seed is derived from the
config seed alone, so the output does not depend on the number of workers.
"""
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence
import logging

import numpy as np
from pydantic import BaseModel, Field

from lattice.parameters import critical_h, default_cap, typical_heights
from observables.counters import make_hooks
from observables.series import series_from_stream
from sampler.chain import run_chain, set_threads
from utils.data_models import ExperimentConfig, ExperimentOutcome, Parameters, VerificationRecord
from utils.errors import SOSError
import config

logger = logging.getLogger(__name__)


def job_seeds(seed: int, count: int) -> List[int]:
    """Independent per-job seeds spawned from the config seed"""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(child.generate_state(1, dtype=np.uint64)[0]) for child in children]


def run_jobs(fn: Callable[[Any], Any], jobs: Sequence[Any], workers: int = 1) -> List[Any]:
    """map в пуле процессов (или в текущем процессе при workers == 1), порядок сохраняется"""
    if workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(fn, jobs))


class ChainJob(BaseModel):
    """Одна цепь в сетке эксперимента"""
    params: Parameters
    cap: int
    sweeps: int
    burn_in: int
    thinning: int
    seed: int
    ms: List[int] = Field(default_factory=list)
    Cs: List[float] = Field(default_factory=list)
    initial: str = "zero"
    threads: int = 0
    labels: Dict[str, Any] = Field(default_factory=dict)


def chain_job(job: ChainJob) -> Dict[str, Any]:
    """Run one chain and reduce it to rows, batch-means summaries and metadata"""
    set_threads(job.threads)
    stream = run_chain(
        job.params, job.cap, job.sweeps, job.burn_in, job.thinning, job.seed,
        hooks=make_hooks(job.params, job.ms, job.Cs), initial=job.initial,
    )
    rows = [{**job.labels, **record} for record in stream.records]
    series = {
        name: s.summary.model_dump() for name, s in series_from_stream(stream).items()
    }
    return {"labels": job.labels, "rows": rows, "series": series, "metadata": stream.metadata}


def mean_of(result: Dict[str, Any], name: str) -> float:
    return result["series"][name]["mean"]


def stderr_of(result: Dict[str, Any], name: str) -> float:
    return result["series"][name]["stderr"]


class Experiment:
    """
    Базовый узел эксперимента

    Subclasses implement execute(cfg) -> ExperimentOutcome; __call__ adapts it
    to the workflow state and turns expected errors into state["error"].
    """

    name = ""

    def __call__(self, state: Dict[str, Any]) -> Dict[str, Any]:
        cfg: ExperimentConfig = state["config"]
        try:
            outcome = self.execute(cfg)
        except SOSError as e:
            logger.error("%s failed: %s", self.name, e)
            return {**state, "error": f"{type(e).__name__}: {e}"}
        return {**state, "outcome": outcome}

    def execute(self, cfg: ExperimentConfig) -> ExperimentOutcome:
        raise NotImplementedError


class ChainExperiment(Experiment):
    """Эксперимент над сеткой (N, h) независимых цепей"""

    def jobs(self, cfg: ExperimentConfig) -> List[ChainJob]:
        grid = [(N, h) for N in cfg.N for h in cfg.resolved_h]
        seeds = job_seeds(cfg.seed, len(grid))
        jobs = []
        for (N, h), seed in zip(grid, seeds):
            params = Parameters(beta=cfg.beta, h=h, N=N, delta=cfg.delta)
            jobs.append(ChainJob(
                params=params,
                cap=cfg.cap if cfg.cap is not None else default_cap(N, cfg.beta),
                sweeps=cfg.sweeps,
                burn_in=cfg.burn_in,
                thinning=cfg.thinning,
                seed=seed,
                ms=cfg.m,
                Cs=cfg.C,
                initial=cfg.initial,
                threads=cfg.threads,
                labels={"N": N, "h": h, "seed": seed},
            ))
        return jobs

    def run_grid(self, cfg: ExperimentConfig) -> List[Dict[str, Any]]:
        jobs = self.jobs(cfg)
        logger.info("%s: %d chains, %d sweeps each, %d workers", self.name, len(jobs), cfg.sweeps, cfg.workers)
        return run_jobs(chain_job, jobs, cfg.workers)

    @staticmethod
    def run_summary(result: Dict[str, Any], cfg: ExperimentConfig) -> Dict[str, Any]:
        """Resolved parameters, means, stderrs, event frequencies and cap statistics for one chain"""
        N, h = result["labels"]["N"], result["labels"]["h"]
        params = Parameters(beta=cfg.beta, h=h, N=N, delta=cfg.delta)
        H, H_w = typical_heights(params)
        metadata = result["metadata"]
        series = result["series"]
        return {
            "N": N,
            "h": h,
            "h_over_hw": h / critical_h(cfg.beta),
            "beta": cfg.beta,
            "H": H,
            "H_w": H_w,
            "seed": result["labels"]["seed"],
            "cap": metadata["cap"],
            "initial": metadata["initial"],
            "kept": metadata["kept"],
            "cap_hit_fraction": metadata["cap_hit_fraction"],
            "cap_warning": metadata["cap_warning"],
            "means": {name: s["mean"] for name, s in series.items() if not name.startswith("event_")},
            "stderrs": {name: s["stderr"] for name, s in series.items() if not name.startswith("event_")},
            "event_frequencies": {name: s["mean"] for name, s in series.items() if name.startswith("event_")},
        }

    @staticmethod
    def cap_check(result: Dict[str, Any]) -> Optional[VerificationRecord]:
        metadata = result["metadata"]
        if metadata["cap_warning"] is None:
            return None
        return VerificationRecord(
            check_name="cap_hit_fraction",
            parameters=dict(result["labels"]),
            lhs=metadata["cap_hit_fraction"],
            rhs=config.CAP_HIT_THRESHOLD,
            passed=False,
            hard=False,
        )

