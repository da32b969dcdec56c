from typing import Any, Dict, List, Optional, TypedDict
import logging

from langgraph.graph import END, StateGraph

from experiments.base import Experiment
from experiments.critical import CriticalHeightExploreExperiment, CriticalZerosExperiment
from experiments.domination import DominationExperiment
from experiments.oracle_verify import OracleVerifyExperiment
from experiments.sampler_validate import SamplerValidateExperiment
from experiments.subcritical import SubcriticalHeightExperiment
from utils.data_models import ExperimentConfig, ExperimentOutcome, RunInfo
from utils.report_writer import ReportWriter

logger = logging.getLogger(__name__)

EXPERIMENTS: Dict[str, type] = {
    "oracle-verify": OracleVerifyExperiment,
    "sampler-validate": SamplerValidateExperiment,
    "domination": DominationExperiment,
    "subcritical-height": SubcriticalHeightExperiment,
    "critical-zeros": CriticalZerosExperiment,
    "critical-height-explore": CriticalHeightExploreExperiment,
}


class ExperimentWorkflowState(TypedDict, total=False):
    """State for the experiment workflow"""
    config: ExperimentConfig
    run_info: Optional[RunInfo]
    outcome: Optional[ExperimentOutcome]
    artifacts: List[str]
    error: Optional[str]
    exit_code: int


class ExperimentWorkflow:
    """Workflow: подготовка каталога запуска -> эксперимент -> запись артефактов"""

    def __init__(self, experiment: Optional[Experiment] = None):
        self.experiment = experiment
        self.workflow = self._build_workflow()

    def _build_workflow(self):
        """Build the LangGraph workflow"""
        workflow = StateGraph(ExperimentWorkflowState)

        workflow.add_node("prepare", self._prepare_node)
        workflow.add_node("execute", self._execute_node)
        workflow.add_node("write", self._write_node)

        workflow.set_entry_point("prepare")
        workflow.add_conditional_edges("prepare", self._should_continue, {"continue": "execute", "end": END})
        # a failed experiment still leaves config.json behind
        workflow.add_conditional_edges("execute", self._should_continue, {"continue": "write", "end": END})
        workflow.add_edge("write", END)

        return workflow.compile()

    def _prepare_node(self, state: ExperimentWorkflowState) -> ExperimentWorkflowState:
        """Node: run directory and config.json"""
        cfg = state["config"]
        try:
            info = ReportWriter.create_run_dir(cfg)
            path = ReportWriter.write_config(cfg, info)
        except OSError as e:
            return {**state, "error": f"cannot create run directory under {cfg.out}: {e}", "exit_code": 1}
        logger.info("run directory: %s", info.run_dir)
        return {**state, "run_info": info, "artifacts": [str(path)]}

    def _execute_node(self, state: ExperimentWorkflowState) -> ExperimentWorkflowState:
        """Node: the experiment agent"""
        experiment = self.experiment or EXPERIMENTS[state["config"].experiment]()
        result = experiment(state)
        if result.get("error"):
            result["exit_code"] = 1
        return result

    def _write_node(self, state: ExperimentWorkflowState) -> ExperimentWorkflowState:
        """Node: series.csv, summary.json, verify.json and the exit status"""
        cfg, info, outcome = state["config"], state["run_info"], state["outcome"]
        artifacts = list(state.get("artifacts", []))
        artifacts.append(str(ReportWriter.write_series(outcome.series_rows, info)))
        artifacts.append(str(ReportWriter.write_summary(outcome.summary, cfg, info)))
        artifacts.append(str(ReportWriter.write_verify(outcome.checks, cfg, info)))
        failures = outcome.hard_failures
        for check in failures:
            logger.error("hard check failed: %s %s", check.check_name, check.parameters)
        return {**state, "artifacts": artifacts, "exit_code": 1 if failures else 0}

    def _should_continue(self, state: ExperimentWorkflowState) -> str:
        return "end" if state.get("error") else "continue"

    def run(self, cfg: ExperimentConfig) -> Dict[str, Any]:
        """Run one experiment end to end"""
        result = self.workflow.invoke({"config": cfg, "artifacts": [], "exit_code": 0})
        if result.get("error") and not result.get("exit_code"):
            result["exit_code"] = 1
        return result
