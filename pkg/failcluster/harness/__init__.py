"""Configuration, RQ1-RQ4 orchestration and report emission."""

from failcluster.harness.config import ExperimentConfig, load_config
from failcluster.harness.experiments import (EXPERIMENTS, CategoryCounts, ExperimentResult,
                                             box_summary, opacity, run_experiment, run_rq1,
                                             run_rq2, run_rq3, run_rq4)
from failcluster.harness.reports import save_manifest, write_experiment, write_table

__all__ = [
    'ExperimentConfig', 'load_config', 'EXPERIMENTS', 'CategoryCounts', 'ExperimentResult',
    'box_summary', 'opacity', 'run_experiment', 'run_rq1', 'run_rq2', 'run_rq3', 'run_rq4',
    'save_manifest', 'write_experiment', 'write_table',
]
