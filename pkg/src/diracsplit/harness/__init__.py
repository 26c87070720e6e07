"""Experiment orchestration: configs, references, studies, reports and the CLI."""

from .config import RunConfig
from .references import ReferenceStore
from .report import emit_report
from .studies import StudyReport, StudyRow, convergence_study, long_time_study, regime_sweep

__all__ = ["RunConfig", "ReferenceStore", "emit_report", "StudyReport", "StudyRow",
           "convergence_study", "long_time_study", "regime_sweep"]
