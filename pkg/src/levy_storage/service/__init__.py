from .common import ExperimentSetup, prepare, resolve_delta
from .consistency import horizon_schedule, run_consistency
from .coverage import run_coverage, summarise_coverage
from .estimate import run_estimate
from .figures import run_figures
from .report_writer import write_grid, write_report
from .resampling import run_resampling
from .simulate import run_simulate

__all__ = [
    "ExperimentSetup",
    "horizon_schedule",
    "prepare",
    "resolve_delta",
    "run_consistency",
    "run_coverage",
    "run_estimate",
    "run_figures",
    "run_resampling",
    "run_simulate",
    "summarise_coverage",
    "write_grid",
    "write_report",
]
