"""
Experiment runner: configuration, verification and evidence suites, reports and replay
"""

from .config import (
    DEFAULT_BATTERY,
    SUITES,
    BatteryEntry,
    ExperimentConfig,
    build_config,
    format_validation_error,
    load_experiment_config,
    parse_families,
    parse_seeds,
)
from .reporting import (
    CONSTANTS_COLUMNS,
    RATIO_COLUMNS,
    TABLE_VERSION,
    RunReport,
    __version__,
    render_json,
    write_failure,
    write_report,
)
from .suites import CHECKS, SUITE_OF, CheckOutcome, Instance, checks_for
from .runner import FAULTS, battery_jobs, execute, execute_jobs, failure_record, replay, run, verify

__all__ = [
    "DEFAULT_BATTERY",
    "SUITES",
    "BatteryEntry",
    "ExperimentConfig",
    "build_config",
    "format_validation_error",
    "load_experiment_config",
    "parse_families",
    "parse_seeds",
    "CONSTANTS_COLUMNS",
    "RATIO_COLUMNS",
    "TABLE_VERSION",
    "RunReport",
    "__version__",
    "render_json",
    "write_failure",
    "write_report",
    "CHECKS",
    "SUITE_OF",
    "CheckOutcome",
    "Instance",
    "checks_for",
    "FAULTS",
    "battery_jobs",
    "execute",
    "execute_jobs",
    "failure_record",
    "replay",
    "run",
    "verify",
]
