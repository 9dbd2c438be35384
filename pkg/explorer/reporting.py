"""
Run reports and their files: report.json, constants.csv, ratios.csv and failures/
"""

import json
import logging
import platform
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd
import scipy

from models.reports import CONSTANT_NAMES, RATIO_NAMES, CheckResult, to_jsonable

logger = logging.getLogger(__name__)

__version__ = "1.0.0"

# bump when a CSV column is added, removed or moved
TABLE_VERSION = 1
KEY_COLUMNS = ("seed", "depth", "family")
CONSTANTS_COLUMNS = (*KEY_COLUMNS, *CONSTANT_NAMES)
RATIO_COLUMNS = (*KEY_COLUMNS, *RATIO_NAMES, "remainder")


def versions() -> Dict[str, str]:
    return {
        "twoweight": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
    }


@dataclass
class RunReport:
    """Everything one run or verify produced"""

    config: Dict[str, Any]
    results: List[CheckResult] = field(default_factory=list)
    constants_rows: List[Dict[str, Any]] = field(default_factory=list)
    ratio_rows: List[Dict[str, Any]] = field(default_factory=list)
    decay: Dict[int, float] = field(default_factory=dict)
    decay_exponent: Optional[float] = None
    failures: List[str] = field(default_factory=list)
    fault: Optional[str] = None
    wall_clock: float = 0.0
    versions: Dict[str, str] = field(default_factory=versions)

    @property
    def failed(self) -> List[CheckResult]:
        return [r for r in self.results if r.assertable and not r.passed]

    @property
    def exit_code(self) -> int:
        return 1 if self.failed else 0

    def summary(self) -> Dict[str, Dict[str, Any]]:
        """Per check: instances, assertable rows, failures and the largest recorded value"""
        table: Dict[str, Dict[str, Any]] = {}
        for result in self.results:
            row = table.setdefault(
                result.check,
                {"suite": result.suite, "rows": 0, "assertable": 0, "failed": 0, "max_value": None, "instances": set()},
            )
            row["rows"] += 1
            row["instances"].add((result.seed, result.family))
            if result.assertable:
                row["assertable"] += 1
                row["failed"] += 0 if result.passed else 1
            if result.value is not None and np.isfinite(result.value):
                row["max_value"] = result.value if row["max_value"] is None else max(row["max_value"], result.value)
        for row in table.values():
            row["instances"] = len(row["instances"])
            row["passed"] = row["failed"] == 0
        return table

    def constants_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.constants_rows, columns=list(CONSTANTS_COLUMNS))

    def ratios_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.ratio_rows, columns=list(RATIO_COLUMNS))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config,
            "table_version": TABLE_VERSION,
            "exit_code": self.exit_code,
            "fault": self.fault,
            "summary": self.summary(),
            "failures": [
                {"suite": r.suite, "check": r.check, "seed": r.seed, "family": r.family, "instance": r.instance_path}
                for r in self.failed
            ],
            "decay": {"max_ratio_by_s": {str(s): v for s, v in sorted(self.decay.items())}, "exponent": self.decay_exponent},
            "results": [r.to_dict() for r in self.results],
            "wall_clock": self.wall_clock,
            "versions": self.versions,
        }


def render_json(data: Dict[str, Any]) -> str:
    """Deterministic JSON text"""
    return json.dumps(to_jsonable(data), indent=2, sort_keys=True, allow_nan=True) + "\n"


def write_report(report: RunReport, out: Union[str, Path]) -> Path:
    """Write report.json, constants.csv and ratios.csv into out"""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(render_json(report.to_dict()))
    report.constants_frame().to_csv(out / "constants.csv", index=False)
    report.ratios_frame().to_csv(out / "ratios.csv", index=False)
    logger.info(f"Wrote report and tables to {out}")
    return out


def failure_name(check: str, seed: int, family: str) -> str:
    slug = re.sub(r"[^A-Za-z0-9.]+", "_", family).strip("_")
    return f"{check}__seed{seed}__{slug}.json"


def write_failure(record: Dict[str, Any], out: Union[str, Path]) -> Path:
    """One replayable instance file under out/failures/"""
    directory = Path(out) / "failures"
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / failure_name(record["check"], record["seed"], record["family"])
    path.write_text(render_json(record))
    return path
