"""
Experiment runner: the seed × family grid, the verification battery and failure replay

Jobs are (check, instance) pairs executed on a thread pool capped by the config (or
TWOWEIGHT_THREADS). Results are merged in (seed, family) order, so the tables of a fixed
config are byte-identical across runs.
"""

import asyncio
import contextlib
import json
import logging
import math
import time
from collections import defaultdict
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from dyadic.families import weight_from_spec
from forms.schur import decay_exponent
from kernels.hilbert import flipped_kernel_sign
from models.data_models import WeightPair
from models.errors import ConfigurationError
from models.reports import CheckResult

from .config import ExperimentConfig, build_config
from .reporting import RunReport, render_json, write_failure, write_report
from .suites import CHECKS, SUITE_OF, CheckOutcome, Instance, checks_for

logger = logging.getLogger(__name__)

FAULTS = ("kernel-sign",)
Job = Tuple[str, Instance]


def _fault_context(fault: Optional[str]):
    if fault is None:
        return contextlib.nullcontext()
    if fault == "kernel-sign":
        return flipped_kernel_sign()
    raise ConfigurationError(f"Unknown fault {fault!r}; expected one of {FAULTS}")


def execute(check: str, inst: Instance) -> CheckOutcome:
    """Run one check; an exception becomes a failed assertable row"""
    _, fn = CHECKS[check]
    try:
        return fn(inst)
    except Exception as e:
        logger.error(f"Error in {check} for seed {inst.seed} ({inst.family}): {e}")
        return CheckOutcome(results=[inst.result(check, False, None, f"{type(e).__name__}: {e}")])


async def execute_jobs_async(jobs: Sequence[Job], threads: int) -> List[CheckOutcome]:
    semaphore = asyncio.Semaphore(max(1, threads))

    async def one(check: str, inst: Instance) -> CheckOutcome:
        async with semaphore:
            return await asyncio.to_thread(execute, check, inst)

    return await asyncio.gather(*(one(check, inst) for check, inst in jobs))


def execute_jobs(jobs: Sequence[Job], threads: int, fault: Optional[str] = None) -> List[CheckOutcome]:
    """Synchronous wrapper; outcomes come back in job order"""
    with _fault_context(fault):
        return asyncio.run(execute_jobs_async(jobs, threads))


def instance_config(inst: Instance, check: str) -> Dict[str, Any]:
    """Config echo narrowed to one instance"""
    echo = inst.config.echo()
    echo.update(
        {
            "suite": SUITE_OF[check],
            "seeds": [inst.seed],
            "sigma_family": [inst.sigma_family],
            "w_family": [inst.w_family],
            "out": None,
        }
    )
    return echo


def failure_record(check: str, inst: Instance, results: List[CheckResult], fault: Optional[str]) -> Dict[str, Any]:
    """Everything needed to reproduce one failing check in isolation"""
    return {
        "suite": SUITE_OF[check],
        "check": check,
        "seed": inst.seed,
        "family": inst.family,
        "sigma_family": inst.sigma_family,
        "w_family": inst.w_family,
        "fault": fault,
        "config": instance_config(inst, check),
        "weights": inst.spec(),
        "failed": [r.to_dict() for r in results],
    }


def assemble(
    config: Dict[str, Any], jobs: Sequence[Job], outcomes: Sequence[CheckOutcome], out: Optional[str], fault: Optional[str]
) -> RunReport:
    """Merge job outcomes into one report, writing failure files when out is set"""
    report = RunReport(config=config, fault=fault)
    constants: Dict[Tuple[int, str, int], Dict[str, Any]] = {}
    ratios: Dict[Tuple[int, str, int], Dict[str, Any]] = {}
    decay: Dict[int, float] = defaultdict(float)

    for (check, inst), outcome in zip(jobs, outcomes):
        key = (inst.seed, inst.family, inst.config.depth)
        if outcome.constants:
            constants.setdefault(key, {"seed": inst.seed, "depth": inst.config.depth, "family": inst.family}).update(
                outcome.constants
            )
        if outcome.ratios:
            ratios.setdefault(key, {"seed": inst.seed, "depth": inst.config.depth, "family": inst.family}).update(
                outcome.ratios
            )
        for s, ratio in outcome.decay:
            decay[s] = max(decay[s], ratio)

        failing = [r for r in outcome.results if r.assertable and not r.passed]
        if failing:
            record = failure_record(check, inst, failing, fault)
            if out is not None:
                path = str(write_failure(record, out))
                report.failures.append(path)
                for r in failing:
                    r.instance_path = path
            logger.error(f"{check} failed for seed {inst.seed} ({inst.family}): {failing[0].detail}")
        report.results.extend(outcome.results)

    report.constants_rows = [constants[k] for k in sorted(constants)]
    report.ratio_rows = [ratios[k] for k in sorted(ratios)]
    report.decay = dict(sorted(decay.items()))
    report.decay_exponent = decay_exponent(report.decay)
    return report


def _finish(report: RunReport, out: Optional[str], started: float) -> RunReport:
    report.wall_clock = time.perf_counter() - started
    if out is not None:
        write_report(report, out)
    summary = report.summary()
    failed = sorted(name for name, row in summary.items() if not row["passed"])
    logger.info(f"Finished {len(report.results)} checks in {report.wall_clock:.2f}s; failing checks: {failed or 'none'}")
    return report


def run(config: ExperimentConfig, fault: Optional[str] = None) -> RunReport:
    """Selected suites over the seed × family grid"""
    started = time.perf_counter()
    checks = checks_for(config.suite)
    instances = [Instance(seed, s, w, config) for seed, s, w in config.grid()]
    jobs = [(check, inst) for inst in instances for check in checks]
    logger.info(f"Running {len(checks)} checks on {len(instances)} instances with {config.worker_threads} threads")
    outcomes = execute_jobs(jobs, config.worker_threads, fault)
    report = assemble(config.echo(), jobs, outcomes, config.out, fault)
    return _finish(report, config.out, started)


def battery_jobs(config: ExperimentConfig, scale: float = 1.0) -> List[Job]:
    """Seeds 0..count-1 for every battery check, under each entry's depth and ε overrides"""
    jobs: List[Job] = []
    for check, entry in config.battery_entries().items():
        if check not in CHECKS:
            raise ConfigurationError(f"Unknown battery check {check!r}")
        if entry.count == 0:
            continue
        count = max(1, math.ceil(entry.count * scale))
        updates = {"suite": SUITE_OF[check], "seeds": list(range(count))}
        if entry.depth is not None:
            updates["depth"] = entry.depth
        if entry.epsilon is not None:
            updates["epsilon"] = entry.epsilon
        sub = build_config({**config.echo(), **updates}, f"battery.{check}")
        jobs.extend((check, Instance(seed, s, w, sub)) for seed, s, w in sub.grid())
    return jobs


def verify(config: ExperimentConfig, fault: Optional[str] = None, scale: float = 1.0) -> RunReport:
    """The assertable battery; exit code 0 iff every assertable row passes"""
    if scale <= 0:
        raise ConfigurationError(f"Battery scale must be positive, got {scale}")
    started = time.perf_counter()
    jobs = battery_jobs(config, scale)
    logger.info(f"Verification battery: {len(jobs)} jobs with {config.worker_threads} threads")
    outcomes = execute_jobs(jobs, config.worker_threads, fault)
    echo = {**config.echo(), "battery": {k: v.model_dump() for k, v in config.battery_entries().items()}, "scale": scale}
    report = assemble(echo, jobs, outcomes, config.out, fault)
    return _finish(report, config.out, started)


def replay(path: Union[str, Path]) -> Tuple[Dict[str, Any], bool]:
    """Re-run the instance behind a failure file; returns the new record and whether it matches byte for byte"""
    path = Path(path)
    try:
        text = path.read_text()
        record = json.loads(text)
    except FileNotFoundError:
        raise ConfigurationError(f"Failure file {path} not found")
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"{path}:{e.lineno}: invalid JSON: {e.msg}")

    try:
        check = record["check"]
        config = build_config(record["config"], str(path))
        weights = WeightPair(weight_from_spec(record["weights"]["sigma"]), weight_from_spec(record["weights"]["w"]))
        inst = Instance(int(record["seed"]), record["sigma_family"], record["w_family"], config, weights)
    except KeyError as e:
        raise ConfigurationError(f"{path}: failure record is missing {e}")
    if check not in CHECKS:
        raise ConfigurationError(f"{path}: unknown check {check!r}")

    fault = record.get("fault")
    (outcome,) = execute_jobs([(check, inst)], 1, fault)
    failing = [r for r in outcome.results if r.assertable and not r.passed]
    rebuilt = failure_record(check, inst, failing, fault)
    identical = render_json(rebuilt) == text
    logger.info(f"Replayed {path.name}: {'identical' if identical else 'different'} ({len(failing)} failing rows)")
    return rebuilt, identical
