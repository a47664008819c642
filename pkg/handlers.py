"""
Handler functions for the bench subcommands.
Each handler takes a validated RunConfig and returns an exit status.
"""
import csv
import io
import json
import logging
import os
import sys
from typing import List, Optional

import batteries
import config
from dynsim import convergence_report, count_bounds_check, sample_orbit, spec_from_config
from errors import BadSpec, CheckFailed, ConfigError, InfeasibleAtScale, SubseqError
from ledger import (
    Ledger,
    ResourceBounds,
    build_ledger,
    check_all,
    close_ledger,
    constants_for_profile,
    ledger_invariants,
)
from sequence import SequenceStore, build_store, gap_profile, verify_block
from storage import ResultStorage, result_storage
from utils import parse_rational

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


def _write(cfg: config.RunConfig, name: str, text: str):
    """Write one output file under cfg.out, or to standard output when no directory is set."""
    if not cfg.out:
        sys.stdout.write(text)
        return
    os.makedirs(cfg.out, exist_ok=True)
    path = os.path.join(cfg.out, name)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    logger.info(f"Wrote {path}")


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def load_ledger(cfg: config.RunConfig, ledger_path: Optional[str] = None, close: bool = True) -> Ledger:
    """Read a ledger file, or build one from the profile and horizon."""
    if ledger_path:
        try:
            with open(ledger_path, "r", encoding="utf-8") as fh:
                return Ledger.loads(fh.read())
        except (OSError, ValueError, KeyError) as e:
            raise ConfigError(f"cannot read ledger {ledger_path}: {e}")
    constants = constants_for_profile(cfg.profile).with_overrides(cfg.constant_overrides())
    return build_ledger(constants, cfg.horizon, ResourceBounds(), close=close)


def gen_params_handler(cfg: config.RunConfig) -> int:
    """Generate the ledger through the horizon and write it as JSON."""
    ledger = load_ledger(cfg, close=False)
    try:
        ledger = close_ledger(ledger, ResourceBounds())
    except InfeasibleAtScale as e:
        logger.warning(f"Last block left open: {e}")
    _write(cfg, "ledger.json", ledger.dumps() + "\n")
    logger.info(f"Ledger through block {ledger.M} ({cfg.profile}), last closed end {ledger.horizon}")
    return EXIT_OK


def build_seq_handler(cfg: config.RunConfig, ledger_path: Optional[str] = None) -> int:
    """Build the sequence and write the element list and block summaries."""
    ledger = load_ledger(cfg, ledger_path)
    store = build_store(ledger, cfg.workers)
    _write(cfg, "sequence.txt", store.export_lines())
    _write(cfg, "blocks.json", store.summary_json() + "\n")
    return EXIT_OK


def verify_handler(cfg: config.RunConfig, ledger_path: Optional[str] = None) -> int:
    """Run ledger, sequence and count-bound checks; any failure makes the run fail."""
    ledger = load_ledger(cfg, ledger_path)
    reports = check_all(ledger)
    invariants = ledger_invariants(ledger)
    store = build_store(ledger, cfg.workers)
    blocks = [verify_block(ledger, store, b.m) for b in store.blocks]
    bounds = count_bounds_check(ledger, store)

    for r in reports:
        result_storage.add_records("constraints", [dict(rec.to_json(), m=r.m) for rec in r.records])
    result_storage.add_records("blocks", [b.to_json() for b in blocks])
    result_storage.add_records("count_bounds", [rec.to_json() for rec in bounds.records])

    passed = (
        all(r.overall for r in reports)
        and all(rec.satisfied for rec in invariants)
        and all(b.passed for b in blocks)
        and bounds.passed
    )
    summary = {
        "profile": ledger.constants.profile,
        "M": ledger.M,
        "constraints": [r.to_json() for r in reports],
        "invariants": [rec.to_json() for rec in invariants],
        "blocks": [b.to_json() for b in blocks],
        "gaps": [{"m": g.m, "k": g.k, "gap": g.gap} for g in gap_profile(store)],
        "count_bounds": bounds.to_json(),
        "passed": passed,
    }
    _write(cfg, "verify.json", _dumps(summary))
    if cfg.out:
        _write(cfg, "verify_records.jsonl", result_storage.to_jsonl())
    if not passed:
        raise CheckFailed("verification found failing checks; see the report")
    logger.info(f"Verification passed for blocks 1..{ledger.M}")
    return EXIT_OK


def ops_test_handler(cfg: config.RunConfig) -> int:
    """Run the operator batteries and write one JSON line per trial."""
    summary = batteries.run_all(cfg.trials, cfg.seed, workers=cfg.workers)
    result_storage.add_records("battery", [r.to_json() for r in summary.records])
    _write(cfg, "battery.jsonl", result_storage.to_jsonl("battery"))
    if cfg.out:
        _write(cfg, "battery_summary.json", _dumps(summary.to_json()))
    if not summary.passed:
        raise CheckFailed(f"{len(summary.violations)} battery violations; counterexamples are in the records")
    return EXIT_OK


def _checkpoints(cfg: config.RunConfig):
    if cfg.checkpoints == "auto":
        return "auto"
    try:
        return [int(x) for x in cfg.checkpoints.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"checkpoints must be 'auto' or a comma list of integers, got {cfg.checkpoints!r}")


def simulate_handler(cfg: config.RunConfig, ledger_path: Optional[str] = None) -> int:
    """Convergence experiment along the built sequence."""
    try:
        spec = spec_from_config(cfg)
        x0 = parse_rational(cfg.x0)
        precision = int(cfg.precision)
    except (ValueError, BadSpec) as e:
        raise ConfigError(f"bad experiment settings: {e}")
    ledger = load_ledger(cfg, ledger_path)
    store: SequenceStore = build_store(ledger, cfg.workers)
    n_max = cfg.n_max or store.horizon
    orbit = sample_orbit(spec, x0, n_max, precision)
    report = convergence_report(orbit, store, _checkpoints(cfg))
    result_storage.add_records("convergence", report.to_json()["rows"])
    if cfg.format == "csv":
        _write(cfg, "convergence.csv", report.to_csv())
    else:
        _write(cfg, "convergence.json", _dumps(report.to_json()))
    if cfg.out:
        _write(cfg, "convergence.jsonl", result_storage.to_jsonl("convergence"))
    return EXIT_OK


def _flatten(row: dict) -> dict:
    return {k: json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v for k, v in row.items()}


def export_handler(cfg: config.RunConfig, source: str) -> int:
    """Turn stored JSON-lines results into CSV or JSON plot data."""
    loaded = ResultStorage()
    try:
        loaded.load_jsonl(source)
    except (OSError, ValueError) as e:
        raise ConfigError(f"cannot read results {source}: {e}")
    rows: List[dict] = [_flatten(r) for r in loaded.get_records()]
    columns = sorted({k for r in rows for k in r})
    if cfg.format == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow(r)
        _write(cfg, "export.csv", buf.getvalue())
    else:
        data = {"columns": columns, "rows": [[r.get(c) for c in columns] for r in rows]}
        _write(cfg, "export.json", _dumps(data))
    return EXIT_OK


def error_handler(exc: BaseException) -> int:
    """
    Log an exception and map it to an exit status.
    Configuration errors exit 2, everything else 1.
    """
    if isinstance(exc, ConfigError):
        logger.error(f"Configuration error: {exc}")
        return EXIT_CONFIG
    if isinstance(exc, InfeasibleAtScale):
        logger.error(f"Infeasible at desk scale: {exc}")
        if exc.required_k is not None:
            logger.error(f"K_{exc.m} >= {exc.required_k}")
        return EXIT_FAILED
    if isinstance(exc, CheckFailed):
        logger.error(f"Check failed: {exc}")
        return EXIT_FAILED
    if isinstance(exc, SubseqError):
        logger.error(f"{type(exc).__name__}: {exc}")
        return EXIT_FAILED
    logger.error(f"Unexpected error: {exc!r}")
    return EXIT_FAILED


def run_handler(handler, *args) -> int:
    """Run one handler on a fresh result store and map any exception to an exit status."""
    result_storage.clear()
    try:
        return handler(*args)
    except Exception as e:
        return error_handler(e)
