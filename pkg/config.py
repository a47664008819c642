"""
Configuration settings for the subsequence bench.

Module-level defaults come from SUBSEQ_* environment variables. RunConfig
holds one run's settings, loaded from a flat key = value file and then
overridden by command-line flags.
"""
import os
import sys
from dataclasses import dataclass, fields, replace
from typing import Dict, Optional, Tuple

from errors import ConfigError


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        print(f"Warning: {name}={raw!r} is not an integer, using {default}.", file=sys.stderr)
        return default


# Construction profile and horizon
PROFILE = os.environ.get("SUBSEQ_PROFILE", "demo")
if PROFILE not in ("faithful", "demo"):
    print(f"Warning: unknown SUBSEQ_PROFILE {PROFILE!r}, using 'demo'.", file=sys.stderr)
    PROFILE = "demo"
HORIZON = _env_int("SUBSEQ_HORIZON", 4)

# Randomized batteries
SEED = _env_int("SUBSEQ_SEED", 20240101)
TRIALS = _env_int("SUBSEQ_TRIALS", 1000)
WORKERS = max(1, _env_int("SUBSEQ_WORKERS", 1))

# Resource bounds for the ledger search
MAX_PRIMES = _env_int("SUBSEQ_MAX_PRIMES", 10 ** 12)
MAX_PRIME = _env_int("SUBSEQ_MAX_PRIME", 10 ** 7)
MAX_BETA = _env_int("SUBSEQ_MAX_BETA", 10 ** 9)

# Output and logging
OUT_DIR = os.environ.get("SUBSEQ_OUT_DIR", "out")
LOG_LEVEL = os.environ.get("SUBSEQ_LOG_LEVEL", "INFO").upper()


_INT_KEYS = ("horizon", "seed", "trials", "period", "n_max", "workers")
_STR_KEYS = ("profile", "system", "alpha", "out", "format", "checkpoints",
             "bernoulli_p", "f_lo", "f_hi", "f_const", "x0", "precision")


@dataclass(frozen=True)
class RunConfig:
    """Settings for one invocation. Every field maps to a key of the config file."""
    profile: str = PROFILE
    horizon: int = HORIZON
    seed: Optional[int] = SEED
    trials: int = TRIALS
    workers: int = WORKERS
    out: Optional[str] = None
    format: str = "json"
    constants: Tuple[Tuple[str, str], ...] = ()
    # experiment
    system: str = "rotation"
    alpha: str = "golden"
    period: int = 35
    bernoulli_p: str = "1/2"
    f_lo: str = "0"
    f_hi: str = "1/2"
    f_const: Optional[str] = None
    x0: str = "0"
    n_max: Optional[int] = None
    checkpoints: str = "auto"
    precision: str = "128"

    def constant_overrides(self) -> Dict[str, str]:
        return dict(self.constants)

    def validate(self, needs_seed: bool = False) -> "RunConfig":
        if self.profile not in ("faithful", "demo"):
            raise ConfigError(f"profile must be 'faithful' or 'demo', got {self.profile!r}")
        if self.horizon < 1:
            raise ConfigError(f"horizon must be at least 1, got {self.horizon}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be 'csv' or 'json', got {self.format!r}")
        if self.system not in ("rotation", "cyclic", "iid"):
            raise ConfigError(f"system must be rotation, cyclic or iid, got {self.system!r}")
        if self.system == "iid" and (self.f_const is not None or (self.f_lo, self.f_hi) != ("0", "1/2")):
            raise ConfigError("the iid system reads its time-zero coordinate; f_lo, f_hi and f_const do not apply")
        if self.trials < 1:
            raise ConfigError(f"trials must be positive, got {self.trials}")
        if needs_seed and self.seed is None:
            raise ConfigError("a seed is required for randomized runs")
        return self


def parse_config_text(text: str) -> Dict[str, str]:
    """Parse 'key = value' lines; '#' starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        values[key] = value
    return values


def apply_values(base: RunConfig, values: Dict[str, object]) -> RunConfig:
    """Apply string or typed values onto a RunConfig; unknown keys are errors."""
    known = {f.name for f in fields(RunConfig)}
    changes = {}
    constants = dict(base.constants)
    for key, value in values.items():
        if value is None:
            continue
        if key.startswith("const."):
            constants[key[len("const."):]] = str(value)
            continue
        if key not in known or key == "constants":
            raise ConfigError(f"unknown config key: {key}")
        if key in _INT_KEYS:
            try:
                changes[key] = int(value)
            except (TypeError, ValueError):
                raise ConfigError(f"{key} must be an integer, got {value!r}")
        elif key in _STR_KEYS:
            changes[key] = str(value)
    changes["constants"] = tuple(sorted(constants.items()))
    return replace(base, **changes)


def load_run_config(path: Optional[str] = None, overrides: Optional[Dict[str, object]] = None) -> RunConfig:
    """Defaults, then the config file, then flag overrides."""
    cfg = RunConfig()
    if path:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise ConfigError(f"cannot read config file {path}: {e}")
        cfg = apply_values(cfg, parse_config_text(text))
    if overrides:
        cfg = apply_values(cfg, overrides)
    return cfg
