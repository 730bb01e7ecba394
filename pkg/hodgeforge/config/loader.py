import logging
import os
from pathlib import Path
from typing import Optional

import yaml
from pydantic import BaseModel, Field

from hodgeforge.core.constants import (DEFAULT_THREADS, FW_SHIFT_CALIBRATED, FW_SHIFT_LITERAL, PROBE_TRIALS_DEFAULT,
                                       SAITO_SHIFT_DEFAULT, THREADS_ENV)

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent / "default.yaml"

# top-level keys of older drafts that are no longer read
LEGACY_KEYS = ("fw", "threads", "seed")


class ReportConfig(BaseModel):
    format: str = "md"
    timings: bool = False


class ChecksConfig(BaseModel):
    fw_shift: int = FW_SHIFT_CALIBRATED
    fw_shift_literal: int = FW_SHIFT_LITERAL
    saito_shift: int = SAITO_SHIFT_DEFAULT


class ProbeConfig(BaseModel):
    trials: int = PROBE_TRIALS_DEFAULT
    seed: int = 0


class PoolConfig(BaseModel):
    threads: int = DEFAULT_THREADS


class ToricConfig(BaseModel):
    ray_order: str = "forward"
    quantum_samples: int = 10


class HodgeforgeConfig(BaseModel):
    report: ReportConfig = Field(default_factory=ReportConfig)
    checks: ChecksConfig = Field(default_factory=ChecksConfig)
    probe: ProbeConfig = Field(default_factory=ProbeConfig)
    pool: PoolConfig = Field(default_factory=PoolConfig)
    toric: ToricConfig = Field(default_factory=ToricConfig)
    log_level: str = "WARNING"


def load_config(path: Optional[str] = None) -> HodgeforgeConfig:
    if path is None:
        path = DEFAULT_CONFIG_PATH
    if not os.path.exists(path):
        raise FileNotFoundError(f"Config not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ValueError(f"config {path} must be a mapping, got {type(data).__name__}")

    for lk in LEGACY_KEYS:
        if lk in data:
            raise ValueError(f"Legacy config key '{lk}' is not supported; move it under its section "
                             f"(checks, probe or pool).")
    known = set(HodgeforgeConfig.model_fields)
    unknown = sorted(set(data) - known)
    if unknown:
        raise ValueError(f"Unknown config keys: {', '.join(unknown)}")
    for section in ("report", "checks", "probe", "pool", "toric"):
        if data.get(section) is None:
            data[section] = {}
    data["report"].setdefault("format", "md")
    data["pool"].setdefault("threads", DEFAULT_THREADS)

    cfg = HodgeforgeConfig(**data)
    logging.debug(f"[config] loaded {path}")
    return cfg


def _env_int(name: str) -> Optional[int]:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        logging.warning(f"[config] ignoring malformed {name}={raw!r}")
        return None


def apply_env_overrides(cfg: HodgeforgeConfig) -> HodgeforgeConfig:
    """HODGEFORGE_* environment variables win over file values."""
    threads = _env_int(THREADS_ENV)
    if threads is not None:
        cfg.pool.threads = max(1, threads)
    fw = _env_int("HODGEFORGE_FW_SHIFT")
    if fw is not None:
        cfg.checks.fw_shift = fw
    saito = _env_int("HODGEFORGE_SAITO_SHIFT")
    if saito is not None:
        cfg.checks.saito_shift = saito
    seed = _env_int("HODGEFORGE_SEED")
    if seed is not None:
        cfg.probe.seed = seed
    cfg.log_level = os.getenv("HODGEFORGE_LOG_LEVEL", cfg.log_level)
    return cfg
