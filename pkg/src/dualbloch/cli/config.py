"""Run configuration: JSON documents with units embedded in key names.

Unknown keys are rejected. A missing key takes its default, so a config
file only needs to list what it changes.
"""

from __future__ import annotations

import copy
import json
import math
from pathlib import Path

import numpy as np

from ..analysis.classify import Thresholds
from ..core import TWO_PI, SystemParams
from ..integrator import IntegrationConfig, NoiseConfig
from .tables import config_from_header
from ..sweep import SweepBase, SweepGrid


class ConfigError(ValueError):
    pass


DEFAULTS: dict = {
    "seed": 0,
    "system": {
        "mean_larmor_hz": 2500.0,
        "dfreq_hz": 40.0,
        "alpha_over_alpha_c": 16.0,
        "t1_ms": 5.0,
        "t2_ms": 2.0,
        "m0": 0.5,
        "gamma_hz_per_nt": 7.0,
        "relaxation": True,
        "tilt": 0.1,
    },
    "integration": {
        "dt_us": 5.0,
        "t_total_s": 4.0,
        "t_transient_s": 1.0,
        "sample_stride": None,
        "allow_coarse_step": False,
    },
    "noise": {
        "enabled": False,
        "sigma_b_nt": 0.0,
        "mode": "common",
    },
    "thresholds": {
        "signal_rms_rel": 1e-3,
        "peak_rel_threshold": 0.2,
        "min_separation_hz": 5.0,
        "k_threshold": 0.8,
        "band_tolerance_hz": 5.0,
        "k_samples_per_period": 1.5,
        "k_phases": 100,
        "k_min_samples": 10000,
    },
    "sweep": {
        "dfreq_hz": {"start": 0.0, "stop": 300.0, "num": 31},
        "alpha_over_alpha_c": {"start": 0.5, "stop": 24.0, "num": 25},
    },
    "robustness": {
        "points": [
            {"name": "limit_cycle", "dfreq_hz": 40.0, "alpha_over_alpha_c": 16.0},
            {"name": "quasi_periodic", "dfreq_hz": 220.0, "alpha_over_alpha_c": 16.0},
        ],
        "sigma_b_nt": [0.0, 2.857142857, 5.714285714, 11.42857143, 22.85714286],
        "repeats": 10,
        "mode": "independent",
    },
}

# keys whose default is None still accept numbers
_NULLABLE_NUMBERS = {("integration", "sample_stride")}
_FREE_FORM = {("robustness", "points"), ("robustness", "sigma_b_nt")}


def _check(doc, ref, path=()):
    if not isinstance(doc, dict):
        raise ConfigError(f"{'.'.join(path) or '<root>'}: expected an object")
    for key, value in doc.items():
        here = path + (key,)
        dotted = ".".join(here)
        if key not in ref:
            raise ConfigError(f"unknown config key '{dotted}'")
        expected = ref[key]
        if here in _FREE_FORM:
            if not isinstance(value, list):
                raise ConfigError(f"'{dotted}' must be a list")
            continue
        if isinstance(expected, dict):
            _check(value, expected, here)
        elif isinstance(expected, bool):
            if not isinstance(value, bool):
                raise ConfigError(f"'{dotted}' must be true/false")
        elif isinstance(expected, (int, float)) or here in _NULLABLE_NUMBERS:
            if value is None and here in _NULLABLE_NUMBERS:
                continue
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"'{dotted}' must be a number")
            if isinstance(expected, int) and not isinstance(expected, bool) \
                    and not isinstance(value, int) and not float(value).is_integer():
                raise ConfigError(f"'{dotted}' must be an integer")
            if not math.isfinite(value):
                raise ConfigError(f"'{dotted}' must be finite")
        elif isinstance(expected, str):
            if not isinstance(value, str):
                raise ConfigError(f"'{dotted}' must be a string")


def _merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def parse_override(text: str) -> tuple[list[str], object]:
    if "=" not in text:
        raise ConfigError(f"override '{text}' is not key=value")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip().split("."), value


def apply_override(doc: dict, keys: list[str], value) -> dict:
    patch: dict = {}
    node = patch
    for k in keys[:-1]:
        node[k] = {}
        node = node[k]
    node[keys[-1]] = value
    _check(patch, DEFAULTS)
    return _merge(doc, patch)


def load_config(path, overrides=()) -> dict:
    """Read, validate and resolve a config file; returns the full resolved document.

    A table written by this package is accepted too; its header config is used.
    """
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config '{p}': {exc.strerror or exc}") from exc
    try:
        if text.lstrip().startswith("#"):
            # an exported table: rerun from the configuration in its header
            doc = config_from_header(text)
            if doc is None:
                raise ConfigError(f"'{p}' has a comment header without a config line")
        else:
            doc = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config '{p}' is not valid JSON: {exc}") from exc
    _check(doc, DEFAULTS)
    resolved = _merge(DEFAULTS, doc)
    for item in overrides:
        resolved = apply_override(resolved, *parse_override(item))
    validate_semantics(resolved)
    return resolved


def resolve(doc: dict | None = None, overrides=()) -> dict:
    doc = doc or {}
    _check(doc, DEFAULTS)
    resolved = _merge(DEFAULTS, doc)
    for item in overrides:
        resolved = apply_override(resolved, *parse_override(item))
    validate_semantics(resolved)
    return resolved


def validate_semantics(cfg: dict) -> None:
    try:
        system_params(cfg)
        integration_config(cfg)
        noise_config(cfg)
        thresholds(cfg)
        sweep_grid(cfg)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    if cfg["noise"]["mode"] not in ("common", "independent"):
        raise ConfigError("noise.mode must be 'common' or 'independent'")
    rob = cfg["robustness"]
    if rob["mode"] not in ("common", "independent"):
        raise ConfigError("robustness.mode must be 'common' or 'independent'")
    for pt in rob["points"]:
        if not isinstance(pt, dict) or set(pt) != {"name", "dfreq_hz", "alpha_over_alpha_c"}:
            raise ConfigError("robustness.points entries need exactly name, dfreq_hz, alpha_over_alpha_c")
    sig = rob["sigma_b_nt"]
    if len(sig) < 3 or any(not isinstance(s, (int, float)) or s < 0 for s in sig):
        raise ConfigError("robustness.sigma_b_nt needs >= 3 non-negative values")
    if int(rob["repeats"]) < 3:
        raise ConfigError("robustness.repeats must be >= 3")
    if not 0 <= int(cfg["seed"]) < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")


def system_params(cfg: dict, dfreq_hz=None, alpha_ratio=None) -> SystemParams:
    s = cfg["system"]
    t1 = s["t1_ms"] * 1e-3 if s["relaxation"] else math.inf
    t2 = s["t2_ms"] * 1e-3 if s["relaxation"] else math.inf
    m0 = s["m0"]
    alpha_ratio = s["alpha_over_alpha_c"] if alpha_ratio is None else alpha_ratio
    dfreq_hz = s["dfreq_hz"] if dfreq_hz is None else dfreq_hz
    # alpha_c is defined with the physical T2 even when relaxation is switched off
    params = SystemParams.from_split(
        dfreq_hz, alpha_ratio, s["mean_larmor_hz"],
        t1=s["t1_ms"] * 1e-3, t2=s["t2_ms"] * 1e-3, m0=m0,
        gamma=TWO_PI * s["gamma_hz_per_nt"],
    )
    return SystemParams(params.cells, params.alpha, t1, t2, m0, params.gamma)


def integration_config(cfg: dict) -> IntegrationConfig:
    c = cfg["integration"]
    stride = c["sample_stride"]
    return IntegrationConfig(
        dt=c["dt_us"] * 1e-6,
        t_total=c["t_total_s"],
        t_transient=c["t_transient_s"],
        sample_stride=None if stride is None else int(stride),
        seed=int(cfg["seed"]),
        allow_coarse_step=c["allow_coarse_step"],
    )


def noise_config(cfg: dict) -> NoiseConfig:
    n = cfg["noise"]
    return NoiseConfig(sigma_b=n["sigma_b_nt"], enabled=n["enabled"],
                       independent=n["mode"] == "independent")


def thresholds(cfg: dict) -> Thresholds:
    t = dict(cfg["thresholds"])
    t["k_phases"] = int(t["k_phases"])
    t["k_min_samples"] = int(t["k_min_samples"])
    return Thresholds(**t)


def _axis(spec: dict) -> tuple[float, ...]:
    num = int(spec["num"])
    if num < 1:
        raise ValueError("axis num must be >= 1")
    return tuple(np.linspace(spec["start"], spec["stop"], num).tolist())


def sweep_grid(cfg: dict) -> SweepGrid:
    s = cfg["system"]
    base = SweepBase(
        mean_larmor_hz=s["mean_larmor_hz"],
        t1=s["t1_ms"] * 1e-3,
        t2=s["t2_ms"] * 1e-3,
        m0=s["m0"],
        gamma=TWO_PI * s["gamma_hz_per_nt"],
        tilt=s["tilt"],
    )
    sw = cfg["sweep"]
    return SweepGrid(_axis(sw["dfreq_hz"]), _axis(sw["alpha_over_alpha_c"]), base)
