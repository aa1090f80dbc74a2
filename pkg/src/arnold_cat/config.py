"""Run configuration: strict, schema-versioned JSON.

Every violation is collected before raising, so a misconfigured file is
reported in one pass.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from .catastrophe import Estimator, PathKind
from .errors import ArnoldError, ValidationError
from .potential import (ArnoldPotential, ShiftParameters, as_number, build_potential,
                        from_raw_coefficients)
from .spectral import GridSpec

SCHEMA_VERSION = 1

POTENTIAL_FORMS = ("params", "params_sq", "couplings", "raw_coefficients")

_TOP_KEYS = {"schema", "potential", "grid", "states", "estimators", "n_max",
             "locus", "scan", "outputs", "plot"}
_POTENTIAL_KEYS = set(POTENTIAL_FORMS) | {"N", "weights", "lambda_sq"}
_GRID_KEYS = {"half_width", "points"}
_LOCUS_KEYS = {"kind", "fixed_range", "estimator", "lambda_sq", "samples"}
_SCAN_KEYS = {"kind", "fixed", "range", "lambda_sq", "states"}
_OUTPUT_KEYS = {"csv", "svg", "psi"}
_PLOT_KEYS = {"x_range", "y_range", "title"}


class ConfigError(ValidationError):
    """Carries the full list of schema violations."""

    def __init__(self, errors: List[str]):
        self.errors = list(errors)
        super().__init__("invalid config:\n  " + "\n  ".join(self.errors))


@dataclass
class SweepRange:
    start: float
    stop: float
    step: float

    def values(self) -> List[float]:
        n = int(round((self.stop - self.start) / self.step))
        return [self.start + i * self.step for i in range(n + 1)]


@dataclass
class LocusSpec:
    kind: PathKind
    fixed_range: SweepRange
    estimator: Estimator = Estimator.HARMONIC
    lambda_sq: float = 1.0
    samples: int = 400


@dataclass
class ScanSpec:
    kind: PathKind
    fixed: float
    range: SweepRange
    lambda_sq: float = 1.0
    states: int = 8


@dataclass
class RunConfig:
    potential: Optional[ArnoldPotential] = None
    shift: Optional[ShiftParameters] = None
    grid: Optional[GridSpec] = None
    states: int = 8
    estimators: Tuple[Estimator, ...] = (Estimator.HARMONIC,)
    n_max: int = 3
    locus: Optional[LocusSpec] = None
    scan: Optional[ScanSpec] = None
    outputs: Dict[str, str] = field(default_factory=dict)
    plot: Dict[str, Any] = field(default_factory=dict)


def parse_range(text) -> SweepRange:
    """``"a:b:s"`` or ``[a, b, s]``."""
    parts = text.split(":") if isinstance(text, str) else list(text)
    if len(parts) != 3:
        raise ValidationError(f"range {text!r} must have the form start:stop:step")
    try:
        a, b, s = (float(as_number(p)) for p in parts)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"range {text!r}: {exc}") from None
    if not s > 0 or b < a:
        raise ValidationError(f"range {text!r} needs step > 0 and stop >= start")
    return SweepRange(a, b, s)


def _unknown(where: str, data: dict, allowed: set, errors: List[str]):
    for k in sorted(set(data) - allowed):
        errors.append(f"{where}: unknown key {k!r}")


def _writable(path: str) -> bool:
    parent = os.path.dirname(os.path.abspath(path)) or "."
    if os.path.exists(path):
        return os.access(path, os.W_OK) and not os.path.isdir(path)
    return os.path.isdir(parent) and os.access(parent, os.W_OK)


def _positive_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool) and v > 0


def _parse_potential(data: dict, errors: List[str]):
    if not isinstance(data, dict):
        errors.append("potential: must be an object")
        return None, None
    _unknown("potential", data, _POTENTIAL_KEYS, errors)
    forms = [k for k in POTENTIAL_FORMS if k in data]
    if len(forms) != 1:
        errors.append("potential: exactly one of " + ", ".join(POTENTIAL_FORMS)
                      + (f" is required, got {' and '.join(forms)} (conflict)" if forms else
                         " is required"))
        return None, None
    form = forms[0]
    try:
        lam = as_number(data.get("lambda_sq", 1))
        if not lam > 0:
            raise ValidationError("lambda_sq must be positive")
        weights = data.get("weights")
        shift = None
        if form == "params":
            shift = ShiftParameters.from_params(data["params"], weights)
        elif form == "params_sq":
            shift = ShiftParameters.from_squares(data["params_sq"], weights)
        if shift is not None:
            pot = build_potential(shift, lam)
        elif form == "couplings":
            couplings = tuple(as_number(c) for c in data["couplings"])
            pot = ArnoldPotential(len(couplings), couplings, lam)
        else:
            pot = from_raw_coefficients(data["raw_coefficients"], lam)
        if "N" in data and data["N"] != pot.N:
            raise ValidationError(f"N={data['N']} disagrees with the {form} given (N={pot.N})")
        if weights is not None and shift is None:
            raise ValidationError("weights apply only to params/params_sq")
        return pot, shift
    except (ArnoldError, TypeError, ValueError) as exc:
        errors.append(f"potential: {exc}")
        return None, None


def _parse_path(where, data, keys, errors):
    if not isinstance(data, dict):
        errors.append(f"{where}: must be an object")
        return None
    _unknown(where, data, keys, errors)
    try:
        return PathKind(data.get("kind"))
    except ValueError:
        errors.append(f"{where}: kind must be one of {[k.value for k in PathKind]}")
        return None


def parse_config(text: str) -> RunConfig:
    """Validate a JSON run configuration; raises :class:`ConfigError`."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"not valid JSON: {exc}"]) from None
    if not isinstance(data, dict):
        raise ConfigError(["top level must be an object"])
    errors: List[str] = []
    _unknown("config", data, _TOP_KEYS, errors)
    if data.get("schema") != SCHEMA_VERSION:
        errors.append(f"schema: expected {SCHEMA_VERSION}, got {data.get('schema')!r}")
    cfg = RunConfig()

    if "potential" in data:
        cfg.potential, cfg.shift = _parse_potential(data["potential"], errors)

    g = data.get("grid")
    if g is not None:
        if not isinstance(g, dict):
            errors.append("grid: must be an object")
        else:
            _unknown("grid", g, _GRID_KEYS, errors)
            try:
                lam = float(cfg.potential.lambda_sq) if cfg.potential is not None else None
                cfg.grid = GridSpec(float(g["half_width"]), g["points"], lam)
            except KeyError as exc:
                errors.append(f"grid: missing {exc}")
            except (ArnoldError, TypeError, ValueError) as exc:
                errors.append(f"grid: {exc}")

    for key in ("states", "n_max"):
        if key in data:
            if key == "n_max" and data[key] == 0:
                cfg.n_max = 0
            elif _positive_int(data[key]):
                setattr(cfg, key, data[key])
            else:
                errors.append(f"{key}: must be a positive integer")

    if "estimators" in data:
        try:
            cfg.estimators = tuple(Estimator(e) for e in data["estimators"])
        except (TypeError, ValueError):
            errors.append("estimators: entries must be 'harmonic' or 'numeric'")

    if "locus" in data:
        d = data["locus"]
        kind = _parse_path("locus", d, _LOCUS_KEYS, errors)
        if kind is not None:
            try:
                cfg.locus = LocusSpec(kind, parse_range(d["fixed_range"]),
                                      Estimator(d.get("estimator", "harmonic")),
                                      float(as_number(d.get("lambda_sq", 1))),
                                      int(d.get("samples", 400)))
            except KeyError as exc:
                errors.append(f"locus: missing {exc}")
            except (ArnoldError, TypeError, ValueError) as exc:
                errors.append(f"locus: {exc}")

    if "scan" in data:
        d = data["scan"]
        kind = _parse_path("scan", d, _SCAN_KEYS, errors)
        if kind is not None:
            try:
                cfg.scan = ScanSpec(kind, float(d["fixed"]), parse_range(d["range"]),
                                    float(as_number(d.get("lambda_sq", 1))),
                                    int(d.get("states", 8)))
            except KeyError as exc:
                errors.append(f"scan: missing {exc}")
            except (ArnoldError, TypeError, ValueError) as exc:
                errors.append(f"scan: {exc}")

    out = data.get("outputs", {})
    if not isinstance(out, dict):
        errors.append("outputs: must be an object")
    else:
        _unknown("outputs", out, _OUTPUT_KEYS, errors)
        for k, p in out.items():
            if k not in _OUTPUT_KEYS:
                continue
            if not isinstance(p, str) or not _writable(p):
                errors.append(f"outputs.{k}: path {p!r} is not writable")
            else:
                cfg.outputs[k] = p

    plot = data.get("plot", {})
    if not isinstance(plot, dict):
        errors.append("plot: must be an object")
    else:
        _unknown("plot", plot, _PLOT_KEYS, errors)
        cfg.plot = dict(plot)

    if cfg.potential is None and cfg.locus is None and cfg.scan is None and "potential" not in data:
        errors.append("config: one of potential, locus or scan is required")
    if errors:
        raise ConfigError(errors)
    return cfg


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)
