"""Flat ``dotted.key = value`` run configuration files.

Example::

    grid.dx = 0.00625
    lanes.0.v_scale = 1.5
    lanes.1.v_scale = 2.5
    kernel.eta = 0.0625        # or "dx" for the local model
    initial.0 = sin2(0.5, -2, 2)
    run.lambda = auto
"""
from __future__ import annotations

import logging
import re
from dataclasses import replace
from pathlib import Path

from .errors import ConfigParseError, ConfigValidationError, MismatchedSupport
from .initial import Block, Constant, CosSquared, SinSquared, two_lane_initial_data
from .kernel import CENTER_CONVENTIONS, n_eta_for
from .model import KERNEL_SHAPES, KernelSpec, LaneModel, SystemSpec, validate_system
from .scheme import GridSpec, RunConfig

log = logging.getLogger(__name__)

DEFAULTS = {
    "grid.x_min": "-4",
    "grid.x_max": "4",
    "grid.dx": "0.00625",
    "kernel.shape": "linear_decreasing",
    "kernel.eta": "0.0625",
    "kernel.pre_normalized": "false",
    "run.t_final": "0.5",
    "run.beta": "0.3333",
    "run.lambda": "auto",
    "run.source_lipschitz": "auto",
    "integrator": "unsplit",
    "local": "false",
    "outputs.snapshot_times": "0, 0.017, 0.33, 0.5",
    "outputs.diagnostics": "true",
    "numerics.kahan": "false",
    "numerics.center": "symmetric",
}
FIXED_KEYS = set(DEFAULTS) | {"kernel.samples"}
LANE_KEY = re.compile(r"^lanes\.(\d+)\.(v_scale|g)$")
INITIAL_KEY = re.compile(r"^initial\.(\d+)$")
PROFILE = re.compile(r"^(\w+)\s*\(([^)]*)\)$")
LANE_FLUXES = {"lwr": LaneModel.lwr}
PROFILES = {"sin2": SinSquared, "cos2": CosSquared, "constant": Constant, "block": Block}


def read_pairs(text: str) -> dict:
    """``{key: (value, line_no)}``; rejects malformed, duplicate and unknown keys."""
    pairs = {}
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError("expected 'key = value'", line=no)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigParseError("empty key or value", line=no, key=key or None)
        if not (key in FIXED_KEYS or LANE_KEY.match(key) or INITIAL_KEY.match(key)):
            raise ConfigParseError("unknown key", line=no, key=key)
        if key in pairs:
            raise ConfigParseError("duplicate key", line=no, key=key)
        pairs[key] = (value, no)
    return pairs


def _float(pairs, key):
    value, no = pairs[key]
    try:
        return float(value)
    except ValueError:
        raise ConfigParseError(f"not a number: {value!r}", line=no, key=key) from None


def _bool(pairs, key):
    value, no = pairs[key]
    low = value.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ConfigParseError(f"not a boolean: {value!r}", line=no, key=key)


def _choice(pairs, key, options):
    value, no = pairs[key]
    if value not in options:
        raise ConfigParseError(f"expected one of {sorted(options)}, got {value!r}", line=no, key=key)
    return value


def _auto_or_float(pairs, key):
    if pairs[key][0] == "auto":
        return None
    return _float(pairs, key)


def _floats(pairs, key):
    value, no = pairs[key]
    try:
        return tuple(float(v) for v in value.split(",") if v.strip())
    except ValueError:
        raise ConfigParseError(f"not a list of numbers: {value!r}", line=no, key=key) from None


def _profile(value, no, key):
    m = PROFILE.match(value)
    if not m or m.group(1) not in PROFILES:
        raise ConfigParseError(f"expected one of {sorted(PROFILES)}(...), got {value!r}",
                               line=no, key=key)
    try:
        args = [float(a) for a in m.group(2).split(",") if a.strip()]
        return PROFILES[m.group(1)](*args)
    except (TypeError, ValueError) as exc:
        raise ConfigParseError(f"bad profile arguments: {exc}", line=no, key=key) from None


def parse_text(text: str) -> RunConfig:
    pairs = read_pairs(text)
    for key, value in DEFAULTS.items():
        if key not in pairs:
            log.info("config default %s = %s", key, value)
            pairs[key] = (value, None)

    lane_fields = {}
    for key, (value, no) in pairs.items():
        m = LANE_KEY.match(key)
        if m:
            lane_fields.setdefault(int(m.group(1)), {})[m.group(2)] = (value, no, key)
    problems = []
    if not lane_fields:
        problems.append("no lanes configured (lanes.0.v_scale)")
    if sorted(lane_fields) != list(range(len(lane_fields))):
        problems.append(f"lane indices must be 0..N-1, got {sorted(lane_fields)}")
    lanes = []
    for k in sorted(lane_fields):
        fields = lane_fields[k]
        if "v_scale" not in fields:
            problems.append(f"lanes.{k}.v_scale missing")
            continue
        value, no, key = fields["v_scale"]
        try:
            v = float(value)
        except ValueError:
            raise ConfigParseError(f"not a number: {value!r}", line=no, key=key) from None
        g_name, no_g, key_g = fields.get("g", ("lwr", None, f"lanes.{k}.g"))
        if g_name not in LANE_FLUXES:
            raise ConfigParseError(f"unknown flux {g_name!r}", line=no_g, key=key_g)
        lanes.append(LANE_FLUXES[g_name](v))

    dx = _float(pairs, "grid.dx")
    shape = _choice(pairs, "kernel.shape", KERNEL_SHAPES)
    local = _bool(pairs, "local")
    eta_raw = pairs["kernel.eta"][0]
    eta = dx if (local or eta_raw == "dx") else _float(pairs, "kernel.eta")
    samples = _floats(pairs, "kernel.samples") if "kernel.samples" in pairs else None
    try:
        kernel = KernelSpec(shape, eta, samples, _bool(pairs, "kernel.pre_normalized"))
    except ValueError as exc:
        raise ConfigValidationError([str(exc)]) from None
    spec = SystemSpec(tuple(lanes), kernel, _auto_or_float(pairs, "run.source_lipschitz"))

    beta = _float(pairs, "run.beta")
    if not 0.0 < beta < 2.0 / 3.0:
        problems.append(f"run.beta={beta} outside (0, 2/3)")
        beta = 1.0 / 3.0
    lam = _auto_or_float(pairs, "run.lambda")
    if lam is not None and lam <= 0:
        problems.append("run.lambda must be positive")
        lam = None
    t_final = _float(pairs, "run.t_final")
    grid = None
    try:
        grid = GridSpec(_float(pairs, "grid.x_min"), _float(pairs, "grid.x_max"), dx, t_final,
                        beta=beta, lam=lam)
    except ValueError as exc:
        problems.append(str(exc))
    try:
        n_eta_for(eta, dx)
    except MismatchedSupport as exc:
        problems.append(str(exc))

    defaults = two_lane_initial_data()
    initial = []
    for k in range(len(lanes)):
        key = f"initial.{k}"
        if key in pairs:
            value, no = pairs[key]
            initial.append(_profile(value, no, key))
        elif k < len(defaults):
            log.info("config default %s = two-lane profile", key)
            initial.append(defaults[k])
        else:
            problems.append(f"{key} missing")
    extra = [k for k in pairs if INITIAL_KEY.match(k) and int(k.split(".")[1]) >= len(lanes)]
    problems += [f"{k} has no matching lane" for k in extra]

    if lanes:
        problems += [str(v) for v in validate_system(spec)]
    if problems:
        raise ConfigValidationError(problems)

    return RunConfig(
        system=spec,
        grid=grid,
        initial=tuple(initial),
        snapshot_times=_floats(pairs, "outputs.snapshot_times"),
        integrator=_choice(pairs, "integrator", {"split", "unsplit"}),
        kahan=_bool(pairs, "numerics.kahan"),
        center=_choice(pairs, "numerics.center", set(CENTER_CONVENTIONS)),
        record_diagnostics=_bool(pairs, "outputs.diagnostics"),
    )


def parse_config(path) -> RunConfig:
    return parse_text(Path(path).read_text())


def with_overrides(cfg: RunConfig, *, lam=None, kahan=None, center=None) -> RunConfig:
    grid = cfg.grid if lam is None else cfg.grid.with_lambda(lam)
    return replace(cfg, grid=grid,
                   kahan=cfg.kahan if kahan is None else kahan,
                   center=cfg.center if center is None else center)
