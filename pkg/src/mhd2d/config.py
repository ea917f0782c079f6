"""Run configuration: a flat key = value text format and its defaults.

Minimal document: `nx`, `ny` and `t_final`.  Everything else has a
documented default (see DEFAULTS/README).  Unknown and duplicate keys
are rejected with line context; physical admissibility is delegated to
validate_params, so no partially valid Config ever escapes.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .core import InitialDataSpec, SimulationParams, validate_params
from .errors import ParseError, ValidationError

__all__ = ["Config", "parse_config", "parse_config_file", "MODES"]

MODES = ("regularized", "target", "mms", "sweep-eps", "sweep-delta", "verify")

_PARAM_KEYS = {
    # key -> (attribute, converter)
    "a": ("a", float),
    "gamma": ("gamma", float),
    "mu": ("mu", float),
    "lambda": ("lam", float),
    "eps": ("eps", float),
    "delta": ("delta", float),
    "Gamma": ("Gamma", float),
    "Lx": ("Lx", float),
    "Ly": ("Ly", float),
    "nx": ("nx", int),
    "ny": ("ny", int),
    "cfl": ("cfl", float),
    "t_final": ("t_final", float),
    "dt_max": ("dt_max", float),
    "advect_scheme": ("advect_scheme", str),
    "freeze_velocity": ("freeze_velocity", None),  # bool, parsed specially
}

_INIT_KEYS = {
    "init_kind": ("kind", str),
    "init_rho_base": ("rho_base", float),
    "init_b_base": ("b_base", float),
    "init_rho_amp": ("rho_amp", float),
    "init_b_amp": ("b_amp", float),
    "init_kx": ("kx", int),
    "init_ky": ("ky", int),
    "init_ratio_mid": ("ratio_mid", float),
    "init_ratio_amp": ("ratio_amp", float),
    "init_jx": ("jx", int),
    "init_jy": ("jy", int),
    "init_u_amp": ("u_amp", float),
    "init_m": ("m", float),
    "init_M": ("M", float),
    "init_path": ("path", str),
}

_OUTPUT_KEYS = ("mode", "record_interval", "snapshot_interval", "output_dir", "run_id")


@dataclass(frozen=True)
class Config:
    params: SimulationParams
    init: InitialDataSpec = field(default_factory=InitialDataSpec)
    mode: str = "regularized"
    record_interval: int = 10
    snapshot_interval: int = 100
    output_dir: str = "out"
    run_id: str = "run"

    def with_params(self, **kw) -> "Config":
        return replace(self, params=validate_params(replace(self.params, **kw)))


def _parse_bool(raw: str, key: str, lineno: int) -> bool:
    low = raw.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ParseError(f"line {lineno}: key {key!r} wants a boolean, got {raw!r}")


def parse_config(text: str) -> Config:
    """Parse a key = value document into a fully validated Config."""
    seen: dict[str, int] = {}
    pvals: dict[str, object] = {}
    ivals: dict[str, object] = {}
    ovals: dict[str, object] = {}

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected 'key = value', got {raw_line!r}")
        key, _, raw = line.partition("=")
        key = key.strip()
        raw = raw.strip()
        if not key or not raw:
            raise ParseError(f"line {lineno}: empty key or value in {raw_line!r}")
        if key in seen:
            raise ParseError(
                f"line {lineno}: duplicate key {key!r} (first seen on line {seen[key]})"
            )
        seen[key] = lineno

        try:
            if key in _PARAM_KEYS:
                attr, conv = _PARAM_KEYS[key]
                pvals[attr] = _parse_bool(raw, key, lineno) if conv is None else conv(raw)
            elif key in _INIT_KEYS:
                attr, conv = _INIT_KEYS[key]
                ivals[attr] = conv(raw)
            elif key == "mode":
                if raw not in MODES:
                    raise ParseError(f"line {lineno}: unknown mode {raw!r}, pick from {MODES}")
                ovals["mode"] = raw
            elif key in ("record_interval", "snapshot_interval"):
                v = int(raw)
                if v < 1:
                    raise ParseError(f"line {lineno}: {key} must be >= 1, got {v}")
                ovals[key] = v
            elif key == "output_dir":
                ovals["output_dir"] = raw
            elif key == "run_id":
                if not raw or any(c in raw for c in "/\\:*?\"<>| \t"):
                    raise ParseError(f"line {lineno}: run_id {raw!r} is not filesystem-safe")
                ovals["run_id"] = raw
            else:
                raise ParseError(f"line {lineno}: unknown key {key!r}")
        except ParseError:
            raise
        except ValueError as exc:
            raise ParseError(f"line {lineno}: bad value for {key!r}: {exc}") from exc

    for required in ("nx", "ny", "t_final"):
        if required not in seen:
            raise ParseError(f"missing required key {required!r}")

    mode = ovals.get("mode", "regularized")
    if mode in ("regularized", "sweep-eps", "sweep-delta", "verify", "mms"):
        pvals.setdefault("eps", 1e-2)
        pvals.setdefault("delta", 1e-2)
    elif mode == "target":
        pvals.setdefault("eps", 0.0)
        pvals.setdefault("delta", 0.0)
        if pvals.get("eps") != 0.0 or pvals.get("delta") != 0.0:
            raise ValidationError("mode=target requires eps = 0 and delta = 0")

    params = validate_params(SimulationParams(**pvals))
    init = InitialDataSpec(**ivals)
    if init.kind not in InitialDataSpec.KINDS:
        raise ValidationError(f"unknown init_kind {init.kind!r}")
    return Config(params=params, init=init, mode=mode, **{k: v for k, v in ovals.items() if k != "mode"})


def parse_config_file(path) -> Config:
    try:
        with open(path, "r") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)
