"""Run configuration: JSON schema, validation and figure presets."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .model import Mode, SystemParams, crossing_condition

__all__ = [
    "AXIS_NAMES",
    "OUTPUT_GROUPS",
    "PRESETS",
    "Axis",
    "Variant",
    "RunConfig",
    "ConfigError",
    "load_config",
    "parse_config",
    "preset_config",
    "apply_axis",
]

AXIS_NAMES = ("T_L", "T_R", "omega_A", "omega_C", "omega", "omega_B", "g", "g_AC", "p")
OUTPUT_GROUPS = ("currents", "channel_split", "p_points", "rectification",
                 "correlations", "asymmetry", "steady_state")
PARAM_KEYS = tuple(f.name for f in fields(SystemParams))
DEFAULT_GRID = 61


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    count: int
    spacing: str = "linear"

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ConfigError(f"axis name must be one of {AXIS_NAMES}, got {self.name!r}")
        if not isinstance(self.count, int) or self.count < 2:
            raise ConfigError(f"axis {self.name}: count must be an integer >= 2")
        if not self.start < self.stop:
            raise ConfigError(f"axis {self.name}: start must be < stop")
        if self.spacing not in ("linear", "log"):
            raise ConfigError(f"axis {self.name}: spacing must be 'linear' or 'log'")
        if self.spacing == "log" and self.start <= 0:
            raise ConfigError(f"axis {self.name}: log spacing requires start > 0")

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)

    def as_dict(self) -> dict:
        return {"name": self.name, "start": self.start, "stop": self.stop,
                "count": self.count, "spacing": self.spacing}


@dataclass(frozen=True)
class Variant:
    label: str
    overrides: dict = field(default_factory=dict)
    axes: tuple | None = None

    def as_dict(self) -> dict:
        out = {"label": self.label, "overrides": dict(self.overrides)}
        if self.axes is not None:
            out["axes"] = [a.as_dict() for a in self.axes]
        return out


@dataclass(frozen=True)
class RunConfig:
    base: SystemParams
    axes: tuple
    outputs: tuple
    p: float = 1.0
    preset: str | None = None
    variants: tuple = ()

    def blocks(self):
        """(label, base params, axes) for each variant, or the single base block."""
        if not self.variants:
            yield "", self.base, self.axes
            return
        for v in self.variants:
            yield v.label, replace(self.base, **v.overrides), (v.axes if v.axes is not None else self.axes)

    def as_dict(self) -> dict:
        out = {
            "base": self.base.as_dict(),
            "axes": [a.as_dict() for a in self.axes],
            "outputs": list(self.outputs),
            "p": self.p,
        }
        if self.preset:
            out["preset"] = self.preset
        if self.variants:
            out["variants"] = [v.as_dict() for v in self.variants]
        return out


def apply_axis(params: SystemParams, p: float, name: str, value: float):
    """Return (params, p) with one axis coordinate set."""
    if name == "p":
        return params, float(value)
    if name == "omega":
        return replace(params, omega_A=value, omega_C=value), p
    if name == "g":
        return replace(params, g_AB=value, g_BC=value), p
    return replace(params, **{name: value}), p


def _reject_unknown(obj: dict, allowed, where: str):
    extra = sorted(set(obj) - set(allowed))
    if extra:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(extra)}")


def _parse_params(obj: dict, where: str, defaults: SystemParams | None = None) -> SystemParams:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be an object")
    _reject_unknown(obj, PARAM_KEYS, where)
    kwargs = (defaults or SystemParams()).as_dict()
    kwargs.update(obj)
    try:
        return SystemParams(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _parse_axes(items, where: str) -> tuple:
    if not isinstance(items, list):
        raise ConfigError(f"{where} must be a list")
    if len(items) > 2:
        raise ConfigError(f"{where}: at most 2 sweep axes are allowed")
    axes = []
    for k, item in enumerate(items):
        if not isinstance(item, dict):
            raise ConfigError(f"{where}[{k}] must be an object")
        _reject_unknown(item, ("name", "start", "stop", "count", "spacing"), f"{where}[{k}]")
        try:
            axes.append(Axis(**item))
        except TypeError as exc:
            raise ConfigError(f"{where}[{k}]: {exc}") from None
    names = [a.name for a in axes]
    if len(set(names)) != len(names):
        raise ConfigError(f"{where}: duplicate axis names")
    return tuple(axes)


def _check_p_axis(params: SystemParams, axes, where):
    if any(a.name == "p" for a in axes):
        if params.mode is Mode.FORCE_INDEPENDENT or not crossing_condition(params):
            raise ConfigError(f"{where}: a p axis is only valid in common mode")
        a = next(a for a in axes if a.name == "p")
        if a.start < 0 or a.stop > 1:
            raise ConfigError(f"{where}: p axis must lie within [0, 1]")


def parse_config(obj: dict, preset_override: str | None = None) -> RunConfig:
    """Validate a decoded JSON object into a RunConfig.

    A ``preset`` supplies defaults for every field; keys given explicitly in
    the object override them.
    """
    if not isinstance(obj, dict):
        raise ConfigError("config root must be a JSON object")
    _reject_unknown(obj, ("base", "axes", "outputs", "p", "preset", "variants"), "config")
    preset = preset_override or obj.get("preset")
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        start = PRESETS[preset]()
    else:
        start = None

    base = _parse_params(obj.get("base", {}), "base", start.base if start else None)
    axes = _parse_axes(obj["axes"], "axes") if "axes" in obj else (start.axes if start else ())
    outputs = obj.get("outputs", list(start.outputs) if start else None)
    if not outputs:
        raise ConfigError("outputs must be a non-empty list")
    if not isinstance(outputs, list) or any(o not in OUTPUT_GROUPS for o in outputs):
        raise ConfigError(f"outputs must be drawn from {OUTPUT_GROUPS}")
    if len(set(outputs)) != len(outputs):
        raise ConfigError("outputs contain duplicates")
    p = obj.get("p", start.p if start else 1.0)
    if not isinstance(p, (int, float)) or not 0 <= p <= 1 or math.isnan(p):
        raise ConfigError("p must be a number in [0, 1]")

    if "variants" in obj:
        raw = obj["variants"]
        if not isinstance(raw, list):
            raise ConfigError("variants must be a list")
        variants = []
        for k, v in enumerate(raw):
            if not isinstance(v, dict):
                raise ConfigError(f"variants[{k}] must be an object")
            _reject_unknown(v, ("label", "overrides", "axes"), f"variants[{k}]")
            ov = v.get("overrides", {})
            _reject_unknown(ov, PARAM_KEYS, f"variants[{k}].overrides")
            vaxes = _parse_axes(v["axes"], f"variants[{k}].axes") if "axes" in v else None
            variants.append(Variant(str(v.get("label", k)), dict(ov), vaxes))
        variants = tuple(variants)
    else:
        variants = start.variants if start else ()

    cfg = RunConfig(base, axes, tuple(outputs), float(p), preset, variants)
    for label, params, block_axes in cfg.blocks():
        where = f"variant {label!r}" if label else "config"
        try:
            params = replace(params)  # re-run validation on overrides
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}") from None
        _check_p_axis(params, block_axes, where)
    return cfg


def load_config(path, preset: str | None = None) -> RunConfig:
    """Read and validate a UTF-8 JSON run configuration.

    Raises
    ------
    ConfigError
        On malformed JSON (with line and column) or an invalid field.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_config(obj, preset)


# --- presets -----------------------------------------------------------------
# Base parameters are the published figure values (omega_0 = 1).  Axis ranges
# and grid sizes are not published; they are choices recorded in the output
# manifest.

FIG2_LEFT = dict(omega_A=3.0, omega_C=2.0, omega_B=5.0, g_AB=0.1, g_BC=0.1, g_AC=0.1,
                 kappa=1e-3, T_R=21.0)
FIG2_RIGHT = dict(FIG2_LEFT, omega_C=3.0)
FIG3 = dict(FIG2_RIGHT, T_L=100.0, T_R=21.0)
FIG7_B = dict(omega_A=1.0, omega_C=1.0, omega_B=5.0, g_AB=0.1, g_BC=0.1, g_AC=0.1,
              kappa=1e-3, T_R=1.0)
FIG7_D = dict(FIG7_B, omega_A=5.0, omega_C=5.0, omega_B=1.0)
APPD = dict(omega_A=3.0, omega_C=3.0, omega_B=5.0, g_AB=0.1, g_BC=0.1, g_AC=0.1,
            kappa=1e-3, T_L=21.0, T_R=21.0)

_T_SURFACE = Axis("T_L", 1.0, 100.0, DEFAULT_GRID)
_T_LOG = Axis("T_L", 0.1, 100.0, DEFAULT_GRID, "log")


def _fig2(side, second):
    base = FIG2_LEFT if side == "left" else FIG2_RIGHT
    return lambda: RunConfig(
        SystemParams(**base, T_L=100.0),
        (_T_SURFACE, second),
        ("currents",),
        1.0,
    )


PRESETS = {
    "fig2a": _fig2("left", Axis("omega_C", 1.0, 6.0, DEFAULT_GRID)),
    "fig2b": _fig2("right", Axis("omega", 1.0, 6.0, DEFAULT_GRID)),
    "fig2c": _fig2("left", Axis("g", 0.0, 0.3, DEFAULT_GRID)),
    "fig2d": _fig2("right", Axis("g", 0.0, 0.3, DEFAULT_GRID)),
    "fig2e": _fig2("left", Axis("g_AC", 0.0, 0.3, DEFAULT_GRID)),
    "fig2f": _fig2("right", Axis("g_AC", 0.0, 0.3, DEFAULT_GRID)),
    "fig3": lambda: RunConfig(
        SystemParams(**FIG3),
        (Axis("p", 0.0, 1.0, 101),),
        ("currents", "channel_split"),
        variants=(Variant("forward", {}), Variant("reverse", {"T_L": 21.0, "T_R": 100.0})),
    ),
    "fig4ab": lambda: RunConfig(
        SystemParams(**APPD),
        (_T_LOG,),
        ("p_points",),
    ),
    "fig7": lambda: RunConfig(
        SystemParams(**FIG7_B, T_L=1.0),
        (Axis("T_L", 0.1, 10.0, 100),),
        ("rectification", "asymmetry"),
        1.0,
        variants=(Variant("b", {}), Variant("d", {k: FIG7_D[k] for k in ("omega_A", "omega_C", "omega_B")})),
    ),
    "fig8": lambda: RunConfig(
        SystemParams(**APPD),
        (Axis("omega", 1.0, 10.0, DEFAULT_GRID), _T_LOG),
        ("p_points",),
        variants=(
            Variant("ab", {}),
            Variant("cd", {}, (Axis("omega_B", 1.0, 10.0, DEFAULT_GRID), _T_LOG)),
        ),
    ),
    "fig9": lambda: RunConfig(
        SystemParams(**APPD),
        (Axis("g", 0.0, 0.3, DEFAULT_GRID), _T_LOG),
        ("p_points",),
        variants=(
            Variant("ab", {}),
            Variant("cd", {}, (Axis("g_AC", 0.0, 0.3, DEFAULT_GRID), _T_LOG)),
        ),
    ),
}


def preset_config(name: str) -> RunConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}")
    cfg = PRESETS[name]()
    return replace(cfg, preset=name)
