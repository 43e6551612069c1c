"""Parameter sweeps: row evaluation, parallel execution, CSV/JSON output."""

from __future__ import annotations

import csv
import itertools
import json
import logging
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, apply_axis
from .correlations import asymmetry_factor, correlation_report
from .liouvillian import generator
from .model import Mode, SystemParams, common_mode_active, crossing_condition
from .steady import steady_chr, steady_ihr
from .thermo import (
    channel_currents,
    crossover_fractions,
    heat_report,
    rectification,
    reservoir_current,
)

__all__ = ["SweepRow", "run_sweep", "write_outputs", "evaluate_point", "COLUMNS", "resolve_threads"]

log = logging.getLogger(__name__)

NAN = float("nan")
PARAM_COLUMNS = ("omega_A", "omega_B", "omega_C", "g_AB", "g_BC", "g_AC", "kappa", "T_L", "T_R", "mode")

# column -> description; units are omega_0 (energies, temperatures) and
# kappa*omega_0 scale currents expressed in omega_0^2
COLUMNS = {
    "variant": "variant label within a preset (empty if none)",
    "index": "row index in lexicographic axis order",
    **{k: f"system parameter {k} (omega_0 units)" for k in PARAM_COLUMNS if k != "mode"},
    "mode": "reservoir mode (Auto, ForceIndependent, ForceCommon)",
    "p": "weight of the heat-conducting steady state",
    "crossing": "crossing condition omega_A == omega_C and g_AB == g_BC holds",
    "common_mode": "crossing dissipator active",
    "null_dim": "kernel dimension of the steady-state coefficient matrix",
    "residual": "max |L[rho]| at the reported steady state",
    "warnings": "warnings raised while evaluating the row",
    "error": "error message if the row failed",
    "q_A": "heat current through qubit A (omega_0^2)",
    "q_B": "heat current through qubit B (omega_0^2)",
    "q_C": "heat current through qubit C (omega_0^2)",
    "q_L": "heat current from the left reservoir (omega_0^2)",
    "q_R": "heat current from the right reservoir (omega_0^2)",
    "q_L_ihr": "q_L with qubits A, C on independent reservoirs",
    "q_R_ihr": "q_R with qubits A, C on independent reservoirs",
    "q_L_direct": "direct channel of q_L",
    "q_L_crossing": "crossing channel of q_L",
    "p_d": "fraction at which the direct channel current vanishes",
    "p_c": "fraction at which the crossing channel current vanishes",
    "p_d_valid": "p_d lies in [0, 1]",
    "p_c_valid": "p_c lies in [0, 1]",
    "p_d_swapped": "p_d with T_L and T_R exchanged",
    "p_c_swapped": "p_c with T_L and T_R exchanged",
    "q_forward": "left current at (T_L, T_R)",
    "q_reverse": "left current at (T_R, T_L)",
    "R": "rectification factor",
    "R_defined": "at least one of the currents is nonzero",
    "q_forward_ihr": "q_forward on independent reservoirs",
    "q_reverse_ihr": "q_reverse on independent reservoirs",
    "R_ihr": "rectification factor on independent reservoirs",
    "S_L": "von Neumann entropy of qubits A, C (bits)",
    "S_R": "von Neumann entropy of qubit B (bits)",
    "S_LR": "von Neumann entropy of the full state (bits)",
    "I": "mutual information across the A,C | B cut (bits)",
    "C": "classical correlation, measurement on B (bits)",
    "Q": "quantum discord (bits)",
    "N": "negativity",
    "I_forward": "mutual information at (T_L, T_R) (bits)",
    "I_reverse": "mutual information at (T_R, T_L) (bits)",
    "A_I": "asymmetry factor of the mutual information",
    "I_forward_ihr": "I_forward on independent reservoirs",
    "I_reverse_ihr": "I_reverse on independent reservoirs",
    "A_I_ihr": "A_I on independent reservoirs",
    **{f"rho_{i}{i}": f"steady-state population of level {i}" for i in range(1, 9)},
    "rho_25_re": "real part of the 2-5 coherence",
    "rho_25_im": "imaginary part of the 2-5 coherence",
    "rho_47_re": "real part of the 4-7 coherence",
    "rho_47_im": "imaginary part of the 4-7 coherence",
}

GROUP_COLUMNS = {
    "currents": ("q_A", "q_B", "q_C", "q_L", "q_R", "q_L_direct", "q_L_crossing", "q_L_ihr", "q_R_ihr"),
    "channel_split": ("q_L_direct", "q_L_crossing"),
    "p_points": ("p_d", "p_c", "p_d_valid", "p_c_valid", "p_d_swapped", "p_c_swapped"),
    "rectification": ("q_forward", "q_reverse", "R", "R_defined", "q_forward_ihr", "q_reverse_ihr", "R_ihr"),
    "correlations": ("S_L", "S_R", "S_LR", "I", "C", "Q", "N"),
    "asymmetry": ("I_forward", "I_reverse", "A_I", "I_forward_ihr", "I_reverse_ihr", "A_I_ihr"),
    "steady_state": tuple(f"rho_{i}{i}" for i in range(1, 9))
    + ("rho_25_re", "rho_25_im", "rho_47_re", "rho_47_im"),
}
DIAG_COLUMNS = ("crossing", "common_mode", "null_dim", "residual", "warnings", "error")


@dataclass
class SweepRow:
    variant: str
    index: int
    axes: dict
    params: SystemParams
    p: float
    values: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def record(self) -> dict:
        out = {"variant": self.variant, "index": self.index}
        out.update(self.params.as_dict())
        out["p"] = self.p
        out.update(self.diagnostics)
        out.update(self.values)
        return out


def _independent(params: SystemParams) -> SystemParams:
    return replace(params, mode=Mode.FORCE_INDEPENDENT)


def _steady(params, p):
    """(rho, null_dim) for the mode in effect."""
    if common_mode_active(params):
        dec = steady_chr(params, p=p)
        return dec.rho, dec.null_dim
    return steady_ihr(params), 1


def _ihr_comparison(params):
    """Independent-reservoir comparison columns make sense only when the
    crossing dissipator would otherwise act."""
    return common_mode_active(params)


def evaluate_point(outputs, params: SystemParams, p: float) -> tuple:
    """Compute the requested groups at one point. Returns (values, diagnostics)."""
    values = {}
    diag = {
        "crossing": crossing_condition(params),
        "common_mode": common_mode_active(params),
        "null_dim": 0,
        "residual": NAN,
        "warnings": "",
        "error": "",
    }
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            rho, dim = _steady(params, p)
            diag["null_dim"] = dim
            diag["residual"] = float(np.max(np.abs(generator(params, rho).drho_dt)))
            if "currents" in outputs:
                rep = heat_report(params, rho)
                values.update(q_A=rep.q_A, q_B=rep.q_B, q_C=rep.q_C, q_L=rep.q_L, q_R=rep.q_R)
                values.update(q_L_direct=NAN, q_L_crossing=NAN)
                if diag["common_mode"]:
                    # exact p-linearity: combine the kernel states' currents
                    values.update(q_L=reservoir_current(params, "L", p), q_R=reservoir_current(params, "R", p))
                    values["q_L_direct"], values["q_L_crossing"] = channel_currents(params, p)
                if _ihr_comparison(params):
                    ind = _independent(params)
                    rep_i = heat_report(ind, steady_ihr(ind))
                    values.update(q_L_ihr=rep_i.q_L, q_R_ihr=rep_i.q_R)
            if "channel_split" in outputs:
                d, c = channel_currents(params, p)
                values.update(q_L_direct=d, q_L_crossing=c)
            if "p_points" in outputs:
                for suffix, q in (("", params), ("_swapped", params.swapped())):
                    cf = crossover_fractions(q)
                    values["p_d" + suffix] = cf.p_d
                    values["p_c" + suffix] = cf.p_c
                    if not suffix:
                        values.update(p_d_valid=cf.p_d_valid, p_c_valid=cf.p_c_valid)
            if "rectification" in outputs:
                r = rectification(params, "L", p)
                values.update(q_forward=r.q_forward, q_reverse=r.q_reverse, R=r.R, R_defined=r.defined)
                if _ihr_comparison(params):
                    ri = rectification(_independent(params), "L", p)
                    values.update(q_forward_ihr=ri.q_forward, q_reverse_ihr=ri.q_reverse, R_ihr=ri.R)
            if "correlations" in outputs:
                values.update(correlation_report(rho).as_dict())
            if "asymmetry" in outputs:
                a = asymmetry_factor(params, p)
                values.update(I_forward=a.I_forward, I_reverse=a.I_reverse, A_I=a.A_I)
                if _ihr_comparison(params):
                    ai = asymmetry_factor(_independent(params), p)
                    values.update(I_forward_ihr=ai.I_forward, I_reverse_ihr=ai.I_reverse, A_I_ihr=ai.A_I)
            if "steady_state" in outputs:
                for i in range(8):
                    values[f"rho_{i + 1}{i + 1}"] = float(rho[i, i].real)
                values.update(rho_25_re=float(rho[1, 4].real), rho_25_im=float(rho[1, 4].imag),
                              rho_47_re=float(rho[3, 6].real), rho_47_im=float(rho[3, 6].imag))
        except Exception as exc:  # captured per row, the sweep carries on
            diag["error"] = f"{type(exc).__name__}: {exc}"
    diag["warnings"] = "; ".join(sorted({str(w.message) for w in caught}))
    return values, diag


def _points(config: RunConfig):
    """(variant, axis dict, params, p) in lexicographic axis order."""
    for label, base, axes in config.blocks():
        grids = [a.values() for a in axes]
        for combo in itertools.product(*grids):
            params, p = base, config.p
            coords = {}
            for axis, value in zip(axes, combo):
                value = float(value)
                coords[axis.name] = value
                params, p = apply_axis(params, p, axis.name, value)
            yield label, coords, params, p


def _task(args):
    outputs, params, p = args
    return evaluate_point(outputs, params, p)


def resolve_threads(threads: int | None) -> int:
    if threads is None:
        env = os.environ.get("TRIQDIODE_THREADS")
        threads = int(env) if env else 1
    if threads < 1:
        raise ValueError("thread count must be >= 1")
    return threads


def run_sweep(config: RunConfig, threads: int | None = None) -> list:
    """Evaluate every grid point; row order never depends on ``threads``."""
    threads = resolve_threads(threads)
    points = list(_points(config))
    tasks = [(config.outputs, params, p) for _, _, params, p in points]
    if threads == 1 or len(tasks) < 2:
        results = [_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            chunk = max(1, len(tasks) // (4 * threads))
            results = list(ex.map(_task, tasks, chunksize=chunk))
    rows = []
    for k, ((label, coords, params, p), (values, diag)) in enumerate(zip(points, results)):
        rows.append(SweepRow(label, k, coords, params, p, values, diag))
    return rows


def _fmt(value) -> str:
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, Mode):
        return value.value
    return str(value)


def _group_header(group: str, rows) -> list:
    present = {k for r in rows for k in r.values}
    cols = [c for c in GROUP_COLUMNS[group] if c in present]
    return ["variant", "index", *PARAM_COLUMNS, "p", *DIAG_COLUMNS, *cols]


def write_outputs(rows, path_prefix, config: RunConfig | None = None) -> list:
    """Write ``<prefix>_<group>.csv`` per output group and ``<prefix>_manifest.json``.

    Returns the written paths.

    Raises
    ------
    OSError
        With the offending path in the message.
    """
    prefix = Path(path_prefix)
    groups = list(config.outputs) if config is not None else list(GROUP_COLUMNS)
    written = []
    try:
        prefix.parent.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {prefix.parent}: {exc}") from exc
    headers = {}
    for group in groups:
        header = _group_header(group, rows)
        headers[group] = header
        path = prefix.parent / f"{prefix.name}_{group}.csv"
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(header)
                for row in rows:
                    rec = row.record()
                    w.writerow([_fmt(rec.get(c, NAN)) for c in header])
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
        written.append(path)

    manifest = {
        "engine": "triqdiode",
        "version": __version__,
        "config": config.as_dict() if config is not None else None,
        "log_base": 2,
        "units": {
            "energy": "omega_0 (hbar = k_B = omega_0 = 1)",
            "temperature": "omega_0",
            "heat_current": "omega_0^2",
            "information": "bits",
        },
        "files": {g: f"{prefix.name}_{g}.csv" for g in groups},
        "columns": {g: {c: COLUMNS.get(c, c) for c in headers[g]} for g in groups},
        "rows": len(rows),
        "crossing": [bool(r.diagnostics.get("crossing", False)) for r in rows],
        "common_mode": [bool(r.diagnostics.get("common_mode", False)) for r in rows],
        "failed_rows": [r.index for r in rows if r.diagnostics.get("error")],
    }
    path = prefix.parent / f"{prefix.name}_manifest.json"
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True, allow_nan=True)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    written.append(path)
    return written
