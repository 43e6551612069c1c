"""Oracle-triangle self-test: closed form vs null space vs long-time RK4."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .liouvillian import evolve
from .model import SystemParams, common_mode_active
from .steady import (
    rho2_closed_form,
    rho1_closed_form,
    steady_chr,
    steady_ihr,
    steady_ihr_kirchhoff,
)
from .thermo import heat_report

__all__ = ["OraclePoint", "random_params", "random_state", "oracle_point", "oracle_triangle", "run_self_test"]

log = logging.getLogger(__name__)

TOL = 1e-8
RELAX_TIME = 60.0  # in units of 1/kappa


@dataclass
class OraclePoint:
    params: SystemParams
    analytic: np.ndarray
    null_space: np.ndarray
    rk4: np.ndarray
    err_analytic: float
    err_rk4: float
    q_L: float
    q_R: float

    @property
    def max_err(self) -> float:
        return max(self.err_analytic, self.err_rk4)


def random_params(rng: np.random.Generator, common: bool) -> SystemParams:
    """A random point; ``common`` enforces the crossing condition."""
    w_a, w_b, w_c = rng.uniform(1.0, 6.0, 3)
    g_ab, g_bc, g_ac = rng.uniform(0.0, 0.3, 3)
    t_l, t_r = rng.uniform(0.5, 100.0, 2)
    if common:
        w_c, g_bc = w_a, g_ab
    return SystemParams(w_a, w_b, w_c, g_ab, g_bc, g_ac, 1e-3, t_l, t_r)


def random_state(rng: np.random.Generator) -> np.ndarray:
    """Random full-rank density matrix (Ginibre)."""
    G = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def oracle_point(params: SystemParams, rho0: np.ndarray) -> OraclePoint:
    """Three independent routes to the steady state reached from ``rho0``."""
    if common_mode_active(params):
        dec = steady_chr(params, rho0=rho0)
        numeric = dec.rho
        analytic = (1 - dec.p) * rho1_closed_form(params) + dec.p * rho2_closed_form(params)
    else:
        numeric = steady_ihr(params)
        analytic = steady_ihr_kirchhoff(params)
    rk4 = evolve(params, rho0, RELAX_TIME / params.kappa, method="power").rho
    rep = heat_report(params, numeric)
    return OraclePoint(
        params, analytic, numeric, rk4,
        float(np.max(np.abs(analytic - numeric))),
        float(np.max(np.abs(rk4 - numeric))),
        rep.q_L, rep.q_R,
    )


def oracle_triangle(n_points: int = 50, common: bool = True, seed: int = 0) -> list:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_points):
        params = random_params(rng, common)
        out.append(oracle_point(params, random_state(rng)))
    return out


def run_self_test(n_points: int = 5, seed: int = 0, stream=None) -> bool:
    """Run the triangle in both modes; print one line per mode."""
    ok = True
    for common in (True, False):
        pts = oracle_triangle(n_points, common, seed)
        worst = max(p.max_err for p in pts)
        passed = worst <= TOL
        ok &= passed
        label = "common" if common else "independent"
        print(f"{'PASS' if passed else 'FAIL'} oracle triangle ({label}, {n_points} points): "
              f"max deviation {worst:.2e}", file=stream)
    return ok
