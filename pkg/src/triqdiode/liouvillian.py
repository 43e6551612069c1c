"""Global Lindblad generator and a fixed-step RK4 integrator.

Dissipator convention (no factor 1/2):  D[X, Y] rho = 2 X rho Y^+ - {Y^+ X, rho}.
A single eigen-operator V with gap w contributes
J(-w) D[V, V] + J(+w) D[V^+, V^+].

Qubit B's gaps 2->4 and 5->7 coincide whenever g_AB == g_BC.  The secular
treatment then merges them into one jump operator, which adds the cross
terms D[V24, V57] + D[V57, V24] (and the adjoint pair) to the B dissipator.
These only couple the coherences rho_25 and rho_47; they never move energy.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .model import (
    CROSSING_PAIRS,
    QUBITS,
    SystemParams,
    TransitionTable,
    bath_rate,
    common_mode_active,
    eigenvalues,
    qubit_b_degenerate,
    transition_table,
)

__all__ = [
    "GeneratorAction",
    "EvolveResult",
    "DensityMatrix",
    "validate_density_matrix",
    "basis_projector",
    "ket",
    "dissipator_single",
    "dissipator_crossing",
    "generator",
    "superoperator",
    "evolve",
    "default_dt",
    "StepInstabilityError",
    "CommonModeError",
]

log = logging.getLogger(__name__)

DIM = 8
CHANNELS = ("commutator", "L_A", "L_B", "L_C", "L_AC")


class StepInstabilityError(RuntimeError):
    pass


class CommonModeError(ValueError):
    """Raised when an operation needs the crossing dissipator but it is off."""


def ket(level: int) -> np.ndarray:
    v = np.zeros(DIM, dtype=complex)
    v[level - 1] = 1.0
    return v


def basis_projector(level: int) -> np.ndarray:
    v = ket(level)
    return np.outer(v, v.conj())


def _op(i: int, j: int) -> np.ndarray:
    """Eigen-operator |j><i| (1-based levels)."""
    m = np.zeros((DIM, DIM), dtype=complex)
    m[j - 1, i - 1] = 1.0
    return m


def validate_density_matrix(rho, herm_tol=1e-12, trace_tol=1e-12, psd_tol=1e-10) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > herm_tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > trace_tol:
        raise ValueError(f"density matrix trace is {np.trace(rho).real!r}, expected 1")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0] < -psd_tol:
        raise ValueError("density matrix is not positive semidefinite")
    return rho


DensityMatrix = np.ndarray


@dataclass
class GeneratorAction:
    drho_dt: np.ndarray
    channels: dict = field(default_factory=dict)

    def channel(self, name: str) -> np.ndarray:
        return self.channels.get(name, np.zeros((DIM, DIM), dtype=complex))


def _cross(X, Y, rho):
    """2 X rho Y^+ - {Y^+ X, rho}."""
    Yd = Y.conj().T
    YdX = Yd @ X
    return 2.0 * X @ rho @ Yd - YdX @ rho - rho @ YdX


def _geometric(a: float, b: float) -> float:
    """sqrt(a b), exact when the two rates coincide."""
    return a if a == b else math.sqrt(a * b)


def _terms_single(params: SystemParams, table: TransitionTable, mu: str) -> list:
    """(rate, X, Y) triples making up L_mu."""
    T = params.temperature_of(mu)
    terms = []
    for t in table.for_qubit(mu):
        V = _op(t.i, t.j)
        Vd = V.conj().T
        terms.append((bath_rate(params.kappa, -t.omega, T), V, V))
        terms.append((bath_rate(params.kappa, +t.omega, T), Vd, Vd))
    if mu == "B" and qubit_b_degenerate(params):
        t24 = table.get("B", 2, 4)
        t57 = table.get("B", 5, 7)
        V24, V57 = _op(2, 4), _op(5, 7)
        em = _geometric(bath_rate(params.kappa, -t24.omega, T), bath_rate(params.kappa, -t57.omega, T))
        ab = _geometric(bath_rate(params.kappa, t24.omega, T), bath_rate(params.kappa, t57.omega, T))
        terms += [
            (em, V24, V57), (em, V57, V24),
            (ab, V24.conj().T, V57.conj().T), (ab, V57.conj().T, V24.conj().T),
        ]
    return terms


def _terms_crossing(params: SystemParams, table: TransitionTable) -> list:
    T = params.T_L
    k = params.kappa
    terms = []
    for ia, ja, ic, jc in CROSSING_PAIRS:
        wa = table.get("A", ia, ja).omega
        wc = table.get("C", ic, jc).omega
        VA, VC = _op(ia, ja), _op(ic, jc)
        em = _geometric(bath_rate(k, -wa, T), bath_rate(k, -wc, T))
        ab = _geometric(bath_rate(k, wa, T), bath_rate(k, wc, T))
        terms += [
            (em, VA, VC), (em, VC, VA),
            (ab, VA.conj().T, VC.conj().T), (ab, VC.conj().T, VA.conj().T),
        ]
    return terms


def _apply(terms, rho):
    out = np.zeros((DIM, DIM), dtype=complex)
    for rate, X, Y in terms:
        if rate:
            out += rate * _cross(X, Y, rho)
    return out


def dissipator_single(params: SystemParams, table: TransitionTable, rho, mu: str) -> np.ndarray:
    """Contribution L_mu[rho] of qubit ``mu``'s own reservoir coupling."""
    if mu not in QUBITS:
        raise ValueError(f"unknown qubit {mu!r}")
    return _apply(_terms_single(params, table, mu), np.asarray(rho, dtype=complex))


def dissipator_crossing(params: SystemParams, table: TransitionTable, rho) -> np.ndarray:
    """Crossing dissipator L_AC[rho] of the shared left reservoir.

    Raises
    ------
    CommonModeError
        If the crossing condition does not hold or the mode forces
        independent reservoirs.
    """
    if not common_mode_active(params):
        raise CommonModeError("crossing dissipator is only defined in common mode")
    return _apply(_terms_crossing(params, table), np.asarray(rho, dtype=complex))


def generator(params: SystemParams, rho) -> GeneratorAction:
    """Right-hand side of the master equation, split by channel."""
    rho = np.asarray(rho, dtype=complex)
    table = transition_table(params)
    lam = table.lambdas.as_array()
    # H diagonal: [H, rho]_ij = (l_i - l_j) rho_ij
    channels = {"commutator": -1j * (lam[:, None] - lam[None, :]) * rho}
    for mu in QUBITS:
        channels[f"L_{mu}"] = dissipator_single(params, table, rho, mu)
    if common_mode_active(params):
        channels["L_AC"] = dissipator_crossing(params, table, rho)
    total = sum(channels.values())
    return GeneratorAction(total, channels)


def superoperator(params: SystemParams, channels=CHANNELS) -> np.ndarray:
    """64x64 matrix of the generator acting on row-major vec(rho)."""
    L = np.zeros((DIM * DIM, DIM * DIM), dtype=complex)
    for k in range(DIM * DIM):
        E = np.zeros(DIM * DIM, dtype=complex)
        E[k] = 1.0
        act = generator(params, E.reshape(DIM, DIM))
        L[:, k] = sum(act.channel(c) for c in channels).ravel()
    return L


def default_dt(params: SystemParams) -> float:
    lam = eigenvalues(params).as_array()
    omega_max = max(np.max(lam) - np.min(lam), 1.0)
    return min(0.01 / omega_max, 0.1 / params.kappa)


@dataclass
class EvolveResult:
    rho: np.ndarray
    t: float
    steps: int
    dt: float
    max_positivity_violation: float
    method: str


def _rk4_step_matrix(L: np.ndarray, dt: float) -> np.ndarray:
    hL = dt * L
    eye = np.eye(L.shape[0], dtype=complex)
    hL2 = hL @ hL
    hL3 = hL2 @ hL
    return eye + hL + hL2 / 2.0 + hL3 / 6.0 + hL3 @ hL / 24.0


def _min_eig(rho):
    return float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])


def evolve(params: SystemParams, rho0, t_final: float, dt: float | None = None,
           method: str = "auto", max_stepwise: int = 200_000) -> EvolveResult:
    """Integrate the master equation with classical fixed-step RK4.

    ``method="stepwise"`` calls the 8x8 generator four times per step,
    renormalises trace drift above 1e-13 and tracks positivity at every step.
    ``method="power"`` applies the identical RK4 one-step map, written as a
    64x64 matrix polynomial, ``n`` times by binary exponentiation; positivity
    and trace are checked at every power-of-two checkpoint instead of every
    step.  ``"auto"`` picks stepwise when ``n <= max_stepwise``.

    The last step is shortened so that the final time is hit exactly.
    """
    rho = validate_density_matrix(rho0, trace_tol=1e-9, psd_tol=1e-9).copy()
    if t_final < 0:
        raise ValueError("t_final must be >= 0")
    if dt is None:
        dt = default_dt(params)
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if t_final == 0:
        return EvolveResult(rho, 0.0, 0, dt, max(0.0, -_min_eig(rho)), "identity")

    n_full = int(math.floor(t_final / dt))
    remainder = t_final - n_full * dt
    if remainder <= 1e-12 * dt:
        remainder = 0.0
    n_total = n_full + (1 if remainder else 0)
    if method == "auto":
        method = "stepwise" if n_total <= max_stepwise else "power"

    worst = max(0.0, -_min_eig(rho))
    if method == "stepwise":
        def f(r):
            return generator(params, r).drho_dt

        def step(r, h):
            k1 = f(r)
            k2 = f(r + 0.5 * h * k1)
            k3 = f(r + 0.5 * h * k2)
            k4 = f(r + h * k3)
            return r + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)

        for s in range(n_total):
            h = dt if s < n_full else remainder
            rho = step(rho, h)
            tr = np.trace(rho).real
            if abs(tr - 1.0) > 1e-6:
                raise StepInstabilityError(f"trace drifted to {tr!r} at step {s}")
            if abs(tr - 1.0) > 1e-13:
                rho = rho / tr
            worst = max(worst, -_min_eig(rho))
    elif method == "power":
        L = superoperator(params)
        P = _rk4_step_matrix(L, dt)
        vec = rho.ravel()
        n = n_full
        while n:
            if n & 1:
                vec = P @ vec
                r = vec.reshape(DIM, DIM)
                tr = np.trace(r).real
                if abs(tr - 1.0) > 1e-6:
                    raise StepInstabilityError(f"trace drifted to {tr!r}")
                worst = max(worst, -_min_eig(r))
            n >>= 1
            if n:
                P = P @ P
        if remainder:
            vec = _rk4_step_matrix(L, remainder) @ vec
        rho = vec.reshape(DIM, DIM)
        tr = np.trace(rho).real
        if abs(tr - 1.0) > 1e-6:
            raise StepInstabilityError(f"trace drifted to {tr!r}")
        if abs(tr - 1.0) > 1e-13:
            rho = rho / tr
        worst = max(worst, -_min_eig(rho))
    else:
        raise ValueError(f"unknown method {method!r}")
    return EvolveResult(rho, float(t_final), n_total, dt, worst, method)
