"""Heat currents, channel split, crossover fractions and rectification.

Sign convention: a positive current flows from the reservoir into the
system.  Q_mu = Tr{H_S L_mu[rho]}.
"""

from __future__ import annotations

import logging
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .liouvillian import CommonModeError, _terms_crossing, _terms_single
from .model import QUBITS, SystemParams, bath_rate, common_mode_active, transition_table
from .steady import steady_chr, steady_ihr

__all__ = [
    "HeatReport",
    "RectificationResult",
    "CrossoverFractions",
    "DegenerateDenominator",
    "heat_current_qubit",
    "heat_current_reservoir",
    "heat_report",
    "channel_split",
    "crossover_fractions",
    "rectification",
    "analytic_heat_currents",
    "reservoir_current",
    "channel_currents",
    "gross_heat_flux",
]

log = logging.getLogger(__name__)

IMAG_WARN = 1e-10
ZERO_CURRENT = 1e-16


class DegenerateDenominator(ZeroDivisionError):
    pass


def _heat_operator(params: SystemParams, terms) -> np.ndarray:
    """Q with Tr{H D[rho]} = Tr{Q rho}, built in extended precision.

    For one term D[X,Y], Q = 2 Y^+ H X - H Y^+ X - Y^+ X H.  The direct and
    crossing channels cancel almost exactly in the heat-resisting state, so
    the contraction is kept in long double to stay below double rounding.
    """
    H = np.diag(transition_table(params).lambdas.as_array().astype(np.longdouble))
    Q = np.zeros((8, 8), dtype=np.longdouble)
    for rate, X, Y in terms:
        if rate:
            Xl = X.real.astype(np.longdouble)
            Yd = Y.real.T.astype(np.longdouble)
            YX = Yd @ Xl
            Q += np.longdouble(rate) * (2 * Yd @ H @ Xl - H @ YX - YX @ H)
    return Q


def _contract(Q: np.ndarray, rho) -> float:
    rho = np.asarray(rho, dtype=complex)
    re = np.sum(Q * rho.real.T.astype(np.longdouble))
    im = np.sum(Q * rho.imag.T.astype(np.longdouble))
    if abs(im) > IMAG_WARN:
        warnings.warn(f"heat current has imaginary residue {float(im):.2e}")
    return float(re)


def heat_current_qubit(params: SystemParams, rho, mu: str) -> float:
    if mu not in QUBITS:
        raise ValueError(f"unknown qubit {mu!r}")
    terms = _terms_single(params, transition_table(params), mu)
    return _contract(_heat_operator(params, terms), rho)


def _crossing_current(params, rho):
    if not common_mode_active(params):
        raise CommonModeError("crossing dissipator is only defined in common mode")
    terms = _terms_crossing(params, transition_table(params))
    return _contract(_heat_operator(params, terms), rho)


def heat_current_reservoir(params: SystemParams, rho, alpha: str) -> float:
    if alpha == "R":
        return heat_current_qubit(params, rho, "B")
    if alpha == "L":
        q = heat_current_qubit(params, rho, "A") + heat_current_qubit(params, rho, "C")
        if common_mode_active(params):
            q += _crossing_current(params, rho)
        return q
    raise ValueError(f"unknown reservoir {alpha!r}")


def channel_split(params: SystemParams, rho) -> tuple:
    """(direct, crossing) parts of the left-reservoir current.

    Raises
    ------
    CommonModeError
        Outside common mode there is no crossing channel.
    """
    if not common_mode_active(params):
        raise CommonModeError("channel split needs the crossing dissipator")
    direct = heat_current_qubit(params, rho, "A") + heat_current_qubit(params, rho, "C")
    return direct, _crossing_current(params, rho)


@dataclass
class HeatReport:
    q_A: float
    q_B: float
    q_C: float
    q_L: float
    q_R: float
    q_L_direct: float | None = None
    q_L_crossing: float | None = None

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def heat_report(params: SystemParams, rho) -> HeatReport:
    qa, qb, qc = (heat_current_qubit(params, rho, mu) for mu in QUBITS)
    if common_mode_active(params):
        qx = _crossing_current(params, rho)
        return HeatReport(qa, qb, qc, qa + qc + qx, qb, qa + qc, qx)
    return HeatReport(qa, qb, qc, qa + qc, qb)


@dataclass
class CrossoverFractions:
    p_d: float
    p_c: float
    p_d_valid: bool
    p_c_valid: bool
    q_direct_rho1: float
    q_direct_rho2: float
    q_crossing_rho2: float


def crossover_fractions(params: SystemParams) -> CrossoverFractions:
    """Fractions at which the direct (p_d) or crossing (p_c) current vanishes."""
    if not common_mode_active(params):
        raise CommonModeError("crossover fractions need the crossing dissipator")
    d1, d2, c2 = _channel_endpoints(params)
    den_d = d1 - d2
    den_c = d1 + c2
    if abs(den_d) < 1e-16 or abs(den_c) < 1e-16:
        raise DegenerateDenominator("crossover denominator vanishes")
    p_d = d1 / den_d
    p_c = d1 / den_c
    return CrossoverFractions(p_d, p_c, 0.0 <= p_d <= 1.0, 0.0 <= p_c <= 1.0, d1, d2, c2)


def _channel_endpoints(params):
    """Direct current of rho1 and (direct, crossing) currents of rho2.

    rho1 carries no net current, so its crossing current is -d1 exactly.
    """
    dec = steady_chr(params, p=1.0)
    d1, _ = channel_split(params, dec.rho1)
    d2, c2 = channel_split(params, dec.rho2)
    return d1, d2, c2


def channel_currents(params: SystemParams, p: float = 1.0) -> tuple:
    """(direct, crossing) left currents of the steady state with fraction ``p``.

    Currents are linear in rho, so they are evaluated on the two kernel
    states and combined, rather than on the mixed matrix, whose rounding
    would swamp the near-cancelling channels.
    """
    if not common_mode_active(params):
        raise CommonModeError("channel split needs the crossing dissipator")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    d1, d2, c2 = _channel_endpoints(params)
    return d1 - p * (d1 - d2), p * c2 - (1.0 - p) * d1


def gross_heat_flux(params: SystemParams, rho) -> float:
    """Sum of the one-way energy fluxes |w| 2[J(-w) rho_ii + J(w) rho_jj] over
    all transitions.

    The net currents are differences of these terms, so this is the scale
    against which their rounding error should be judged.
    """
    tab = transition_table(params)
    pop = np.abs(np.diag(rho).real)
    total = 0.0
    for mu in QUBITS:
        T = params.temperature_of(mu)
        for t in tab.for_qubit(mu):
            total += abs(t.omega) * 2.0 * (bath_rate(params.kappa, -t.omega, T) * pop[t.i - 1]
                                           + bath_rate(params.kappa, t.omega, T) * pop[t.j - 1])
    return total


def reservoir_current(params: SystemParams, alpha: str = "L", p: float = 1.0) -> float:
    """Steady-state current of reservoir ``alpha``.

    In common mode this is p * q_alpha(rho2): the heat-resisting state rho1
    carries no current, and taking that zero exactly keeps q(p) linear in p
    to the last bit.
    """
    if alpha not in ("L", "R"):
        raise ValueError(f"unknown reservoir {alpha!r}")
    if not common_mode_active(params):
        return heat_current_reservoir(params, steady_ihr(params), alpha)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    return p * heat_current_reservoir(params, steady_chr(params, p=1.0).rho2, alpha)


@dataclass
class RectificationResult:
    q_forward: float
    q_reverse: float
    R: float
    defined: bool
    reservoir: str = "L"


def _asymmetry(f, r):
    m = max(abs(f), abs(r))
    if m < ZERO_CURRENT:
        return 0.0, False
    return abs(abs(f) - abs(r)) / m, True


def rectification(params: SystemParams, reservoir: str = "L", p: float = 1.0,
                  parallel: bool = False) -> RectificationResult:
    """Forward/reverse currents and the rectification factor.

    Forward uses (T_L, T_R) as given, reverse swaps them.  In common mode the
    currents scale with ``p`` and the factor does not depend on it (p > 0).
    """
    pair = (params, params.swapped())
    if parallel:
        with ThreadPoolExecutor(max_workers=2) as ex:
            qf, qr = ex.map(lambda q: reservoir_current(q, reservoir, p), pair)
    else:
        qf, qr = (reservoir_current(q, reservoir, p) for q in pair)
    R, defined = _asymmetry(qf, qr)
    return RectificationResult(qf, qr, R, defined, reservoir)


# --- closed-form currents ----------------------------------------------------

def _gamma(kappa, w, T, rho_ii, rho_jj):
    """Net downward rate 2[J(-w) rho_ii - J(+w) rho_jj]."""
    return 2.0 * (bath_rate(kappa, -w, T) * rho_ii - bath_rate(kappa, w, T) * rho_jj)


def analytic_heat_currents(params: SystemParams, which: str = "ihr", rho=None) -> HeatReport:
    """Closed-form steady-state currents expressed through rates and populations.

    ``which`` is ``"ihr"``, ``"rho1"`` or ``"rho2"``.  The populations and
    coherences are read from ``rho`` (default: the corresponding numerical
    steady state); only the current formulas are closed-form.
    """
    tab = transition_table(params)
    k = params.kappa
    if which == "ihr":
        if rho is None:
            rho = steady_ihr(params)
        pop = np.diag(rho).real
        q = {}
        for mu in QUBITS:
            T = params.temperature_of(mu)
            q[mu] = -sum(t.omega * _gamma(k, t.omega, T, pop[t.i - 1], pop[t.j - 1])
                         for t in tab.for_qubit(mu))
        return HeatReport(q["A"], q["B"], q["C"], q["A"] + q["C"], q["B"])

    if which not in ("rho1", "rho2"):
        raise ValueError(f"unknown state {which!r}")
    if not common_mode_active(params):
        raise CommonModeError("rho1/rho2 currents need the crossing dissipator")
    if rho is None:
        dec = steady_chr(params, p=1.0)
        rho = dec.rho1 if which == "rho1" else dec.rho2
    pop = np.diag(rho).real
    c25 = rho[1, 4].real
    c47 = rho[3, 6].real
    TL, TR = params.T_L, params.T_R
    w12 = tab.get("C", 1, 2).omega
    w26 = tab.get("A", 2, 6).omega
    w34 = tab.get("C", 3, 4).omega
    w48 = tab.get("A", 4, 8).omega

    def J(w, T):
        return bath_rate(k, w, T)

    # A and C see identical gaps and rho_22 = rho_55, rho_44 = rho_77, so the
    # direct channel is twice one qubit's sum.
    direct = -2.0 * (w12 * _gamma(k, w12, TL, pop[0], pop[1])
                     + w26 * _gamma(k, w26, TL, pop[1], pop[5])
                     + w34 * _gamma(k, w34, TL, pop[2], pop[3])
                     + w48 * _gamma(k, w48, TL, pop[3], pop[7]))
    crossing = 4.0 * ((w12 * J(w12, TL) - w26 * J(-w26, TL)) * c25
                      + (w34 * J(w34, TL) - w48 * J(-w48, TL)) * c47)
    w13 = tab.get("B", 1, 3).omega
    w24 = tab.get("B", 2, 4).omega
    w68 = tab.get("B", 6, 8).omega
    q_R = -(w13 * _gamma(k, w13, TR, pop[0], pop[2])
            + 2.0 * w24 * _gamma(k, w24, TR, pop[1], pop[3])
            + w68 * _gamma(k, w68, TR, pop[5], pop[7]))
    half = 0.5 * direct
    return HeatReport(half, q_R, half, direct + crossing, q_R, direct, crossing)
