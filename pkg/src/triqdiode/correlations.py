"""Correlations across the cut L = (A, C) | R = (B).

Entropies are in bits.  Storage order of the 8x8 states is A (x) B (x) C; the
bipartite view permutes it to (A, C) (x) B.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .model import SystemParams
from .steady import dressed_basis, steady_state

__all__ = [
    "BipartiteView",
    "CorrelationReport",
    "bipartite_view",
    "von_neumann_entropy",
    "mutual_information",
    "classical_correlation",
    "quantum_discord",
    "negativity",
    "correlation_report",
    "asymmetry_factor",
    "AsymmetryResult",
    "population_mutual_information",
    "PERMUTATION",
]

EIG_FLOOR = 1e-12
# new index (a, c, b) -> old index (a, b, c); index = 4a + 2c + b
PERMUTATION = np.array([4 * a + 2 * b + c for a in (0, 1) for c in (0, 1) for b in (0, 1)])


def _entropy_from_eigs(eigs, base=2.0) -> float:
    eigs = np.where((eigs < 0) & (eigs >= -EIG_FLOOR), 0.0, eigs)
    eigs = eigs[eigs > 0]
    return float(-np.sum(eigs * np.log(eigs)) / np.log(base))


def von_neumann_entropy(rho, base=2.0) -> float:
    """-Tr rho log rho, with 0 log 0 = 0."""
    rho = np.asarray(rho, dtype=complex)
    return _entropy_from_eigs(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)), base)


def _ptrace(rho, dims, keep):
    """Partial trace of a bipartite state with ``dims = (dL, dR)``."""
    dL, dR = dims
    r = rho.reshape(dL, dR, dL, dR)
    if keep == 0:
        return np.einsum("ijkj->ik", r)
    return np.einsum("ijil->jl", r)


@dataclass
class BipartiteView:
    rho_LR: np.ndarray
    rho_L: np.ndarray
    rho_R: np.ndarray
    dims: tuple = (4, 2)


def bipartite_view(rho, dims=None) -> BipartiteView:
    """Split a state across the L|R cut.

    An 8x8 state in the model's A, B, C order is permuted to (A, C) (x) B.
    Passing ``dims`` instead treats ``rho`` as already ordered (L, R).
    """
    rho = np.asarray(rho, dtype=complex)
    if dims is None:
        if rho.shape != (8, 8):
            raise ValueError("pass dims for states other than the 8x8 model states")
        rho = rho[np.ix_(PERMUTATION, PERMUTATION)]
        dims = (4, 2)
    return BipartiteView(rho, _ptrace(rho, dims, 0), _ptrace(rho, dims, 1), tuple(dims))


def mutual_information(view: BipartiteView, base=2.0) -> float:
    return (von_neumann_entropy(view.rho_L, base) + von_neumann_entropy(view.rho_R, base)
            - von_neumann_entropy(view.rho_LR, base))


def _projectors(theta, phi):
    """Rank-1 projectors |n><n|, |n_perp><n_perp| for Bloch angles (vectorised)."""
    theta = np.atleast_1d(theta)
    phi = np.atleast_1d(phi)
    c = np.cos(theta / 2)
    s = np.sin(theta / 2) * np.exp(1j * phi)
    n = np.stack([c, s], axis=-1)
    m = np.stack([-np.conj(s), c], axis=-1)
    P0 = n[..., :, None] * n[..., None, :].conj()
    P1 = m[..., :, None] * m[..., None, :].conj()
    return P0, P1


def _conditional_entropy(view: BipartiteView, theta, phi, base=2.0):
    """Sum_k p_k S(rho_{L|k}) for measurements on R; vectorised over angles."""
    dL, dR = view.dims
    if dR != 2:
        raise ValueError("measurement optimisation is implemented for a qubit R")
    r = view.rho_LR.reshape(dL, dR, dL, dR)
    total = 0.0
    for P in _projectors(theta, phi):
        # rho_{L|k} p_k = Tr_R[(I (x) P) rho]
        cond = np.einsum("...lj,ijkl->...ik", P, r)
        cond = 0.5 * (cond + np.conj(np.swapaxes(cond, -1, -2)))
        eigs = np.linalg.eigvalsh(cond)
        eigs = np.where(eigs > 0, eigs, 0.0)
        pk = eigs.sum(axis=-1)
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = np.where(eigs > 0, np.log(np.where(eigs > 0, eigs, 1.0)), 0.0)
            logp = np.log(np.where(pk > 0, pk, 1.0))
        # p_k S(rho_k) = -sum e log e + p_k log p_k
        total = total + (-np.sum(eigs * logs, axis=-1) + pk * logp)
    return total / np.log(base)


def classical_correlation(view: BipartiteView, base=2.0, grid=(64, 128), tol=1e-8,
                          return_angles=False):
    """S(rho_L) minus the least conditional entropy over projective measurements on R.

    A (theta, phi) grid over the Bloch sphere (poles included) picks the
    start point, ties broken by the lowest grid index, then Nelder-Mead
    refines it.
    """
    nt, nph = grid
    thetas = np.linspace(0.0, np.pi, nt)
    phis = np.linspace(0.0, 2 * np.pi, nph, endpoint=False)
    TH, PH = np.meshgrid(thetas, phis, indexing="ij")
    values = _conditional_entropy(view, TH.ravel(), PH.ravel(), base)
    k = int(np.argmin(values))
    x0 = np.array([TH.ravel()[k], PH.ravel()[k]])
    best = float(values[k])

    def f(x):
        return float(_conditional_entropy(view, x[0], x[1], base)[0])

    res = minimize(f, x0, method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": tol, "maxiter": 2000})
    if res.fun < best:
        best, x0 = float(res.fun), res.x
    C = von_neumann_entropy(view.rho_L, base) - best
    if return_angles:
        return C, tuple(x0)
    return C


def quantum_discord(view: BipartiteView, base=2.0, tol=1e-8) -> float:
    q = mutual_information(view, base) - classical_correlation(view, base)
    if q < 0 and q > -10 * tol:
        q = 0.0
    return q


def negativity(view: BipartiteView) -> float:
    """Sum of |negative eigenvalues| of the partial transpose over R."""
    dL, dR = view.dims
    r = view.rho_LR.reshape(dL, dR, dL, dR)
    pt = r.transpose(0, 3, 2, 1).reshape(dL * dR, dL * dR)
    eigs = np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))
    return float(-np.sum(eigs[eigs < 0]))


@dataclass
class CorrelationReport:
    S_L: float
    S_R: float
    S_LR: float
    I: float
    C: float
    Q: float
    N: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def correlation_report(rho, base=2.0) -> CorrelationReport:
    view = bipartite_view(rho)
    sL = von_neumann_entropy(view.rho_L, base)
    sR = von_neumann_entropy(view.rho_R, base)
    sLR = von_neumann_entropy(view.rho_LR, base)
    I = sL + sR - sLR
    C = classical_correlation(view, base)
    Q = I - C
    if -1e-7 < Q < 0:
        Q = 0.0
    return CorrelationReport(sL, sR, sLR, I, C, Q, negativity(view))


def population_mutual_information(rho, base=2.0, dressed=False) -> float:
    """Shannon mutual information of the L|R joint populations.

    For the steady states here (diagonal in the bare basis, or in the dressed
    basis when ``dressed``) this equals both I and C.
    """
    rho = np.asarray(rho, dtype=complex)
    if dressed:
        U = dressed_basis()
        pops = np.einsum("ij,ik,kj->j", U, rho, U).real
        # dressed index -> (L label, B label); L labels: ++, psi-, psi+, --
        mapping = {0: (1, 0), 1: (1, 1), 2: (0, 0), 3: (0, 1), 4: (2, 0), 5: (2, 1), 6: (3, 0), 7: (3, 1)}
        joint = np.zeros((4, 2))
        for d, (l, b) in mapping.items():
            joint[l, b] += pops[d]
    else:
        pops = np.diag(rho).real[PERMUTATION]
        joint = pops.reshape(4, 2)

    def H(p):
        p = p[p > 0]
        return float(-np.sum(p * np.log(p)) / np.log(base))

    return H(joint.sum(axis=1)) + H(joint.sum(axis=0)) - H(joint.ravel())


@dataclass
class AsymmetryResult:
    I_forward: float
    I_reverse: float
    A_I: float
    defined: bool


def asymmetry_factor(params: SystemParams, p: float = 1.0, base=2.0) -> AsymmetryResult:
    """Rectification-style asymmetry of the steady-state mutual information."""
    vals = []
    for q in (params, params.swapped()):
        vals.append(mutual_information(bipartite_view(steady_state(q, p=p)), base))
    f, r = vals
    m = max(abs(f), abs(r))
    if m < 1e-300:
        return AsymmetryResult(f, r, 0.0, False)
    return AsymmetryResult(f, r, abs(abs(f) - abs(r)) / m, True)
