"""Steady states: reduced coefficient matrices, null spaces, closed forms.

Independent reservoirs: the populations obey d|rho>/dt = M_I |rho> with
|rho> = [rho_11 .. rho_88].

Common reservoir: the relevant sector is
|rho> = [rho_11, rho_22, rho_33, rho_44, rho_66, rho_88, rho_25, rho_47]
with rho_55 = rho_22, rho_77 = rho_44 and real coherences.  M_C has a
two-dimensional kernel, split physically into the heat-resisting state
(support on the dressed states 1~, 2~) and the heat-conducting state (support
on 3~..8~).

Dressed basis::

    1~ = (|5> - |2>)/sqrt2    5~ = (|2> + |5>)/sqrt2
    2~ = (|7> - |4>)/sqrt2    6~ = (|4> + |7>)/sqrt2
    3~ = |1>,  4~ = |3>,      7~ = |6>,  8~ = |8>

Shorthand used by the closed forms (rates of the shared left reservoir ``L``
and of qubit B's reservoir ``R`` on dressed transitions):

    L35 -> gap 1->2 (= 1->5)   L57 -> gap 2->6 (= 5->6)
    L46 -> gap 3->4 (= 3->7)   L68 -> gap 4->8 (= 7->8)
    R34 -> gap 1->3            R56 -> gap 2->4 (= 5->7)   R78 -> gap 6->8
"""

from __future__ import annotations

import itertools
import logging
import warnings
from dataclasses import dataclass

import numpy as np

from ._rho2_terms import RHO2_TERMS, parse_terms
from .liouvillian import CommonModeError, DIM, ket, validate_density_matrix
from .model import (
    SystemParams,
    bath_rate,
    common_mode_active,
    crossing_condition,
    transition_table,
)

__all__ = [
    "DegenerateNullSpace",
    "SteadyDecomposition",
    "build_M_ihr",
    "build_M_chr",
    "steady_ihr",
    "steady_chr",
    "steady_state",
    "extract_fraction",
    "rho1_closed_form",
    "rho2_closed_form",
    "rho2_closed_form_unnormalised",
    "chr_null_space",
    "kirchhoff_stationary",
    "steady_ihr_kirchhoff",
    "ihr_g0_closed_form",
    "dressed_basis",
    "gibbs_state",
    "chr_vector_to_rho",
]

log = logging.getLogger(__name__)

NULL_TOL = 1e-12
DEGENERATE_TOL = 1e-10
CHR_INDEX = ("11", "22", "33", "44", "66", "88", "25", "47")
# Trace weights of the CHR vector (rho_22 and rho_44 appear twice).
CHR_TRACE_WEIGHTS = np.array([1, 2, 1, 2, 1, 1, 0, 0], dtype=float)

_MP = np.array([[1.0, 0.0], [0.0, 0.0]])
_MM = np.array([[0.0, 0.0], [0.0, 1.0]])


class DegenerateNullSpace(RuntimeError):
    pass


def dressed_basis() -> np.ndarray:
    """Columns are the dressed states 1~..8~ in the bare basis."""
    s = 1.0 / np.sqrt(2.0)
    cols = [
        s * (ket(5) - ket(2)),
        s * (ket(7) - ket(4)),
        ket(1),
        ket(3),
        s * (ket(2) + ket(5)),
        s * (ket(4) + ket(7)),
        ket(6),
        ket(8),
    ]
    return np.column_stack(cols).real


def gibbs_state(params: SystemParams, T: float) -> np.ndarray:
    from .model import eigenvalues

    lam = eigenvalues(params).as_array()
    w = np.exp(-(lam - lam.min()) / T)
    return np.diag(w / w.sum()).astype(complex)


def _block(kappa, omega, T):
    jm = bath_rate(kappa, -omega, T)
    jp = bath_rate(kappa, omega, T)
    return 2.0 * np.array([[-jm, jp], [jm, -jp]])


def _kron3(a, b, c):
    return np.kron(np.kron(a, b), c)


def build_M_ihr(params: SystemParams) -> np.ndarray:
    """Population rate matrix for independent reservoirs (8x8, real)."""
    tab = transition_table(params)
    k = params.kappa

    def blk(q, i, j):
        return _block(k, tab.get(q, i, j).omega, params.temperature_of(q))

    MA = (_kron3(blk("A", 1, 5), _MP, _MP) + _kron3(blk("A", 2, 6), _MP, _MM)
          + _kron3(blk("A", 3, 7), _MM, _MP) + _kron3(blk("A", 4, 8), _MM, _MM))
    MB = (_kron3(_MP, blk("B", 1, 3), _MP) + _kron3(_MP, blk("B", 2, 4), _MM)
          + _kron3(_MM, blk("B", 5, 7), _MP) + _kron3(_MM, blk("B", 6, 8), _MM))
    MC = (_kron3(_MP, _MP, blk("C", 1, 2)) + _kron3(_MP, _MM, blk("C", 3, 4))
          + _kron3(_MM, _MP, blk("C", 5, 6)) + _kron3(_MM, _MM, blk("C", 7, 8)))
    return MA + MB + MC


def _require_crossing(params):
    if not crossing_condition(params):
        raise CommonModeError("the crossing condition omega_A == omega_C, g_AB == g_BC does not hold")


def _lr_rates(params: SystemParams) -> dict:
    """Shorthand rates keyed like ``'L35+'``."""
    tab = transition_table(params)
    k = params.kappa
    gaps = {
        "L35": (tab.get("C", 1, 2).omega, params.T_L),
        "L57": (tab.get("A", 2, 6).omega, params.T_L),
        "L46": (tab.get("C", 3, 4).omega, params.T_L),
        "L68": (tab.get("A", 4, 8).omega, params.T_L),
        "R34": (tab.get("B", 1, 3).omega, params.T_R),
        "R56": (tab.get("B", 2, 4).omega, params.T_R),
        "R78": (tab.get("B", 6, 8).omega, params.T_R),
    }
    rates = {}
    for name, (w, T) in gaps.items():
        rates[name + "+"] = bath_rate(k, w, T)
        rates[name + "-"] = bath_rate(k, -w, T)
    return rates


def build_M_chr(params: SystemParams) -> np.ndarray:
    """Coefficient matrix of the common-reservoir sector (8x8, real)."""
    _require_crossing(params)
    r = _lr_rates(params)
    a_m, a_p = r["L35-"], r["L35+"]   # gap 1->2
    b_m, b_p = r["L57-"], r["L57+"]   # gap 2->6
    c_m, c_p = r["L46-"], r["L46+"]   # gap 3->4
    d_m, d_p = r["L68-"], r["L68+"]   # gap 4->8
    ML = np.array([
        [-4 * a_m, 4 * a_p, 0, 0, 0, 0, 4 * a_p, 0],
        [2 * a_m, -2 * a_p - 2 * b_m, 0, 0, 2 * b_p, 0, -2 * a_p - 2 * b_m, 0],
        [0, 0, -4 * c_m, 4 * c_p, 0, 0, 0, 4 * c_p],
        [0, 0, 2 * c_m, -2 * c_p - 2 * d_m, 0, 2 * d_p, 0, -2 * c_p - 2 * d_m],
        [0, 4 * b_m, 0, 0, -4 * b_p, 0, 4 * b_m, 0],
        [0, 0, 0, 4 * d_m, 0, -4 * d_p, 0, 4 * d_m],
        [2 * a_m, -2 * a_p - 2 * b_m, 0, 0, 2 * b_p, 0, -2 * a_p - 2 * b_m, 0],
        [0, 0, 2 * c_m, -2 * c_p - 2 * d_m, 0, 2 * d_p, 0, -2 * c_p - 2 * d_m],
    ], dtype=float)

    def rblk(name):
        return 2.0 * np.array([[-r[name + "-"], r[name + "+"]], [r[name + "-"], -r[name + "+"]]])

    MR = (_kron3(_MP, rblk("R34"), _MP) + _kron3(_MP, rblk("R56"), _MM)
          + _kron3(_MM, _MM, rblk("R56")) + _kron3(_MM, _MP, rblk("R78")))
    return ML + MR


def _smallest_right_singular(M):
    _, s, vh = np.linalg.svd(M)
    return s, vh


# weight of a CHR-sector vector on the dressed states 1~, 2~
_W1_ROW = np.array([0.0, 1.0, 0.0, 1.0, 0.0, 0.0, -1.0, -1.0])


def _refine_null(M, v, rows, rhs, steps=2):
    """Iterative refinement of a constrained kernel vector.

    Solves ``M v = 0`` together with the normalisation ``rows @ v = rhs``;
    residuals are formed in extended precision, corrections in double.
    This brings the residual (and hence the energy balance of the
    currents) from ~eps*||M|| down to the rounding floor of the currents.
    """
    A = np.vstack([M, np.atleast_2d(rows)])
    b = np.concatenate([np.zeros(M.shape[0]), np.atleast_1d(rhs)]).astype(np.longdouble)
    A_ext = A.astype(np.longdouble)
    for _ in range(steps):
        r = b - A_ext @ v.astype(np.longdouble)
        dv = np.linalg.lstsq(A, r.astype(float), rcond=None)[0]
        v = (v.astype(np.longdouble) + dv).astype(float)
    return v


def steady_ihr(params: SystemParams) -> np.ndarray:
    """Diagonal steady state for independent reservoirs.

    Raises
    ------
    DegenerateNullSpace
        If the second-smallest singular value of M_I is below 1e-10 ||M_I||.
    """
    M = build_M_ihr(params)
    s, vh = _smallest_right_singular(M)
    if s[-2] <= DEGENERATE_TOL * s[0]:
        raise DegenerateNullSpace(f"M_I kernel is not one-dimensional (s = {s[-2]:.3e})")
    v = vh[-1].real
    v = v / v.sum()
    v = _refine_null(M, v, np.ones(DIM), 1.0)
    v[np.abs(v) < 1e-300] = 0.0
    return np.diag(v).astype(complex)


def chr_vector_to_rho(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    rho = np.zeros((DIM, DIM), dtype=complex)
    for k, (a, b) in enumerate(((1, 1), (2, 2), (3, 3), (4, 4), (6, 6), (8, 8))):
        rho[a - 1, b - 1] = v[k]
    rho[4, 4] = v[1]
    rho[6, 6] = v[3]
    rho[1, 4] = rho[4, 1] = v[6]
    rho[3, 6] = rho[6, 3] = v[7]
    return rho


def _subspace_weights(v):
    """(weight on 1~,2~; weight on 3~..8~) of a CHR-sector vector."""
    w1 = (v[1] - v[6]) + (v[3] - v[7])
    w2 = v[0] + v[2] + v[4] + v[5] + (v[1] + v[6]) + (v[3] + v[7])
    return w1, w2


def chr_null_space(params: SystemParams):
    """Kernel of M_C split into (rho1, rho2) CHR-sector vectors.

    Returns the two unit-weight vectors, the kernel dimension and the
    singular values of M_C.
    """
    M = build_M_chr(params)
    s, vh = _smallest_right_singular(M)
    dim = int(np.sum(s < NULL_TOL * s[0]))
    if s[-3] <= DEGENERATE_TOL * s[0]:
        raise DegenerateNullSpace(f"M_C kernel exceeds two dimensions (s = {s[-3]:.3e})")
    N = vh[-2:].T.real  # 8x2
    W = np.array([_subspace_weights(N[:, 0]), _subspace_weights(N[:, 1])]).T  # rows: w1, w2
    # coefficients c with W c = e_k give the pure-subspace kernel vectors
    c1 = np.linalg.solve(W, [1.0, 0.0])
    c2 = np.linalg.solve(W, [0.0, 1.0])
    rows = np.vstack([CHR_TRACE_WEIGHTS, _W1_ROW])
    v1 = _refine_null(M, N @ c1, rows, [1.0, 1.0])
    v2 = _refine_null(M, N @ c2, rows, [1.0, 0.0])
    return v1, v2, max(dim, 2), s


def rho1_closed_form(params: SystemParams) -> np.ndarray:
    """Heat-resisting state: populations on 1~, 2~ set by qubit B alone."""
    _require_crossing(params)
    r = _lr_rates(params)
    rp, rm = r["R56+"], r["R56-"]
    U = dressed_basis()
    d = np.zeros(DIM)
    d[0] = rp / (rp + rm)
    d[1] = rm / (rp + rm)
    return (U @ np.diag(d) @ U.T).astype(complex)


_RHO2_PARSED = {k: parse_terms(v) for k, v in RHO2_TERMS.items()}


def rho2_closed_form_unnormalised(params: SystemParams) -> dict:
    """The six unnormalised dressed populations {3: ..., ..., 8: ...}."""
    _require_crossing(params)
    r = _lr_rates(params)
    out = {}
    for level, terms in _RHO2_PARSED.items():
        out[level] = sum(coef * np.prod([r[f] for f in factors]) for coef, factors in terms)
    return out


def rho2_closed_form(params: SystemParams) -> np.ndarray:
    """Heat-conducting state from the printed polynomial populations."""
    raw = rho2_closed_form_unnormalised(params)
    total = sum(raw.values())
    d = np.zeros(DIM)
    for level, value in raw.items():
        d[level - 1] = value / total
    U = dressed_basis()
    return (U @ np.diag(d) @ U.T).astype(complex)


def extract_fraction(rho0) -> float:
    """Weight of an initial state on the dressed subspace 3~..8~."""
    rho0 = np.asarray(rho0, dtype=complex)
    U = dressed_basis()
    diag = np.einsum("ij,ik,kj->j", U, rho0, U).real
    return float(diag[2:].sum())


@dataclass
class SteadyDecomposition:
    p: float
    rho1: np.ndarray
    rho2: np.ndarray
    rho: np.ndarray
    null_dim: int = 2
    rho2_closed_form_residual: float = float("nan")


def steady_chr(params: SystemParams, rho0=None, p: float | None = None) -> SteadyDecomposition:
    """Initial-state dependent steady state with the crossing dissipator.

    Either ``rho0`` (the fraction is read off it) or ``p`` directly.
    """
    _require_crossing(params)
    if rho0 is not None:
        p = extract_fraction(validate_density_matrix(rho0, trace_tol=1e-9, psd_tol=1e-9))
    elif p is None:
        p = 1.0
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"fraction p must lie in [0, 1], got {p!r}")
    v1, v2, dim, _ = chr_null_space(params)
    rho1 = rho1_closed_form(params)
    rho2 = chr_vector_to_rho(v2)
    imag = np.max(np.abs(rho2.imag))
    if imag > 1e-12:
        warnings.warn(f"steady-state coherence carries imaginary residue {imag:.2e}")
    rho2 = rho2.real.astype(complex)
    try:
        resid = float(np.max(np.abs(rho2 - rho2_closed_form(params))))
    except (ZeroDivisionError, FloatingPointError):
        resid = float("nan")
    rho = (1.0 - p) * rho1 + p * rho2
    return SteadyDecomposition(float(p), rho1, rho2, rho, dim, resid)


def steady_state(params: SystemParams, p: float = 1.0) -> np.ndarray:
    """The steady state appropriate to ``params.mode`` (fraction ``p`` if common)."""
    if common_mode_active(params):
        return steady_chr(params, p=p).rho
    return steady_ihr(params)


# --- analytic oracles -------------------------------------------------------

def kirchhoff_stationary(M) -> np.ndarray:
    """Stationary distribution of a rate matrix by the Markov-chain tree theorem.

    ``M[i, j]`` (i != j) is the rate j -> i.  Sums over spanning trees of the
    transition graph: the weight of node r is the sum, over all spanning
    trees, of the product of rates with every edge oriented towards r.
    Exponential in the edge count, fine for the eight-node level diagrams.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if M[i, j] != 0 or M[j, i] != 0]
    weights = np.zeros(n)
    for tree in itertools.combinations(edges, n - 1):
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ok = True
        for a, b in tree:
            ra, rb = find(a), find(b)
            if ra == rb:
                ok = False
                break
            parent[ra] = rb
        if not ok:
            continue
        adj = {k: [] for k in range(n)}
        for a, b in tree:
            adj[a].append(b)
            adj[b].append(a)
        for root in range(n):
            w = 1.0
            seen = {root}
            stack = [root]
            while stack:
                u = stack.pop()
                for v in adj[u]:
                    if v not in seen:
                        seen.add(v)
                        w *= M[u, v]   # rate v -> u, toward the root
                        stack.append(v)
            weights[root] += w
    total = weights.sum()
    if not total > 0:
        raise DegenerateNullSpace("transition graph has no spanning tree")
    return weights / total


def steady_ihr_kirchhoff(params: SystemParams) -> np.ndarray:
    return np.diag(kirchhoff_stationary(build_M_ihr(params))).astype(complex)


def ihr_g0_closed_form(params: SystemParams) -> np.ndarray:
    """Populations at g_AB = g_BC = 0 from the factorised closed forms."""
    if params.g_AB != 0 or params.g_BC != 0:
        raise ValueError("closed form only holds at g_AB = g_BC = 0")
    tab = transition_table(params)
    k = params.kappa

    def J(q, i, j):
        w = tab.get(q, i, j).omega
        T = params.temperature_of(q)
        return bath_rate(k, w, T), bath_rate(k, -w, T)

    A15p, A15m = J("A", 1, 5)
    A26p, A26m = J("A", 2, 6)
    B13p, B13m = J("B", 1, 3)
    C12p, C12m = J("C", 1, 2)
    C56p, C56m = J("C", 5, 6)
    ac = {
        1: A26p * C12p * (A15p + C56m) + A15p * C56p * (A26m + C12p),
        2: A26p * C56m * (A15m + C12m) + A15p * C12m * (A26p + C56p),
        5: A15m * C12p * (A26p + C56p) + A26m * C56p * (A15m + C12m),
        6: A26m * C12m * (A15p + C56m) + A15m * C56m * (A26m + C12p),
    }
    raw = np.array([
        B13p * ac[1], B13p * ac[2], B13m * ac[1], B13m * ac[2],
        B13p * ac[5], B13p * ac[6], B13m * ac[5], B13m * ac[6],
    ])
    return np.diag(raw / raw.sum()).astype(complex)
