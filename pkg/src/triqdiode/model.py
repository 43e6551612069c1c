"""Three triangular-coupled qubits: parameters, spectrum, transitions, baths.

Basis convention: |1>..|8> = |+++>, |++->, |+-+>, |+-->, |-++>, |-+->, |--+>,
|---> with the tensor order A (x) B (x) C.  Array index i corresponds to
level i+1.  Everything is dimensionless in units of omega_0 = 1.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import networkx as nx
import numpy as np

__all__ = [
    "Mode",
    "SystemParams",
    "EigenSystem",
    "Transition",
    "TransitionTable",
    "SpectralDensity",
    "eigenvalues",
    "hamiltonian",
    "transition_table",
    "bath_rate",
    "spectral_density",
    "crossing_condition",
    "common_mode_active",
    "enumerate_cycles",
    "cycle_heat",
    "transports_heat",
    "EPS_DEG",
    "QUBITS",
]

EPS_DEG = 1e-12
QUBITS = ("A", "B", "C")

# (qubit, upper level, lower level), 1-based as in the level diagram
_TRANSITIONS = (
    ("A", 1, 5), ("A", 2, 6), ("A", 3, 7), ("A", 4, 8),
    ("B", 1, 3), ("B", 2, 4), ("B", 5, 7), ("B", 6, 8),
    ("C", 1, 2), ("C", 3, 4), ("C", 5, 6), ("C", 7, 8),
)

# A transition paired with the C transition of equal gap under the crossing
# condition.
CROSSING_PAIRS = ((1, 5, 1, 2), (2, 6, 5, 6), (3, 7, 3, 4), (4, 8, 7, 8))

# Sign pattern of (omega_A, omega_B, omega_C, g_AB, g_BC, g_AC) in 2*lambda_i.
_SIGNS = np.array([
    [+1, +1, +1, +1, +1, +1],
    [+1, +1, -1, +1, -1, -1],
    [+1, -1, +1, -1, -1, +1],
    [+1, -1, -1, -1, +1, -1],
    [-1, +1, +1, -1, +1, -1],
    [-1, +1, -1, -1, -1, +1],
    [-1, -1, +1, +1, -1, -1],
    [-1, -1, -1, +1, +1, +1],
], dtype=float)


class Mode(str, enum.Enum):
    """How the left reservoir acts on qubits A and C."""

    AUTO = "Auto"
    FORCE_INDEPENDENT = "ForceIndependent"
    FORCE_COMMON = "ForceCommon"


@dataclass(frozen=True)
class SystemParams:
    omega_A: float = 3.0
    omega_B: float = 5.0
    omega_C: float = 3.0
    g_AB: float = 0.1
    g_BC: float = 0.1
    g_AC: float = 0.1
    kappa: float = 1e-3
    T_L: float = 100.0
    T_R: float = 21.0
    mode: Mode = Mode.AUTO

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        for name in ("omega_A", "omega_B", "omega_C", "kappa"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")
        for name in ("T_L", "T_R"):
            value = getattr(self, name)
            if math.isnan(value) or value < 0:
                raise ValueError(f"{name} must be >= 0, got {value!r}")
        for name in ("g_AB", "g_BC", "g_AC"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.mode is Mode.FORCE_COMMON and not crossing_condition(self):
            raise ValueError("ForceCommon requires omega_A == omega_C and g_AB == g_BC")

    def swapped(self) -> "SystemParams":
        """Same system with the two reservoir temperatures exchanged."""
        return replace(self, T_L=self.T_R, T_R=self.T_L)

    def with_(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {
            "omega_A": self.omega_A, "omega_B": self.omega_B, "omega_C": self.omega_C,
            "g_AB": self.g_AB, "g_BC": self.g_BC, "g_AC": self.g_AC,
            "kappa": self.kappa, "T_L": self.T_L, "T_R": self.T_R,
            "mode": self.mode.value,
        }

    def reservoir_of(self, qubit: str) -> str:
        return "R" if qubit == "B" else "L"

    def temperature_of(self, qubit: str) -> float:
        return self.T_R if qubit == "B" else self.T_L


@dataclass(frozen=True)
class EigenSystem:
    lambdas: tuple

    def __getitem__(self, level: int) -> float:
        """Energy of level ``level`` (1-based)."""
        return self.lambdas[level - 1]

    def as_array(self) -> np.ndarray:
        return np.array(self.lambdas)


class Transition(NamedTuple):
    qubit: str
    i: int          # upper level in the bare labelling (1-based)
    j: int          # lower level
    omega: float    # lambda_i - lambda_j, signed

    @property
    def reservoir(self) -> str:
        return "R" if self.qubit == "B" else "L"


@dataclass(frozen=True)
class TransitionTable:
    entries: tuple
    lambdas: EigenSystem

    def for_qubit(self, qubit: str) -> list:
        return [t for t in self.entries if t.qubit == qubit]

    def get(self, qubit: str, i: int, j: int) -> Transition:
        for t in self.entries:
            if (t.qubit, t.i, t.j) == (qubit, i, j):
                return t
        raise KeyError((qubit, i, j))

    @property
    def has_negative(self) -> bool:
        """True when some gap is negative, i.e. absorption/emission swap roles."""
        return any(t.omega < 0 for t in self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


class SpectralDensity(NamedTuple):
    j_plus: float   # absorption, J(+omega) = kappa * nbar
    j_minus: float  # emission, J(-omega) = kappa * (nbar + 1)


def eigenvalues(params: SystemParams) -> EigenSystem:
    """The eight energies of the diagonal system Hamiltonian."""
    knobs = np.array([params.omega_A, params.omega_B, params.omega_C,
                      params.g_AB, params.g_BC, params.g_AC])
    lam = 0.5 * (_SIGNS @ knobs)
    if crossing_condition(params):
        # the pairs are degenerate analytically; remove rounding noise so the
        # A and C gaps (and their rates) coincide bit for bit
        for i, j in ((1, 4), (3, 6)):
            lam[i] = lam[j] = 0.5 * (lam[i] + lam[j])
    return EigenSystem(tuple(float(x) for x in lam))


def hamiltonian(params: SystemParams) -> np.ndarray:
    return np.diag(eigenvalues(params).as_array()).astype(complex)


def transition_table(params: SystemParams) -> TransitionTable:
    lam = eigenvalues(params)
    entries = tuple(Transition(q, i, j, lam[i] - lam[j]) for q, i, j in _TRANSITIONS)
    return TransitionTable(entries, lam)


def _nbar(omega: float, T: float) -> float:
    if T == 0.0:
        return 0.0
    x = omega / T
    if x > 700.0:
        return 0.0
    return 1.0 / math.expm1(x)


def bath_rate(kappa: float, omega: float, T: float) -> float:
    """Flat-spectrum rate J(omega) for a signed frequency argument.

    ``omega > 0`` is absorption (kappa * nbar), ``omega < 0`` is emission
    (kappa * (nbar + 1)).  Because the sign is carried by the argument, a
    transition with a negative gap automatically gets the adjoint roles.
    """
    if omega == 0.0:
        raise ValueError("bath rate is singular at zero frequency")
    n = _nbar(abs(omega), T)
    return kappa * n if omega > 0 else kappa * (n + 1.0)


def spectral_density(kappa: float, omega: float, T: float, allow_nonpositive: bool = False) -> SpectralDensity:
    """Absorption and emission rates for a transition of gap ``omega``.

    Raises
    ------
    ValueError
        If ``omega <= 0`` and ``allow_nonpositive`` is not set.
    """
    if omega <= 0 and not allow_nonpositive:
        raise ValueError(f"transition frequency must be positive, got {omega!r}")
    return SpectralDensity(bath_rate(kappa, omega, T), bath_rate(kappa, -omega, T))


def crossing_condition(params: SystemParams) -> bool:
    wa, wc = params.omega_A, params.omega_C
    gab, gbc = params.g_AB, params.g_BC
    same_omega = abs(wa - wc) <= EPS_DEG * max(wa, wc)
    same_g = abs(gab - gbc) <= EPS_DEG * max(abs(gab), abs(gbc), 1.0)
    return same_omega and same_g


def common_mode_active(params: SystemParams) -> bool:
    """Whether the crossing dissipator is part of the generator."""
    if params.mode is Mode.FORCE_INDEPENDENT:
        return False
    return crossing_condition(params)


def qubit_b_degenerate(params: SystemParams) -> bool:
    """The two middle qubit-B gaps (2->4, 5->7) coincide iff g_AB == g_BC."""
    gab, gbc = params.g_AB, params.g_BC
    return abs(gab - gbc) <= EPS_DEG * max(abs(gab), abs(gbc), 1.0)


# Reduced level diagram under the crossing condition: 2 and 5 merge, 4 and 7
# merge.  Nodes are labelled by the bare representative (2 for {2,5}, 4 for
# {4,7}).
_MERGE = {1: 1, 2: 2, 3: 3, 4: 4, 5: 2, 6: 6, 7: 4, 8: 8}


def transition_graph(table: TransitionTable, qubits=QUBITS) -> nx.DiGraph:
    """Directed graph of the reduced level diagram.

    Each allowed transition contributes both directions.  Edges carry the
    reservoir that induces them and the signed energy change.
    """
    lam = table.lambdas
    graph = nx.DiGraph()
    graph.add_nodes_from(sorted(set(_MERGE.values())))
    for t in table:
        if t.qubit not in qubits:
            continue
        u, v = _MERGE[t.i], _MERGE[t.j]
        if u == v:
            continue
        for a, b in ((u, v), (v, u)):
            graph.add_edge(a, b, reservoir=t.reservoir, delta=lam[b] - lam[a])
    return graph


def enumerate_cycles(table: TransitionTable, qubits=QUBITS, min_length: int = 3) -> list:
    """Simple directed cycles of the reduced level diagram.

    Only the degenerate diagram (crossing condition) has the reduced form, so
    a table whose merged levels are not degenerate is rejected.  Trivial
    back-and-forth two-cycles are dropped by ``min_length``.  Each cycle is
    returned as a closed node list rotated to start at its highest label
    (``[8, 4, 2, 6, 8]`` style), sorted by length then lexicographically.
    """
    lam = table.lambdas
    tol = EPS_DEG * max(1.0, max(abs(x) for x in lam.lambdas))
    if abs(lam[2] - lam[5]) > tol or abs(lam[4] - lam[7]) > tol:
        raise ValueError("cycle enumeration needs the degenerate (crossing-condition) level diagram")
    graph = transition_graph(table, qubits)
    cycles = []
    for cyc in nx.simple_cycles(graph):
        if len(cyc) < min_length:
            continue
        k = cyc.index(max(cyc))
        cyc = cyc[k:] + cyc[:k]
        cycles.append(cyc + [cyc[0]])
    cycles.sort(key=lambda c: (len(c), c))
    return cycles


def cycle_reservoirs(table: TransitionTable, cycle: list) -> set:
    graph = transition_graph(table)
    return {graph.edges[a, b]["reservoir"] for a, b in itertools.pairwise(cycle)}


def cycle_heat(table: TransitionTable, cycle: list) -> dict:
    """Energy the system takes from each reservoir once around ``cycle``.

    The two entries always sum to zero; a cycle transports heat between the
    reservoirs only if they are nonzero.
    """
    graph = transition_graph(table)
    heat = {"L": 0.0, "R": 0.0}
    for a, b in itertools.pairwise(cycle):
        edge = graph.edges[a, b]
        heat[edge["reservoir"]] += edge["delta"]
    return heat


def transports_heat(table: TransitionTable, cycle: list, tol: float = 1e-12) -> bool:
    return abs(cycle_heat(table, cycle)["L"]) > tol
