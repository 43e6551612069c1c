import itertools
import math
from types import SimpleNamespace

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from triqdiode.model import (
    Mode,
    SystemParams,
    bath_rate,
    crossing_condition,
    cycle_heat,
    cycle_reservoirs,
    eigenvalues,
    enumerate_cycles,
    hamiltonian,
    spectral_density,
    transition_table,
    transports_heat,
)

STANDARD = SystemParams(omega_A=3, omega_B=5, omega_C=3, g_AB=0.1, g_BC=0.1, g_AC=0.1)

freq = st.floats(0.5, 8.0)
coup = st.floats(-0.4, 0.4)


def pauli_hamiltonian(p):
    """Independent construction from Pauli operators (oracle)."""
    sz = np.diag([1.0, -1.0])
    I = np.eye(2)

    def k(a, b, c):
        return np.kron(np.kron(a, b), c)

    return (0.5 * (p.omega_A * k(sz, I, I) + p.omega_B * k(I, sz, I) + p.omega_C * k(I, I, sz))
            + 0.5 * (p.g_AB * k(sz, sz, I) + p.g_BC * k(I, sz, sz) + p.g_AC * k(sz, I, sz)))


class TestSystemParams:
    def test_defaults_valid(self):
        p = SystemParams()
        assert p.mode is Mode.AUTO

    @pytest.mark.parametrize("field,value", [
        ("omega_A", 0.0), ("omega_B", -1.0), ("kappa", 0.0), ("T_L", -0.1), ("g_AC", math.inf),
    ])
    def test_invalid(self, field, value):
        with pytest.raises(ValueError):
            SystemParams(**{field: value})

    def test_force_common_needs_crossing(self):
        with pytest.raises(ValueError):
            SystemParams(omega_C=2.0, mode="ForceCommon")
        assert SystemParams(mode="ForceCommon").mode is Mode.FORCE_COMMON

    def test_swapped(self):
        p = SystemParams(T_L=7.0, T_R=2.0).swapped()
        assert (p.T_L, p.T_R) == (2.0, 7.0)


class TestEigenvalues:
    def test_zero_parameters(self):
        p = SimpleNamespace(omega_A=0, omega_B=0, omega_C=0, g_AB=0, g_BC=0, g_AC=0)
        assert eigenvalues(p).lambdas == (0.0,) * 8

    def test_lambda1_standard(self):
        assert eigenvalues(STANDARD)[1] == pytest.approx(5.65, abs=1e-15)

    def test_crossing_degeneracy(self):
        lam = eigenvalues(STANDARD)
        assert lam[2] == lam[5]
        assert lam[4] == lam[7]

    @settings(max_examples=50, deadline=None)
    @given(freq, freq, freq, coup, coup, coup)
    def test_matches_pauli_hamiltonian(self, wa, wb, wc, gab, gbc, gac):
        p = SystemParams(wa, wb, wc, gab, gbc, gac)
        H = pauli_hamiltonian(p)
        assert_allclose(np.diag(H), eigenvalues(p).as_array(), atol=1e-13)
        assert_allclose(H, hamiltonian(p).real, atol=1e-13)

    @settings(max_examples=50, deadline=None)
    @given(freq, freq, freq, coup, coup, coup)
    def test_traceless(self, wa, wb, wc, gab, gbc, gac):
        lam = eigenvalues(SystemParams(wa, wb, wc, gab, gbc, gac)).as_array()
        assert abs(lam.sum()) <= 1e-13


class TestTransitionTable:
    def test_omega15(self):
        t = transition_table(SystemParams(omega_A=3, g_AB=0.1, g_AC=0.1))
        assert t.get("A", 1, 5).omega == pytest.approx(3.2, abs=1e-14)

    def test_omega68(self):
        t = transition_table(SystemParams(omega_B=5, g_AB=0.1, g_BC=0.1))
        assert t.get("B", 6, 8).omega == pytest.approx(4.8, abs=1e-14)

    def test_decoupled(self):
        p = SystemParams(omega_A=2, omega_B=5, omega_C=4, g_AB=0, g_BC=0, g_AC=0)
        t = transition_table(p)
        for mu, w in (("A", 2), ("B", 5), ("C", 4)):
            assert [x.omega for x in t.for_qubit(mu)] == [w] * 4

    def test_four_per_qubit_and_flip(self):
        t = transition_table(STANDARD)
        assert len(t) == 12
        for mu in "ABC":
            rows = t.for_qubit(mu)
            assert len(rows) == 4
            bit = "ABC".index(mu)
            for x in rows:
                a, b = x.i - 1, x.j - 1
                # upper and lower level differ exactly in qubit mu's bit
                assert a ^ b == 1 << (2 - bit)
                assert (a >> (2 - bit)) & 1 == 0

    def test_gaps_are_energy_differences(self):
        t = transition_table(STANDARD)
        lam = t.lambdas
        for x in t:
            assert x.omega == lam[x.i] - lam[x.j]

    def test_negative_gap_flagged(self):
        t = transition_table(SystemParams(omega_A=0.1, g_AB=0.3, g_AC=0.3, omega_C=3.0))
        assert t.has_negative
        assert not transition_table(STANDARD).has_negative


class TestSpectralDensity:
    def test_zero_temperature(self):
        sd = spectral_density(0.001, 3.2, 0.0)
        assert sd.j_plus == 0.0
        assert sd.j_minus == 0.001

    def test_bose_against_mpmath(self):
        mpmath.mp.dps = 50
        oracle = mpmath.mpf("0.001") / (mpmath.exp(mpmath.mpf("3.2") / 21) - 1)
        assert spectral_density(0.001, 3.2, 21.0).j_plus == pytest.approx(float(oracle), rel=1e-14)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0.01, 10.0), st.floats(0.05, 200.0))
    def test_detailed_balance_and_difference(self, w, T):
        sd = spectral_density(1e-3, w, T)
        assert sd.j_minus > sd.j_plus >= 0
        assert sd.j_minus / sd.j_plus == pytest.approx(math.exp(w / T), rel=1e-12)
        assert sd.j_minus - sd.j_plus == pytest.approx(1e-3, rel=1e-12)

    def test_nonpositive_frequency(self):
        with pytest.raises(ValueError):
            spectral_density(1e-3, -1.0, 5.0)
        sd = spectral_density(1e-3, -1.0, 5.0, allow_nonpositive=True)
        # roles swap: absorption on a negative gap is the emission rate
        assert sd.j_plus == bath_rate(1e-3, 1.0, 5.0) + 1e-3

    def test_huge_ratio_no_overflow(self):
        assert spectral_density(1e-3, 10.0, 1e-3).j_plus == 0.0


class TestCrossingCondition:
    def test_true(self):
        assert crossing_condition(STANDARD)

    def test_distinct_frequencies(self):
        assert not crossing_condition(SystemParams(omega_A=3, omega_C=2))

    def test_asymmetric_coupling(self):
        assert not crossing_condition(SystemParams(g_AB=0.1, g_BC=0.2))

    def test_tolerance(self):
        assert crossing_condition(SystemParams(omega_C=3.0 * (1 + 1e-13)))
        assert not crossing_condition(SystemParams(omega_C=3.0 * (1 + 1e-10)))


class TestCycles:
    def test_standard_cycles(self):
        cycles = enumerate_cycles(transition_table(STANDARD))
        assert len(cycles) >= 4
        assert [8, 4, 2, 6, 8] in cycles
        assert min(len(c) for c in cycles) == 5

    def test_cycles_close_energetically(self):
        t = transition_table(STANDARD)
        lam = t.lambdas
        for c in enumerate_cycles(t):
            assert abs(sum(lam[b] - lam[a] for a, b in itertools.pairwise(c))) <= 1e-12

    def test_standard_four_cycle_transports_heat(self):
        t = transition_table(STANDARD)
        heat = cycle_heat(t, [8, 4, 2, 6, 8])
        assert heat["L"] == pytest.approx(-heat["R"], abs=1e-15)
        assert transports_heat(t, [8, 4, 2, 6, 8])

    def test_without_qubit_b(self):
        t = transition_table(STANDARD)
        cycles = enumerate_cycles(t, qubits=("A", "C"))
        for c in cycles:
            assert cycle_reservoirs(t, c) == {"L"}
            assert not transports_heat(t, c)

    def test_g_zero_no_heat_carrying_cycle(self):
        t = transition_table(STANDARD.with_(g_AB=0.0, g_BC=0.0))
        cycles = enumerate_cycles(t)
        assert cycles
        assert not any(transports_heat(t, c) for c in cycles)

    def test_non_degenerate_rejected(self):
        with pytest.raises(ValueError):
            enumerate_cycles(transition_table(SystemParams(omega_C=2.0)))

