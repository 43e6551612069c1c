import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from triqdiode.liouvillian import (
    CommonModeError,
    _terms_crossing,
    basis_projector,
    default_dt,
    dissipator_crossing,
    dissipator_single,
    evolve,
    generator,
    superoperator,
    validate_density_matrix,
)
from triqdiode.model import SystemParams, bath_rate, transition_table
from triqdiode.steady import dressed_basis, gibbs_state, rho1_closed_form, steady_state

STANDARD = SystemParams()
FIG2A = SystemParams(omega_A=3, omega_C=2, omega_B=5, T_L=100, T_R=21)

# population-plus-{25,47} sector of the 8x8 matrix
SECTOR = np.eye(8, dtype=bool)
SECTOR[1, 4] = SECTOR[4, 1] = SECTOR[3, 6] = SECTOR[6, 3] = True


def random_rho(seed):
    rng = np.random.default_rng(seed)
    G = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


class TestDensityMatrix:
    def test_rejects_non_hermitian(self):
        rho = np.eye(8) / 8
        rho = rho.astype(complex)
        rho[0, 1] = 0.1
        with pytest.raises(ValueError):
            validate_density_matrix(rho)

    def test_rejects_bad_trace(self):
        with pytest.raises(ValueError):
            validate_density_matrix(np.eye(8))

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            validate_density_matrix(np.diag([1.5, -0.5, 0, 0, 0, 0, 0, 0]))


class TestDissipators:
    @pytest.mark.parametrize("params", [STANDARD.with_(T_L=7.0, T_R=7.0), FIG2A.with_(T_L=7.0, T_R=7.0)])
    def test_gibbs_stationary(self, params):
        act = generator(params, gibbs_state(params, 7.0))
        assert np.max(np.abs(act.drho_dt)) <= 1e-15

    def test_ground_state_dark_at_zero_temperature(self):
        params = STANDARD.with_(T_L=0.0, T_R=0.0)
        table = transition_table(params)
        for mu in "ABC":
            assert np.max(np.abs(dissipator_single(params, table, basis_projector(8), mu))) == 0.0

    @pytest.mark.parametrize("params", [STANDARD, FIG2A])
    def test_top_level_decays_to_neighbours(self, params):
        drho = generator(params, basis_projector(1)).drho_dt
        gained = {i + 1 for i in range(8) if drho[i, i].real > 0}
        assert gained == {2, 3, 5}

    def test_crossing_off_when_not_degenerate(self):
        act = generator(FIG2A, random_rho(0))
        assert "L_AC" not in act.channels
        assert np.all(act.channel("L_AC") == 0)
        with pytest.raises(CommonModeError):
            dissipator_crossing(FIG2A, transition_table(FIG2A), random_rho(0))

    def test_crossing_off_when_forced_independent(self):
        params = STANDARD.with_(mode="ForceIndependent")
        assert "L_AC" not in generator(params, random_rho(0)).channels

    def test_crossing_couples_diagonal_into_coherence(self):
        rho = np.diag([0.2, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.2]).astype(complex)
        d = dissipator_crossing(STANDARD, transition_table(STANDARD), rho)
        assert abs(d[1, 4]) > 1e-6
        assert abs(d[3, 6]) > 1e-6
        assert np.max(np.abs(d[~SECTOR])) == 0.0

    def test_crossing_rate_equals_single_rate(self):
        table = transition_table(STANDARD)
        terms = _terms_crossing(STANDARD, table)
        w = table.get("A", 1, 5).omega
        assert terms[0][0] == bath_rate(STANDARD.kappa, -w, STANDARD.T_L)
        assert terms[2][0] == bath_rate(STANDARD.kappa, w, STANDARD.T_L)


class TestGenerator:
    def test_diagonal_commutator_vanishes(self):
        act = generator(STANDARD, np.diag(np.arange(1, 9) / 36.0))
        assert np.all(act.channels["commutator"] == 0)

    @pytest.mark.parametrize("params", [STANDARD, FIG2A])
    def test_steady_state_is_fixed_point(self, params):
        assert np.max(np.abs(generator(params, steady_state(params)).drho_dt)) <= 1e-10

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.booleans())
    def test_trace_and_hermiticity(self, seed, common):
        params = STANDARD if common else FIG2A
        act = generator(params, random_rho(seed))
        for name, c in act.channels.items():
            assert abs(np.trace(c)) <= 1e-14, name
        assert np.max(np.abs(act.drho_dt - act.drho_dt.conj().T)) <= 1e-13

    def test_superoperator_matches(self):
        rho = random_rho(3)
        L = superoperator(STANDARD)
        assert_allclose((L @ rho.ravel()).reshape(8, 8), generator(STANDARD, rho).drho_dt, atol=1e-17)

    def test_sector_decoupling(self):
        L = superoperator(STANDARD)
        mask = SECTOR.ravel()
        assert np.max(np.abs(L[np.ix_(~mask, mask)])) == 0.0
        assert np.max(np.abs(L[np.ix_(mask, ~mask)])) == 0.0


class TestEvolve:
    def test_zero_time_identity(self):
        rho0 = random_rho(1)
        res = evolve(STANDARD, rho0, 0.0)
        assert np.array_equal(res.rho, rho0)

    def test_default_dt(self):
        lam = transition_table(STANDARD).lambdas.as_array()
        assert default_dt(STANDARD) == pytest.approx(0.01 / (lam.max() - lam.min()))

    def test_stepwise_equals_power(self):
        rho0 = random_rho(2)
        a = evolve(STANDARD, rho0, 5.0, dt=0.01, method="stepwise").rho
        b = evolve(STANDARD, rho0, 5.0, dt=0.01, method="power").rho
        assert_allclose(a, b, atol=1e-14)

    def test_heat_resisting_state_is_reached(self):
        U = dressed_basis()
        rho0 = np.outer(U[:, 0], U[:, 0]).astype(complex)
        res = evolve(STANDARD, rho0, 60.0 / STANDARD.kappa)
        assert_allclose(res.rho, rho1_closed_form(STANDARD), atol=1e-8)

    def test_sector_stays_closed(self):
        rho0 = np.diag([0.3, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1]).astype(complex)
        rho0[1, 4] = rho0[4, 1] = 0.05
        res = evolve(STANDARD, rho0, 5.0, dt=0.01, method="stepwise")
        assert np.max(np.abs(res.rho[~SECTOR])) == 0.0

    def test_trace_and_hermiticity_long_run(self):
        res = evolve(STANDARD, random_rho(4), 1e5, dt=0.01, method="power")
        assert abs(np.trace(res.rho) - 1) <= 1e-9
        assert np.max(np.abs(res.rho - res.rho.conj().T)) <= 1e-9
        assert res.max_positivity_violation <= 1e-10

    def test_degenerate_populations_equalise(self):
        res = evolve(STANDARD, random_rho(5), 60.0 / STANDARD.kappa)
        r = res.rho
        assert abs(r[1, 1] - r[4, 4]) <= 1e-9
        assert abs(r[3, 3] - r[6, 6]) <= 1e-9

    def test_coherences_decay_without_crossing(self):
        res = evolve(FIG2A, random_rho(6), 60.0 / FIG2A.kappa)
        off = res.rho - np.diag(np.diag(res.rho))
        assert np.max(np.abs(off)) <= 1e-10

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError):
            evolve(STANDARD, random_rho(0), -1.0)
