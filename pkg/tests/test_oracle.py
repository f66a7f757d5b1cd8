import numpy as np
import pytest

from conftest import random_interaction
from incoherent.dynamics import evolve_general
from incoherent.model import BathSpec, InteractionSpec, Mode, gamma
from incoherent.oracle import (
    BathState,
    DimensionCapError,
    FockCutoffs,
    Oracle,
    Propagator,
    annihilation,
    bath_operators,
    build_hamiltonian,
    oracle_evolve,
    oracle_gamma,
)
from incoherent.states import bloch_to_density, random_bloch


def small_bath(rng, n=2):
    return BathSpec(tuple(Mode(rng.uniform(0.5, 2), rng.uniform(0.1, 0.6)) for _ in range(n)))


class TestHamiltonian:
    def test_ladder_algebra(self):
        b = annihilation(3)
        np.testing.assert_allclose(np.diag(b, 1), [1, np.sqrt(2)])
        comm = b @ b.conj().T - b.conj().T @ b
        np.testing.assert_allclose(comm[:2, :2], np.eye(2), atol=1e-12)

    def test_decoupled_bath(self, rng):
        bath = BathSpec((Mode(1.0, 0.0), Mode(2.5, 0.0)))
        inter = random_interaction(rng)
        cut = FockCutoffs((4, 3))
        h_e, _ = bath_operators(bath, cut)
        np.testing.assert_array_equal(build_hamiltonian(inter, bath, cut), np.kron(np.eye(4), h_e))

    def test_hermitian_and_conserves_coupling(self, rng):
        for _ in range(10):
            inter = random_interaction(rng)
            bath = small_bath(rng)
            cut = FockCutoffs((5, 4))
            h = build_hamiltonian(inter, bath, cut)
            assert np.abs(h - h.conj().T).max() <= 1e-12
            a_t = np.kron(inter.operator(), np.eye(20))
            assert np.linalg.norm(a_t @ h - h @ a_t) <= 1e-10

    def test_dimension_cap(self, benchmark_bath, monkeypatch):
        inter = InteractionSpec((0, 0, 0, 1), "bell")
        with pytest.raises(DimensionCapError):
            build_hamiltonian(inter, benchmark_bath, FockCutoffs((2000,)))
        monkeypatch.setenv("INCOHERENT_DIM_CAP", "64")
        with pytest.raises(DimensionCapError):
            build_hamiltonian(inter, benchmark_bath, FockCutoffs((30,)))

    def test_cutoff_validation(self):
        with pytest.raises(ValueError):
            FockCutoffs((1,))

    def test_heuristic_cutoffs(self):
        bath = BathSpec((Mode(1.0, 0.5, 1.0), Mode(2.0, 0.1)))
        cut = FockCutoffs.heuristic(bath)
        assert cut.dims == (25, 11)
        assert FockCutoffs.heuristic(bath, cap=400).total() <= 400


class TestPropagator:
    def test_unitary(self, rng):
        h = build_hamiltonian(random_interaction(rng), small_bath(rng), FockCutoffs((6, 5)))
        u = Propagator(h)(3.7)
        assert np.abs(u.conj().T @ u - np.eye(len(u))).max() <= 1e-10

    def test_pure_state_stays_pure_in_vacuum(self, rng):
        inter = random_interaction(rng)
        orc = Oracle(inter, small_bath(rng), FockCutoffs((8, 6)))
        rs = bloch_to_density(random_bloch(rng, pure=True))
        rp = bloch_to_density(random_bloch(rng, pure=True))
        rho = orc.total_state(rs, rp, 2.5)
        assert np.trace(rho @ rho).real == pytest.approx(1.0, abs=1e-10)


class TestOracleEvolve:
    def test_zero_time(self, rng):
        inter = random_interaction(rng)
        rs, rp = bloch_to_density(random_bloch(rng)), bloch_to_density(random_bloch(rng))
        out = oracle_evolve(inter, small_bath(rng), rs, rp, BathState.vacuum(), FockCutoffs((6, 6)), 0.0)
        np.testing.assert_allclose(out, rs, atol=1e-12)

    def test_decoupled_bath_freezes_system(self, rng):
        inter = random_interaction(rng)
        bath = BathSpec((Mode(1.0, 0.0),))
        rs, rp = bloch_to_density(random_bloch(rng)), bloch_to_density(random_bloch(rng))
        orc = Oracle(inter, bath, FockCutoffs((5,)))
        for t in (0.7, 4.0, 9.0):
            np.testing.assert_allclose(orc.evolve(rs, rp, t), rs, atol=1e-12)

    @pytest.mark.parametrize("basis", ["factorized", "bell", "general"])
    def test_matches_analytic_dynamics(self, rng, basis):
        inter = random_interaction(rng, basis, scale=1.0)
        bath = BathSpec((Mode(1.0, 0.3), Mode(1.7, 0.2)))
        orc = Oracle(inter, bath, FockCutoffs((12, 10)))
        rs, rp = bloch_to_density(random_bloch(rng)), bloch_to_density(random_bloch(rng))
        for t in np.linspace(0, 6, 7):
            exact = evolve_general(inter, bath, rs, rp, t)
            assert np.abs(orc.evolve(rs, rp, t) - exact).max() <= 1e-8

    def test_thermal_bath(self, rng):
        inter = random_interaction(rng, "bell", scale=1.0)
        bath = BathSpec.single(1.0, 0.3, 0.5)
        orc = Oracle(inter, bath, FockCutoffs((40,)), BathState.thermal([0.5]))
        rs, rp = bloch_to_density(random_bloch(rng)), bloch_to_density(random_bloch(rng))
        for t in (0.5, 2.0, 5.0):
            assert np.abs(orc.evolve(rs, rp, t) - evolve_general(inter, bath, rs, rp, t)).max() <= 1e-8


    def test_batched_times_match_full_density_matrix(self, rng):
        bath = BathSpec((Mode(1.0, 0.3, 0.4), Mode(2.0, 0.2, 0.1)))
        inter = random_interaction(rng)
        oracle = Oracle(inter, bath, FockCutoffs((6, 4)), BathState.thermal(bath.nbars))
        rho_s = bloch_to_density(random_bloch(rng))
        rho_p = bloch_to_density(random_bloch(rng))
        times = [0.0, 0.7, 2.3]
        for t, rho in zip(times, oracle.evolve_many(rho_s, rho_p, times)):
            full = oracle.total_state(rho_s, rho_p, t)
            ref = np.einsum("ajbj->ab", np.einsum("aibi->ab", full.reshape(4, 24, 4, 24)).reshape(2, 2, 2, 2))
            np.testing.assert_allclose(rho, ref, atol=1e-12)
            np.testing.assert_allclose(rho, oracle.evolve(rho_s, rho_p, t), atol=1e-14)


class TestOracleGamma:
    def test_equal_alphas(self, benchmark_bath):
        g = oracle_gamma(benchmark_bath, 0.7, 0.7, BathState.vacuum(), FockCutoffs((20,)), np.array([0.5, 3.0]))
        np.testing.assert_allclose(g, 1.0, atol=1e-12)

    def test_zero_time(self, benchmark_bath):
        assert abs(oracle_gamma(benchmark_bath, 1.0, 0.0, BathState.vacuum(), FockCutoffs((20,)), 0.0) - 1) < 1e-12

    def test_hand_value(self, benchmark_bath):
        expected = np.exp(-0.5) * np.exp(0.25j * np.pi)
        got = oracle_gamma(benchmark_bath, 1.0, 0.0, BathState.vacuum(), FockCutoffs((30,)), np.pi)
        assert abs(got - expected) <= 1e-6

    def test_cutoff_convergence(self):
        # large displacement so that truncation matters at small d
        bath = BathSpec.single(1.0, 1.2)
        t = 2.0
        exact = gamma(bath, 1.0, -0.5, t)
        errors = [
            abs(oracle_gamma(bath, 1.0, -0.5, BathState.vacuum(), FockCutoffs((d,)), t) - exact) for d in (4, 8, 16, 32)
        ]
        for coarse, fine in zip(errors, errors[1:]):
            assert fine < coarse or fine < 1e-12
        assert errors[-1] < 1e-10

    def test_thermal_cutoff_convergence(self):
        bath = BathSpec.single(1.0, 0.5, 1.0)
        exact = gamma(bath, 1.0, 0.0, 1.5)
        errors = [
            abs(oracle_gamma(bath, 1.0, 0.0, BathState.thermal([1.0]), FockCutoffs((d,)), 1.5) - exact)
            for d in (5, 10, 20, 40)
        ]
        for coarse, fine in zip(errors, errors[1:]):
            assert fine < coarse or fine < 1e-12
        assert errors[-1] < 1e-9


def test_thermal_populations():
    p = BathState.thermal([1.0, 0.0]).populations(FockCutoffs((30, 3)))
    assert p.sum() == pytest.approx(1.0)
    assert p[0] == pytest.approx(0.5, rel=1e-8)
    np.testing.assert_array_equal(BathState.vacuum().populations(FockCutoffs((3,))), [1, 0, 0])
