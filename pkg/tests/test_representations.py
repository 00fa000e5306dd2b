import json
import math

import numpy as np
import pytest
from scipy.special import gammainc
from scipy.stats import poisson

from qboson.coherent import QuadratureGrid, coherent_state, projector, unnormalized_vectors
from qboson.errors import CutoffError, DomainError
from qboson.fock import FockOperator, build_annihilator, build_creator, density_from_coeffs, random_density
from qboson.qcalc import q_factorial
from qboson.representations import (
    PFunction,
    diagonal_representation,
    fidelity,
    fock_dyad,
    normal_order_coeffs,
    normal_order_oracle,
    q_poisson,
    q_poisson_pmf,
    rho_from_pfunction,
    theta_projected_series,
)


def unit(n, m, dim):
    d = np.zeros((dim, dim), dtype=complex)
    d[n, m] = 1
    return d


def random_hermitian(dim, rng):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (a + a.conj().T)


class TestThetaSeries:
    def test_ell_zero(self):
        s = theta_projected_series(0, 0.5, 3)
        assert s.max_degree == 6
        for n in range(4):
            assert s.coeffs[2 * n, n, n] == pytest.approx(1 / q_factorial(n, 0.5))
        assert np.count_nonzero(s.coeffs) == 4

    def test_ell_one(self):
        s = theta_projected_series(1, 0.5, 3)
        assert s.coeffs[1, 0, 1] == 1.0
        assert s.coeffs[3, 1, 2] == pytest.approx(1 / math.sqrt(1.5))
        assert np.count_nonzero(s.coeffs) == 3

    def test_ell_too_large(self):
        with pytest.raises(DomainError):
            theta_projected_series(4, 0.5, 3)

    @pytest.mark.parametrize("ell", [-2, 0, 3])
    def test_against_discrete_fourier(self, ell):
        # (1/M) sum_k e^{i ell theta_k} v v^+ at z = r e^{i theta_k}, with v = z^n / sqrt([n]!)
        q, n_max, r, M = 0.6, 5, 0.9, 32
        theta = 2 * np.pi * np.arange(M) / M
        acc = np.zeros((n_max + 1, n_max + 1), dtype=complex)
        fact = [q_factorial(n, q) for n in range(n_max + 1)]
        for t in theta:
            z = r * np.exp(1j * t)
            v = np.array([z**n / math.sqrt(fact[n]) for n in range(n_max + 1)])
            acc += np.exp(1j * ell * t) * np.outer(v, v.conj())
        acc /= M
        series = theta_projected_series(ell, q, n_max)
        np.testing.assert_allclose(series(r), acc, atol=1e-10)


class TestDyad:
    @pytest.mark.parametrize("q", [0.5, 0.9, 1.0])
    def test_all_dyads(self, q):
        n_max = 8
        dim = n_max + 1
        worst = 0.0
        for n in range(dim):
            for m in range(dim):
                if n + m <= 2 * n_max:
                    d = fock_dyad(n, m, q, n_max).matrix
                    worst = max(worst, np.max(np.abs(d - unit(n, m, dim))))
        assert worst < 1e-10

    def test_example(self):
        np.testing.assert_allclose(fock_dyad(0, 1, 0.5, 3).matrix, unit(0, 1, 4), atol=1e-12)

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            fock_dyad(4, 0, 0.5, 3)


class TestDiagonalRepresentation:
    def test_term_structure(self):
        rho = density_from_coeffs([[0.5, 0.5], [0.5, 0.5]], 1, 0.5)
        rep = diagonal_representation(rho)
        by_nm = {(t.n, t.m): t for t in rep.terms}
        assert by_nm[(0, 1)].derivative_order == 1 and by_nm[(0, 1)].fourier_index == 1
        assert by_nm[(1, 0)].fourier_index == -1
        assert by_nm[(1, 1)].derivative_order == 2
        assert by_nm[(1, 1)].coefficient == pytest.approx(0.5 / 1.5)

    def test_vacuum(self):
        rep = diagonal_representation(density_from_coeffs(np.diag([1, 0, 0]), 2, 0.7))
        assert len(rep.terms) == 1
        np.testing.assert_allclose(rep.materialize(), unit(0, 0, 3), atol=1e-15)

    @pytest.mark.parametrize("q", [0.4, 0.8, 1.0])
    def test_round_trip(self, q):
        rng = np.random.default_rng(3)
        for _ in range(10):
            dim = int(rng.integers(2, 7))
            rho = density_from_coeffs(random_density(dim, rng), dim - 1, q)
            rep = diagonal_representation(rho)
            assert np.max(np.abs(rep.materialize() - rho.matrix)) < 1e-9

    def test_threshold(self):
        rho = density_from_coeffs(np.diag([0.9, 0.1, 0.0]), 2, 0.5)
        assert len(diagonal_representation(rho, threshold=1e-3).terms) == 2

    def test_json(self):
        rho = density_from_coeffs(np.diag([0.5, 0.5]), 1, 0.5)
        d = json.loads(diagonal_representation(rho).to_json())
        assert d["n_max"] == 1 and len(d["terms"]) == 2


class TestPFunction:
    def test_atomic_single(self):
        q, z0, n_max = 0.5, 0.6 + 0.4j, 12
        rho, drift = rho_from_pfunction(PFunction.atomic([z0], [1.0], q, n_max))
        target = projector(coherent_state(z0, q, n_max)).matrix
        target = target / np.trace(target).real
        assert fidelity(rho.matrix, target) >= 1 - 1e-8
        assert 0 <= drift < 1e-6

    def test_atomic_mixture(self):
        q = 0.7
        phi = PFunction.atomic([0.3, -0.3j], [0.25, 0.75], q, 10)
        rho, _ = rho_from_pfunction(phi, renormalize=False)
        expected = (0.25 * projector(coherent_state(0.3, q, 10)).matrix
                    + 0.75 * projector(coherent_state(-0.3j, q, 10)).matrix)
        np.testing.assert_allclose(rho.matrix, expected, atol=1e-14)

    def test_atomic_mass(self):
        with pytest.raises(DomainError):
            PFunction.atomic([0.1, 0.2], [0.5, 0.4], 0.5, 4)

    def test_rotational_symmetry(self):
        q = 0.5
        grid = QuadratureGrid.build(q, 200, 64)
        phi = PFunction.smooth(lambda z: (1 - (1 - q) * abs(z) ** 2) * np.exp(-4 * abs(z) ** 2),
                               grid, 20, normalize=True)
        rho, drift = rho_from_pfunction(phi)
        off = rho.matrix - np.diag(np.diag(rho.matrix))
        assert np.max(np.abs(off)) < 1e-10
        assert abs(drift) < 1e-6

    def test_edge_must_vanish(self):
        grid = QuadratureGrid.build(0.5, 100, 16)
        with pytest.raises(DomainError):
            PFunction.smooth(lambda z: np.ones_like(z), grid, 6, normalize=True)

    def test_classical_thermal(self):
        # Gaussian P-function with mean occupation nbar gives a geometric distribution
        nbar = 0.5
        grid = QuadratureGrid.build(1.0, 200, 64)
        phi = PFunction.smooth(lambda z: np.exp(-abs(z) ** 2 / nbar) / (np.pi * nbar), grid, 20)
        rho, drift = rho_from_pfunction(phi, renormalize=False)
        geo = [nbar**n / (1 + nbar) ** (n + 1) for n in range(21)]
        np.testing.assert_allclose(np.diag(rho.matrix).real, geo, atol=1e-12)
        assert drift == pytest.approx((nbar / (1 + nbar)) ** 21, rel=1e-8)

    def test_classical_uniform_disk(self):
        r2 = 2.0
        grid = QuadratureGrid.build(1.0, 256, 32, radius2=r2)
        phi = PFunction.smooth(lambda z: np.full(z.shape, 1 / (np.pi * r2)), grid, 20)
        rho, _ = rho_from_pfunction(phi, renormalize=False)
        # rho(n,n) = (1/r2) int_0^r2 s^n e^{-s}/n! ds
        expected = [gammainc(n + 1, r2) / r2 for n in range(21)]
        np.testing.assert_allclose(np.diag(rho.matrix).real, expected, rtol=1e-12)


def test_fidelity_commuting_states():
    p = np.array([0.5, 0.3, 0.2, 0.0])
    r = np.array([0.1, 0.1, 0.4, 0.4])
    assert fidelity(np.diag(p), np.diag(r)) == pytest.approx(np.sum(np.sqrt(p * r)) ** 2, rel=1e-13)
    assert fidelity(np.diag(p), np.diag(p)) == pytest.approx(1.0, abs=1e-14)


class TestQPoisson:
    def test_vacuum(self):
        assert q_poisson(0, 0.0, 0.5) == 1.0

    @pytest.mark.parametrize("q", [0.3, 0.6, 0.9])
    def test_sums_to_one(self, q):
        for frac in (0.1, 0.5, 0.9):
            pmf, tail = q_poisson_pmf(frac / (1 - q), q)
            assert tail == 0.0
            assert math.fsum(pmf) == pytest.approx(1.0, abs=1e-10)

    def test_truncated_tail(self):
        pmf, tail = q_poisson_pmf(1.0, 0.5, n_max=20)
        assert len(pmf) == 21
        assert tail > 1e-7
        assert math.fsum(pmf) + tail == pytest.approx(1.0, abs=1e-12)

    def test_matches_coherent_amplitudes(self):
        st_ = coherent_state(0.9, 0.5, 30)
        np.testing.assert_allclose([q_poisson(n, 0.81, 0.5) for n in range(31)], np.abs(st_.amps) ** 2,
                                   rtol=1e-12)

    def test_classical(self):
        s = 2.5
        pmf, _ = q_poisson_pmf(s, 1.0)
        np.testing.assert_allclose(pmf, poisson.pmf(np.arange(len(pmf)), s), rtol=1e-13, atol=1e-300)

    def test_classical_truncated(self):
        pmf, tail = q_poisson_pmf(3.0, 1.0, n_max=5)
        assert len(pmf) == 6
        assert tail == pytest.approx(poisson.sf(5, 3.0), rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            q_poisson(1, 2.0, 0.5)
        with pytest.raises(DomainError):
            q_poisson(1, -0.1, 0.5)


class TestNormalOrder:
    def test_identity(self):
        C = normal_order_coeffs(FockOperator(np.eye(5), 4, 0.5), 2).table
        np.testing.assert_allclose(C, unit(0, 0, 3), atol=1e-15)

    def test_number_like(self):
        q = 0.5
        ad, a = build_creator(q, 4), build_annihilator(q, 4)
        np.testing.assert_allclose(normal_order_coeffs(ad @ a, 2).table, unit(1, 1, 3), atol=1e-15)

    def test_hand_identity(self):
        # a a^+ = 1 + q a^+ a
        q = 0.5
        # matrix of a a^+ below the truncation edge: diag([n+1])
        exact = FockOperator(np.diag([1.0, 1.5, 1.75, 1.875, 0.0]), 4, q)
        C = normal_order_coeffs(exact, 2).table
        assert C[0, 0] == 1.0 and C[1, 1] == q
        rest = C.copy()
        rest[0, 0] = rest[1, 1] = 0
        assert np.max(np.abs(rest)) < 1e-15
        ad, a = build_creator(q, 4), build_annihilator(q, 4)
        np.testing.assert_allclose(normal_order_coeffs(a @ ad, 2).table, C, atol=1e-15)

    def test_creator_and_square(self):
        q = 0.7
        ad, a = build_creator(q, 6), build_annihilator(q, 6)
        np.testing.assert_allclose(normal_order_coeffs(ad, 2).table, unit(1, 0, 3), atol=1e-15)
        np.testing.assert_allclose(normal_order_coeffs(ad @ ad @ a @ a, 3).table, unit(2, 2, 4),
                                   atol=1e-13)

    @pytest.mark.parametrize("q", [0.4, 0.8])
    def test_against_oracle(self, q):
        rng = np.random.default_rng(11)
        for _ in range(20):
            F = FockOperator(random_hermitian(9, rng), 8, q)
            closed = normal_order_coeffs(F, 4)
            oracle = normal_order_oracle(F, 4)
            assert np.max(np.abs(closed.table - oracle.table)) < 1e-9
            assert closed.hermitian_violation() < 1e-12

    def test_symbol(self):
        # the normal-ordered symbol reproduces <z'|F|z>/<z'|z> for F built from
        # finitely many normal-ordered monomials
        q = 0.6
        ad, a = build_creator(q, 30), build_annihilator(q, 30)
        F = ad @ a + 0.3 * (ad @ ad @ a) + 0.2 * a
        C = normal_order_coeffs(F, 3)
        zp, z = 0.2 - 0.1j, 0.3 + 0.05j
        # direct: 1 * conj(zp) z + 0.3 conj(zp)^2 z + 0.2 z
        direct = np.conj(zp) * z + 0.3 * np.conj(zp) ** 2 * z + 0.2 * z
        assert C.evaluate(zp, z) == pytest.approx(direct, abs=1e-12)

    def test_cutoff_guard(self):
        with pytest.raises(CutoffError):
            normal_order_coeffs(FockOperator(np.eye(5), 4, 0.5), 3)


def test_unnormalized_vectors_shape():
    v = unnormalized_vectors(np.array([0.1, 0.2j]), 0.5, 4)
    assert v.shape == (2, 5)
