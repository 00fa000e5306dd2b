import numpy as np
import pytest

from qboson.errors import DensityMatrixError
from qboson.fock import (
    DensityMatrix,
    FockTruncation,
    algebra_residuals,
    build_annihilator,
    build_creator,
    build_number,
    density_from_coeffs,
    random_density,
)
from qboson.qcalc import q_number


def basis(n, dim):
    v = np.zeros(dim, dtype=complex)
    v[n] = 1
    return v


def test_truncation_rejects_zero():
    with pytest.raises(ValueError):
        FockTruncation(0)


def test_annihilator_classical():
    a = build_annihilator(1.0, 2).matrix
    np.testing.assert_allclose(np.diag(a, 1), [1, np.sqrt(2)])
    assert np.count_nonzero(a) == 2


def test_annihilator_deformed():
    a = build_annihilator(0.5, 2).matrix
    np.testing.assert_allclose(np.diag(a, 1), [1, np.sqrt(1.5)])


def test_vacuum_annihilated():
    a = build_annihilator(0.7, 5)
    assert np.all(a @ basis(0, 6) == 0)


def test_creator_is_exact_adjoint():
    for q in (0.3, 0.5, 1.0):
        a = build_annihilator(q, 7).matrix
        assert np.array_equal(build_creator(q, 7).matrix, a.conj().T)


def test_number_operator():
    N = build_number(5)
    np.testing.assert_array_equal(N @ basis(3, 6), 3 * basis(3, 6))


def test_commutator_N_a():
    q, tr = 0.6, 6
    a = build_annihilator(q, tr)
    N = build_number(tr, q)
    comm = N @ a - a @ N
    for n in range(tr):
        np.testing.assert_allclose(comm @ basis(n, 7), -(a @ basis(n, 7)), atol=1e-14)


@pytest.mark.parametrize("q", [0.3, 0.5, 0.9, 1.0])
@pytest.mark.parametrize("n_max", [5, 10, 12, 20])
def test_interior_algebra(q, n_max):
    r = algebra_residuals(q, n_max)
    assert r["comm_residual"] < 1e-12
    assert r["N_a_residual"] < 1e-12
    assert r["N_adag_residual"] < 1e-12


@pytest.mark.parametrize("q", [0.5, 1.0])
def test_corner_residual(q):
    n_max = 10
    # corner of aa^+ - q a^+a - 1 on the truncated space: 0 - q[n_max] - 1
    expected = 1 + q * q_number(n_max, q)
    assert algebra_residuals(q, n_max)["comm_residual_full"] == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("q", [0.4, 0.8, 1.0])
def test_number_like_products(q):
    n_max = 8
    a = build_annihilator(q, n_max)
    ad = build_creator(q, n_max)
    for n in range(n_max):
        v = basis(n, n_max + 1)
        np.testing.assert_allclose((ad @ a) @ v, q_number(n, q) * v, atol=1e-12)
        np.testing.assert_allclose((a @ ad) @ v, q_number(n + 1, q) * v, atol=1e-12)


class TestDensity:
    def test_pure_vacuum(self):
        rho = density_from_coeffs(np.diag([1, 0, 0]), 2, 0.5)
        assert rho.coeff(0, 0) == 1

    def test_indefinite(self):
        with pytest.raises(DensityMatrixError) as exc:
            density_from_coeffs([[0.5, 0.6], [0.6, 0.5]], 1, 0.5)
        assert exc.value.code == "not_positive"

    def test_not_hermitian(self):
        with pytest.raises(DensityMatrixError) as exc:
            density_from_coeffs([[0.5, 0.1], [0.2, 0.5]], 1, 0.5)
        assert exc.value.code == "not_hermitian"

    def test_bad_trace(self):
        with pytest.raises(DensityMatrixError) as exc:
            density_from_coeffs(np.diag([0.5, 0.4]), 1, 0.5)
        assert exc.value.code == "bad_trace"

    def test_bad_shape(self):
        with pytest.raises(DensityMatrixError) as exc:
            density_from_coeffs(np.eye(3) / 3, 1, 0.5)
        assert exc.value.code == "shape"

    def test_thermal_like(self):
        lam = 0.4
        z = 1 + lam + lam**2
        rho = density_from_coeffs(np.diag([1 / z, lam / z, lam**2 / z]), 2, 0.5)
        assert np.trace(rho.matrix) == pytest.approx(1.0, abs=1e-15)
        assert rho.coeff(1, 1) == pytest.approx(0.4 / 1.56)

    def test_json_roundtrip_exact(self):
        rng = np.random.default_rng(7)
        rho = density_from_coeffs(random_density(5, rng), 4, 0.37)
        back = DensityMatrix.from_json(rho.to_json())
        assert np.array_equal(back.matrix, rho.matrix)
        assert back.q == rho.q and back.trunc == rho.trunc

    def test_recheck(self):
        rho = density_from_coeffs(np.diag([0.25, 0.75]), 1, 0.5)
        rho.check()
