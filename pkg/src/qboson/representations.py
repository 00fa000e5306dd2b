"""Density matrices expanded over angle-projected q-coherent projectors.

Covers extraction of Fock dyads ``|n><m|`` from angle-projected coherent
projectors by repeated Jackson derivatives at ``r = 0``, the term structure
of the resulting diagonal representation, the maps from P-functions to
density matrices, the q-Poisson distribution, and normal-ordering
coefficients.

The normal-ordering table is indexed ``C[p, s]`` for ``(a^+)^p a^s``; the
second index is called ``s`` because ``q`` is the deformation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, pdtrc as poisson_sf, xlogy

from .coherent import QuadratureGrid, coherent_state, fsum_complex, projector, unnormalized_vectors
from .errors import ConvergenceError, CutoffError, DomainError
from .fock import DensityMatrix, FockOperator, as_trunc, density_from_coeffs
from .qcalc import (
    RadialSeries,
    as_q,
    inv_e_q,
    q_derivative_series,
    q_factorial,
    q_factorials,
    q_exponential,
    q_number,
    series_eval_at_zero,
)

NORMAL_ORDER_CLOSED_FORM = (
    "C[p,s] = sum_{k=0}^{min(p,s)} (-1)^k q^{k(k-1)/2} / ([k]! sqrt([p-k]! [s-k]!)) <p-k|F|s-k>"
)


# --------------------------------------------------------------------------
# dyad extraction

def theta_projected_series(ell: int, q, trunc) -> RadialSeries:
    """``int dtheta/2pi e^{i ell theta} e_q(r^2) |re^{i theta}><re^{i theta}|`` as a series in r.

    Only ``m - n = ell`` survives the angular integral, leaving
    ``sum r**(n+m) / sqrt([n]! [m]!) |n><m|`` of degree at most ``2 n_max``.
    """
    trunc = as_trunc(trunc)
    if abs(ell) > trunc.n_max:
        raise DomainError(f"|ell| = {abs(ell)} exceeds n_max = {trunc.n_max}")
    fact = q_factorials(trunc.n_max, q)
    coeffs = np.zeros((2 * trunc.n_max + 1, trunc.dim, trunc.dim), dtype=complex)
    for n in range(trunc.dim):
        m = n + ell
        if 0 <= m <= trunc.n_max:
            coeffs[n + m, n, m] = 1.0 / math.sqrt(fact[n] * fact[m])
    return RadialSeries(coeffs)


@lru_cache(maxsize=4096)
def _extracted(p: int, ell: int, q: float, n_max: int) -> np.ndarray:
    series = theta_projected_series(ell, q, n_max)
    return series_eval_at_zero(q_derivative_series(series, p, q))


def fock_dyad(n: int, m: int, q, trunc) -> FockOperator:
    """``|n><m|`` rebuilt from coherent projectors.

    Differentiates the ``ell = m - n`` angular projection ``n + m`` times,
    sets ``r = 0`` and scales by ``sqrt([n]! [m]!) / [n+m]!``.
    """
    q = as_q(q)
    trunc = as_trunc(trunc)
    if not (0 <= n <= trunc.n_max and 0 <= m <= trunc.n_max):
        raise DomainError(f"levels ({n}, {m}) outside 0..{trunc.n_max}")
    scale = math.sqrt(q_factorial(n, q) * q_factorial(m, q)) / q_factorial(n + m, q)
    return FockOperator(scale * _extracted(n + m, m - n, q, trunc.n_max), trunc, q)


@dataclass(frozen=True)
class DiagonalTerm:
    n: int
    m: int
    rho_nm: complex
    coefficient: complex  # rho(n,m) sqrt([n]![m]!) / [n+m]!
    derivative_order: int  # n + m
    fourier_index: int  # m - n

    def to_dict(self) -> dict:
        return {"n": self.n, "m": self.m,
                "rho_nm": [self.rho_nm.real, self.rho_nm.imag],
                "coefficient": [self.coefficient.real, self.coefficient.imag],
                "derivative_order": self.derivative_order,
                "fourier_index": self.fourier_index}


@dataclass(frozen=True)
class DiagonalRepresentation:
    """Term list of the diagonal representation of a density matrix.

    Each term stands for ``coefficient * D_q^p [int dtheta/2pi e^{i ell theta}
    e_q(r^2) |re^{i theta}><re^{i theta}|]_{r=0}``.
    """

    terms: tuple
    q: float
    trunc: object

    def materialize(self) -> np.ndarray:
        """Evaluate every term through the derivative pipeline and sum."""
        trunc = as_trunc(self.trunc)
        out = np.zeros((trunc.dim, trunc.dim), dtype=complex)
        for t in self.terms:
            out += t.coefficient * _extracted(t.derivative_order, t.fourier_index,
                                              self.q, trunc.n_max)
        return out

    def to_json(self) -> str:
        return json.dumps({"q": self.q, "n_max": as_trunc(self.trunc).n_max,
                           "terms": [t.to_dict() for t in self.terms]})

    def rows(self) -> list:
        """Table rows ``(n, m, p, ell, Re coef, Im coef)``."""
        return [(t.n, t.m, t.derivative_order, t.fourier_index,
                 t.coefficient.real, t.coefficient.imag) for t in self.terms]


def diagonal_representation(rho: DensityMatrix, threshold: float = 0.0) -> DiagonalRepresentation:
    """Terms for every ``|rho(n, m)| > threshold``."""
    q = rho.q
    fact = q_factorials(2 * rho.trunc.n_max, q)
    terms = []
    for n in range(rho.trunc.dim):
        for m in range(rho.trunc.dim):
            c = rho.coeff(n, m)
            if abs(c) > threshold:
                coef = c * math.sqrt(fact[n] * fact[m]) / fact[n + m]
                terms.append(DiagonalTerm(n, m, c, coef, n + m, m - n))
    return DiagonalRepresentation(tuple(terms), q, rho.trunc)


# --------------------------------------------------------------------------
# P-functions

PFUNCTION_MASS_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class PFunction:
    """Weight function of ``rho = int d^2 z phi(z) |z><z|``.

    Either ``kind="atomic"`` with point masses ``points``/``weights``, or
    ``kind="smooth"`` with ``values`` of phi on the nodes of ``grid``
    (shape ``(J*M,)``, same order as ``grid.nodes()``).
    """

    kind: str
    q: float
    trunc: object
    points: np.ndarray | None = None
    weights: np.ndarray | None = None
    grid: QuadratureGrid | None = None
    values: np.ndarray | None = None

    @classmethod
    def atomic(cls, points, weights, q, trunc) -> "PFunction":
        pts = np.atleast_1d(np.asarray(points, dtype=complex))
        w = np.atleast_1d(np.asarray(weights, dtype=float))
        if pts.shape != w.shape:
            raise ValueError("points and weights differ in length")
        phi = cls("atomic", as_q(q), as_trunc(trunc), points=pts, weights=w)
        phi._check_mass()
        return phi

    @classmethod
    def smooth(cls, func_or_values, grid: QuadratureGrid, trunc,
               normalize: bool = False) -> "PFunction":
        """Sample phi on ``grid``; ``func_or_values`` is a callable of z or an array.

        phi must vanish on the outer ring ``|z|^2 = 1/(1-q)``, where the plain
        area weight is infinite; samples there at rounding level (relative
        ``1e-12``) are set to zero.  With ``normalize=True`` the samples are
        rescaled to unit mass.
        """
        if callable(func_or_values):
            vals = np.asarray(func_or_values(grid.nodes()), dtype=complex)
        else:
            vals = np.asarray(func_or_values, dtype=complex).ravel()
        if vals.size != grid.J * grid.M:
            raise ValueError(f"expected {grid.J * grid.M} samples, got {vals.size}")
        edge = ~np.isfinite(grid.plain_weights())
        if np.any(edge):
            if np.max(np.abs(vals[edge])) > 1e-12 * np.max(np.abs(vals)):
                raise DomainError("smooth P-function must vanish on |z|^2 = 1/(1-q)")
            vals = np.where(edge, 0.0, vals)
        if normalize:
            vals = vals / _smooth_mass(vals, grid)
        phi = cls("smooth", grid.q, as_trunc(trunc), grid=grid, values=vals)
        phi._check_mass()
        return phi

    def mass(self) -> complex:
        """``int d^2 z phi(z)`` (or the weight sum)."""
        if self.kind == "atomic":
            return complex(math.fsum(self.weights))
        return _smooth_mass(self.values, self.grid)

    def _check_mass(self):
        mass = self.mass()
        if abs(mass - 1.0) > PFUNCTION_MASS_TOL:
            raise DomainError(f"P-function mass {mass:.12g} differs from 1")


def _smooth_mass(vals, grid) -> complex:
    pw = grid.plain_weights()
    edge = ~np.isfinite(pw)
    if np.any(vals[edge] != 0):
        raise DomainError("smooth P-function must vanish on |z|^2 = 1/(1-q)")
    return fsum_complex(np.where(edge, 0.0, pw) * vals)


def rho_from_pfunction(phi: PFunction, renormalize: bool = True):
    """Density matrix ``int d^2 z phi(z) |z><z|`` on the truncated space.

    Returns ``(rho, drift)`` where ``drift = 1 - Tr rho`` before the
    optional trace renormalization.
    """
    trunc = as_trunc(phi.trunc)
    q = phi.q
    if phi.kind == "atomic":
        mat = np.zeros((trunc.dim, trunc.dim), dtype=complex)
        for z, w in zip(phi.points, phi.weights):
            mat += w * projector(coherent_state(z, q, trunc)).matrix
    else:
        vecs = unnormalized_vectors(phi.grid.nodes(), q, trunc.n_max)
        wts = phi.grid.weights() * phi.values
        vt = np.ascontiguousarray(vecs.T)
        mat = np.empty((trunc.dim, trunc.dim), dtype=complex)
        for n in range(trunc.dim):
            mat[n] = np.sum((vt[n] * wts)[None, :] * vt.conj(), axis=-1)
    drift = float(1.0 - np.trace(mat).real)
    mat = 0.5 * (mat + mat.conj().T)
    if renormalize:
        mat = mat / np.trace(mat).real
    return density_from_coeffs(mat, trunc, q), drift


_EIG_FLOOR = 1e-13


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``."""
    lam, u = np.linalg.eigh(rho)
    # eigenvalues at rounding level are zero; their square roots would not be
    lam = np.where(lam > _EIG_FLOOR * max(lam.max(), 0.0), lam, 0.0)
    sq = (u * np.sqrt(lam)) @ u.conj().T
    inner = np.linalg.eigvalsh(sq @ sigma @ sq)
    inner = np.where(inner > _EIG_FLOOR * max(inner.max(), 0.0), inner, 0.0)
    return float(np.sum(np.sqrt(inner)) ** 2)


# --------------------------------------------------------------------------
# q-Poisson

def q_poisson(n: int, s: float, q) -> float:
    """Occupation probability ``s**n / ([n]! e_q(s))`` of a coherent state with ``|z|^2 = s``."""
    q = as_q(q)
    if s < 0:
        raise DomainError(f"s must be nonnegative, got {s}")
    if q == 1.0:
        if s == 0:
            return 1.0 if n == 0 else 0.0
        return math.exp(n * math.log(s) - s - math.lgamma(n + 1))
    if s >= 1.0 / (1.0 - q):
        raise DomainError(f"s = {s:g} must be below 1/(1-q) = {1.0 / (1.0 - q):g}")
    p = float(inv_e_q(s, q))
    for k in range(1, n + 1):
        p *= s / q_number(k, q)
    return p


def q_poisson_pmf(s: float, q, n_max: int | None = None, tol: float = 1e-17):
    """pmf ``p_0, p_1, ...`` of the q-Poisson distribution and its tail mass.

    Terms are generated until the geometric bound on the remainder drops
    below ``tol``.  With ``n_max`` given, returns ``(p_0..p_n_max, tail)``
    where ``tail`` sums the generated terms beyond ``n_max``; otherwise
    returns ``(all terms, 0.0)``.
    """
    q = as_q(q)
    if q == 1.0:
        return _classical_pmf(s, n_max, tol)
    pmf = [q_poisson(0, s, q)]
    n = 0
    while True:
        n += 1
        if n > 100_000:
            raise ConvergenceError("q-Poisson pmf did not converge")
        pmf.append(pmf[-1] * s / q_number(n, q))
        ratio = s / q_number(n + 1, q)
        done = ratio < 1 and pmf[-1] * ratio / (1 - ratio) < tol
        if done and (n_max is None or n > n_max):
            break
    if n_max is None:
        return np.array(pmf), 0.0
    return np.array(pmf[: n_max + 1]), math.fsum(pmf[n_max + 1:])


def _classical_pmf(s, n_max, tol):
    if s < 0:
        raise DomainError(f"s must be nonnegative, got {s}")
    n_top = int(s + 10.0 * math.sqrt(s) + 40.0)
    while poisson_sf(n_top, s) >= tol:
        n_top *= 2
    if n_max is not None:
        n_top = max(n_top, n_max)
    n = np.arange(n_top + 1)
    pmf = np.exp(xlogy(n, s) - gammaln(n + 1) - s)
    if n_max is None:
        return pmf, 0.0
    return pmf[: n_max + 1], math.fsum(pmf[n_max + 1:])


# --------------------------------------------------------------------------
# normal ordering

@dataclass(frozen=True, eq=False)
class NormalOrderCoeffs:
    """Table ``C[p, s]`` of ``F = sum C[p, s] (a^+)^p a^s`` up to ``cutoff``."""

    table: np.ndarray
    q: float
    cutoff: int

    def evaluate(self, zp, z) -> complex:
        """``sum C[p, s] conj(zp)**p z**s``."""
        p = np.conj(complex(zp)) ** np.arange(self.cutoff + 1)
        s = complex(z) ** np.arange(self.cutoff + 1)
        return complex(p @ self.table @ s)

    def hermitian_violation(self) -> float:
        return float(np.max(np.abs(self.table - self.table.conj().T)))

    def to_json(self) -> str:
        return json.dumps({"q": self.q, "cutoff": self.cutoff,
                           "closed_form": NORMAL_ORDER_CLOSED_FORM,
                           "re": self.table.real.tolist(), "im": self.table.imag.tolist()})


def _check_cutoff(F: FockOperator, cutoff: int) -> None:
    if cutoff < 0 or 2 * cutoff > F.trunc.n_max:
        raise CutoffError(f"cutoff {cutoff} needs n_max >= {2 * cutoff}, have {F.trunc.n_max}")


def normal_order_coeffs(F: FockOperator, cutoff: int) -> NormalOrderCoeffs:
    """Normal-ordering coefficients from Fock matrix elements (closed form)."""
    _check_cutoff(F, cutoff)
    q = F.q
    fact = q_factorials(cutoff, q)
    C = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    for p in range(cutoff + 1):
        for s in range(cutoff + 1):
            acc = []
            for k in range(min(p, s) + 1):
                c = (-1) ** k * q ** (k * (k - 1) / 2) / (fact[k] * math.sqrt(fact[p - k] * fact[s - k]))
                acc.append(c * F.matrix[p - k, s - k])
            C[p, s] = fsum_complex(acc)
    return NormalOrderCoeffs(C, q, cutoff)


def normal_order_oracle(F: FockOperator, cutoff: int) -> NormalOrderCoeffs:
    """Normal-ordering coefficients by triangular series matching.

    Writes ``e_q(w z) * sum C[p, s] w**p z**s = sum <n|F|m> w**n z**m /
    sqrt([n]! [m]!)`` and solves along diagonals ``p - s = const`` using
    only ``e_q``'s Taylor coefficients ``1/[k]!``.
    """
    _check_cutoff(F, cutoff)
    q = F.q
    fact = q_factorials(cutoff, q)
    C = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    for p in range(cutoff + 1):
        for s in range(cutoff + 1):
            g = F.matrix[p, s] / math.sqrt(fact[p] * fact[s])
            C[p, s] = g - sum(C[p - k, s - k] / fact[k] for k in range(1, min(p, s) + 1))
    return NormalOrderCoeffs(C, q, cutoff)


def coherent_ratio(F: FockOperator, zp, z) -> complex:
    """``<z'|F|z> / <z'|z>`` from the truncated Fock matrix."""
    n = F.trunc.n_max
    vp = unnormalized_vectors(zp, F.q, n)[0]
    v = unnormalized_vectors(z, F.q, n)[0]
    return complex(np.vdot(vp, F.matrix @ v) / q_exponential(np.conj(complex(zp)) * complex(z), F.q))
