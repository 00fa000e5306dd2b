"""Truncated Fock-space matrices for the q-deformed oscillator."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DensityMatrixError
from .qcalc import as_q, q_number

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-10


@dataclass(frozen=True)
class FockTruncation:
    """Span of ``|0>, ..., |n_max>``."""

    n_max: int

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"n_max must be an integer >= 1, got {self.n_max!r}")
        object.__setattr__(self, "n_max", int(self.n_max))

    @property
    def dim(self) -> int:
        return self.n_max + 1


def as_trunc(trunc) -> FockTruncation:
    return trunc if isinstance(trunc, FockTruncation) else FockTruncation(trunc)


@dataclass(frozen=True, eq=False)
class FockOperator:
    """Dense complex matrix on a truncated Fock space at deformation ``q``."""

    matrix: np.ndarray
    trunc: FockTruncation
    q: float

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        trunc = as_trunc(self.trunc)
        if m.shape != (trunc.dim, trunc.dim):
            raise ValueError(f"matrix shape {m.shape} does not match dim {trunc.dim}")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "trunc", trunc)
        object.__setattr__(self, "q", as_q(self.q))

    def _wrap(self, m):
        return FockOperator(m, self.trunc, self.q)

    def _other(self, other):
        return other.matrix if isinstance(other, FockOperator) else other

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            return self._wrap(self.matrix @ other.matrix)
        return self.matrix @ other

    def __add__(self, other):
        return self._wrap(self.matrix + self._other(other))

    def __sub__(self, other):
        return self._wrap(self.matrix - self._other(other))

    def __mul__(self, scalar):
        return self._wrap(self.matrix * scalar)

    __rmul__ = __mul__

    def dag(self) -> "FockOperator":
        return self._wrap(self.matrix.conj().T)

    def __getitem__(self, idx):
        return self.matrix[idx]


def build_annihilator(q, trunc) -> FockOperator:
    """``a`` with ``<n-1|a|n> = sqrt([n])``."""
    trunc = as_trunc(trunc)
    m = np.zeros((trunc.dim, trunc.dim), dtype=complex)
    for n in range(1, trunc.dim):
        m[n - 1, n] = np.sqrt(q_number(n, q))
    return FockOperator(m, trunc, q)


def build_creator(q, trunc) -> FockOperator:
    """``a^dagger``, the conjugate transpose of :func:`build_annihilator`."""
    return build_annihilator(q, trunc).dag()


def build_number(trunc, q=1.0) -> FockOperator:
    """``N = diag(0, 1, ..., n_max)``.  Note ``N != a^dagger a`` unless ``q = 1``."""
    trunc = as_trunc(trunc)
    return FockOperator(np.diag(np.arange(trunc.dim)).astype(complex), trunc, q)


def _maxabs(m):
    return float(np.max(np.abs(m))) if m.size else 0.0


def algebra_residuals(q, trunc) -> dict:
    """Max-norm residuals of ``aa^+ - q a^+a = 1``, ``[N,a] = -a``, ``[N,a^+] = a^+``.

    The plain keys cover rows/columns ``0..n_max-1``; the last level is
    necessarily wrong after truncation.  ``*_full`` keys report the whole
    matrix, whose commutator residual is ``1 + q [n_max]`` at the corner.
    """
    trunc = as_trunc(trunc)
    a = build_annihilator(q, trunc).matrix
    ad = a.conj().T
    num = build_number(trunc, q).matrix
    eye = np.eye(trunc.dim)
    qv = as_q(q)
    comm = a @ ad - qv * ad @ a - eye
    na = num @ a - a @ num + a
    nad = num @ ad - ad @ num - ad
    k = trunc.n_max
    return {
        "comm_residual": _maxabs(comm[:k, :k]),
        "N_a_residual": _maxabs(na[:k, :k]),
        "N_adag_residual": _maxabs(nad[:k, :k]),
        "comm_residual_full": _maxabs(comm),
        "N_a_residual_full": _maxabs(na),
        "N_adag_residual_full": _maxabs(nad),
    }


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite :class:`FockOperator`."""

    op: FockOperator

    def __post_init__(self):
        self.check()

    @property
    def matrix(self) -> np.ndarray:
        return self.op.matrix

    @property
    def trunc(self) -> FockTruncation:
        return self.op.trunc

    @property
    def q(self) -> float:
        return self.op.q

    def coeff(self, n: int, m: int) -> complex:
        """``rho(n, m) = <n|rho|m>``."""
        return complex(self.op.matrix[n, m])

    def check(self) -> None:
        """Re-verify the invariants; raises :class:`DensityMatrixError`."""
        m = self.op.matrix
        herm = _maxabs(m - m.conj().T)
        if herm > HERMITIAN_TOL:
            raise DensityMatrixError("not_hermitian", f"||rho - rho^+||_max = {herm:.3e}")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise DensityMatrixError("bad_trace", f"trace = {tr:.12g}, expected 1")
        lam = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])
        if lam < -POSITIVITY_TOL:
            raise DensityMatrixError("not_positive", f"minimum eigenvalue {lam:.3e} < 0")

    def to_json(self) -> str:
        return json.dumps({
            "n_max": self.trunc.n_max,
            "q": self.q,
            "re": self.matrix.real.tolist(),
            "im": self.matrix.imag.tolist(),
        })

    @classmethod
    def from_json(cls, text: str) -> "DensityMatrix":
        d = json.loads(text)
        m = np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)
        return density_from_coeffs(m, d["n_max"], d["q"])


def density_from_coeffs(coeffs, trunc, q) -> DensityMatrix:
    """Wrap ``rho(n, m)`` as a validated :class:`DensityMatrix`."""
    trunc = as_trunc(trunc)
    c = np.asarray(coeffs, dtype=complex)
    if c.shape != (trunc.dim, trunc.dim):
        raise DensityMatrixError("shape", f"coefficients of shape {c.shape} for dim {trunc.dim}")
    return DensityMatrix(FockOperator(c, trunc, q))


def embed(coeffs, trunc) -> np.ndarray:
    """Zero-pad a small matrix into the top-left block of ``trunc``'s space."""
    trunc = as_trunc(trunc)
    c = np.asarray(coeffs, dtype=complex)
    out = np.zeros((trunc.dim, trunc.dim), dtype=complex)
    out[: c.shape[0], : c.shape[1]] = c
    return out


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random full-rank (or given rank) ``dim x dim`` density matrix ``G G^+ / Tr``."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real
