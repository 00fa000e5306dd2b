"""q-coherent states, overlaps, and the discretized phase-space integral.

Phase-space integrals are written against the factor that always
accompanies a normalized coherent projector::

    int d^2 xi  e_q(|xi|^2)^{-1} g(xi)

and are evaluated on a :class:`QuadratureGrid` of Jackson nodes in
``s = |xi|^2`` times uniform angles.  The radial measure is fixed by
:func:`calibrate_measure`, which picks the weight whose moments are the
q-factorials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import gammaincc, roots_laguerre

from .errors import CalibrationError, DomainError, GridError
from .fock import FockOperator, as_trunc
from .qcalc import (
    BIG_E,
    SMALL_E,
    as_q,
    inv_e_q,
    q_exponential,
    q_factorial,
    q_numbers,
)


def check_label(z, q, strict: bool = True) -> None:
    """Raise :class:`DomainError` unless ``|z|^2 < 1/(1-q)``."""
    q = as_q(q)
    if q == 1.0:
        return
    s = abs(z) ** 2
    radius = 1.0 / (1.0 - q)
    if s > radius or (strict and s == radius):
        raise DomainError(
            f"|z|^2 = {s:g} is outside the coherent-state disk |z|^2 < 1/(1-q) = {radius:g}")


def unnormalized_vectors(z, q, n_max: int) -> np.ndarray:
    """Rows ``z**n / sqrt([n]!)`` for ``n = 0..n_max``; shape ``(len(z), n_max+1)``.

    Built by the recursion ``v_n = v_{n-1} z / sqrt([n])`` so large labels
    do not overflow ``z**n``.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    nums = q_numbers(n_max, q)
    out = np.empty((z.size, n_max + 1), dtype=complex)
    out[:, 0] = 1.0
    for n in range(1, n_max + 1):
        out[:, n] = out[:, n - 1] * z / math.sqrt(nums[n])
    return out


@dataclass(frozen=True, eq=False)
class CoherentState:
    """Truncated q-coherent state ``|z>``."""

    z: complex
    q: float
    trunc: object
    amps: np.ndarray
    tail: float  # 1 - ||amps||^2, mass lost to truncation

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)


def coherent_state(z, q, trunc) -> CoherentState:
    """Amplitudes ``e_q(|z|^2)^{-1/2} z**n / sqrt([n]!)`` for ``n <= n_max``."""
    q = as_q(q)
    trunc = as_trunc(trunc)
    z = complex(z)
    check_label(z, q)
    amps = unnormalized_vectors(z, q, trunc.n_max)[0] * math.sqrt(inv_e_q(abs(z) ** 2, q))
    tail = 1.0 - float(np.vdot(amps, amps).real)
    return CoherentState(z, q, trunc, amps, tail)


def overlap(z, zp, q) -> complex:
    """``<z|z'> = (e_q(|z|^2) e_q(|z'|^2))^{-1/2} e_q(conj(z) z')``."""
    q = as_q(q)
    z, zp = complex(z), complex(zp)
    check_label(z, q)
    check_label(zp, q)
    if q == 1.0:
        return complex(np.exp(-0.5 * abs(z) ** 2 - 0.5 * abs(zp) ** 2 + z.conjugate() * zp))
    norm = math.sqrt(inv_e_q(abs(z) ** 2, q) * inv_e_q(abs(zp) ** 2, q))
    return complex(norm * q_exponential(z.conjugate() * zp, q, SMALL_E))


def eigen_residual(state: CoherentState, a: FockOperator) -> float:
    """``||a|z> - z|z>||_2``; nonzero only through the truncated top level."""
    if a.matrix.shape[0] != state.amps.size:
        raise ValueError("operator and state dimensions differ")
    if a.q != state.q:
        raise ValueError(f"operator q={a.q} differs from state q={state.q}")
    return float(np.linalg.norm(a.matrix @ state.amps - state.z * state.amps))


def projector(state: CoherentState) -> FockOperator:
    """Rank-one ``|z><z|`` on the truncated space."""
    P = np.outer(state.amps, state.amps.conj())
    P = 0.5 * (P + P.conj().T)
    return FockOperator(P, state.trunc, state.q)


# --------------------------------------------------------------------------
# radial measure calibration

def _weight_E_shift(s, q):
    return q_exponential(-q * np.asarray(s), q, BIG_E)


def _weight_inv_e(s, q):
    return q_exponential(-np.asarray(s), q, BIG_E)


RADIAL_WEIGHTS = {
    "E_q(-q s)": _weight_E_shift,
    "1/e_q(s)": _weight_inv_e,
}


@dataclass(frozen=True)
class MeasureCalibration:
    """Resolved convention for ``int d^2 xi e_q(|xi|^2)^{-1} (...)``.

    ``d^2 xi -> mu * W(s) d_q s dtheta`` on ``s in [0, upper]`` with the
    weight ``W`` named by ``weight``.  ``candidates`` records every
    convention tried and how far its moments were from proportional to
    ``[n]!``.
    """

    q: float
    weight: str
    upper: float
    mu: float
    max_rel_error: float
    n_moments: int
    candidates: tuple = field(default=())

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "weight": self.weight,
            "upper_limit": self.upper,
            "mu": self.mu,
            "radial_variable": "s = |z|^2",
            "max_moment_rel_error": self.max_rel_error,
            "n_moments": self.n_moments,
            "candidates": [dict(c) for c in self.candidates],
        }


def radial_moment(n: int, q, weight: str = "E_q(-q s)", upper: float | None = None) -> float:
    """``int_0^upper s**n W(s) d_q s`` (Jackson); ``int_0^inf s**n e^{-s} ds`` at q=1."""
    q = as_q(q)
    if q == 1.0:
        x, w = roots_laguerre(64)
        return math.fsum(w * x**n)
    upper = 1.0 / (1.0 - q) if upper is None else upper
    # Jackson sum (1-q) a sum_j q^j f(a q^j); terms decay at least like q^(j(n+1))
    js = np.arange(int(math.ceil(40.0 / -math.log(q))) + 1)
    s = upper * q**js
    terms = (1.0 - q) * s * s**n * RADIAL_WEIGHTS[weight](s, q)
    return math.fsum(terms)


@lru_cache(maxsize=64)
def calibrate_measure(q, n_moments: int = 10, tol: float = 1e-8) -> MeasureCalibration:
    """Pick the radial measure whose moments are ``c * [n]!`` for ``n <= n_moments``.

    Candidates are the weights ``E_q(-q s)`` and ``1/e_q(s)`` on
    ``[0, 1/(1-q)]``, plus ``E_q(-q s)`` on ``[0, 1/(1-q^2)]``.  Resolution
    of unity then needs ``mu = 1 / (2 c)``.
    """
    q = as_q(q)
    if q == 1.0:
        errs = [abs(radial_moment(n, q) / math.factorial(n) - 1.0) for n in range(n_moments + 1)]
        cand = ({"weight": "exp(-s)", "upper_limit": math.inf, "ratio": 1.0,
                 "spread": max(errs), "accepted": max(errs) < tol},)
        if not cand[0]["accepted"]:
            raise CalibrationError("Gauss-Laguerre moments disagree with n!")
        return MeasureCalibration(q, "exp(-s)", math.inf, 0.5, max(errs), n_moments, cand)
    r1 = 1.0 / (1.0 - q)
    trials = [("E_q(-q s)", r1), ("1/e_q(s)", r1), ("E_q(-q s)", 1.0 / (1.0 - q * q))]
    cands = []
    chosen = None
    for weight, upper in trials:
        ratios = [radial_moment(n, q, weight, upper) / q_factorial(n, q)
                  for n in range(n_moments + 1)]
        spread = max(abs(r / ratios[0] - 1.0) for r in ratios)
        accepted = spread < tol
        cands.append({"weight": weight, "upper_limit": upper, "ratio": ratios[0],
                      "spread": spread, "accepted": accepted})
        if accepted and chosen is None:
            chosen = (weight, upper, ratios[0], spread)
    if chosen is None:
        raise CalibrationError(f"no radial weight reproduces [n]! moments at q={q}")
    weight, upper, ratio, spread = chosen
    return MeasureCalibration(q, weight, upper, 0.5 / ratio, spread, n_moments, tuple(cands))


# --------------------------------------------------------------------------
# quadrature grid

CLASSICAL_RADIUS2 = 120.0


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Radial x angular grid discretizing ``int d^2 xi e_q(|xi|^2)^{-1} g(xi)``.

    Use :meth:`build`.  ``s`` holds the radial nodes in ``s = |xi|^2`` and
    ``w`` their measure weights including ``W(s)``; the full node weight is
    ``mu * w_j * 2 pi / M``.
    """

    q: float
    J: int
    M: int
    mu: float
    weight: str
    s: np.ndarray
    w: np.ndarray
    tol: float
    tail_bound: float
    guard_band: int | None = None
    radius2: float | None = None

    @classmethod
    def build(cls, q, J: int = 200, M: int | None = None, n_max: int | None = None,
              tol: float = 1e-8, guard_band: int | None = None,
              radius2: float | None = None) -> "QuadratureGrid":
        """Construct a calibrated grid.

        ``M`` defaults to ``2 n_max + 2``.  In the classical case the radial
        rule is composite Gauss-Legendre (16-node panels) on ``[0, radius2]``
        with the weight ``exp(-s)`` folded in; ``radius2`` defaults to
        ``CLASSICAL_RADIUS2`` and may be set to a disk radius for integrands
        supported on that disk.  ``radius2`` is rejected for ``q < 1``.
        """
        q = as_q(q)
        if M is None:
            if n_max is None:
                raise GridError("give M or n_max")
            M = 2 * n_max + 2
        if J < 1 or M < 1:
            raise GridError(f"grid counts must be positive, got J={J}, M={M}")
        if n_max is not None and M < 2 * n_max + 1:
            raise GridError(f"M={M} < 2*n_max+1={2 * n_max + 1}: angular rule not exact")
        if q < 1.0 and q**J / (1.0 - q) > tol:
            raise GridError(f"radial tail bound {q**J / (1.0 - q):.2e} exceeds tol {tol:.1e}; "
                            f"increase J (now {J})")
        cal = calibrate_measure(q)
        if q == 1.0:
            radius2 = CLASSICAL_RADIUS2 if radius2 is None else float(radius2)
            s, w = _composite_legendre(radius2, J)
            w = w * np.exp(-s)
            J = s.size  # whole 16-node panels
            # mass of s**n e^{-s} / n! beyond the cutoff, n up to n_max
            tail = float(gammaincc((n_max or 0) + 1, radius2))
            if radius2 == CLASSICAL_RADIUS2 and tail > tol:
                raise GridError(f"classical radial tail {tail:.2e} exceeds tol {tol:.1e}")
        else:
            if radius2 is not None:
                raise GridError("radius2 is only supported for the classical grid")
            js = np.arange(J)
            s = cal.upper * q**js
            w = q**js * RADIAL_WEIGHTS[cal.weight](s, q)
            tail = q**J / (1.0 - q)
        return cls(q, int(J), int(M), cal.mu, cal.weight, np.asarray(s, dtype=float),
                   np.asarray(w, dtype=float), tol, tail, guard_band, radius2)

    @property
    def theta(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.M) / self.M

    def nodes(self) -> np.ndarray:
        """Complex nodes ``sqrt(s_j) e^{i theta_k}``, flattened ``j``-major."""
        return (np.sqrt(self.s)[:, None] * np.exp(1j * self.theta)[None, :]).ravel()

    def weights(self) -> np.ndarray:
        """Node weights for integrals against ``e_q(|xi|^2)^{-1} d^2 xi``."""
        ang = 2.0 * np.pi / self.M
        return np.repeat(self.mu * self.w * ang, self.M)

    def plain_weights(self) -> np.ndarray:
        """Node weights for plain ``d^2 xi``; infinite at ``s = 1/(1-q)``."""
        # multiply by e_q(s) = 1 / E_q(-s), which vanishes exactly on the outer ring
        inv = np.asarray(q_exponential(-self.s, self.q, BIG_E), dtype=float)
        with np.errstate(divide="ignore"):
            radial = np.where(inv > 0, self.w / np.where(inv > 0, inv, 1.0), np.inf)
        return np.repeat(self.mu * radial * 2.0 * np.pi / self.M, self.M)

    def integrate(self, values) -> complex:
        """Compensated sum of ``weights() * values``."""
        return fsum_complex(self.weights() * np.asarray(values))

    def to_dict(self) -> dict:
        return {"J": self.J, "M": self.M, "q": self.q, "mu": self.mu, "weight": self.weight,
                "guard_band": self.guard_band, "tol": self.tol, "tail_bound": self.tail_bound,
                "radius2": self.radius2}


def _composite_legendre(b, n_nodes, per_panel=16):
    panels = max(1, -(-n_nodes // per_panel))
    x, w = np.polynomial.legendre.leggauss(per_panel)
    edges = np.linspace(0.0, b, panels + 1)
    h = 0.5 * np.diff(edges)
    s = (edges[:-1, None] + h[:, None] * (x[None, :] + 1.0)).ravel()
    ws = (h[:, None] * w[None, :]).ravel()
    return s, ws


def fsum_complex(values) -> complex:
    v = np.asarray(values, dtype=complex).ravel()
    return complex(math.fsum(v.real), math.fsum(v.imag))


def weighted_outer_sum(vectors: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """``sum_i weights[i] * outer(v_i, conj(v_i))`` with pairwise reduction."""
    vt = np.ascontiguousarray(vectors.T)  # (dim, nodes)
    wv = vt * weights[None, :]
    dim = vt.shape[0]
    out = np.empty((dim, dim), dtype=complex)
    vc = vt.conj()
    for n in range(dim):
        out[n] = np.sum(wv[n][None, :] * vc, axis=-1)
    return out


def default_guard_band(n_max: int) -> int:
    return -(-n_max // 5)


def resolution_of_unity(q, trunc, grid: QuadratureGrid, guard_band: int | None = None):
    """Discretized ``(1/pi) int d^2 z |z><z|``.

    Returns ``(FockOperator, deviation)`` with ``deviation`` the max-norm
    distance from the identity on levels ``0..n_max-K``, ``K`` the guard
    band (argument, then ``grid.guard_band``, then ``ceil(n_max/5)``).
    """
    q = as_q(q)
    trunc = as_trunc(trunc)
    if grid.q != q:
        raise GridError(f"grid built for q={grid.q}, used at q={q}")
    if grid.M < 2 * trunc.n_max + 1:
        raise GridError(f"grid M={grid.M} too small for n_max={trunc.n_max}")
    if guard_band is None:
        guard_band = grid.guard_band if grid.guard_band is not None else default_guard_band(trunc.n_max)
    vecs = unnormalized_vectors(grid.nodes(), q, trunc.n_max)
    mat = weighted_outer_sum(vecs, grid.weights()) / np.pi
    k = trunc.dim - guard_band
    dev = float(np.max(np.abs(mat[:k, :k] - np.eye(k)))) if k > 0 else 0.0
    return FockOperator(mat, trunc, q), dev
