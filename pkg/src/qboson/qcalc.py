"""q-numbers, q-factorials, the two q-exponentials and Jackson calculus.

Conventions used throughout the package::

    [n]    = (1 - q**n) / (1 - q)
    [n]!   = [n][n-1]...[1],  [0]! = 1
    e_q(x) = sum x**n / [n]!                      (radius 1/(1-q))
    E_q(x) = sum q**(n(n-1)/2) x**n / [n]!        (entire)

with ``e_q(x) * E_q(-x) == 1``.  Every function special-cases ``q == 1`` to
the classical closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvergenceError, DomainError

SMALL_E = "small_e"
BIG_E = "big_E"

DEFAULT_MAX_TERMS = 100_000
JACKSON_MAX_NODES = 100_000


@dataclass(frozen=True)
class DeformationParam:
    """Deformation parameter ``0 < q <= 1``; ``q == 1`` is the classical limit."""

    q: float

    def __post_init__(self):
        q = float(self.q)
        if not (0.0 < q <= 1.0) or math.isnan(q):
            raise DomainError(f"deformation parameter must satisfy 0 < q <= 1, got {self.q!r}")
        object.__setattr__(self, "q", q)

    @property
    def classical(self) -> bool:
        return self.q == 1.0

    def __float__(self):
        return self.q


def as_q(q) -> float:
    """Validate ``q`` (float or :class:`DeformationParam`) and return it as float."""
    if isinstance(q, DeformationParam):
        return q.q
    return DeformationParam(q).q


def _check_n(n) -> int:
    if int(n) != n or n < 0:
        raise DomainError(f"n must be a nonnegative integer, got {n!r}")
    return int(n)


def q_number(n: int, q) -> float:
    """The q-number ``[n] = (1 - q**n)/(1 - q)``; equals ``n`` at ``q = 1``."""
    n = _check_n(n)
    q = as_q(q)
    if q == 1.0:
        return float(n)
    d = 1.0 - q
    # expm1/log1p keep [n] accurate for q just below 1
    return -math.expm1(n * math.log1p(-d)) / d


def q_numbers(n_max: int, q) -> np.ndarray:
    """Array ``([0], [1], ..., [n_max])``."""
    return np.array([q_number(n, q) for n in range(_check_n(n_max) + 1)])


def q_factorial(n: int, q) -> float:
    """``[n]! = [n][n-1]...[1]`` with ``[0]! = 1``.

    Raises
    ------
    OverflowError
        If the product is not representable as a double.
    """
    n = _check_n(n)
    out = 1.0
    for k in range(1, n + 1):
        out *= q_number(k, q)
    if math.isinf(out):
        raise OverflowError(f"[{n}]! overflows double precision at q={as_q(q)}")
    return out


def q_factorials(n_max: int, q) -> np.ndarray:
    """Array ``([0]!, [1]!, ..., [n_max]!)``."""
    nums = q_numbers(n_max, q)
    nums[0] = 1.0
    out = np.cumprod(nums)
    if not np.all(np.isfinite(out)):
        raise OverflowError(f"q-factorials up to {n_max} overflow at q={as_q(q)}")
    return out


def q_exp_first_zero(q) -> float:
    """Radius ``1/(1-q)``: the first zero of ``1/e_q`` on the positive axis.

    This is the upper limit of every radial q-integration.
    """
    q = as_q(q)
    if q == 1.0:
        raise DomainError("the classical exponential has no finite first zero (q = 1)")
    return 1.0 / (1.0 - q)


def _E_product(x, q):
    """``E_q(x) = prod_k (1 + (1-q) x q**k)``; exact for every x."""
    x = np.asarray(x, dtype=complex if np.iscomplexobj(x) else float)
    d = 1.0 - q
    out = np.ones_like(x)
    y = d * x
    k = 0
    while True:
        out = out * (1.0 + y)
        if np.all(np.abs(y) < 1e-18):
            break
        y = y * q
        k += 1
        if k > DEFAULT_MAX_TERMS:
            raise ConvergenceError("E_q product did not converge")
    return out


def _series(x, q, variant, tol, max_terms):
    x = np.asarray(x, dtype=complex if np.iscomplexobj(x) else float)
    absx = np.abs(x)
    total = np.ones_like(x)
    comp = np.zeros_like(x)  # Kahan compensation
    term = np.ones_like(x)
    n = 0
    while True:
        n += 1
        if n > max_terms:
            raise ConvergenceError(f"q-exponential series exceeded {max_terms} terms")
        qn = q_number(n, q)
        step = x / qn
        if variant == BIG_E:
            step = step * q ** (n - 1)
        term = term * step
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        # ratio of the next term bounds the geometric tail
        ratio = absx / q_number(n + 1, q)
        if variant == BIG_E:
            ratio = ratio * q**n
        ratio = np.max(ratio) if ratio.ndim else float(ratio)
        if ratio < 1.0:
            tail = np.max(np.abs(term)) * ratio / (1.0 - ratio)
            if tail <= tol * (np.min(np.abs(total)) + 1.0) or not np.any(term):
                return total


def q_exponential(x, q, variant: str = SMALL_E, tol: float = 1e-16,
                  max_terms: int = DEFAULT_MAX_TERMS, method: str = "auto"):
    """Evaluate ``e_q(x)`` (``variant="small_e"``) or ``E_q(x)`` (``"big_E"``).

    ``x`` may be a scalar or an array.  The series is truncated once the
    geometric bound on the remaining terms falls below ``tol * (|sum| + 1)``.

    ``method`` selects ``"series"`` or ``"product"``.  ``"auto"`` uses the
    series for ``e_q`` (positive terms on the real axis) and the infinite
    product for ``E_q``, whose alternating series cancels catastrophically
    for large negative arguments.

    Raises
    ------
    DomainError
        ``e_q`` requested with ``|x| >= 1/(1-q)`` (series diverges).
    ConvergenceError
        The term cap was reached.
    """
    q = as_q(q)
    if variant not in (SMALL_E, BIG_E):
        raise ValueError(f"unknown variant {variant!r}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    scalar = np.ndim(x) == 0
    if q == 1.0:
        out = np.exp(np.asarray(x))
        return out[()] if scalar else out
    if variant == SMALL_E:
        radius = 1.0 / (1.0 - q)
        if np.any(np.abs(x) >= radius):
            raise DomainError(
                f"e_q series diverges for |x| >= 1/(1-q) = {radius:g}; "
                f"got max |x| = {np.max(np.abs(x)):g}")
        if method == "product":
            out = 1.0 / _E_product(-np.asarray(x), q)
        else:
            out = _series(x, q, SMALL_E, tol, max_terms)
    else:
        if method == "series":
            out = _series(x, q, BIG_E, tol, max_terms)
        else:
            out = _E_product(x, q)
    return out[()] if scalar else out


def inv_e_q(x, q):
    """Stable ``1/e_q(x) = E_q(-x)``; well defined up to and at ``x = 1/(1-q)``."""
    return q_exponential(-np.asarray(x) if np.ndim(x) else -x, q, BIG_E)


def jackson_integral(f: Callable[[float], complex], a: float, q, tol: float = 1e-12,
                     max_nodes: int = JACKSON_MAX_NODES) -> complex:
    """Jackson integral ``a(1-q) sum_j q**j f(a q**j)`` over ``[0, a]``.

    The sum stops once ``a * q**(j+1) * max|f|``, with the max taken over the
    last eight nodes, drops below ``tol``; for ``f`` bounded near the origin
    this bounds the unsummed nodes.  At
    ``q = 1`` this is an ordinary Riemann integral, done with composite
    Gauss-Legendre (8 panels x 16 nodes).
    """
    q = as_q(q)
    if not a > 0:
        raise DomainError(f"upper limit must be positive, got {a!r}")
    if q == 1.0:
        x, w = np.polynomial.legendre.leggauss(16)
        edges = np.linspace(0.0, a, 9)
        vals = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            h = 0.5 * (hi - lo)
            vals.extend(h * wi * f(lo + h * (xi + 1.0)) for xi, wi in zip(x, w))
        return _fsum_scalar(vals)
    terms = []
    recent = []
    for j in range(max_nodes):
        node = a * q**j
        fv = f(node)
        terms.append(a * (1.0 - q) * q**j * fv)
        recent.append(abs(fv))
        if len(recent) > 8:
            recent.pop(0)
        if j >= 8:
            tail = a * q ** (j + 1) * max(recent)
            if tail < tol:
                return _fsum_scalar(terms)
    raise ConvergenceError(
        f"Jackson integral did not reach tol={tol:g} within {max_nodes} nodes")


def _fsum_scalar(values):
    values = [complex(v) for v in values]
    re = math.fsum(v.real for v in values)
    im = math.fsum(v.imag for v in values)
    return re if im == 0.0 else complex(re, im)


@dataclass(frozen=True)
class RadialSeries:
    """Matrix-valued power series ``f(r) = sum_k coeffs[k] * r**k``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim < 1 or c.shape[0] < 1:
            raise ValueError("RadialSeries needs at least one coefficient")
        object.__setattr__(self, "coeffs", c)

    @property
    def max_degree(self) -> int:
        return self.coeffs.shape[0] - 1

    def __call__(self, r):
        out = np.zeros(self.coeffs.shape[1:], dtype=complex)
        for c in self.coeffs[::-1]:
            out = out * r + c
        return out


def q_derivative_series(f: RadialSeries, p: int, q) -> RadialSeries:
    """Apply the Jackson derivative ``p`` times to a power series.

    On coefficients this is ``c_k r**k -> [k] c_k r**(k-1)``; the degree drops
    by ``p``.
    """
    p = _check_n(p)
    if p > f.max_degree:
        raise DomainError(f"cannot differentiate degree-{f.max_degree} series {p} times")
    c = f.coeffs
    for _ in range(p):
        k = np.arange(1, c.shape[0])
        scale = np.array([q_number(int(i), q) for i in k])
        c = c[1:] * scale.reshape((-1,) + (1,) * (c.ndim - 1))
    return RadialSeries(c)


def q_antiderivative_series(f: RadialSeries, q) -> RadialSeries:
    """Inverse of one Jackson derivative with zero constant term."""
    c = f.coeffs
    k = np.arange(1, c.shape[0] + 1)
    scale = np.array([q_number(int(i), q) for i in k])
    out = np.zeros((c.shape[0] + 1,) + c.shape[1:], dtype=complex)
    out[1:] = c / scale.reshape((-1,) + (1,) * (c.ndim - 1))
    return RadialSeries(out)


def series_eval_at_zero(f: RadialSeries) -> np.ndarray:
    """Value of the series at ``r = 0``, i.e. its constant coefficient."""
    return f.coeffs[0].copy()
