"""Coherent-state matrix-element functions and their reproducing kernels.

``rho(z', z) = sum rho(m, n) conj(z')**m z**n / sqrt([m]! [n]!)`` is
reproduced by

    K(z, xi)      = (1/pi) e_q(|xi|^2)^{-1} e_q(conj(xi) z)
    Ktilde(xi, z) = (1/pi) (e_q(|xi|^2) e_q(|z|^2))^{-1/2} e_q(conj(xi) z)

the second acting on ``rhotilde(z', z) = rho(z', z) (e_q(|z|^2)
e_q(|z'|^2))^{-1/2}``.  Only ``Ktilde`` is hermitian.

Every xi-integral has exactly one net factor ``e_q(|xi|^2)^{-1}``, so grid
integrands below are assembled without it and handed to
:meth:`QuadratureGrid.integrate`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .coherent import QuadratureGrid, check_label, unnormalized_vectors
from .errors import GridError
from .fock import DensityMatrix, as_trunc
from .qcalc import SMALL_E, as_q, inv_e_q, q_exponential

PLAIN_K = "plain_K"
TILDE_K = "tilde_K"


def _e(x, q):
    return q_exponential(x, q, SMALL_E)


def rho_function(rho: DensityMatrix, zp, z) -> complex:
    """``rho(z', z)``; a polynomial in ``(conj(z'), z)`` at truncation."""
    zp, z = complex(zp), complex(z)
    check_label(zp, rho.q)
    check_label(z, rho.q)
    vp = unnormalized_vectors(zp, rho.q, rho.trunc.n_max)[0]
    v = unnormalized_vectors(z, rho.q, rho.trunc.n_max)[0]
    return complex(np.vdot(vp, rho.matrix @ v))


def rho_tilde(rho: DensityMatrix, zp, z) -> complex:
    """``rho(z', z)`` times ``(e_q(|z|^2) e_q(|z'|^2))^{-1/2}``."""
    scale = math.sqrt(inv_e_q(abs(complex(z)) ** 2, rho.q) * inv_e_q(abs(complex(zp)) ** 2, rho.q))
    return rho_function(rho, zp, z) * scale


def kernel_K(z, xi, q) -> complex:
    """``K(z, xi) = (1/pi) e_q(|xi|^2)^{-1} e_q(conj(xi) z)``."""
    q = as_q(q)
    z, xi = complex(z), complex(xi)
    check_label(z, q)
    check_label(xi, q)
    return complex(inv_e_q(abs(xi) ** 2, q) * _e(xi.conjugate() * z, q)) / math.pi


def kernel_Ktilde(xi, z, q) -> complex:
    """``Ktilde(xi, z) = (1/pi) (e_q(|xi|^2) e_q(|z|^2))^{-1/2} e_q(conj(xi) z)``."""
    q = as_q(q)
    z, xi = complex(z), complex(xi)
    check_label(z, q)
    check_label(xi, q)
    norm = math.sqrt(inv_e_q(abs(xi) ** 2, q) * inv_e_q(abs(z) ** 2, q))
    return complex(norm * _e(xi.conjugate() * z, q)) / math.pi


@dataclass(frozen=True, eq=False)
class KernelEvaluator:
    """Grid-backed integrals for one kernel variant."""

    q: float
    trunc: object
    grid: QuadratureGrid
    variant: str = PLAIN_K

    def __post_init__(self):
        trunc = as_trunc(self.trunc)
        object.__setattr__(self, "trunc", trunc)
        object.__setattr__(self, "q", as_q(self.q))
        if self.variant not in (PLAIN_K, TILDE_K):
            raise ValueError(f"unknown kernel variant {self.variant!r}")
        if self.grid.q != self.q:
            raise GridError(f"grid built for q={self.grid.q}, evaluator at q={self.q}")
        if self.grid.M < 2 * trunc.n_max + 1:
            raise GridError(f"grid M={self.grid.M} too small for n_max={trunc.n_max}")

    def kernel(self, a, b) -> complex:
        return kernel_K(a, b, self.q) if self.variant == PLAIN_K else kernel_Ktilde(a, b, self.q)


@dataclass(frozen=True)
class CheckResult:
    lhs: complex
    rhs: complex

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)


def reproducing_check(rho: DensityMatrix, zp, z, evaluator: KernelEvaluator) -> CheckResult:
    """Compare the grid integral of kernel x function against the direct value.

    plain:  ``int d^2 xi K(z, xi) rho(z', xi)``       vs ``rho(z', z)``
    tilde:  ``int d^2 xi Ktilde(xi, z) rhotilde(z', xi)`` vs ``rhotilde(z', z)``
    """
    q = evaluator.q
    zp, z = complex(zp), complex(z)
    check_label(zp, q)
    check_label(z, q)
    xi = evaluator.grid.nodes()
    n_max = rho.trunc.n_max
    vp = unnormalized_vectors(zp, q, n_max)[0]
    # rho(z', xi) at every node
    rho_vals = unnormalized_vectors(xi, q, n_max) @ (rho.matrix.T @ vp.conj())
    analytic = _e(np.conj(xi) * z, q) / math.pi
    if evaluator.variant == PLAIN_K:
        lhs = evaluator.grid.integrate(analytic * rho_vals)
        rhs = rho_function(rho, zp, z)
    else:
        # Ktilde and rhotilde each carry e_q(|xi|^2)^{-1/2}; the pair is the grid factor
        k_part = analytic * math.sqrt(inv_e_q(abs(z) ** 2, q))
        r_part = rho_vals * math.sqrt(inv_e_q(abs(zp) ** 2, q))
        lhs = evaluator.grid.integrate(k_part * r_part)
        rhs = rho_tilde(rho, zp, z)
    return CheckResult(complex(lhs), complex(rhs))


def semigroup_check(z, zp, evaluator: KernelEvaluator) -> CheckResult:
    """``int d^2 xi K(z, xi) K(xi, z')`` on the grid vs ``K(z, z')``."""
    q = evaluator.q
    z, zp = complex(z), complex(zp)
    check_label(z, q)
    check_label(zp, q)
    xi = evaluator.grid.nodes()
    if evaluator.variant == PLAIN_K:
        # K(z, xi) without e_q(|xi|^2)^{-1}, and K(xi, z')
        left = _e(np.conj(xi) * z, q) / math.pi
        right = inv_e_q(abs(zp) ** 2, q) * _e(np.conj(zp) * xi, q) / math.pi
        rhs = kernel_K(z, zp, q)
    else:
        left = math.sqrt(inv_e_q(abs(z) ** 2, q)) * _e(np.conj(z) * xi, q) / math.pi
        right = math.sqrt(inv_e_q(abs(zp) ** 2, q)) * _e(np.conj(xi) * zp, q) / math.pi
        rhs = kernel_Ktilde(z, zp, q)
    return CheckResult(complex(evaluator.grid.integrate(left * right)), complex(rhs))


def hermiticity_check(evaluator: KernelEvaluator, samples) -> dict:
    """Max over pairs ``(z, xi)`` of ``|conj(K(z, xi)) - K(xi, z)|`` for both kernels."""
    q = evaluator.q
    vk, vt = 0.0, 0.0
    for z, xi in samples:
        vk = max(vk, abs(np.conj(kernel_K(z, xi, q)) - kernel_K(xi, z, q)))
        vt = max(vt, abs(np.conj(kernel_Ktilde(z, xi, q)) - kernel_Ktilde(xi, z, q)))
    return {"max_violation_K": float(vk), "max_violation_Ktilde": float(vt)}


def gram_matrix(points, q) -> np.ndarray:
    """``G[i, j] = Ktilde(z_i, z_j)``."""
    pts = [complex(p) for p in points]
    return np.array([[kernel_Ktilde(a, b, q) for b in pts] for a in pts])


def sample_disk(q, n: int = 32, seed: int = 42, frac: float = 0.9) -> np.ndarray:
    """Seeded Halton points, uniform in area, on ``|z|^2 <= frac / (1-q)``.

    At ``q = 1`` the disk is ``|z|^2 <= frac * 4``.
    """
    q = as_q(q)
    s_max = frac / (1.0 - q) if q < 1.0 else frac * 4.0
    u = qmc.Halton(d=2, scramble=True, seed=seed).random(n)
    return np.sqrt(u[:, 0] * s_max) * np.exp(2j * np.pi * u[:, 1])


def sample_pairs(q, n: int = 32, seed: int = 42, frac: float = 0.9) -> list:
    pts = sample_disk(q, 2 * n, seed, frac)
    return list(zip(pts[:n], pts[n:]))
