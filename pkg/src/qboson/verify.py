"""Verification suites behind ``qboson verify``.

Each suite returns a list of check records; :func:`run_suite` wraps them in
a versioned report.  Records are plain dicts so the report is a direct
JSON dump; with identical configuration the bytes are identical.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .coherent import QuadratureGrid, calibrate_measure, resolution_of_unity
from .fock import (
    FockOperator,
    algebra_residuals,
    build_annihilator,
    build_creator,
    density_from_coeffs,
    embed,
    random_density,
)
from .kernels import (
    PLAIN_K,
    TILDE_K,
    KernelEvaluator,
    gram_matrix,
    hermiticity_check,
    kernel_Ktilde,
    reproducing_check,
    sample_disk,
    sample_pairs,
    semigroup_check,
)
from .qcalc import BIG_E, SMALL_E, q_exponential, q_number
from .representations import (
    NORMAL_ORDER_CLOSED_FORM,
    fock_dyad,
    normal_order_coeffs,
    normal_order_oracle,
    q_poisson_pmf,
)

SCHEMA_VERSION = 1
SUITES = ("qcalc", "algebra", "unity", "dyad", "normal-order", "kernel", "poisson")

EXACT_TOL = 1e-12
DYAD_TOL = 1e-10
INVERSE_PAIR_TOL = 1e-10
MOMENT_TOL = 1e-8
NORMAL_ORDER_TOL = 1e-9
GRAM_TOL = 1e-10
DIAG_KTILDE_TOL = 1e-14
K_VIOLATION_MIN = 1e-3
POISSON_TOL = 1e-10
REFINE_SLACK = 1.10
NOISE_FLOOR = 1e-14


@dataclass(frozen=True)
class RunConfig:
    q: float = 0.5
    n_max: int = 12
    J: int = 200
    M: int = 64
    tol: float = 1e-6
    seed: int = 42

    def __post_init__(self):
        if not (0.0 < self.q <= 1.0):
            raise ValueError(f"q must satisfy 0 < q <= 1, got {self.q}")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.J < 1 or self.M < 2 * self.n_max + 1:
            raise ValueError(f"grid {self.J}x{self.M} invalid for n_max={self.n_max} "
                             f"(need M >= {2 * self.n_max + 1})")
        if self.tol <= 0:
            raise ValueError("tol must be positive")

    def grid(self, refine: int = 1) -> QuadratureGrid:
        return QuadratureGrid.build(self.q, self.J * refine, self.M * refine, n_max=self.n_max)


def _num(x):
    """JSON-safe number: real float, ``[re, im]`` for complex, strings for inf/nan."""
    if isinstance(x, (complex, np.complexfloating)):
        if x.imag == 0:
            return _num(float(x.real))
        return [_num(float(x.real)), _num(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isinf(x) or math.isnan(x):
            return str(x)
        return x
    return x


def _record(check, cfg, lhs, rhs, residual, tolerance, passed, grid=None, **extra):
    rec = {
        "check": check,
        "q": cfg.q,
        "n_max": cfg.n_max,
        "grid": None if grid is None else {"J": grid.J, "M": grid.M, "mu": grid.mu},
        "lhs": _num(lhs),
        "rhs": _num(rhs),
        "residual": _num(float(residual)),
        "tolerance": tolerance,
        "pass": bool(passed),
    }
    rec.update(extra)
    return rec


def suite_qcalc(cfg: RunConfig) -> list:
    q = cfg.q
    top = 0.9 / (1.0 - q) if q < 1 else 4.0
    xs = np.linspace(0.0, top, 200)
    prod = q_exponential(xs, q, SMALL_E) * q_exponential(-xs, q, BIG_E)
    res = float(np.max(np.abs(prod - 1.0)))
    recs = [_record("qcalc.inverse_pair", cfg, float(prod[-1]), 1.0, res, INVERSE_PAIR_TOL,
                    res < INVERSE_PAIR_TOL)]
    cal = calibrate_measure(q)
    recs.append(_record("qcalc.moment_calibration", cfg, cal.mu, 0.5, cal.max_rel_error,
                        MOMENT_TOL, cal.max_rel_error < MOMENT_TOL, weight=cal.weight))
    return recs


def suite_algebra(cfg: RunConfig) -> list:
    r = algebra_residuals(cfg.q, cfg.n_max)
    recs = []
    for key in ("comm_residual", "N_a_residual", "N_adag_residual"):
        recs.append(_record(f"algebra.{key}", cfg, r[key], 0.0, r[key], EXACT_TOL,
                            r[key] < EXACT_TOL, full_block=r[key + "_full"]))
    corner = 1.0 + cfg.q * q_number(cfg.n_max, cfg.q)
    d = abs(r["comm_residual_full"] - corner)
    recs.append(_record("algebra.truncation_corner", cfg, r["comm_residual_full"], corner, d,
                        EXACT_TOL, d < EXACT_TOL))
    return recs


def suite_unity(cfg: RunConfig) -> list:
    grid = cfg.grid()
    fine = cfg.grid(2)
    _, dev = resolution_of_unity(cfg.q, cfg.n_max, grid)
    _, dev2 = resolution_of_unity(cfg.q, cfg.n_max, fine)
    return [
        _record("unity.deviation", cfg, dev, 0.0, dev, cfg.tol, dev < cfg.tol, grid=grid),
        _record("unity.refinement", cfg, dev2, dev, max(0.0, dev2 - dev), REFINE_SLACK,
                dev2 <= REFINE_SLACK * dev + NOISE_FLOOR, grid=fine),
    ]


def suite_dyad(cfg: RunConfig) -> list:
    worst = 0.0
    count = 0
    limit = min(16, 2 * cfg.n_max)
    dim = cfg.n_max + 1
    for n in range(dim):
        for m in range(dim):
            if n + m > limit:
                continue
            exact = np.zeros((dim, dim))
            exact[n, m] = 1.0
            worst = max(worst, float(np.max(np.abs(fock_dyad(n, m, cfg.q, cfg.n_max).matrix - exact))))
            count += 1
    return [_record("dyad.extraction", cfg, worst, 0.0, worst, DYAD_TOL, worst < DYAD_TOL,
                    pairs=count, max_order=limit)]


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (g + g.conj().T)


def suite_normal_order(cfg: RunConfig) -> list:
    cutoff = min(4, cfg.n_max // 2)
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    herm = 0.0
    for _ in range(20):
        F = FockOperator(random_hermitian(cfg.n_max + 1, rng), cfg.n_max, cfg.q)
        a = normal_order_coeffs(F, cutoff)
        b = normal_order_oracle(F, cutoff)
        worst = max(worst, float(np.max(np.abs(a.table - b.table))))
        herm = max(herm, a.hermitian_violation())
    ad = build_creator(cfg.q, cfg.n_max)
    aa = build_annihilator(cfg.q, cfg.n_max)
    hand = normal_order_coeffs(aa @ ad, cutoff).table
    expect = np.zeros_like(hand)
    expect[0, 0] = 1.0
    if cutoff >= 1:
        expect[1, 1] = cfg.q
    hres = float(np.max(np.abs(hand - expect)))
    return [
        _record("normal_order.closed_form_vs_oracle", cfg, worst, 0.0, worst, NORMAL_ORDER_TOL,
                worst < NORMAL_ORDER_TOL, cutoff=cutoff, operators=20),
        _record("normal_order.hermitian_symmetry", cfg, herm, 0.0, herm, NORMAL_ORDER_TOL,
                herm < NORMAL_ORDER_TOL),
        _record("normal_order.a_adag_identity", cfg, complex(hand[1, 1]) if cutoff else 0.0,
                cfg.q if cutoff else 0.0, hres, EXACT_TOL, hres < EXACT_TOL),
    ]


def suite_kernel(cfg: RunConfig) -> list:
    q = cfg.q
    grid = cfg.grid()
    fine = cfg.grid(2)
    rng = np.random.default_rng(cfg.seed)
    dim = min(4, cfg.n_max + 1)
    rho = density_from_coeffs(embed(random_density(dim, rng), cfg.n_max), cfg.n_max, q)
    # |z|, |z'| <= 0.5 sqrt(1/(1-q)); |z| <= 1 in the classical case
    pts = sample_disk(q, 8, cfg.seed, 0.25)
    recs = []
    for variant in (PLAIN_K, TILDE_K):
        ev = KernelEvaluator(q, cfg.n_max, grid, variant)
        worst, last = 0.0, None
        for zp, z in zip(pts[:4], pts[4:]):
            last = reproducing_check(rho, zp, z, ev)
            worst = max(worst, last.residual)
        recs.append(_record(f"kernel.reproducing.{variant}", cfg, last.lhs, last.rhs, worst,
                            cfg.tol, worst < cfg.tol, grid=grid))
        sg = semigroup_check(pts[0], pts[1], ev)
        sg_fine = semigroup_check(pts[0], pts[1], KernelEvaluator(q, cfg.n_max, fine, variant))
        recs.append(_record(f"kernel.semigroup.{variant}", cfg, sg.lhs, sg.rhs, sg.residual,
                            cfg.tol, sg.residual < cfg.tol, grid=grid))
        systematic = sg_fine.residual > REFINE_SLACK * sg.residual + NOISE_FLOOR
        recs.append(_record(f"kernel.semigroup_refinement.{variant}", cfg, sg_fine.residual,
                            sg.residual, max(0.0, sg_fine.residual - sg.residual), REFINE_SLACK,
                            not systematic, grid=fine, systematic_offset=systematic))
    ev = KernelEvaluator(q, cfg.n_max, grid, TILDE_K)
    herm = hermiticity_check(ev, sample_pairs(q, 32, cfg.seed))
    recs.append(_record("kernel.hermiticity.tilde_K", cfg, herm["max_violation_Ktilde"], 0.0,
                        herm["max_violation_Ktilde"], EXACT_TOL,
                        herm["max_violation_Ktilde"] < EXACT_TOL))
    recs.append(_record("kernel.hermiticity.plain_K", cfg, herm["max_violation_K"], 0.0,
                        herm["max_violation_K"], K_VIOLATION_MIN,
                        herm["max_violation_K"] > K_VIOLATION_MIN, expected_violation=True))
    diag = max(abs(kernel_Ktilde(z, z, q) - 1.0 / math.pi) for z in sample_disk(q, 32, cfg.seed))
    recs.append(_record("kernel.Ktilde_diagonal", cfg, 1.0 / math.pi + diag, 1.0 / math.pi, diag,
                        DIAG_KTILDE_TOL, diag < DIAG_KTILDE_TOL))
    lam = float(np.linalg.eigvalsh(gram_matrix(sample_disk(q, 8, cfg.seed + 1), q))[0])
    recs.append(_record("kernel.gram_positivity", cfg, lam, 0.0, max(0.0, -lam), GRAM_TOL,
                        lam > -GRAM_TOL))
    return recs


def suite_poisson(cfg: RunConfig) -> list:
    q = cfg.q
    s = 0.9 / (1.0 - q) if q < 1 else 2.0
    pmf, _ = q_poisson_pmf(s, q)
    total = math.fsum(pmf)
    return [_record("poisson.normalization", cfg, total, 1.0, abs(total - 1.0), POISSON_TOL,
                    abs(total - 1.0) < POISSON_TOL, s=s, terms=len(pmf))]


_SUITE_FUNCS = {
    "qcalc": suite_qcalc,
    "algebra": suite_algebra,
    "unity": suite_unity,
    "dyad": suite_dyad,
    "normal-order": suite_normal_order,
    "kernel": suite_kernel,
    "poisson": suite_poisson,
}


def run_suite(name: str, cfg: RunConfig) -> dict:
    """Run one suite (or ``"all"``) and return the report dict."""
    names = SUITES if name == "all" else (name,)
    if any(n not in _SUITE_FUNCS for n in names):
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES + ('all',))}")
    checks = []
    for n in names:
        checks.extend(_SUITE_FUNCS[n](cfg))
    cal = calibrate_measure(cfg.q).to_dict()
    cal = {k: _num(v) if not isinstance(v, list) else
           [{kk: _num(vv) for kk, vv in c.items()} for c in v] for k, v in cal.items()}
    return {
        "schema": SCHEMA_VERSION,
        "suite": name,
        "config": asdict(cfg),
        "calibration": cal,
        "normal_order_closed_form": NORMAL_ORDER_CLOSED_FORM,
        "checks": checks,
        "pass": all(c["pass"] for c in checks),
    }
