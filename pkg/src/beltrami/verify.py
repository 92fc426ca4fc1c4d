"""Cross-cutting verification checks and report assembly.

Every check reports a measured value against a threshold from one
configuration table; acceptance runs pin the table version.  Reports
serialize to the line format

    check <id> measured=<v> threshold=<t> pass=<0|1>

with a trailing summary line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .demo import DemoMu
from .errors import DegenerateDerivativeError
from .grid import (
    ComplexField,
    GridSpec,
    L2_FLOOR,
    holder_seminorm,
    l2_norm,
    wirtinger_pair,
)
from .hodge import BeltramiCoefficient
from .neumann import holder_constant, solve_neumann
from .operators import OperatorConfig, beurling_transform, operator_isometry_defect
from .solution import QCMapSolution, normalize
from .variational import solve_variational

MAX_RESIDUAL = math.inf
DERIVATIVE_FLOOR = 1e-12

THRESHOLDS_VERSION = "1"

# Defaults calibrated on the standard demo (radial bump k=0.5, R=1) at
# n = 128, L = 2, with a conservative factor over measured values.
THRESHOLDS = {
    "beltrami_residual": 2e-2,       # recomputed-derivative L2 residual
    "jacobian_min": 0.0,             # measured must exceed this
    "jacobian_formula_defect": 1e-1, # relative gap between the two J formulas
    "isothermal_sup": 2e-1,          # sup |mu_Phi - mu|, rim cells included
    "manufactured_sup_error": 1e-1,  # vs the shipped analytic oracle, n >= 64
    "holder_lemma_margin": 1.05,     # estimator slack on lhs <= C A slack
    "kernel_bound": 1.0 + 1e-12,
    "isometry_defect": 5e-2,
    "neumann_fixed_point": 2e-8,     # 2 tol at the default tol = 1e-8
    "coercivity_slack": 1e-10,
    "metric_identity": 1e-12,
    "hodge_involution": 1e-12,
}


@dataclass(frozen=True)
class Check:
    id: str
    measured: float
    threshold: float
    passed: bool
    n: int
    L: float


@dataclass
class VerifyReport:
    checks: list = field(default_factory=list)
    version: str = THRESHOLDS_VERSION

    def add(self, id: str, measured: float, threshold: float, passed: bool, spec: GridSpec):
        self.checks.append(Check(id, float(measured), float(threshold), bool(passed), spec.n, spec.L))

    def add_upper(self, id: str, measured: float, threshold: float, spec: GridSpec):
        self.add(id, measured, threshold, measured <= threshold, spec)

    def add_lower(self, id: str, measured: float, threshold: float, spec: GridSpec):
        self.add(id, measured, threshold, measured > threshold, spec)

    def extend(self, other: "VerifyReport"):
        self.checks.extend(other.checks)

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def render(self) -> str:
        lines = [
            f"check {c.id} measured={c.measured:.6e} threshold={c.threshold:.6e} "
            f"pass={1 if c.passed else 0}"
            for c in self.checks
        ]
        passed = sum(1 for c in self.checks if c.passed)
        lines.append(
            f"summary version={self.version} total={len(self.checks)} "
            f"passed={passed} failed={len(self.checks) - passed}"
        )
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Individual checks
# ---------------------------------------------------------------------------

def beltrami_residual(sol: QCMapSolution, mu: BeltramiCoefficient, mode: str = "central") -> float:
    """||dPhi/dzbar - mu dPhi/dz|| / ||dPhi/dz|| with derivatives
    recomputed from the Phi samples, independent of the solver's own."""
    pz, pzb = wirtinger_pair(sol.phi, mode)
    den = l2_norm(sol.phi.like(pz))
    if den == 0.0:
        return MAX_RESIDUAL
    num = l2_norm(sol.phi.like(pzb - mu.data * pz))
    return num / den


def jacobian_check(sol: QCMapSolution, mu: BeltramiCoefficient):
    """(min J, formula defect) from the stored derivatives.

    J = |Phi_z|^2 - |Phi_zbar|^2 and |Phi_z|^2 (1 - |mu|^2) agree exactly
    when the Beltrami equation holds pointwise; the defect is their
    maximal gap relative to the largest J.
    """
    a2 = np.abs(sol.phi_z.data) ** 2
    j1 = a2 - np.abs(sol.phi_zbar.data) ** 2
    j2 = a2 * (1.0 - np.abs(mu.data) ** 2)
    scale = max(float(np.max(j1)), L2_FLOOR)
    return float(np.min(j1)), float(np.max(np.abs(j1 - j2)) / scale)


def isothermal_check(sol: QCMapSolution, mu: BeltramiCoefficient, mode: str = "central") -> float:
    """sup |Phi_zbar/Phi_z - mu| with recomputed derivatives: the pullback
    metric is proportional to |dz + mu dzbar|^2 exactly when this is 0."""
    pz, pzb = wirtinger_pair(sol.phi, mode)
    small = np.abs(pz) < DERIVATIVE_FLOOR
    if np.any(small):
        raise DegenerateDerivativeError(
            f"|Phi_z| < {DERIVATIVE_FLOOR} at {int(np.sum(small))} cells"
        )
    return float(np.max(np.abs(pzb / pz - mu.data)))


@dataclass(frozen=True)
class HolderLemmaResult:
    lhs: float
    rhs: float
    passed: bool


def holder_lemma_check(
    mu: BeltramiCoefficient,
    alpha: float,
    cfg: OperatorConfig = OperatorConfig(),
    num_pairs: int = 4000,
    seed: int = 2,
) -> HolderLemmaResult:
    """holder(H mu, alpha) <= C_alpha * holder(mu, alpha), with slack for
    the sampled estimator."""
    A = holder_seminorm(mu.mu, alpha, num_pairs, seed)
    Hmu = beurling_transform(mu.mu, cfg)
    lhs = holder_seminorm(Hmu, alpha, num_pairs, seed)
    rhs = holder_constant(alpha) * A
    return HolderLemmaResult(lhs, rhs, lhs <= rhs * THRESHOLDS["holder_lemma_margin"])


def line_injectivity_violations(sol: QCMapSolution) -> int:
    """Count fold-backs of Phi along grid lines.

    A fold-back is a pair of consecutive steps along a row or column
    whose directions reverse (negative real inner product) or a vanishing
    step; zero violations is a necessary discrete condition for the
    local injectivity that J > 0 implies.
    """
    count = 0
    for axis in (0, 1):
        step = np.diff(sol.phi.data, axis=axis)
        head = step[..., 1:] if axis == 1 else step[1:, :]
        tail = step[..., :-1] if axis == 1 else step[:-1, :]
        count += int(np.sum(np.real(head * np.conj(tail)) <= 0.0))
        count += int(np.sum(step == 0.0))
    return count


def manufactured_sup_error(sol: QCMapSolution, demo: DemoMu) -> float:
    """Sup distance between the normalized solve and the normalized
    analytic oracle Phi*."""
    z = sol.spec.zgrid()
    p0 = demo.phi_star(np.array([0.0 + 0.0j]))[0]
    p1 = demo.phi_star(np.array([1.0 + 0.0j]))[0]
    target = (demo.phi_star(z) - p0) / (p1 - p0)
    nsol = normalize(sol)
    return float(np.max(np.abs(nsol.phi.data - target)))


def core_checks(
    sol: QCMapSolution,
    mu: BeltramiCoefficient,
    demo: DemoMu | None = None,
) -> VerifyReport:
    """The per-solve battery written into every solve report."""
    spec = sol.spec
    report = VerifyReport()
    report.add_upper("beltrami_residual", beltrami_residual(sol, mu), THRESHOLDS["beltrami_residual"], spec)
    min_j, defect = jacobian_check(sol, mu)
    report.add_lower("jacobian_min", min_j, THRESHOLDS["jacobian_min"], spec)
    report.add_upper("jacobian_formula_defect", defect, THRESHOLDS["jacobian_formula_defect"], spec)
    if min_j > 0.0:
        report.add_upper("isothermal_sup", isothermal_check(sol, mu), THRESHOLDS["isothermal_sup"], spec)
    report.add("line_fold_backs", line_injectivity_violations(sol), 0.0, line_injectivity_violations(sol) == 0, spec)
    if demo is not None and demo.name == "manufactured":
        report.add_upper(
            "manufactured_sup_error",
            manufactured_sup_error(sol, demo),
            THRESHOLDS["manufactured_sup_error"],
            spec,
        )
    return report


def random_admissible_mu(spec: GridSpec, k: float, seed: int) -> BeltramiCoefficient:
    """Seeded random smooth dilatation with sup |mu| = k and compact support."""
    rng = np.random.default_rng(seed)
    n = spec.n
    modes = 4
    z = spec.zgrid()
    u, v = z.real / spec.L, z.imag / spec.L
    raw = np.zeros((n, n), dtype=complex)
    for _ in range(modes):
        cx, cy = rng.integers(1, 4, size=2)
        amp = rng.standard_normal() + 1j * rng.standard_normal()
        raw += amp * np.cos(cx * np.pi * u + rng.uniform(0, 2 * np.pi)) * np.cos(
            cy * np.pi * v + rng.uniform(0, 2 * np.pi)
        )
    s2 = (np.abs(z) / (0.7 * spec.L)) ** 2
    mask = np.where(s2 < 1.0, (1.0 - np.minimum(s2, 1.0)) ** 2, 0.0)
    raw *= mask
    peak = np.max(np.abs(raw))
    if peak > 0:
        raw *= k / peak
    return BeltramiCoefficient.from_field(ComplexField(spec, raw))


def random_compact_field(spec: GridSpec, seed: int) -> ComplexField:
    """Seeded random smooth compactly supported test field."""
    rng = np.random.default_rng(seed)
    z = spec.zgrid()
    u, v = z.real / spec.L, z.imag / spec.L
    raw = np.zeros_like(z)
    for _ in range(5):
        cx, cy = rng.integers(1, 5, size=2)
        amp = rng.standard_normal() + 1j * rng.standard_normal()
        raw += amp * np.sin(cx * np.pi * (u + 1) / 2) * np.sin(cy * np.pi * (v + 1) / 2)
    s2 = (np.abs(z) / (0.8 * spec.L)) ** 2
    raw *= np.where(s2 < 1.0, (1.0 - np.minimum(s2, 1.0)) ** 3, 0.0)
    return ComplexField(spec, raw)


def cross_solver_check(
    demo: DemoMu,
    L: float,
    n_levels=(64, 128, 256),
    tol: float = 1e-8,
) -> VerifyReport:
    """Normalized sup disagreement of the two pipelines per level; the
    sequence must decrease, the behavioral proxy for uniqueness under
    the two-point normalization."""
    report = VerifyReport()
    sups = []
    for n in n_levels:
        spec = GridSpec(n, L)
        mu = demo.build(spec)
        a = normalize(solve_neumann(mu, tol=tol))
        b = normalize(solve_variational(mu, tol=tol))
        sup = float(np.max(np.abs(a.phi.data - b.phi.data)))
        sups.append(sup)
        report.add(f"cross_solver_n{n}", sup, math.inf, True, spec)
    # ties at the roundoff floor (mu = 0 gives exact zeros) still pass
    decreasing = all(
        sups[i + 1] < sups[i] or sups[i + 1] <= 1e-14
        for i in range(len(sups) - 1)
    )
    ratios = [s2 / s1 if s1 > 0 else 0.0 for s1, s2 in zip(sups, sups[1:])]
    report.add(
        "cross_solver_decreasing",
        float(max(ratios)) if ratios else 0.0,
        1.0,
        decreasing,
        GridSpec(n_levels[-1], L),
    )
    return report


def full_suite(demo: DemoMu, n: int, L: float, tol: float = 1e-8) -> VerifyReport:
    """The verify-command battery: core checks for both pipelines plus
    the Green identity, kernel bound, Holder lemma, coercivity,
    isometry, and cross-solver checks."""
    from .hodge import coercivity_constant, energy_density, metric_coefficients
    from .kernel import green_identity_residual, kernel_S, riesz_potential

    spec = GridSpec(n, L)
    mu = demo.build(spec)
    report = VerifyReport()

    sol_n = solve_neumann(mu, tol=tol)
    sol_v = solve_variational(mu, tol=tol)
    for prefix, sol in (("neumann", sol_n), ("variational", sol_v)):
        sub = core_checks(sol, mu, demo)
        for c in sub.checks:
            report.checks.append(Check(f"{prefix}_{c.id}", c.measured, c.threshold, c.passed, c.n, c.L))
    nrep = sol_n.info.get("neumann_report")
    if nrep is not None:
        report.add_upper("neumann_fixed_point", nrep.fixed_point_residual, THRESHOLDS["neumann_fixed_point"], spec)

    # metric identities and Hodge involution on seeded random data
    mc = metric_coefficients(mu)
    am = np.abs(mu.data)
    ident = max(
        float(np.max(np.abs(mc.a**2 - np.abs(mc.b) ** 2 - 1.0))),
        float(np.max(np.abs(mc.a - np.abs(mc.b) - (1 - am) / (1 + am)))),
    )
    report.add_upper("metric_identities", ident, THRESHOLDS["metric_identity"], spec)

    from .grid import OneForm
    from .hodge import hodge_star_1form

    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(5):
        p = ComplexField(spec, rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        q = ComplexField(spec, rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        omega = OneForm(p, q)
        twice = hodge_star_1form(hodge_star_1form(omega, mc), mc)
        worst = max(
            worst,
            float(np.max(np.abs(twice.p.data + p.data))),
            float(np.max(np.abs(twice.q.data + q.data))),
        )
    report.add_upper("hodge_involution", worst, THRESHOLDS["hodge_involution"], spec)

    # coercivity of the energy form on random compact fields
    cc = coercivity_constant(mu.k)
    violations = 0
    for s in range(20):
        u = random_compact_field(spec, 100 + s)
        uz, uzb = wirtinger_pair(u)
        semi = (l2_norm(u.like(uz)) ** 2 + l2_norm(u.like(uzb)) ** 2)
        quad = float(np.real(np.sum(energy_density(u, u, mc))) * spec.h**2)
        if quad < (cc - THRESHOLDS["coercivity_slack"]) * semi:
            violations += 1
    report.add("coercivity_violations", violations, 0.0, violations == 0, spec)

    report.add_upper("isometry_defect", operator_isometry_defect(mu.mu) if mu.k > 0 else 0.0,
                     THRESHOLDS["isometry_defect"], spec)

    # kernel bound on seeded samples
    rng = np.random.default_rng(5)
    m = 10_000
    w = rng.uniform(-L, L, m) + 1j * rng.uniform(-L, L, m)
    z = rng.uniform(-L, L, m) + 1j * rng.uniform(-L, L, m)
    keep = w != z
    muw = mu.k * rng.uniform(0, 1, m) * np.exp(2j * np.pi * rng.uniform(0, 1, m))
    S = kernel_S(w[keep], z[keep], muw[keep])
    ratios = np.abs(S) * np.pi * (1 - mu.k) * np.abs(w[keep] - z[keep])
    report.add_upper("kernel_bound", float(np.max(ratios)), THRESHOLDS["kernel_bound"], spec)

    hl = holder_lemma_check(mu, 0.5)
    report.add("holder_lemma_alpha_0.5", hl.lhs, hl.rhs * THRESHOLDS["holder_lemma_margin"], hl.passed, spec)

    # Green identity convergence over two levels
    greens = []
    for nn in (n // 2, n):
        sp2 = GridSpec(nn, L)
        mu2 = demo.build(sp2)
        z2 = sp2.zgrid()
        s2 = (np.abs(z2) / (0.4 * L)) ** 2
        phi2 = ComplexField(sp2, np.where(s2 < 1, (1 - np.minimum(s2, 1)) ** 4, 0.0).astype(complex))
        greens.append(abs(green_identity_residual(phi2, mu2, 0.15 * L + 0.1j * L)))
    report.add_upper("green_identity_ratio", greens[1] / (greens[0] + L2_FLOOR), 0.6, spec)

    ones = ComplexField(spec, np.ones((n, n), dtype=complex))
    R = L / 2
    riesz_rel = abs(riesz_potential(ones, R, 0.0) - 2 * np.pi * R) / (2 * np.pi * R)
    report.add_upper("riesz_relative_error", riesz_rel, 0.02, spec)

    report.extend(cross_solver_check(demo, L, (n // 2, n), tol))
    return report
