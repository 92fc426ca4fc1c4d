"""Singular-integral pipeline: Neumann series and map assembly.

Iterates the fixed-point form h <- H mu + H(mu h) instead of summing
explicit powers: identical limit, half the memory, and the defining
equation h - H(mu h) = H mu drops out as the residual.  Since the
discrete H is approximately an L2 isometry and |mu| <= k < 1, the
iteration contracts at essentially rate k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NoConvergenceError
from .grid import ComplexField, l2_norm, sup_norm
from .hodge import BeltramiCoefficient
from .operators import OperatorConfig, beurling_transform, cauchy_transform
from .solution import QCMapSolution


@dataclass(frozen=True)
class NeumannReport:
    iterations: int
    increment_norms: tuple
    contraction_estimates: tuple
    fixed_point_residual: float


def neumann_series(
    mu: BeltramiCoefficient,
    cfg: OperatorConfig = OperatorConfig(),
    tol: float = 1e-8,
    max_iter: int = 400,
):
    """Fixed point h of h = H mu + H(mu h), with convergence diagnostics.

    Stops when the increment drops below tol * ||H mu||; the returned
    fixed_point_residual ||h - H(mu h) - H mu|| / ||H mu|| is then at
    most about 2 tol.  mu = 0 short-circuits to h = 0 in 0 iterations.
    """
    if mu.k == 0.0:
        return ComplexField.zeros(mu.spec), NeumannReport(0, (), (), 0.0)
    Hmu = beurling_transform(mu.mu, cfg)
    scale = l2_norm(Hmu)
    h = np.zeros_like(Hmu.data)
    increments = []
    for _ in range(max_iter):
        h_next = Hmu.data + beurling_transform(mu.mu.like(mu.data * h), cfg).data
        inc = l2_norm(mu.mu.like(h_next - h))
        increments.append(inc)
        h = h_next
        if inc <= tol * scale:
            break
    else:
        raise NoConvergenceError(max_iter, increments[-1] / scale)
    field = ComplexField(mu.spec, h)
    residual = (
        l2_norm(
            mu.mu.like(
                h - beurling_transform(mu.mu.like(mu.data * h), cfg).data - Hmu.data
            )
        )
        / scale
    )
    ratios = tuple(
        increments[i + 1] / increments[i] for i in range(len(increments) - 1)
    )
    return field, NeumannReport(len(increments), tuple(increments), ratios, residual)


def assemble_map(
    mu: BeltramiCoefficient,
    h: ComplexField,
    cfg: OperatorConfig = OperatorConfig(),
) -> QCMapSolution:
    """Phi = z + T(mu(1+h)) with Phi_z = 1 + H(mu(1+h)), Phi_zbar = mu(1+h).

    For mu = 0 the pipeline is the identity map bit-for-bit.  The
    recorded Beltrami residual is controlled by the fixed-point
    residual: Phi_zbar - mu Phi_z = -mu (h - H(mu h) - H mu).
    """
    spec = mu.spec
    z = spec.zgrid()
    q = mu.data * (1.0 + h.data)
    if sup_norm(mu.mu) == 0.0:
        phi = ComplexField(spec, z.copy())
        one = np.ones_like(z)
        return QCMapSolution(
            phi=phi,
            phi_z=ComplexField(spec, one),
            phi_zbar=ComplexField.zeros(spec),
            jacobian=np.ones(z.shape),
            mu=mu,
            method="neumann",
            info={"beltrami_residual": 0.0},
        )
    qf = ComplexField(spec, q)
    Tq = cauchy_transform(qf, cfg)
    Hq = beurling_transform(qf, cfg)
    phi_z = 1.0 + Hq.data
    jac = np.abs(phi_z) ** 2 - np.abs(q) ** 2
    residual = l2_norm(ComplexField(spec, q - mu.data * phi_z)) / l2_norm(
        ComplexField(spec, phi_z)
    )
    return QCMapSolution(
        phi=ComplexField(spec, z + Tq.data),
        phi_z=ComplexField(spec, phi_z),
        phi_zbar=qf,
        jacobian=jac,
        mu=mu,
        method="neumann",
        info={"beltrami_residual": residual},
    )


def solve_neumann(
    mu: BeltramiCoefficient,
    cfg: OperatorConfig = OperatorConfig(),
    tol: float = 1e-8,
    max_iter: int = 400,
) -> QCMapSolution:
    """Full singular-integral solve; attaches the series report."""
    h, report = neumann_series(mu, cfg, tol, max_iter)
    sol = assemble_map(mu, h, cfg)
    sol.info["neumann_report"] = report
    return sol


def holder_constant(alpha: float) -> float:
    """Closed-form Holder constant of the Beurling transform bound,
    C_alpha = 2^a/a + 3^a/a + 2^(a-1)/(1-a) + 1."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    return (
        2.0**alpha / alpha
        + 3.0**alpha / alpha
        + 2.0 ** (alpha - 1.0) / (1.0 - alpha)
        + 1.0
    )


def radius_predicate(alpha: float, A: float, R: float) -> bool:
    """Sufficient condition C_alpha A R^alpha < 1 for uniform convergence
    of the series and local injectivity; advisory, not enforced."""
    if A < 0.0:
        raise DomainError(f"A must be >= 0, got {A}")
    if R <= 0.0:
        raise DomainError(f"R must be > 0, got {R}")
    return holder_constant(alpha) * A * math.pow(R, alpha) < 1.0
