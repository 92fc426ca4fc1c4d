"""Pseudo-fundamental kernel checks: bounds, Green identity, reconstruction.

The kernel

    S(w, z) = (1/pi) / (w - z + mu(w)(conj(w) - conj(z)))

is the frozen-coefficient fundamental solution of the Beltrami operator:
with mu held at mu(w) it satisfies dS/dzbar - mu(w) dS/dz = 0 away from
w = z, and |S| <= 1/(pi (1-k) |w - z|).  Everything here is
verification-only quadrature; nothing is used as a solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BallOutsideGridError,
    CoincidentPointsError,
    DomainError,
    PointOutsideGridError,
    PreconditionResidualTooLargeError,
)
from .grid import ComplexField, l2_norm, wirtinger_dz, wirtinger_dzbar, wirtinger_pair
from .hodge import BeltramiCoefficient

BOUND_SLACK = 1e-12

# Exact integral of 1/|zeta| over the unit square centered at 0:
# eight copies of the octant 0 <= y <= x <= 1/2 give
# 8 * int_0^{1/2} asinh(1) dx = 4 ln(1 + sqrt 2); scales linearly in the
# side length, so a side-h cell contributes h * this constant.
SQUARE_CELL_INV_DISTANCE = 4.0 * math.log(1.0 + math.sqrt(2.0))


@dataclass(frozen=True)
class KernelSample:
    w: complex
    z: complex
    value: complex
    bound_ratio: float  # |S| pi (1-k) |w-z|, must be <= 1

    def __post_init__(self):
        if self.bound_ratio > 1.0 + BOUND_SLACK:
            raise DomainError(
                f"kernel bound violated: ratio {self.bound_ratio} > 1"
            )


def kernel_S(w, z, mu_w):
    """S(w, z); array arguments broadcast.  Rejects coincident points."""
    w = np.asarray(w, dtype=complex)
    z = np.asarray(z, dtype=complex)
    mu_w = np.asarray(mu_w, dtype=complex)
    if np.any(np.abs(mu_w) >= 1.0):
        raise DomainError("kernel needs |mu(w)| < 1")
    d = w - z + mu_w * (np.conj(w) - np.conj(z))
    if np.any(d == 0):
        raise CoincidentPointsError("kernel_S evaluated at w = z")
    out = 1.0 / (np.pi * d)
    return complex(out) if out.ndim == 0 else out


def kernel_sample(w: complex, z: complex, mu_w: complex, k: float) -> KernelSample:
    """Evaluate S and its bound ratio against the global k."""
    value = kernel_S(w, z, mu_w)
    ratio = abs(value) * math.pi * (1.0 - k) * abs(w - z)
    return KernelSample(w, z, value, ratio)


def dbar_mu(f: ComplexField, mu: BeltramiCoefficient, mode: str = "central") -> ComplexField:
    """Twisted derivative df/dzbar - mu df/dz."""
    fz, fzb = wirtinger_pair(f, mode)
    return f.like(fzb - mu.data * fz)


def dbar_mu_star(f: ComplexField, mu: BeltramiCoefficient, mode: str = "central") -> ComplexField:
    """Formal transpose partner df/dzbar - d(mu f)/dz.

    Under the bilinear pairing integral(u v) dA, integration by parts for
    compactly supported fields gives
    integral((dbar_mu f) g) = -integral(f (dbar_mu_star g)); the sign is
    intrinsic to first-order operators.
    """
    fzb = wirtinger_dzbar(f, mode).data
    prod = wirtinger_dz(f.like(mu.data * f.data), mode).data
    return f.like(fzb - prod)


def frozen_coefficient_residual(
    w: complex,
    mu_w: complex,
    probe_spacing: float,
    variant: str = "fd",
    num_probes: int = 16,
    radius: float = 0.5,
) -> float:
    """Residual of dS/dzbar - mu(w) dS/dz = 0 at a probe ring around w.

    Returns max |residual| * |w - z|^2 over the ring (scale-normalized).
    The ring radius is fixed while the finite-difference step shrinks,
    so the fd variant converges at second order in probe_spacing; the
    analytic variant differentiates the rational formula and lands at
    roundoff.
    """
    if probe_spacing <= 0:
        raise DomainError("probe_spacing must be positive")
    if radius < 10.0 * probe_spacing:
        raise DomainError("probe ring must stay >= 10 spacings away from w")
    angles = 2.0 * np.pi * np.arange(num_probes) / num_probes
    zs = w + radius * np.exp(1j * angles)
    if variant == "analytic":
        d = w - zs + mu_w * (np.conj(w) - np.conj(zs))
        Sz = 1.0 / (np.pi * d * d)        # d/dz of S
        Szb = mu_w / (np.pi * d * d)      # d/dzbar of S
        resid = Szb - mu_w * Sz
    elif variant == "fd":
        eps = probe_spacing
        Sx = (kernel_S(w, zs + eps, mu_w) - kernel_S(w, zs - eps, mu_w)) / (2 * eps)
        Sy = (kernel_S(w, zs + 1j * eps, mu_w) - kernel_S(w, zs - 1j * eps, mu_w)) / (2 * eps)
        resid = 0.5 * (Sx + 1j * Sy) - mu_w * 0.5 * (Sx - 1j * Sy)
    else:
        raise DomainError(f"unknown variant {variant!r}")
    return float(np.max(np.abs(resid) * np.abs(w - zs) ** 2))


def _snap(field_spec, point: complex) -> tuple[int, int, complex]:
    k, j = field_spec.cell_of(point)
    zc = field_spec.zgrid()[k, j]
    return k, j, complex(zc)


def green_identity_residual(
    phi: ComplexField,
    mu: BeltramiCoefficient,
    z: complex,
    mode: str = "central",
) -> complex:
    """LHS - RHS of the Green-type identity at the cell containing z.

    LHS integrates phi(w) (dbar-mu-star in z of S)(w, z) over w by
    midpoint quadrature, with the z-derivatives of S taken analytically
    and the singular cell dropped by the centered-symmetry rule.  RHS is
    phi(z) plus the discrete dbar-mu-star of the quadrature field
    V(z') = integral phi(w) S(w, z') dw.
    """
    spec = phi.spec
    kz, jz, zc = _snap(spec, z)
    h = spec.h
    W = spec.zgrid()
    muW = mu.data
    mu_z = complex(mu.data[kz, jz])
    dmu = wirtinger_dz(mu.mu, mode)
    dmu_z = complex(dmu.data[kz, jz])

    d = W - zc + muW * (np.conj(W) - np.conj(zc))
    with np.errstate(divide="ignore", invalid="ignore"):
        S = 1.0 / (np.pi * d)
        dstar = (muW - mu_z) / (np.pi * d * d) - dmu_z * S
    dstar[kz, jz] = 0.0  # singular cell: centered-symmetry rule
    lhs = complex(np.sum(phi.data * dstar) * h * h)

    V = _quadrature_field(phi, mu)
    rhs = complex(phi.data[kz, jz]) + complex(
        dbar_mu_star(V, mu, mode).data[kz, jz]
    )
    return lhs - rhs


def _quadrature_field(phi: ComplexField, mu: BeltramiCoefficient) -> ComplexField:
    """V(z') = sum_w phi(w) S(w, z') h^2 for every grid point z'."""
    spec = phi.spec
    n, h = spec.n, spec.h
    Wf = spec.zgrid().ravel()
    src = phi.data.ravel()
    muf = mu.data.ravel()
    base = Wf + muf * np.conj(Wf)  # source-only part of the denominator
    out = np.empty(n * n, dtype=np.complex128)
    chunk = max(1, (1 << 23) // (n * n))
    inv_pi = 1.0 / np.pi
    for start in range(0, n * n, chunk):
        zt = Wf[start : start + chunk]
        d = np.conj(zt)[:, None] * muf[None, :]
        d += zt[:, None]
        np.subtract(base[None, :], d, out=d)
        zero = d == 0
        with np.errstate(divide="ignore", invalid="ignore"):
            np.reciprocal(d, out=d)
        d[zero] = 0.0
        out[start : start + chunk] = d @ src
    return ComplexField(spec, out.reshape(n, n) * (h * h * inv_pi))


def representation_reconstruct(
    g: ComplexField,
    F: ComplexField,
    mu: BeltramiCoefficient,
    rho: ComplexField,
    w: complex,
    mode: str = "central",
    precondition_tol: float = 1e-6,
) -> complex:
    """Reconstruct g(w) from the representation formula.

    g(w) = sum_z g(z) dbar-mu-star_z(rho(z) S(w, z)) h^2
         + sum_z F(z) rho(z) S(w, z) h^2,

    expecting rho = 1 on a disk around w and F = dbar_mu(g) on the
    support of rho.  The star derivative expands to
    rho (mu(w) - mu(z)) / (pi d^2) + S (drho/dzbar - d(mu rho)/dz)
    with the kernel's z-derivatives analytic and the field factors
    discrete; the singular cell drops by the centered rule.
    """
    spec = g.spec
    kw, jw, wc = _snap(spec, w)
    if abs(rho.data[kw, jw] - 1.0) > 1e-12:
        raise DomainError("rho must equal 1 on a neighborhood of w")
    mask = np.abs(rho.data) > 0
    resid = l2_norm(g.like((dbar_mu(g, mu, mode).data - F.data) * mask))
    scale = l2_norm(g.like(F.data * mask)) + 1e-300
    if resid / scale > precondition_tol:
        raise PreconditionResidualTooLargeError(
            f"relative dbar_mu(g) - F residual {resid / scale:.3e} on supp rho"
        )
    h = spec.h
    Z = spec.zgrid()
    mu_w = complex(mu.data[kw, jw])
    d = wc - Z + mu_w * (np.conj(wc) - np.conj(Z))
    with np.errstate(divide="ignore", invalid="ignore"):
        S = 1.0 / (np.pi * d)
        dsq = 1.0 / (np.pi * d * d)
    S[kw, jw] = 0.0
    dsq[kw, jw] = 0.0

    rho_zb = wirtinger_dzbar(rho, mode).data
    murho_z = wirtinger_dz(rho.like(mu.data * rho.data), mode).data
    star_part = rho.data * (mu_w - mu.data) * dsq + S * (rho_zb - murho_z)
    term1 = np.sum(g.data * star_part) * h * h
    term2 = np.sum(F.data * rho.data * S) * h * h
    return complex(term1 + term2)


def riesz_potential(u: ComplexField, R: float, w: complex) -> float:
    """Midpoint quadrature of |u(z)| / |w - z| over the ball B(0, R).

    If w coincides with a cell center inside the ball, that cell is
    replaced by the exact square-cell integral h * SQUARE_CELL_INV_DISTANCE
    times |u| there.
    """
    spec = u.spec
    if R <= 0 or R > spec.L:
        raise BallOutsideGridError(f"need 0 < R <= L, got R={R}, L={spec.L}")
    h = spec.h
    Z = spec.zgrid()
    ball = np.abs(Z) < R
    dist = np.abs(Z - w)
    singular = ball & (dist < 1e-12 * h)
    safe = np.where(dist > 0, dist, 1.0)
    vals = np.where(ball & ~singular, np.abs(u.data) / safe, 0.0)
    total = float(np.sum(vals) * h * h)
    if np.any(singular):
        total += float(np.sum(np.abs(u.data)[singular])) * h * SQUARE_CELL_INV_DISTANCE
    return total
