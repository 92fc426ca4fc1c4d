"""Metric algebra of the conformal structure |dz + mu dzbar|^2.

Carries the coefficient fields

    a = (1 + |mu|^2) / (1 - |mu|^2),     b = 2 mu / (1 - |mu|^2),

the Hodge star on 1-forms, the d_mu operator whose kernel is the
solution set of the Beltrami equation, the Laplace-Beltrami operator in
divergence form, and the mu-weighted energy inner product with its
coercivity constant (1-k)/(1+k).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .grid import ComplexField, GridSpec, OneForm, sup_norm, wirtinger_dz, wirtinger_dzbar, wirtinger_pair

ALGEBRA_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class BeltramiCoefficient:
    """Validated dilatation field: k = sup|mu| < 1, compact support."""

    mu: ComplexField
    k: float
    support_margin: int

    @property
    def spec(self) -> GridSpec:
        return self.mu.spec

    @property
    def data(self) -> np.ndarray:
        return self.mu.data

    @classmethod
    def from_field(cls, mu: ComplexField) -> "BeltramiCoefficient":
        k = sup_norm(mu)
        if k >= 1.0:
            raise DomainError(f"sup|mu| = {k} must be < 1")
        n = mu.spec.n
        nz = np.argwhere(np.abs(mu.data) > 0)
        if nz.size == 0:
            margin = n // 2
        else:
            lo = nz.min(axis=0)
            hi = (n - 1) - nz.max(axis=0)
            margin = int(min(lo.min(), hi.min()))
        if margin < n // 8:
            raise DomainError(
                f"mu must vanish on an n/8 = {n // 8} cell boundary ring, "
                f"measured margin {margin}"
            )
        return cls(mu, k, margin)


@dataclass(frozen=True, eq=False)
class MetricCoefficients:
    """Pointwise a, b fields; identities checked at construction."""

    spec: GridSpec
    a: np.ndarray
    b: np.ndarray
    k: float
    volume_density: np.ndarray  # 1 - |mu|^2, prefactor of the volume form

    def __post_init__(self):
        if np.min(self.a) < 1.0 - ALGEBRA_TOL:
            raise DomainError("a must be >= 1 everywhere")
        d1 = np.max(np.abs(self.a**2 - np.abs(self.b) ** 2 - 1.0))
        if d1 > ALGEBRA_TOL:
            raise DomainError(f"a^2 - |b|^2 = 1 violated by {d1:.3e}")


def metric_coefficients(mu: BeltramiCoefficient) -> MetricCoefficients:
    m2 = np.abs(mu.data) ** 2
    den = 1.0 - m2
    a = (1.0 + m2) / den
    b = 2.0 * mu.data / den
    mc = MetricCoefficients(mu.spec, a, b, mu.k, den)
    # second algebraic identity: a - |b| = (1 - |mu|)/(1 + |mu|)
    am = np.abs(mu.data)
    d2 = np.max(np.abs((a - np.abs(b)) - (1.0 - am) / (1.0 + am)))
    if d2 > ALGEBRA_TOL:
        raise DomainError(f"a - |b| identity violated by {d2:.3e}")
    return mc


def hodge_star_1form(omega: OneForm, mc: MetricCoefficients) -> OneForm:
    """Star on the {dz, dzbar} basis: (p, q) -> (-iap + i conj(b) q, -ibp + iaq)."""
    p, q = omega.p.data, omega.q.data
    sp = -1j * mc.a * p + 1j * np.conj(mc.b) * q
    sq = -1j * mc.b * p + 1j * mc.a * q
    return OneForm(omega.p.like(sp), omega.q.like(sq))


def d_mu(f: ComplexField, mc: MetricCoefficients, mode: str = "central") -> OneForm:
    """(1 - i*_mu) d f / 2; vanishes exactly on Beltrami solutions.

    The dzbar component is (1+a)(f_zbar - mu f_z)/2 pointwise, so its
    vanishing is algebraically equivalent to the discrete Beltrami
    residual vanishing in the same derivative mode.
    """
    fz, fzb = wirtinger_pair(f, mode)
    comp_p = 0.5 * ((1.0 - mc.a) * fz + np.conj(mc.b) * fzb)
    comp_q = 0.5 * ((1.0 + mc.a) * fzb - mc.b * fz)
    return OneForm(f.like(comp_p), f.like(comp_q))


def laplace_beltrami(f: ComplexField, mc: MetricCoefficients, mode: str = "central") -> ComplexField:
    """Divergence-form Laplace-Beltrami operator of the mu-metric.

    Flux fields are formed first, then differentiated.  For mu = 0 this
    is the negative of the standard Laplacian.
    """
    fz, fzb = wirtinger_pair(f, mode)
    flux_p = 1j * mc.a * fz - 1j * np.conj(mc.b) * fzb
    flux_q = -1j * mc.b * fz + 1j * mc.a * fzb
    div = (
        wirtinger_dzbar(f.like(flux_p), mode).data
        + wirtinger_dz(f.like(flux_q), mode).data
    )
    return f.like(-(2.0 / (1j * mc.volume_density)) * div)


def energy_density(u: ComplexField, v: ComplexField, mc: MetricCoefficients, mode: str = "central") -> np.ndarray:
    """Pointwise sesquilinear density of the mu-inner product."""
    uz, uzb = wirtinger_pair(u, mode)
    vz, vzb = wirtinger_pair(v, mode)
    return (
        mc.a * (uz * np.conj(vz) + uzb * np.conj(vzb))
        - mc.b * uz * np.conj(vzb)
        - np.conj(mc.b) * uzb * np.conj(vz)
    )


def mu_inner_product(u: ComplexField, v: ComplexField, mc: MetricCoefficients, mode: str = "central") -> complex:
    """Energy inner product; conjugate-linear in the second argument.

    The diagonal is the real quadratic form
    integral of a (|u_z|^2 + |u_zbar|^2) - 2 Re(b u_z conj(u_zbar)) dA,
    bounded below by (1-k)/(1+k) times the gradient seminorm squared.
    """
    if u.spec != v.spec or u.spec != mc.spec:
        raise DomainError("fields and metric live on different grids")
    h = u.spec.h
    return complex(np.sum(energy_density(u, v, mc, mode)) * h * h)


def coercivity_constant(k: float) -> float:
    return (1.0 - k) / (1.0 + k)
