"""Solved quasiconformal maps: container, normalization, far-field fit."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DegenerateNormalizationError, DomainError
from .grid import ComplexField, GridSpec
from .hodge import BeltramiCoefficient

NORMALIZATION_FLOOR = 1e-14


@dataclass(frozen=True, eq=False)
class QCMapSolution:
    """A map Phi with its Wirtinger derivatives and Jacobian.

    phi_z / phi_zbar are the solver's analytic derivatives (operator
    output or e^Psi construction); verification recomputes derivatives
    from the phi samples independently.
    """

    phi: ComplexField
    phi_z: ComplexField
    phi_zbar: ComplexField
    jacobian: np.ndarray
    mu: BeltramiCoefficient
    method: str
    info: dict = field(default_factory=dict)

    @property
    def spec(self) -> GridSpec:
        return self.phi.spec


def normalize(sol: QCMapSolution) -> QCMapSolution:
    """Post-compose with the affine map sending Phi(0) -> 0, Phi(1) -> 1.

    Values at the points 0 and 1 are read off by bilinear interpolation,
    which is exact on affine fields, so the identity map is a fixed
    point of this operation to roundoff.  The Beltrami quotient
    phi_zbar/phi_z is unchanged pointwise.
    """
    c0 = sol.phi.value_at(0.0 + 0.0j)
    c1 = sol.phi.value_at(1.0 + 0.0j)
    if abs(c1 - c0) < NORMALIZATION_FLOOR:
        raise DegenerateNormalizationError(f"Phi(0) = Phi(1) = {c0}")
    s = 1.0 / (c1 - c0)
    info = dict(sol.info)
    info["normalization"] = {"phi0": c0, "phi1": c1}
    return replace(
        sol,
        phi=sol.phi.like((sol.phi.data - c0) * s),
        phi_z=sol.phi_z.like(sol.phi_z.data * s),
        phi_zbar=sol.phi_zbar.like(sol.phi_zbar.data * s),
        jacobian=sol.jacobian * abs(s) ** 2,
        info=info,
    )


def far_field_fit(sol: QCMapSolution, mu: BeltramiCoefficient):
    """Fit Phi(z) = z + b + O(1/z) on the outermost ring.

    Returns (b, decay_defect) with b the ring mean of Phi - z and
    decay_defect = max |Phi - z - b| |z| over the ring, which stays
    bounded as the box grows when the expansion holds.
    """
    if mu.support_margin < mu.spec.n // 8:
        raise DomainError("far-field fit needs support margin >= n/8")
    ring = sol.spec.boundary_ring(1)
    z = sol.spec.zgrid()
    diff = (sol.phi.data - z)[ring]
    b = complex(np.mean(diff))
    defect = float(np.max(np.abs(diff - b) * np.abs(z[ring])))
    return b, defect
