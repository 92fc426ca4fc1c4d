"""Built-in dilatation fields for demos, CLI use, and oracles.

The manufactured family ships the analytic map Phi*(z) = z + c B(z),
B(z) = (1 - |z|^2)^4 inside the unit disk, together with its hand
differentiated Wirtinger derivatives and the induced dilatation
mu* = Phi*_zbar / Phi*_z, so every pipeline test has its ground truth
adjacent.  B is polynomial (C^3 at the rim): closed-form derivatives
with no transcendental tails.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .grid import ComplexField, GridSpec
from .hodge import BeltramiCoefficient

# max of s^2 (1-s^2)^3 on [0, 1], at s^2 = 1/4; normalizes rotating_bump
_ROT_PEAK = (1.0 / 4.0) * (3.0 / 4.0) ** 3


def radial_profile(s: np.ndarray) -> np.ndarray:
    """C^3 bump profile (1 - s^2)^4 on s < 1, 0 outside, peak 1 at s = 0."""
    s2 = np.minimum(s * s, 1.0)
    return np.where(s * s < 1.0, (1.0 - s2) ** 4, 0.0)


@dataclass(frozen=True)
class DemoMu:
    """Named dilatation family: zero, radial_bump, rotating_bump, manufactured."""

    name: str
    params: tuple = ()

    @classmethod
    def parse(cls, text: str) -> "DemoMu":
        """Parse 'name[:param[:param]]', e.g. 'radial_bump:0.5:1.0'."""
        parts = text.split(":")
        name, raw = parts[0], parts[1:]
        try:
            params = tuple(float(p) for p in raw)
        except ValueError as exc:
            raise DomainError(f"bad demo parameters in {text!r}") from exc
        demo = cls(name, params)
        demo._validate()
        return demo

    def _validate(self):
        if self.name == "zero":
            want = 0
        elif self.name in ("radial_bump", "rotating_bump"):
            want = 2
        elif self.name == "manufactured":
            want = 1
        else:
            raise DomainError(f"unknown demo mu {self.name!r}")
        if len(self.params) != want:
            raise DomainError(
                f"demo {self.name!r} takes {want} parameters, got {len(self.params)}"
            )
        if self.name in ("radial_bump", "rotating_bump"):
            k, R = self.params
            if not 0.0 <= k < 1.0 or R <= 0.0:
                raise DomainError(f"need 0 <= k < 1 and R > 0, got k={k}, R={R}")
        if self.name == "manufactured" and not 0.0 <= self.params[0] < 0.75:
            raise DomainError("manufactured c must lie in [0, 0.75)")

    def mu_values(self, z: np.ndarray) -> np.ndarray:
        if self.name == "zero":
            return np.zeros_like(z)
        if self.name == "radial_bump":
            k, R = self.params
            return (k * radial_profile(np.abs(z) / R)).astype(complex)
        if self.name == "rotating_bump":
            k, R = self.params
            s2 = np.abs(z / R) ** 2
            prof = np.where(s2 < 1.0, s2 * (1.0 - np.minimum(s2, 1.0)) ** 3, 0.0)
            return k / _ROT_PEAK * (z / R) ** 2 / np.where(s2 > 0, s2, 1.0) * prof
        # manufactured: mu* = Phi*_zbar / Phi*_z
        return self.phi_star_zbar(z) / self.phi_star_z(z)

    def build(self, spec: GridSpec) -> BeltramiCoefficient:
        return BeltramiCoefficient.from_field(
            ComplexField(spec, self.mu_values(spec.zgrid()))
        )

    # -- manufactured oracle: Phi*(z) = z + c B(z), B = (1-|z|^2)^4 --

    def _require_manufactured(self):
        if self.name != "manufactured":
            raise DomainError(f"demo {self.name!r} has no manufactured oracle")

    def phi_star(self, z: np.ndarray) -> np.ndarray:
        self._require_manufactured()
        c = self.params[0]
        r2 = np.abs(z) ** 2
        B = np.where(r2 < 1.0, (1.0 - np.minimum(r2, 1.0)) ** 4, 0.0)
        return z + c * B

    def phi_star_z(self, z: np.ndarray) -> np.ndarray:
        self._require_manufactured()
        c = self.params[0]
        r2 = np.abs(z) ** 2
        w = np.where(r2 < 1.0, (1.0 - np.minimum(r2, 1.0)) ** 3, 0.0)
        return 1.0 - 4.0 * c * np.conj(z) * w

    def phi_star_zbar(self, z: np.ndarray) -> np.ndarray:
        self._require_manufactured()
        c = self.params[0]
        r2 = np.abs(z) ** 2
        w = np.where(r2 < 1.0, (1.0 - np.minimum(r2, 1.0)) ** 3, 0.0)
        return -4.0 * c * z * w


def standard_demo() -> DemoMu:
    """The k = 0.5, R = 1 radial bump used throughout the reports."""
    return DemoMu("radial_bump", (0.5, 1.0))
