"""Uniform cell-centered complex grids and discrete Wirtinger calculus.

Fields live on an n-by-n grid of cell centers covering the square
[-L, L]^2.  Sample (row k, column j) sits at

    z = (-L + (j + 1/2) h) + i (-L + (k + 1/2) h),      h = 2L / n,

so the real axis is the fast (column) direction and no sample falls on 0
or on the box boundary.  All reductions use numpy's pairwise summation,
which is deterministic for a fixed build.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NotClosedError, PointOutsideGridError

# Additive floor guarding relative residuals against 0/0.
L2_FLOOR = 1e-300


@dataclass(frozen=True)
class GridSpec:
    """Geometry of a uniform cell-centered n x n grid on [-L, L]^2."""

    n: int
    L: float

    def __post_init__(self):
        if self.n < 16 or self.n % 2 != 0:
            raise DomainError(f"n must be even and >= 16, got {self.n}")
        if not self.L > 0:
            raise DomainError(f"L must be positive, got {self.L}")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.n

    def axis(self) -> np.ndarray:
        return _axis(self.n, self.L)

    def zgrid(self) -> np.ndarray:
        """Complex coordinates z[k, j] of every cell center."""
        return _zgrid(self.n, self.L)

    @property
    def origin_index(self) -> tuple[int, int]:
        """(row, col) of the cell containing 0, center at (h/2)(1 + i)."""
        return (self.n // 2, self.n // 2)

    def cell_of(self, point: complex) -> tuple[int, int]:
        """(row, col) of the cell containing the point."""
        j = int(np.floor((point.real + self.L) / self.h))
        k = int(np.floor((point.imag + self.L) / self.h))
        if not (0 <= j < self.n and 0 <= k < self.n):
            raise PointOutsideGridError(f"{point} outside [-{self.L}, {self.L}]^2")
        return k, j

    def boundary_ring(self, width: int = 1) -> np.ndarray:
        """Boolean mask of the outermost `width` cell rings."""
        m = np.zeros((self.n, self.n), dtype=bool)
        m[:width, :] = m[-width:, :] = True
        m[:, :width] = m[:, -width:] = True
        return m


@functools.lru_cache(maxsize=64)
def _axis(n: int, L: float) -> np.ndarray:
    h = 2.0 * L / n
    a = -L + (np.arange(n) + 0.5) * h
    a.flags.writeable = False
    return a


@functools.lru_cache(maxsize=64)
def _zgrid(n: int, L: float) -> np.ndarray:
    a = _axis(n, L)
    z = a[None, :] + 1j * a[:, None]
    z.flags.writeable = False
    return z


@dataclass(frozen=True, eq=False)
class ComplexField:
    """Complex samples on a GridSpec; the universal scalar carrier."""

    spec: GridSpec
    data: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.complex128)
        if data.shape != (self.spec.n, self.spec.n):
            raise DomainError(
                f"data shape {data.shape} does not match n={self.spec.n}"
            )
        if not np.all(np.isfinite(data)):
            raise DomainError("field contains non-finite samples")
        object.__setattr__(self, "data", data)

    @classmethod
    def from_function(cls, spec: GridSpec, fn) -> "ComplexField":
        return cls(spec, fn(spec.zgrid()))

    @classmethod
    def zeros(cls, spec: GridSpec) -> "ComplexField":
        return cls(spec, np.zeros((spec.n, spec.n), dtype=np.complex128))

    def like(self, data: np.ndarray) -> "ComplexField":
        return ComplexField(self.spec, data)

    def value_at_cell(self, point: complex) -> complex:
        """Sample of the cell containing the point."""
        k, j = self.spec.cell_of(point)
        return complex(self.data[k, j])

    def value_at(self, point: complex) -> complex:
        """Bilinear interpolation at an interior point.

        Exact on affine fields, which is what the two-point map
        normalization relies on.
        """
        n, L, h = self.spec.n, self.spec.L, self.spec.h
        fx = (point.real + L) / h - 0.5
        fy = (point.imag + L) / h - 0.5
        if not (-0.5 <= fx <= n - 0.5 and -0.5 <= fy <= n - 0.5):
            raise PointOutsideGridError(f"{point} outside the grid")
        j0 = min(max(int(np.floor(fx)), 0), n - 2)
        k0 = min(max(int(np.floor(fy)), 0), n - 2)
        t, s = fx - j0, fy - k0
        d = self.data
        return complex(
            (1 - s) * ((1 - t) * d[k0, j0] + t * d[k0, j0 + 1])
            + s * ((1 - t) * d[k0 + 1, j0] + t * d[k0 + 1, j0 + 1])
        )


@dataclass(frozen=True, eq=False)
class OneForm:
    """1-form p dz + q dzbar with ComplexField coefficients."""

    p: ComplexField
    q: ComplexField

    def __post_init__(self):
        if self.p.spec != self.q.spec:
            raise DomainError("p and q live on different grids")

    @property
    def spec(self) -> GridSpec:
        return self.p.spec


# ---------------------------------------------------------------------------
# Derivatives
# ---------------------------------------------------------------------------

MODES = ("spectral", "central")


@functools.lru_cache(maxsize=64)
def _wavenumbers(n: int, h: float) -> np.ndarray:
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=h)
    k[n // 2] = 0.0  # symmetric treatment of the Nyquist mode
    k.flags.writeable = False
    return k


def _ddx_ddy(data: np.ndarray, spec: GridSpec, mode: str):
    """(d/dx, d/dy) of the samples in the requested mode."""
    h = spec.h
    if mode == "central":
        fx = np.gradient(data, h, axis=1, edge_order=2)
        fy = np.gradient(data, h, axis=0, edge_order=2)
    elif mode == "spectral":
        k = _wavenumbers(spec.n, h)
        F = np.fft.fft2(data)
        fx = np.fft.ifft2(1j * k[None, :] * F)
        fy = np.fft.ifft2(1j * k[:, None] * F)
    else:
        raise DomainError(f"unknown derivative mode {mode!r}")
    return fx, fy


def wirtinger_pair(f: ComplexField, mode: str = "central"):
    """(df/dz, df/dzbar) as raw arrays; shares one transform per call."""
    fx, fy = _ddx_ddy(f.data, f.spec, mode)
    return 0.5 * (fx - 1j * fy), 0.5 * (fx + 1j * fy)


def wirtinger_dz(f: ComplexField, mode: str = "central") -> ComplexField:
    """Discrete d/dz = (d/dx - i d/dy) / 2."""
    fx, fy = _ddx_ddy(f.data, f.spec, mode)
    return f.like(0.5 * (fx - 1j * fy))


def wirtinger_dzbar(f: ComplexField, mode: str = "central") -> ComplexField:
    """Discrete d/dzbar = (d/dx + i d/dy) / 2."""
    fx, fy = _ddx_ddy(f.data, f.spec, mode)
    return f.like(0.5 * (fx + 1j * fy))


# ---------------------------------------------------------------------------
# Norms and seminorms
# ---------------------------------------------------------------------------

def l2_norm(f: ComplexField) -> float:
    """Cell-weighted discrete L2 norm sqrt(sum |f|^2 h^2)."""
    return float(np.sqrt(np.sum(np.abs(f.data) ** 2)) * f.spec.h)


def sup_norm(f: ComplexField) -> float:
    return float(np.max(np.abs(f.data)))


def holder_seminorm(
    f: ComplexField, alpha: float, num_pairs: int = 2000, seed: int = 0
) -> float:
    """Empirical lower bound for sup |f(z1)-f(z2)| / |z1-z2|^alpha.

    Maximizes the quotient over `num_pairs` seeded pseudo-random sample
    pairs plus every nearest-neighbor pair.  Pairs are drawn as one
    (num_pairs, 2) block so that enlarging num_pairs only appends pairs,
    making the estimate monotone in num_pairs for a fixed seed.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if num_pairs < 1:
        raise DomainError("num_pairs must be >= 1")
    n = f.spec.n
    z = f.spec.zgrid().ravel()
    v = f.data.ravel()

    rng = np.random.default_rng(seed)
    pairs = rng.integers(0, n * n, size=(num_pairs, 2))
    dz = np.abs(z[pairs[:, 0]] - z[pairs[:, 1]])
    dv = np.abs(v[pairs[:, 0]] - v[pairs[:, 1]])
    keep = dz > 0  # coincident pairs are skipped
    best = float(np.max(dv[keep] / dz[keep] ** alpha)) if np.any(keep) else 0.0

    ha = f.spec.h**alpha
    horiz = np.abs(np.diff(f.data, axis=1)).max() / ha
    vert = np.abs(np.diff(f.data, axis=0)).max() / ha
    return max(best, float(horiz), float(vert))


# ---------------------------------------------------------------------------
# Constructive Poincare lemma
# ---------------------------------------------------------------------------

def curl_residual(omega: OneForm, mode: str = "central") -> float:
    """Relative closedness defect ||d_zbar p - d_z q|| / (||p|| + ||q||)."""
    p_zbar = wirtinger_dzbar(omega.p, mode)
    q_z = wirtinger_dz(omega.q, mode)
    num = l2_norm(omega.p.like(p_zbar.data - q_z.data))
    den = l2_norm(omega.p) + l2_norm(omega.q) + L2_FLOOR
    return num / den


def _cumtrapz_from(u: np.ndarray, h: float, i0: int, axis: int) -> np.ndarray:
    """Cumulative trapezoid integral along `axis`, zero at index i0."""
    u = np.moveaxis(u, axis, -1)
    inc = 0.5 * h * (u[..., 1:] + u[..., :-1])
    c = np.concatenate(
        [np.zeros(u.shape[:-1] + (1,), dtype=u.dtype), np.cumsum(inc, axis=-1)],
        axis=-1,
    )
    c = c - c[..., i0 : i0 + 1]
    return np.moveaxis(c, -1, axis)


def antiderivative(
    omega: OneForm, tol_closed: float = 1e-6, mode: str = "central"
) -> ComplexField:
    """Potential g with dg = omega, gauged to g = 0 at the origin cell.

    Integrates along the row through the origin cell and then along
    columns (trapezoidal rule).  Path independence is not assumed: the
    closedness precondition carries the correctness burden, and callers
    can measure `potential_residuals` afterwards.
    """
    residual = curl_residual(omega, mode)
    if residual > tol_closed:
        raise NotClosedError(residual, tol_closed)
    spec = omega.spec
    h = spec.h
    k0, j0 = spec.origin_index
    gx = omega.p.data + omega.q.data            # dg/dx
    gy = 1j * (omega.p.data - omega.q.data)     # dg/dy
    row = _cumtrapz_from(gx[k0, :], h, j0, axis=0)
    g = row[None, :] + _cumtrapz_from(gy, h, k0, axis=0)
    return ComplexField(spec, g)


def potential_residuals(g: ComplexField, omega: OneForm, mode: str = "central"):
    """Relative defects (||dg/dz - p||, ||dg/dzbar - q||) for reporting."""
    gz, gzb = wirtinger_pair(g, mode)
    den_p = l2_norm(omega.p) + L2_FLOOR
    den_q = l2_norm(omega.q) + L2_FLOOR
    res_p = l2_norm(g.like(gz - omega.p.data)) / den_p
    res_q = l2_norm(g.like(gzb - omega.q.data)) / den_q
    return res_p, res_q
