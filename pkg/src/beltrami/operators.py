"""Discrete Cauchy transform T and Beurling-Ahlfors transform H.

Both are free-space convolutions against singular kernels,

    Tf(z) = (1/pi) sum_w f(w) / (z - w) h^2,
    Hf(z) = -(1/pi) sum_w f(w) / (z - w)^2 h^2,

with the kernel sampled at cell-center offsets (midpoint rule) and the
singular cell set to 0: the mean of 1/zeta over a centered square cell
vanishes by odd symmetry, and the principal value of 1/zeta^2 over a
centered square vanishes by quarter-turn antisymmetry, so the analytic
correction and the zero option coincide for both kernels.

The H kernel is d/dz of the T kernel, which fixes its sign: it is the
choice under which H(d/dzbar phi) = d/dz phi, (Tf)_z = Hf, and
H(1_{|w|<1}) = -1/z^2 outside the disk all hold.

The fast path zero-pads to (2n)^2 and convolves by FFT, which reproduces
the direct quadrature sum exactly (modulo FFT roundoff) for fields
supported in the box.  The direct path is the slow O(n^4) oracle.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .errors import (
    DirectQuadratureTooLargeError,
    DomainError,
    ZeroInputError,
)
from .grid import ComplexField, GridSpec, l2_norm, sup_norm

DIRECT_QUADRATURE_MAX_N = 64
SUPPORT_RING_WIDTH = 2
SUPPORT_REL_TOL = 1e-12

_METHODS = ("fft_freespace", "direct_quadrature")
_SINGULAR = ("analytic_correction", "zero")


@dataclass(frozen=True)
class OperatorConfig:
    method: str = "fft_freespace"
    singular_cell: str = "analytic_correction"

    def __post_init__(self):
        if self.method not in _METHODS:
            raise DomainError(f"unknown method {self.method!r}")
        if self.singular_cell not in _SINGULAR:
            raise DomainError(f"unknown singular_cell {self.singular_cell!r}")


@dataclass(frozen=True)
class CrossValidationReport:
    t_discrepancy: float
    h_discrepancy: float


def _offsets(n: int) -> np.ndarray:
    """Signed cell offsets for the 2n circulant embedding."""
    m = np.arange(2 * n)
    return np.where(m < n, m, m - 2 * n)


@functools.lru_cache(maxsize=64)
def _kernel_hat(kind: str, n: int, h: float) -> np.ndarray:
    """FFT of the sampled kernel on the (2n)^2 circulant, lazily cached."""
    off = _offsets(n).astype(np.float64) * h
    zeta = off[None, :] + 1j * off[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        if kind == "cauchy":
            kern = 1.0 / (np.pi * zeta)
        elif kind == "beurling":
            kern = -1.0 / (np.pi * zeta * zeta)
        else:
            raise DomainError(kind)
    kern[0, 0] = 0.0  # singular cell: centered-square symmetry
    out = np.fft.fft2(kern)
    out.flags.writeable = False
    return out


def _check_support(f: ComplexField) -> dict:
    ring = f.spec.boundary_ring(SUPPORT_RING_WIDTH)
    edge = float(np.max(np.abs(f.data[ring])))
    meta = {}
    if edge > SUPPORT_REL_TOL * (sup_norm(f) + 1e-300):
        meta["support_warning"] = True
    return meta


def _convolve_fft(f: ComplexField, kind: str, pad_output: bool = False):
    n, h = f.spec.n, f.spec.h
    pad = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    pad[:n, :n] = f.data
    out = np.fft.ifft2(np.fft.fft2(pad) * _kernel_hat(kind, n, h)) * h**2
    if pad_output:
        return out
    return out[:n, :n]


def _convolve_direct(f: ComplexField, kind: str) -> np.ndarray:
    n, h = f.spec.n, f.spec.h
    if n > DIRECT_QUADRATURE_MAX_N:
        raise DirectQuadratureTooLargeError(
            f"direct_quadrature needs n <= {DIRECT_QUADRATURE_MAX_N}, got {n}"
        )
    z = f.spec.zgrid().ravel()
    src = f.data.ravel()
    out = np.empty(n * n, dtype=np.complex128)
    chunk = max(1, (1 << 22) // (n * n))
    for start in range(0, n * n, chunk):
        diff = z[start : start + chunk, None] - z[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            if kind == "cauchy":
                K = 1.0 / (np.pi * diff)
            else:
                K = -1.0 / (np.pi * diff * diff)
        K[diff == 0] = 0.0  # skip the singular cell
        out[start : start + chunk] = K @ src
    return out.reshape(n, n) * h**2


def _transform(f: ComplexField, cfg: OperatorConfig, kind: str) -> ComplexField:
    meta = _check_support(f)
    if cfg.method == "fft_freespace":
        data = _convolve_fft(f, kind)
    else:
        data = _convolve_direct(f, kind)
    return ComplexField(f.spec, data, meta)


def cauchy_transform(f: ComplexField, cfg: OperatorConfig = OperatorConfig()) -> ComplexField:
    """Discrete Tf; right inverse of d/dzbar on compactly supported data."""
    return _transform(f, cfg, "cauchy")


def beurling_transform(f: ComplexField, cfg: OperatorConfig = OperatorConfig()) -> ComplexField:
    """Discrete Hf; maps d/dzbar of compact data to d/dz."""
    return _transform(f, cfg, "beurling")


def operator_isometry_defect(f: ComplexField, cfg: OperatorConfig = OperatorConfig()) -> float:
    """| ||Hf||_2 / ||f||_2 - 1 | with the output norm over a doubled box.

    Embedding f in the centered (2n)^2 grid of the same spacing before
    applying H captures the O(1/|z|^2) tail of Hf outside the original box.
    """
    nf = l2_norm(f)
    if nf == 0.0:
        raise ZeroInputError("isometry defect undefined for f = 0")
    n = f.spec.n
    big_spec = GridSpec(2 * n, 2 * f.spec.L)
    big = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    big[n // 2 : n // 2 + n, n // 2 : n // 2 + n] = f.data
    Hf = beurling_transform(ComplexField(big_spec, big), cfg)
    return abs(l2_norm(Hf) / nf - 1.0)


def cross_validate_operators(f: ComplexField) -> CrossValidationReport:
    """Relative L2 discrepancy between the FFT and direct paths for T and H.

    The two paths evaluate the same quadrature sum, so agreement at the
    1e-10 level is an arithmetic check, not a convergence statement.
    """
    n = f.spec.n
    if n > DIRECT_QUADRATURE_MAX_N:
        raise DirectQuadratureTooLargeError(
            f"cross validation needs n <= {DIRECT_QUADRATURE_MAX_N}, got {n}"
        )
    fft_cfg = OperatorConfig(method="fft_freespace")
    dir_cfg = OperatorConfig(method="direct_quadrature")
    report = []
    for kind in ("cauchy", "beurling"):
        a = _transform(f, fft_cfg, kind)
        b = _transform(f, dir_cfg, kind)
        den = l2_norm(b) + 1e-300
        report.append(l2_norm(ComplexField(f.spec, a.data - b.data)) / den)
    return CrossValidationReport(t_discrepancy=report[0], h_discrepancy=report[1])
