"""cgrid v1 text interchange format.

Layout: line 1 is ``cgrid v1 <n> <L>``; the next n^2 lines hold
``<re> <im>`` in row-major order with the real axis fastest.  Values are
written with 17 significant digits, so write-then-read round-trips
float64 samples bit-identically.
"""

from __future__ import annotations

import numpy as np

from .errors import CgridFormatError
from .grid import ComplexField, GridSpec

MAGIC = "cgrid"
VERSION = "v1"


def write_cgrid(field: ComplexField, path) -> None:
    n, L = field.spec.n, field.spec.L
    flat = field.data.ravel()  # row-major, j (real axis) fastest
    with open(path, "w") as fh:
        fh.write(f"{MAGIC} {VERSION} {n} {L:.17g}\n")
        fh.writelines(f"{v.real:.17g} {v.imag:.17g}\n" for v in flat)


def read_cgrid(path) -> ComplexField:
    try:
        with open(path) as fh:
            header = fh.readline().split()
            if len(header) != 4 or header[0] != MAGIC or header[1] != VERSION:
                raise CgridFormatError(f"{path}: bad header {header!r}")
            try:
                n, L = int(header[2]), float(header[3])
            except ValueError as exc:
                raise CgridFormatError(f"{path}: bad header values") from exc
            raw = np.loadtxt(fh, dtype=np.float64, ndmin=2)
    except OSError as exc:
        raise CgridFormatError(f"{path}: {exc}") from exc
    if raw.shape != (n * n, 2):
        raise CgridFormatError(
            f"{path}: expected {n * n} sample lines, found shape {raw.shape}"
        )
    data = (raw[:, 0] + 1j * raw[:, 1]).reshape(n, n)
    try:
        return ComplexField(GridSpec(n, L), data)
    except Exception as exc:
        raise CgridFormatError(f"{path}: {exc}") from exc
