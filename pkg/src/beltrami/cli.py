"""Command-line front end: solve, verify, and map subcommands.

Exit codes are a stable contract: 0 all checks pass, 1 a check failed,
2 invalid input or I/O trouble, 3 numerical failure inside a solver.
All artifacts are text (cgrid, reports, CSV) except the binary P6 image.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io as gridio
from .demo import DemoMu
from .errors import (
    BeltramiError,
    CgridFormatError,
    DegenerateNormalizationError,
    DomainError,
    InvalidEtaError,
    NoConvergenceError,
    NonPositiveJacobianError,
    NotClosedError,
)
from .grid import ComplexField, GridSpec, wirtinger_pair
from .hodge import BeltramiCoefficient
from .neumann import solve_neumann
from .solution import normalize
from .variational import solve_variational
from .verify import core_checks, full_suite

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

_NUMERICAL_ERRORS = (
    NoConvergenceError,
    NotClosedError,
    NonPositiveJacobianError,
    DegenerateNormalizationError,
    InvalidEtaError,
)


def _load_mu(text: str, n: int, L: float):
    """Resolve --mu: either 'demo:<name>[:params]' or a cgrid path.

    Returns (BeltramiCoefficient, DemoMu or None).
    """
    if text.startswith("demo:"):
        demo = DemoMu.parse(text[len("demo:"):])
        return demo.build(GridSpec(n, L)), demo
    field = gridio.read_cgrid(text)
    return BeltramiCoefficient.from_field(field), None


def cmd_solve(args) -> int:
    mu, demo = _load_mu(args.mu, args.n, args.L)
    solver = solve_neumann if args.method == "neumann" else solve_variational
    sol = solver(mu, tol=args.tol)
    nsol = normalize(sol)
    gridio.write_cgrid(nsol.phi, f"{args.out}.phi.cgrid")

    report = core_checks(nsol, mu, demo)
    lines = [
        f"solve method={args.method} n={mu.spec.n} L={mu.spec.L:g} tol={args.tol:g}",
        f"mu {args.mu} k={mu.k:.6g} support_margin={mu.support_margin}",
    ]
    if "neumann_report" in sol.info:
        r = sol.info["neumann_report"]
        lines.append(
            f"neumann iterations={r.iterations} fixed_point_residual={r.fixed_point_residual:.6e}"
        )
    if "psi_report" in sol.info:
        r = sol.info["psi_report"]
        lines.append(
            f"variational cg_iterations={r.weak.iterations} "
            f"weak_residual={r.weak.final_residual:.6e} "
            f"closedness={r.closedness_residual:.6e} "
            f"inhomogeneous_residual={r.inhomogeneous_residual:.6e}"
        )
    text = "\n".join(lines) + "\n" + report.render()
    with open(f"{args.out}.report.txt", "w") as fh:
        fh.write(text)
    sys.stdout.write(text)
    return EXIT_OK if report.all_pass else EXIT_CHECK_FAILED


def cmd_verify(args) -> int:
    if args.mu.startswith("demo:"):
        demo = DemoMu.parse(args.mu[len("demo:"):])
    else:
        raise DomainError("verify needs --mu demo:<name>[:params] to build per-level fields")
    if args.suite == "core":
        mu = demo.build(GridSpec(args.n, args.L))
        solver = solve_neumann if args.method == "neumann" else solve_variational
        report = core_checks(normalize(solver(mu, tol=args.tol)), mu, demo)
    else:
        report = full_suite(demo, args.n, args.L, args.tol)
    sys.stdout.write(report.render())
    return EXIT_OK if report.all_pass else EXIT_CHECK_FAILED


def _checker_colors(phi: ComplexField, cells: int):
    """Checkerboard parity of the source cell of every sample."""
    spec = phi.spec
    z = spec.zgrid()
    side = 2.0 * spec.L / cells
    px = np.floor((z.real + spec.L) / side).astype(int)
    py = np.floor((z.imag + spec.L) / side).astype(int)
    return (px + py) % 2


def write_ppm(path, rgb: np.ndarray):
    """Binary P6, 8 bits per channel."""
    height, width, _ = rgb.shape
    with open(path, "wb") as fh:
        fh.write(f"P6\n{width} {height}\n255\n".encode("ascii"))
        fh.write(rgb.astype(np.uint8).tobytes())


def _nearest_fill(img: np.ndarray, filled: np.ndarray):
    """Propagate colors into unfilled pixels from filled neighbors."""
    while not filled.all():
        grew = False
        for axis, shift in ((0, 1), (0, -1), (1, 1), (1, -1)):
            src_ok = np.roll(filled, shift, axis=axis)
            if axis == 0:
                src_ok[0 if shift == 1 else -1, :] = False
            else:
                src_ok[:, 0 if shift == 1 else -1] = False
            take = src_ok & ~filled
            if np.any(take):
                img[take] = np.roll(img, shift, axis=axis)[take]
                filled |= take
                grew = True
        if not grew:
            break


def cmd_map(args) -> int:
    phi = gridio.read_cgrid(args.phi)
    spec = phi.spec
    parity = _checker_colors(phi, args.cells)

    pz, pzb = wirtinger_pair(phi)
    jac = np.abs(pz) ** 2 - np.abs(pzb) ** 2
    if float(np.min(jac)) <= 0.0:
        sys.stderr.write(
            f"warning: orientation-reversing or folded map (min J = {np.min(jac):.3e})\n"
        )

    npix = spec.n
    x, y = phi.data.real, phi.data.imag
    pad = 1e-9 + 0.02 * max(np.ptp(x), np.ptp(y))
    x0, x1 = x.min() - pad, x.max() + pad
    y0, y1 = y.min() - pad, y.max() + pad
    cols = np.clip(((x - x0) / (x1 - x0) * npix).astype(int), 0, npix - 1)
    rows = np.clip(((y1 - y) / (y1 - y0) * npix).astype(int), 0, npix - 1)

    light = np.array([235, 235, 235], dtype=np.uint8)
    dark = np.array([40, 60, 130], dtype=np.uint8)
    img = np.zeros((npix, npix, 3), dtype=np.uint8)
    filled = np.zeros((npix, npix), dtype=bool)
    img[rows.ravel(), cols.ravel()] = np.where(
        parity.ravel()[:, None] == 0, light[None, :], dark[None, :]
    )
    filled[rows.ravel(), cols.ravel()] = True
    _nearest_fill(img, filled)
    write_ppm(args.out, img)

    csv_path = f"{args.out}.csv"
    z = spec.zgrid()
    with open(csv_path, "w") as fh:
        fh.write("x,y,re_phi,im_phi\n")
        for zc, pv in zip(z.ravel(), phi.data.ravel()):
            fh.write(f"{zc.real:.17g},{zc.imag:.17g},{pv.real:.17g},{pv.imag:.17g}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beltrami",
        description="Solve and verify the planar Beltrami equation on a square grid.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="solve for the normalized map Phi")
    ps.add_argument("--mu", required=True, help="cgrid file or demo:<name>[:params]")
    ps.add_argument("--n", type=int, default=128)
    ps.add_argument("--L", type=float, default=2.0)
    ps.add_argument("--method", choices=("neumann", "variational"), default="neumann")
    ps.add_argument("--tol", type=float, default=1e-8)
    ps.add_argument("--out", default="beltrami_solve")
    ps.set_defaults(func=cmd_solve)

    pv = sub.add_parser("verify", help="run the verification battery")
    pv.add_argument("--mu", required=True, help="demo:<name>[:params]")
    pv.add_argument("--n", type=int, default=128)
    pv.add_argument("--L", type=float, default=2.0)
    pv.add_argument("--method", choices=("neumann", "variational"), default="neumann")
    pv.add_argument("--tol", type=float, default=1e-8)
    pv.add_argument("--suite", choices=("core", "full"), default="core")
    pv.set_defaults(func=cmd_verify)

    pm = sub.add_parser("map", help="render a solved map as a checkerboard image")
    pm.add_argument("--phi", required=True, help="cgrid file with Phi samples")
    pm.add_argument("--cells", type=int, default=16)
    pm.add_argument("--out", required=True, help="output .ppm path")
    pm.set_defaults(func=cmd_map)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _NUMERICAL_ERRORS as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NUMERICAL
    except (CgridFormatError, DomainError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except BeltramiError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
