"""Solver and verification suite for the planar Beltrami equation.

Two independent constructions of the normalized quasiconformal map with
dilatation mu: a singular-integral Neumann series (Cauchy and
Beurling-Ahlfors transforms) and a Hodge-star variational solve
(weighted energy minimization plus exponential substitution), with a
verification battery covering the algebraic, operator-theoretic, and
kernel-bound identities both constructions rest on.
"""

from .demo import DemoMu, standard_demo
from .grid import ComplexField, GridSpec, OneForm
from .hodge import BeltramiCoefficient, MetricCoefficients, metric_coefficients
from .io import read_cgrid, write_cgrid
from .neumann import NeumannReport, holder_constant, neumann_series, radius_predicate, solve_neumann
from .operators import OperatorConfig, beurling_transform, cauchy_transform
from .solution import QCMapSolution, far_field_fit, normalize
from .variational import WeakSolveReport, build_psi, integrate_phi, solve_variational, solve_weak
from .verify import VerifyReport, beltrami_residual, core_checks, full_suite, isothermal_check, jacobian_check

__all__ = [
    "BeltramiCoefficient",
    "ComplexField",
    "DemoMu",
    "GridSpec",
    "MetricCoefficients",
    "NeumannReport",
    "OneForm",
    "OperatorConfig",
    "QCMapSolution",
    "VerifyReport",
    "WeakSolveReport",
    "beltrami_residual",
    "beurling_transform",
    "build_psi",
    "cauchy_transform",
    "core_checks",
    "far_field_fit",
    "full_suite",
    "holder_constant",
    "integrate_phi",
    "isothermal_check",
    "jacobian_check",
    "metric_coefficients",
    "neumann_series",
    "normalize",
    "radius_predicate",
    "read_cgrid",
    "solve_neumann",
    "solve_variational",
    "solve_weak",
    "standard_demo",
    "write_cgrid",
]

__version__ = "0.1.0"
