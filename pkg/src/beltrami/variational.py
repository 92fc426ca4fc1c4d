"""Variational pipeline: weak solve, conjugate field, Psi, and Phi.

The chain solves the inhomogeneous Beltrami equation by energy
minimization and exponential substitution:

1.  solve_weak finds the zero-mean potential f of the weak equation
    associated with the right-hand side form eta = G dz - F dzbar.
2.  conjugate_field integrates omega = i *_mu df - eta to g; closedness
    of omega is exactly the statement that f solved the equation.
3.  Psi = f + g then satisfies d/dzbar Psi - mu d/dz Psi = F + mu G
    pointwise by the algebra of the star coefficients, for any f; the
    weak solve only enters through the closedness of omega.
4.  integrate_phi integrates the closed form e^Psi dz + mu e^Psi dzbar
    to the map Phi, whose Beltrami quotient is mu by construction.

For the homogeneous problem take F = dmu/dz, G = 0, which makes Psi
satisfy d/dzbar Psi - mu d/dz Psi = dmu/dz as the exponential
substitution requires.  (In the eta = G dz - F dzbar convention this is
eta = -(dmu/dz) dzbar.)
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sparse
import scipy.sparse.linalg as spla

from .errors import InvalidEtaError, NoConvergenceError, NonPositiveJacobianError
from .grid import (
    ComplexField,
    GridSpec,
    OneForm,
    L2_FLOOR,
    antiderivative,
    curl_residual,
    l2_norm,
    potential_residuals,
    sup_norm,
    wirtinger_pair,
)
from .hodge import BeltramiCoefficient, MetricCoefficients, coercivity_constant, metric_coefficients
from .solution import QCMapSolution

ETA_SUPPORT_RING = 2
ETA_SUPPORT_REL_TOL = 1e-12
DEFAULT_TOL_CLOSED = 0.1


@dataclass(frozen=True)
class WeakSolveReport:
    iterations: int
    final_residual: float
    coercivity_used: float


@dataclass(frozen=True)
class PsiReport:
    weak: WeakSolveReport
    closedness_residual: float
    potential_residuals: tuple
    inhomogeneous_residual: float


@functools.lru_cache(maxsize=16)
def _diff_1d(n: int, h: float) -> sparse.csr_matrix:
    """1D first-derivative matrix matching np.gradient(..., edge_order=2)."""
    d = sparse.lil_matrix((n, n))
    for i in range(1, n - 1):
        d[i, i - 1] = -0.5
        d[i, i + 1] = 0.5
    d[0, 0], d[0, 1], d[0, 2] = -1.5, 2.0, -0.5
    d[n - 1, n - 3], d[n - 1, n - 2], d[n - 1, n - 1] = 0.5, -2.0, 1.5
    return (d / h).tocsr()


@functools.lru_cache(maxsize=16)
def _diff_matrices(n: int, h: float):
    """(Dx, Dy, Dx^T, Dy^T) on row-major flattened fields."""
    d1 = _diff_1d(n, h)
    eye = sparse.identity(n, format="csr")
    dx = sparse.kron(eye, d1, format="csr")
    dy = sparse.kron(d1, eye, format="csr")
    return dx, dy, dx.T.tocsr(), dy.T.tocsr()


@functools.lru_cache(maxsize=8)
def _a0_eigen(n: int, h: float):
    """Eigendecomposition of the constant-coefficient system inverse.

    The mu = 0 operator is A0 = (Dx^T Dx + Dy^T Dy)/2 = (I x K + K x I)/2
    with K = D1^T D1, so its pseudo-inverse acts exactly through the
    n x n eigenbasis of K.  Using the same one-sided boundary closures
    as A keeps the preconditioned spectrum inside the coercivity bounds
    [(1-k)/(1+k), (1+k)/(1-k)]; a periodic (FFT) inverse does not, and
    stalls conjugate gradients on near-Nyquist boundary modes.
    """
    d1 = _diff_1d(n, h).toarray()
    lam, Q = np.linalg.eigh(d1.T @ d1)
    lam[np.abs(lam) < 1e-12 * lam[-1]] = 0.0  # exact kernel: constants
    pair = 0.5 * (lam[:, None] + lam[None, :])
    with np.errstate(divide="ignore"):
        inv = np.where(pair > 0.0, 1.0 / pair, 0.0)
    inv.flags.writeable = False
    Q.flags.writeable = False
    return Q, inv


class _WeakSystem:
    """Hermitian positive-semidefinite operator of the discrete weak form.

    A g = Dz^H(a Dz g) + Dzb^H(a Dzb g) - Dzb^H(b Dz g) - Dz^H(conj(b) Dzb g),
    assembled from the energy density with central differences, so that
    <A v, g> equals the mu-inner product B(v, g) exactly.
    """

    def __init__(self, mc: MetricCoefficients):
        self.spec = mc.spec
        n, h = mc.spec.n, mc.spec.h
        self.dx, self.dy, self.dxt, self.dyt = _diff_matrices(n, h)
        self.a = mc.a.ravel()
        self.b = mc.b.ravel()
        self.q0, self.pair_inv = _a0_eigen(n, h)

    def apply(self, g: np.ndarray) -> np.ndarray:
        gx = self.dx @ g
        gy = self.dy @ g
        gz = 0.5 * (gx - 1j * gy)
        gzb = 0.5 * (gx + 1j * gy)
        u = self.a * gz - np.conj(self.b) * gzb   # goes through Dz^H
        v = self.a * gzb - self.b * gz            # goes through Dzb^H
        return 0.5 * (self.dxt @ (u + v) + 1j * (self.dyt @ (u - v)))

    def precondition(self, r: np.ndarray) -> np.ndarray:
        """Apply the pseudo-inverse of the mu = 0 system (constants
        projected out) through the 1D eigenbasis: two dense n x n
        multiplications per side."""
        n = self.spec.n
        Q = self.q0
        s = Q.T @ r.reshape(n, n) @ Q
        s *= self.pair_inv
        return (Q @ s @ Q.T).ravel()


def _check_eta_support(eta: OneForm):
    ring = eta.spec.boundary_ring(ETA_SUPPORT_RING)
    scale = max(sup_norm(eta.p), sup_norm(eta.q)) + 1e-300
    edge = max(
        float(np.max(np.abs(eta.p.data[ring]))),
        float(np.max(np.abs(eta.q.data[ring]))),
    )
    if edge > ETA_SUPPORT_REL_TOL * scale:
        raise InvalidEtaError(
            f"eta boundary ring sup {edge:.3e} exceeds {ETA_SUPPORT_REL_TOL} * scale"
        )


def weak_rhs(eta: OneForm, system: _WeakSystem) -> np.ndarray:
    """Right-hand side -conj(r), r = dF/dz + dG/dzbar, same stencils as A."""
    G = eta.p.data.ravel()
    F = -eta.q.data.ravel()
    fx, fy = system.dx @ F, system.dy @ F
    gx, gy = system.dx @ G, system.dy @ G
    r = 0.5 * (fx - 1j * fy) + 0.5 * (gx + 1j * gy)
    rhs = -np.conj(r)
    return rhs - np.mean(rhs)


def linear_functional(v: ComplexField, eta: OneForm, mode: str = "central") -> complex:
    """L(v) = -integral v (dF/dz + dG/dzbar) dA, the weak-form pairing.

    Normalized to match mu_inner_product: the solved f satisfies
    mu_inner_product(v, conj(f)) = L(v) for every test field v.
    """
    from .grid import wirtinger_dz, wirtinger_dzbar

    F = eta.q.like(-eta.q.data)
    r = wirtinger_dz(F, mode).data + wirtinger_dzbar(eta.p, mode).data
    h = v.spec.h
    return complex(-np.sum(v.data * r) * h * h)


def solve_weak(
    mu: BeltramiCoefficient,
    eta: OneForm,
    tol: float = 1e-8,
    max_iter: int = 2000,
):
    """Zero-mean weak solution f of the variational equation for eta.

    Preconditioned conjugate gradients on the Hermitian system, with the
    exact pseudo-inverse of the mu = 0 operator as preconditioner; the
    coercivity constant (1-k)/(1+k) bounds the preconditioned spectrum,
    so the iteration count depends on k but not on n.
    """
    _check_eta_support(eta)
    mc = metric_coefficients(mu)
    system = _WeakSystem(mc)
    rhs = weak_rhs(eta, system)
    rhs_norm = float(np.linalg.norm(rhs))
    if rhs_norm == 0.0:
        f = ComplexField.zeros(mu.spec)
        return f, WeakSolveReport(0, 0.0, coercivity_constant(mu.k))

    op = spla.LinearOperator(
        (rhs.size, rhs.size), matvec=system.apply, dtype=np.complex128
    )
    pre = spla.LinearOperator(
        (rhs.size, rhs.size), matvec=system.precondition, dtype=np.complex128
    )
    iterations = 0

    def count(_):
        nonlocal iterations
        iterations += 1

    g, info = spla.cg(op, rhs, rtol=tol, atol=0.0, maxiter=max_iter, M=pre, callback=count)
    final = float(np.linalg.norm(rhs - system.apply(g)) / rhs_norm)
    if info > 0:
        raise NoConvergenceError(iterations, final)
    if info < 0:
        raise ValueError(f"cg failed with info={info}")
    f = np.conj(g)
    f -= np.mean(f)
    field = ComplexField(mu.spec, f.reshape(mu.spec.n, mu.spec.n))
    return field, WeakSolveReport(iterations, final, coercivity_constant(mu.k))


def star_flux(f: ComplexField, mc: MetricCoefficients, mode: str = "central") -> OneForm:
    """i *_mu df = (a f_z - conj(b) f_zbar) dz + (b f_z - a f_zbar) dzbar."""
    fz, fzb = wirtinger_pair(f, mode)
    return OneForm(
        f.like(mc.a * fz - np.conj(mc.b) * fzb),
        f.like(mc.b * fz - mc.a * fzb),
    )


def conjugate_field(
    f: ComplexField,
    mu: BeltramiCoefficient,
    eta: OneForm,
    tol_closed: float = DEFAULT_TOL_CLOSED,
    mode: str = "central",
):
    """Potential g of omega = i *_mu df - eta, plus the closedness residual.

    A NotClosedError here signals that the weak-solve residual was too
    large for the downstream pipeline, since closedness of omega is the
    equation itself.
    """
    mc = metric_coefficients(mu)
    flux = star_flux(f, mc, mode)
    omega = OneForm(
        f.like(flux.p.data - eta.p.data),
        f.like(flux.q.data - eta.q.data),
    )
    residual = curl_residual(omega, mode)
    g = antiderivative(omega, tol_closed, mode)
    return g, residual


def eta_from_rhs(mu: BeltramiCoefficient, F: ComplexField | None, G: ComplexField | None) -> OneForm:
    """Form eta = G dz - F dzbar for the inhomogeneous equation
    d/dzbar Psi - mu d/dz Psi = F + mu G."""
    spec = mu.spec
    if F is None:
        F = ComplexField.zeros(spec)
    if G is None:
        G = ComplexField.zeros(spec)
    return OneForm(G, F.like(-F.data))


def build_psi(
    mu: BeltramiCoefficient,
    tol: float = 1e-8,
    max_iter: int = 2000,
    tol_closed: float = DEFAULT_TOL_CLOSED,
    F: ComplexField | None = None,
    G: ComplexField | None = None,
    mode: str = "central",
):
    """Solve d/dzbar Psi - mu d/dz Psi = F + mu G; default F = dmu/dz, G = 0.

    Returns (Psi, PsiReport).  The default right-hand side is the one
    the exponential substitution needs, so exp(Psi) integrates to a
    Beltrami solution for mu.
    """
    from .grid import wirtinger_dz

    if F is None:
        F = wirtinger_dz(mu.mu, mode)
    if G is None:
        G = ComplexField.zeros(mu.spec)
    eta = eta_from_rhs(mu, F, G)
    f, weak_report = solve_weak(mu, eta, tol, max_iter)
    g, closed = conjugate_field(f, mu, eta, tol_closed, mode)
    psi = f.like(f.data + g.data)

    flux = star_flux(f, metric_coefficients(mu), mode)
    omega = OneForm(f.like(flux.p.data - eta.p.data), f.like(flux.q.data - eta.q.data))
    pot_res = potential_residuals(g, omega, mode)

    rhs = F.data + mu.data * G.data
    pz, pzb = wirtinger_pair(psi, mode)
    num = l2_norm(psi.like(pzb - mu.data * pz - rhs))
    den = l2_norm(psi.like(rhs)) + L2_FLOOR
    report = PsiReport(weak_report, closed, pot_res, num / den)
    return psi, report


def integrate_phi(
    psi: ComplexField,
    mu: BeltramiCoefficient,
    tol_closed: float = DEFAULT_TOL_CLOSED,
    mode: str = "central",
) -> QCMapSolution:
    """Integrate the closed form e^Psi dz + mu e^Psi dzbar to the map Phi.

    Records the analytic derivatives Phi_z = e^Psi, Phi_zbar = mu e^Psi
    and the Jacobian |e^Psi|^2 (1 - |mu|^2), which the construction
    keeps positive; a non-positive value signals numerical breakdown.
    """
    e = np.exp(psi.data)
    alpha = OneForm(psi.like(e), psi.like(mu.data * e))
    residual = curl_residual(alpha, mode)
    phi = antiderivative(alpha, tol_closed, mode)
    jac = np.abs(e) ** 2 * (1.0 - np.abs(mu.data) ** 2)
    if np.min(jac) <= 0.0:
        raise NonPositiveJacobianError(f"min J = {np.min(jac):.3e}")
    pot_res = potential_residuals(phi, alpha, mode)
    info = {
        "alpha_closedness": residual,
        "potential_residuals": pot_res,
    }
    return QCMapSolution(
        phi=phi,
        phi_z=psi.like(e),
        phi_zbar=psi.like(mu.data * e),
        jacobian=jac,
        mu=mu,
        method="variational",
        info=info,
    )


def solve_variational(
    mu: BeltramiCoefficient,
    tol: float = 1e-8,
    max_iter: int = 2000,
    tol_closed: float = DEFAULT_TOL_CLOSED,
    mode: str = "central",
) -> QCMapSolution:
    """Full pipeline: weak solve, conjugate field, exponentiate, integrate."""
    psi, report = build_psi(mu, tol, max_iter, tol_closed, mode=mode)
    sol = integrate_phi(psi, mu, tol_closed, mode)
    sol.info["psi_report"] = report
    return sol
