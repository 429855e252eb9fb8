"""Geodesic projection onto exp(E) and the induced matrix factorizations.

For a subspace E of symmetric matrices closed under nested brackets, exp(E)
is a complete totally geodesic submanifold and every positive-definite x has
a unique closest point pi(x) in it.  The projection is characterized by the
stationarity condition

    P_E( log( pi^{-1/2} x pi^{-1/2} ) ) = 0,

which this module solves by a Riemannian gradient iteration on exp(E): the
tangent space at y is y^{1/2} E y^{1/2}, so one step moves

    y  <-  y^{1/2} exp( step * P_E( log( y^{-1/2} x y^{-1/2} ) ) ) y^{1/2},

with the step halved whenever the distance to x fails to decrease.  The
converged residual doubles as the correctness certificate.

The projection yields the two-sided factorization x = e f e with
e = pi(x)^{1/2} in exp(E) and f in exp(E^perp), and the global factorization
g = k f e of any invertible matrix with k orthogonal, obtained by factoring
g^T g = e f^2 e.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError
from .matfun import (
    as_sym,
    frobenius,
    require_spd,
    spd_exp,
    spd_inv,
    spd_log,
    spd_sqrt,
    spd_sqrt_pair,
    sym_eigen,
    _check_spd_spectrum,
)
from .subspace import Subspace, lts_check, project_trace

_DEFAULT_TOL = 1e-11
_DEFAULT_MAX_ITER = 500
_DEFAULT_STEP = 1.0
# Step halving floor: below this fraction of the initial step the iteration
# accepts the candidate and relies on the residual test to terminate.
_MIN_STEP_FACTOR = 2.0**-40
# Sectional curvature is bounded below by -2, so along the sphere of radius
# d around x the Hessian of d^2/2 restricted to any totally geodesic
# submanifold has eigenvalues in [1, r coth r] with r = sqrt(2) d.
_CURVATURE_BOUND = 2.0
# Distance values carry rounding noise of order eps * cond of the matrix
# whose spectrum is taken; comparisons within that noise must not trigger
# backtracking (the curvature-capped trial step already guarantees descent).
_DIST_NOISE_FACTOR = 100.0 * np.finfo(float).eps


def _hessian_bound(dist_to_target):
    r = np.sqrt(_CURVATURE_BOUND) * dist_to_target
    if r < 1e-8:
        return 1.0
    return float(r / np.tanh(r))


@dataclass(frozen=True)
class ProjectionResult:
    """Closest point of exp(E) with iteration diagnostics."""

    pi: np.ndarray
    iterations: int
    residual: float


@dataclass(frozen=True)
class MostowFactors:
    """Factorization x = e f e with e in exp(E) and f in exp(E^perp).

    ``pi`` is the geodesic projection of x onto exp(E), equal to e^2.
    """

    e: np.ndarray
    f: np.ndarray
    pi: np.ndarray
    iterations: int
    residual: float


@dataclass(frozen=True)
class GlFactors:
    """Factorization g = k f e with k orthogonal, f in exp(E^perp),
    e in exp(E)."""

    k: np.ndarray
    f: np.ndarray
    e: np.ndarray
    iterations: int
    residual: float


def _require_lts(e_sub, unchecked):
    if unchecked:
        return
    report = lts_check(e_sub)
    if not report.is_lts:
        raise DomainError(
            "subspace is not closed under nested brackets "
            f"(max residual {report.max_residual:.3e}); projection onto its "
            "exponential image has no uniqueness guarantee. Pass "
            "unchecked=True to run the iteration anyway."
        )


def geodesic_project(
    x,
    e_sub,
    *,
    tol=_DEFAULT_TOL,
    max_iter=_DEFAULT_MAX_ITER,
    step=_DEFAULT_STEP,
    unchecked=False,
    initial=None,
):
    """Closest point of exp(E) to x in the geodesic distance.

    Parameters
    ----------
    x : array_like
        Positive-definite matrix to project.
    e_sub : Subspace
        Subspace E; must pass ``lts_check`` unless ``unchecked`` is set (an
        unchecked run still converges to a stationary point, but uniqueness
        and minimality are only guaranteed for bracket-closed subspaces).
    tol : float
        Convergence threshold on the Frobenius norm of
        P_E(log(y^{-1/2} x y^{-1/2})).  The attainable floor scales with the
        conditioning of that inner matrix (roughly eps times the exponential
        of the distance to the submanifold); tolerances below it end in a
        ConvergenceError.
    max_iter, step : int, float
        Iteration cap and initial step of each iteration.
    initial : array_like, optional
        Starting point in exp(E); defaults to exp(P_E(log x)).

    Raises
    ------
    ConvergenceError
        If the residual does not fall below ``tol`` within ``max_iter``
        iterations; carries the last residual.
    """
    if not isinstance(e_sub, Subspace):
        raise DomainError("e_sub must be a Subspace")
    x = require_spd(x)
    if x.shape[0] != e_sub.n:
        raise DomainError(
            f"matrix dimension {x.shape[0]} != subspace ambient {e_sub.n}"
        )
    if tol <= 0 or max_iter < 1 or step <= 0:
        raise DomainError("tol and step must be positive and max_iter >= 1")
    _require_lts(e_sub, unchecked)

    if initial is None:
        y = spd_exp(project_trace(e_sub, spd_log(x)))
    else:
        y = require_spd(initial)

    _, x_inv_sqrt = spd_sqrt_pair(x)

    def dist_to_x(z):
        eig = sym_eigen(as_sym(x_inv_sqrt @ z @ x_inv_sqrt))
        _check_spd_spectrum(eig.lam)
        dist = float(np.sqrt(np.sum(np.log(eig.lam) ** 2)))
        noise = _DIST_NOISE_FACTOR * float(eig.lam[0] / eig.lam[-1])
        return dist, noise

    d_cur, noise_cur = dist_to_x(y)
    residual = None
    for iteration in range(max_iter):
        ys, yis = spd_sqrt_pair(y)
        u = spd_log(as_sym(yis @ x @ yis))
        grad = project_trace(e_sub, u)
        residual = frobenius(grad)
        if residual <= tol:
            return ProjectionResult(pi=y, iterations=iteration, residual=residual)
        # A step below 2 / (1 + L) is guaranteed to contract both the
        # distance and the residual; larger requested steps fall back to the
        # halving loop.
        s = min(step, 2.0 / (1.0 + _hessian_bound(d_cur)))
        while True:
            y_new = as_sym(ys @ spd_exp(s * grad) @ ys)
            d_new, noise_new = dist_to_x(y_new)
            slack = max(noise_cur, noise_new) * max(1.0, d_cur)
            if d_new <= d_cur + slack or s <= _MIN_STEP_FACTOR * step:
                break
            s *= 0.5
        y, d_cur, noise_cur = y_new, d_new, noise_new

    raise ConvergenceError(
        f"projection did not reach residual {tol:.1e} in {max_iter} iterations "
        f"(last residual {residual:.3e})",
        residual=residual,
        iterations=max_iter,
    )


def mostow_spd(x, e_sub, **opts):
    """Two-sided factorization x = e f e through the geodesic projection.

    ``e = pi(x)^{1/2}`` lies in exp(E) and ``f = e^{-1} x e^{-1}`` in
    exp(E^perp); the converged projection residual bounds the E-component of
    log f.
    """
    x = require_spd(x)
    proj = geodesic_project(x, e_sub, **opts)
    pi = proj.pi
    eig = sym_eigen(pi)
    _check_spd_spectrum(eig.lam)
    root = np.sqrt(eig.lam)
    e = (eig.q * root) @ eig.q.T
    e = (e + e.T) / 2.0
    e_inv = (eig.q / root) @ eig.q.T
    f = as_sym(e_inv @ x @ e_inv)
    return MostowFactors(
        e=e, f=f, pi=pi, iterations=proj.iterations, residual=proj.residual
    )


def mostow_gl(g, e_sub, **opts):
    """Factor an invertible matrix as g = k f e with k orthogonal.

    Follows from the two-sided factorization of g^T g = e f^2 e: the square
    root of the middle factor stays in exp(E^perp) because that subspace is
    closed under halving of logarithms.
    """
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise DomainError("matrix contains non-finite entries")
    s = as_sym(g.T @ g)
    eig = sym_eigen(s)
    # Singular values of g are the square roots of these eigenvalues.
    if eig.lam[-1] <= 1e-20 * eig.lam[0]:
        raise DomainError(
            "matrix is too close to singular "
            f"(squared singular value ratio {eig.lam[-1] / eig.lam[0]:.3e})"
        )
    factors = mostow_spd(s, e_sub, **opts)
    f = spd_sqrt(factors.f)
    k = g @ spd_inv(factors.e) @ spd_inv(f)
    return GlFactors(
        k=k,
        f=f,
        e=factors.e,
        iterations=factors.iterations,
        residual=factors.residual,
    )


@dataclass(frozen=True)
class TranslatedSubmanifold:
    """The totally geodesic submanifold x^{1/2} exp(E) x^{1/2}.

    Every geodesically complete convex submanifold has this normal form for
    some base point x and bracket-closed subspace E.
    """

    base: np.ndarray
    subspace: Subspace

    def membership_residual(self, y):
        """Norm of the E-orthogonal part of log(x^{-1/2} y x^{-1/2})."""
        _, xis = spd_sqrt_pair(self.base)
        u = spd_log(as_sym(xis @ as_sym(y) @ xis))
        return frobenius(u - project_trace(self.subspace, u))

    def contains(self, y, tol=1e-9):
        return self.membership_residual(y) <= tol

    def point(self, u):
        """The member x^{1/2} exp(u) x^{1/2} for u in E."""
        u = as_sym(u)
        xs, _ = spd_sqrt_pair(self.base)
        return as_sym(xs @ spd_exp(project_trace(self.subspace, u)) @ xs)


def translate_convex_submanifold(x, e_sub):
    """Normal form (x, E) of the translated submanifold through x."""
    if not isinstance(e_sub, Subspace):
        raise DomainError("e_sub must be a Subspace")
    x = require_spd(x)
    if x.shape[0] != e_sub.n:
        raise DomainError(
            f"matrix dimension {x.shape[0]} != subspace ambient {e_sub.n}"
        )
    return TranslatedSubmanifold(base=x, subspace=e_sub)
