"""Symmetric eigendecomposition and spectral matrix functions.

All heavy lifting on symmetric matrices goes through a single cyclic Jacobi
eigensolver, which is deterministic and accurate to machine precision for
dense symmetric input.  Analytic functions (exp, log, sqrt, powers) are
evaluated through the spectrum, so the results are symmetric by construction.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError

# Relative eigenvalue floor for positive definiteness.
SPD_TOL = 1e-12

# Jacobi sweep control: reduce the off-diagonal Frobenius norm below
# _JACOBI_TOL * ||A||_F, giving up after _MAX_SWEEPS full sweeps.
_JACOBI_TOL = 1e-14
_MAX_SWEEPS = 50


def as_sym(a):
    """Return the symmetric part (A + A^T)/2 of a square matrix as float64.

    Raises DomainError if the input is not a square 2-d array of size >= 1.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DomainError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix contains non-finite entries")
    return (a + a.T) / 2.0


def frobenius(a):
    """Frobenius norm."""
    return float(np.linalg.norm(a))


def tr_inner(a, b):
    """Trace inner product Tr(AB) of two symmetric matrices."""
    return float(np.tensordot(a, b))


@dataclass(frozen=True)
class EigenDecomposition:
    """Orthonormal eigenbasis of a symmetric matrix.

    ``q`` holds eigenvectors in its columns, ``lam`` the matching eigenvalues
    in descending order, so that ``q @ diag(lam) @ q.T`` reconstructs the
    source matrix.
    """

    q: np.ndarray
    lam: np.ndarray


def _offdiag_norm(a):
    # Summed directly over off-diagonal entries; the difference
    # ||A||_F^2 - sum(diag^2) would cancel catastrophically near convergence.
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return frobenius(off)


_ROUND_CACHE = {}


def _jacobi_rounds(n):
    """Round-robin schedule: each sweep visits every index pair once, in
    rounds of pairwise-disjoint pivots.

    Rotations with disjoint index pairs leave each other's rows, columns and
    pivots untouched, so applying a whole round as a single orthogonal
    similarity reproduces the sequential result exactly while doing the work
    in a few dense matrix products.
    """
    cached = _ROUND_CACHE.get(n)
    if cached is not None:
        return cached
    bye = n if n % 2 else None
    players = list(range(n)) + ([bye] if bye is not None else [])
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        pairs = []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a != bye and b != bye:
                pairs.append((min(a, b), max(a, b)))
        rounds.append(
            (
                np.array([p for p, _ in pairs], dtype=int),
                np.array([r for _, r in pairs], dtype=int),
            )
        )
        players = [players[0], players[-1]] + players[1:-1]
    _ROUND_CACHE[n] = rounds
    return rounds


def sym_eigen(a):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    a : array_like, shape (n, n)
        Symmetric matrix (symmetrized on entry).

    Returns
    -------
    EigenDecomposition
        Eigenvalues sorted in descending order.

    Raises
    ------
    ConvergenceError
        If the off-diagonal norm is not reduced below 1e-14 * ||A||_F within
        50 sweeps; carries the remaining off-diagonal residual.
    """
    a = as_sym(a)
    n = a.shape[0]
    work = a.copy()
    q = np.eye(n)
    target = _JACOBI_TOL * frobenius(a)
    # Rotations whose pivot is below this cannot push the off-norm over the
    # target, so they are skipped.
    skip = target / (2.0 * n)

    off = _offdiag_norm(work)
    sweeps = 0
    while off > target:
        if sweeps >= _MAX_SWEEPS:
            raise ConvergenceError(
                f"Jacobi iteration did not converge in {_MAX_SWEEPS} sweeps "
                f"(off-diagonal residual {off:.3e}, target {target:.3e})",
                residual=off,
                iterations=sweeps,
            )
        for pp, rr in _jacobi_rounds(n):
            pivots = work[pp, rr]
            live = np.abs(pivots) > skip
            if not np.any(live):
                continue
            p = pp[live]
            r = rr[live]
            apr = pivots[live]
            theta = (work[r, r] - work[p, p]) / (2.0 * apr)
            t = np.copysign(1.0, theta) / (np.abs(theta) + np.hypot(theta, 1.0))
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            rot = np.eye(n)
            rot[p, p] = c
            rot[r, r] = c
            rot[p, r] = s
            rot[r, p] = -s
            work = rot.T @ work @ rot
            work[p, r] = 0.0
            work[r, p] = 0.0
            q = q @ rot
        work = (work + work.T) / 2.0
        sweeps += 1
        off = _offdiag_norm(work)

    lam = np.diag(work).copy()
    order = np.argsort(-lam, kind="stable")
    return EigenDecomposition(q=np.ascontiguousarray(q[:, order]), lam=lam[order])


def _rebuild(eig, values):
    """Assemble q @ diag(values) @ q.T, symmetrized."""
    m = (eig.q * values) @ eig.q.T
    return (m + m.T) / 2.0


def _map_spectrum(eig, phi):
    """phi applied eigenvalue-wise, with domain checking."""
    values = np.empty_like(eig.lam)
    for i, lam in enumerate(eig.lam):
        try:
            v = float(phi(lam))
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise DomainError(
                f"scalar function undefined at eigenvalue {lam!r}: {exc}"
            ) from exc
        if not math.isfinite(v):
            raise DomainError(f"scalar function is not finite at eigenvalue {lam!r}")
        values[i] = v
    return values


def sym_apply(a, phi):
    """Apply a scalar function to a symmetric matrix through its spectrum.

    Returns q @ diag(phi(lam_i)) @ q.T.  Raises DomainError if phi is
    undefined (raises, or returns a non-finite value) at some eigenvalue.
    """
    eig = sym_eigen(a)
    return _rebuild(eig, _map_spectrum(eig, phi))


def _check_spd_spectrum(lam, what="matrix"):
    lam_max = float(lam[0])
    lam_min = float(lam[-1])
    if not lam_min > SPD_TOL * max(1.0, lam_max):
        raise DomainError(
            f"{what} is not positive definite: smallest eigenvalue {lam_min:.6e} "
            f"below threshold {SPD_TOL:.0e} * max(1, {lam_max:.6e})"
        )


def is_spd(x):
    """True if the symmetrized input passes the positive-definiteness check."""
    try:
        require_spd(x)
    except DomainError:
        return False
    return True


def require_spd(x):
    """Validate positive definiteness and return the symmetrized matrix.

    A matrix passes when lam_min > 1e-12 * max(1, lam_max).
    """
    x = as_sym(x)
    eig = sym_eigen(x)
    _check_spd_spectrum(eig.lam)
    return x


def spd_exp(a):
    """Matrix exponential of a symmetric matrix; always positive definite."""
    eig = sym_eigen(a)
    return _rebuild(eig, _map_spectrum(eig, math.exp))


def spd_log(x):
    """Matrix logarithm of a positive-definite matrix (inverse of spd_exp)."""
    x = as_sym(x)
    eig = sym_eigen(x)
    _check_spd_spectrum(eig.lam)
    return _rebuild(eig, np.log(eig.lam))


def spd_sqrt(x):
    """Positive-definite square root."""
    x = as_sym(x)
    eig = sym_eigen(x)
    _check_spd_spectrum(eig.lam)
    return _rebuild(eig, np.sqrt(eig.lam))


def spd_inv_sqrt(x):
    """Inverse of the positive-definite square root."""
    x = as_sym(x)
    eig = sym_eigen(x)
    _check_spd_spectrum(eig.lam)
    return _rebuild(eig, 1.0 / np.sqrt(eig.lam))


def spd_sqrt_pair(x):
    """(x^{1/2}, x^{-1/2}) from a single eigendecomposition."""
    x = as_sym(x)
    eig = sym_eigen(x)
    _check_spd_spectrum(eig.lam)
    root = np.sqrt(eig.lam)
    return _rebuild(eig, root), _rebuild(eig, 1.0 / root)


def spd_inv(x):
    """Inverse of a positive-definite matrix through its spectrum."""
    x = as_sym(x)
    eig = sym_eigen(x)
    _check_spd_spectrum(eig.lam)
    return _rebuild(eig, 1.0 / eig.lam)


def spd_pow(x, t):
    """Real matrix power x^t of a positive-definite matrix."""
    x = as_sym(x)
    eig = sym_eigen(x)
    _check_spd_spectrum(eig.lam)
    return _rebuild(eig, np.exp(t * np.log(eig.lam)))
