"""Linear subspaces of the symmetric matrices under the trace inner product.

A subspace is stored as an orthonormal basis (Frobenius/trace inner product)
and supports Euclidean projection, orthogonal complements and the bracket
conditions that characterize when its exponential image is a totally
geodesic submanifold:

    [X, [Y, Z]] in E  for all X, Y, Z in E        (full triple condition)
    [X, [X, Y]] in E  for all X, Y in E           (double-bracket form)

The two are equivalent by polarization; ``lts_check`` evaluates both and
reports them side by side.
"""

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, ParseError
from .matfun import as_sym, frobenius, tr_inner

# Generators whose orthogonal residual falls below this fraction of the
# largest generator norm are treated as dependent and dropped.
_DROP_TOL = 1e-10


@dataclass
class Subspace:
    """Orthonormal basis of a linear subspace of symmetric n x n matrices."""

    n: int
    basis: np.ndarray  # shape (k, n, n)
    _lts_cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dim(self):
        return int(self.basis.shape[0])

    def __post_init__(self):
        self.basis = np.asarray(self.basis, dtype=float)
        if self.basis.ndim != 3 or self.basis.shape[1:] != (self.n, self.n):
            raise DomainError(
                f"basis must have shape (k, {self.n}, {self.n}), "
                f"got {self.basis.shape}"
            )


def build_subspace(generators, drop_tol=_DROP_TOL):
    """Orthonormalize symmetric generators by modified Gram-Schmidt.

    Dependent generators (residual norm below ``drop_tol`` times the largest
    generator norm) are dropped.  Raises DomainError when every generator is
    numerically zero.
    """
    mats = [as_sym(g) for g in generators]
    if not mats:
        raise DomainError("cannot build a subspace from no generators")
    n = mats[0].shape[0]
    for g in mats:
        if g.shape[0] != n:
            raise DomainError("generators have inconsistent dimensions")
    max_norm = max(frobenius(g) for g in mats)
    if max_norm <= 1e-12:
        raise DomainError("all generators are numerically zero")
    basis = []
    for g in mats:
        v = g.copy()
        # Two orthogonalization passes keep the basis orthonormal to machine
        # precision even for badly conditioned generator sets.
        for _ in range(2):
            for b in basis:
                v -= tr_inner(v, b) * b
        nv = frobenius(v)
        if nv > drop_tol * max_norm:
            basis.append(v / nv)
    return Subspace(n=n, basis=np.stack(basis))


def project_trace(e, y):
    """Orthogonal projection of a symmetric matrix onto the subspace."""
    y = as_sym(y)
    if y.shape[0] != e.n:
        raise DomainError(f"matrix dimension {y.shape[0]} != subspace ambient {e.n}")
    if e.dim == 0:
        return np.zeros_like(y)
    coeffs = np.einsum("kab,ab->k", e.basis, y)
    return np.einsum("k,kab->ab", coeffs, e.basis)


def _sym_standard_basis(n):
    """Orthonormal basis of all symmetric n x n matrices."""
    out = []
    for i in range(n):
        m = np.zeros((n, n))
        m[i, i] = 1.0
        out.append(m)
    root_half = 1.0 / math.sqrt(2.0)
    for i in range(n):
        for j in range(i + 1, n):
            m = np.zeros((n, n))
            m[i, j] = root_half
            m[j, i] = root_half
            out.append(m)
    return out


def orthogonal_complement(e):
    """Orthogonal complement within the symmetric matrices.

    The complement of a full subspace is returned with dimension zero, which
    is the explicit "empty" flag.
    """
    full_dim = e.n * (e.n + 1) // 2
    basis = []
    for cand in _sym_standard_basis(e.n):
        v = cand - project_trace(e, cand)
        for _ in range(2):
            for b in basis:
                v -= tr_inner(v, b) * b
        nv = frobenius(v)
        if nv > _DROP_TOL:
            basis.append(v / nv)
    expected = full_dim - e.dim
    if len(basis) != expected:
        raise DomainError(
            f"complement dimension {len(basis)} != expected {expected}; "
            "input basis is not orthonormal enough"
        )
    stacked = np.stack(basis) if basis else np.zeros((0, e.n, e.n))
    return Subspace(n=e.n, basis=stacked)


@dataclass(frozen=True)
class LtsWitness:
    """A basis triple whose nested bracket leaves the subspace."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    residual: float
    off_component: np.ndarray  # part of [x, [y, z]] orthogonal to the subspace


@dataclass(frozen=True)
class LtsReport:
    is_lts: bool
    max_residual: float
    witness: Optional[LtsWitness]
    double_bracket_is_lts: bool
    double_bracket_residual: float
    tol: float


def lts_check(e, tol=1e-9):
    """Check whether nested brackets of basis elements stay in the subspace.

    Runs the full triple condition over all basis triples (which by
    bilinearity settles it for the whole subspace) and, independently, the
    double-bracket form together with its polarized combinations.  The
    verdict ``is_lts`` comes from the triple condition; the double-bracket
    verdict is reported alongside and must agree.
    """
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    cached = e._lts_cache.get(tol)
    if cached is not None:
        return cached

    k = e.dim
    if k == 0:
        report = LtsReport(True, 0.0, None, True, 0.0, tol)
        e._lts_cache[tol] = report
        return report

    b = e.basis
    norms = np.sqrt(np.einsum("kab,kab->k", b, b))
    # inner[j, k] = [B_j, B_k]
    inner = np.einsum("jab,kbc->jkac", b, b) - np.einsum("kab,jbc->jkac", b, b)
    # triple[i, j, k] = [B_i, [B_j, B_k]]
    triple = np.einsum("iab,jkbc->ijkac", b, inner) - np.einsum(
        "jkab,ibc->ijkac", inner, b
    )
    coeffs = np.einsum("ijkab,mab->ijkm", triple, b)
    off = triple - np.einsum("ijkm,mab->ijkab", coeffs, b)
    res = np.sqrt(np.einsum("ijkab,ijkab->ijk", off, off))
    scale = np.maximum(1.0, norms[:, None, None] * norms[None, :, None] * norms[None, None, :])
    rel = res / scale

    max_residual = float(rel.max())
    is_lts = max_residual <= tol
    witness = None
    if not is_lts:
        i, j, kk = np.unravel_index(int(np.argmax(rel)), rel.shape)
        witness = LtsWitness(
            x=b[i].copy(),
            y=b[j].copy(),
            z=b[kk].copy(),
            residual=float(rel[i, j, kk]),
            off_component=off[i, j, kk].copy(),
        )

    # Double-bracket form:  [B_i, [B_i, B_k]]  plus the polarized sums
    # [B_i, [B_j, B_k]] + [B_j, [B_i, B_k]]  for i < j.
    double_max = float(rel[np.arange(k), np.arange(k), :].max())
    if k > 1:
        polar = off + off.transpose(1, 0, 2, 3, 4)
        polar_res = np.sqrt(np.einsum("ijkab,ijkab->ijk", polar, polar))
        polar_scale = np.maximum(
            1.0,
            (norms[:, None] * norms[None, :])[:, :, None] * norms[None, None, :],
        )
        iu, ju = np.triu_indices(k, 1)
        double_max = max(double_max, float((polar_res / polar_scale)[iu, ju, :].max()))
    double_ok = double_max <= tol

    report = LtsReport(
        is_lts=is_lts,
        max_residual=max_residual,
        witness=witness,
        double_bracket_is_lts=double_ok,
        double_bracket_residual=double_max,
        tol=tol,
    )
    e._lts_cache[tol] = report
    return report


def multi_block_zero_diag_counterexample(num_blocks, block_size=1, tol=1e-9):
    """Bracket check for the zero-diagonal-block subspace with >= 3 blocks.

    With three or more diagonal blocks this subspace is not closed under
    nested brackets, so the report always comes back negative with a
    concrete witness triple.
    """
    if num_blocks < 3:
        raise DomainError("counterexample needs at least three blocks")
    if block_size < 1:
        raise DomainError("block size must be at least 1")
    sub = zero_diag_block_subspace([block_size] * num_blocks)
    return lts_check(sub, tol=tol)


# ---------------------------------------------------------------------------
# Ready-made subspaces


def diag_subspace(n):
    """All diagonal matrices."""
    if n < 1:
        raise DomainError("dimension must be at least 1")
    basis = np.zeros((n, n, n))
    for i in range(n):
        basis[i, i, i] = 1.0
    return Subspace(n=n, basis=basis)


def block_diag_subspace(sizes):
    """Symmetric matrices supported on the diagonal blocks of a partition."""
    sizes = _check_partition(sizes)
    n = sum(sizes)
    basis = []
    offset = 0
    root_half = 1.0 / math.sqrt(2.0)
    for s in sizes:
        for i in range(offset, offset + s):
            m = np.zeros((n, n))
            m[i, i] = 1.0
            basis.append(m)
            for j in range(i + 1, offset + s):
                m = np.zeros((n, n))
                m[i, j] = root_half
                m[j, i] = root_half
                basis.append(m)
        offset += s
    return Subspace(n=n, basis=np.stack(basis))


def block_antidiag_subspace(p, q):
    """Symmetric matrices with zero diagonal blocks for a two-block split."""
    if p < 1 or q < 1:
        raise DomainError("both blocks must be non-empty")
    n = p + q
    basis = np.zeros((p * q, n, n))
    root_half = 1.0 / math.sqrt(2.0)
    idx = 0
    for i in range(p):
        for j in range(q):
            basis[idx, i, p + j] = root_half
            basis[idx, p + j, i] = root_half
            idx += 1
    return Subspace(n=n, basis=basis)


def zero_diag_block_subspace(sizes):
    """Symmetric matrices whose diagonal blocks vanish, any number of blocks."""
    sizes = _check_partition(sizes)
    n = sum(sizes)
    starts = np.cumsum([0] + list(sizes))
    block_of = np.zeros(n, dtype=int)
    for bi in range(len(sizes)):
        block_of[starts[bi] : starts[bi + 1]] = bi
    basis = []
    root_half = 1.0 / math.sqrt(2.0)
    for i in range(n):
        for j in range(i + 1, n):
            if block_of[i] != block_of[j]:
                m = np.zeros((n, n))
                m[i, j] = root_half
                m[j, i] = root_half
                basis.append(m)
    if not basis:
        raise DomainError("partition leaves no off-block entries")
    return Subspace(n=n, basis=np.stack(basis))


def sl2_traceless_diag_subspace():
    """The span of diag(1, -1) inside the symmetric 2 x 2 matrices."""
    root_half = 1.0 / math.sqrt(2.0)
    basis = np.array([[[root_half, 0.0], [0.0, -root_half]]])
    return Subspace(n=2, basis=basis)


def _check_partition(sizes):
    sizes = [int(s) for s in sizes]
    if not sizes or any(s < 1 for s in sizes):
        raise DomainError(f"invalid block partition {sizes}")
    return sizes


# ---------------------------------------------------------------------------
# File format


def subspace_from_dict(obj):
    """Build a subspace from a parsed ``{"n": int, "generators": [...]}``."""
    if not isinstance(obj, dict) or "n" not in obj or "generators" not in obj:
        raise ParseError('subspace file must be {"n": int, "generators": [...]}')
    try:
        n = int(obj["n"])
        gens = [np.asarray(g, dtype=float) for g in obj["generators"]]
    except (TypeError, ValueError) as exc:
        raise ParseError(f"malformed subspace payload: {exc}") from exc
    for g in gens:
        if g.shape != (n, n):
            raise ParseError(
                f"generator shape {g.shape} does not match declared n={n}"
            )
    return build_subspace(gens)


def load_subspace(path):
    """Read a subspace from a JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read subspace file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in subspace file {path}: {exc}") from exc
    return subspace_from_dict(obj)
