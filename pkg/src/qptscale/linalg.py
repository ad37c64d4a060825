"""Real symmetric linear algebra: dense eigendecomposition, a Lanczos
ground-state solver with full reorthogonalization, and spectral time
propagation of survival amplitudes.

Dense decompositions are delegated to LAPACK through ``numpy.linalg.eigh``;
the Lanczos path is implemented here so that large sparse Hamiltonians never
have to be densified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
import scipy.linalg
import scipy.sparse

from .errors import InputError, NumericError

DENSE_THRESHOLD_DEFAULT = 4096

ApplyLike = Union["SymmetricMatrix", np.ndarray, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class SymmetricMatrix:
    """Real symmetric matrix; only the upper triangle is authoritative.

    Exactly one storage is populated: ``dense`` holds a full square array
    (symmetrized from its upper triangle), or ``rows``/``cols``/``vals``
    hold sorted upper-triangle coordinates with ``rows <= cols``.
    """

    dim: int
    dense: np.ndarray | None = None
    rows: np.ndarray | None = None
    cols: np.ndarray | None = None
    vals: np.ndarray | None = None

    def __post_init__(self):
        if self.dim <= 0:
            raise InputError("matrix dimension must be positive")
        if (self.dense is None) == (self.vals is None):
            raise InputError("exactly one of dense or coordinate storage must be set")
        if self.dense is not None:
            if self.dense.shape != (self.dim, self.dim):
                raise InputError("dense storage shape does not match dim")
            if not np.all(np.isfinite(self.dense)):
                raise InputError("matrix entries must be finite")
        else:
            if not np.all(np.isfinite(self.vals)):
                raise InputError("matrix entries must be finite")
            if np.any(self.rows > self.cols):
                raise InputError("coordinate storage must satisfy row <= col")
            if np.any(self.rows < 0) or np.any(self.cols >= self.dim):
                raise InputError("coordinate indices out of range")
            object.__setattr__(self, "_csr", self._build_csr())

    @classmethod
    def from_dense(cls, a: np.ndarray) -> "SymmetricMatrix":
        """Wrap a square array; only its upper triangle is read."""
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InputError("expected a square 2-d array")
        upper = np.triu(a)
        full = upper + np.triu(a, 1).T
        return cls(dim=a.shape[0], dense=full)

    @classmethod
    def from_upper(cls, dim: int, rows, cols, vals) -> "SymmetricMatrix":
        """Build from upper-triangle coordinates; duplicates are summed."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=float)
        if not (rows.shape == cols.shape == vals.shape):
            raise InputError("rows, cols, vals must have equal length")
        if rows.size:
            key = rows * dim + cols
            uniq, inv = np.unique(key, return_inverse=True)
            vals = np.bincount(inv, weights=vals, minlength=uniq.size)
            rows = uniq // dim
            cols = uniq % dim
        return cls(dim=dim, rows=rows, cols=cols, vals=vals)

    def _build_csr(self):
        off = self.rows < self.cols
        r = np.concatenate([self.rows, self.cols[off]])
        c = np.concatenate([self.cols, self.rows[off]])
        v = np.concatenate([self.vals, self.vals[off]])
        return scipy.sparse.csr_matrix((v, (r, c)), shape=(self.dim, self.dim))

    @property
    def is_dense(self) -> bool:
        return self.dense is not None

    @property
    def nnz_upper(self) -> int:
        if self.is_dense:
            return int(np.count_nonzero(np.triu(self.dense)))
        return int(self.vals.size)

    def to_dense(self) -> np.ndarray:
        if self.is_dense:
            return self.dense.copy()
        a = np.zeros((self.dim, self.dim))
        a[self.rows, self.cols] = self.vals
        off = self.rows < self.cols
        a[self.cols[off], self.rows[off]] = self.vals[off]
        return a

    def matvec(self, x: np.ndarray) -> np.ndarray:
        if self.is_dense:
            return self.dense @ x
        return self._csr @ x

    def frobenius(self) -> float:
        if self.is_dense:
            return float(np.linalg.norm(self.dense))
        off = self.rows < self.cols
        return float(math.sqrt(np.sum(self.vals**2) + np.sum(self.vals[off] ** 2)))


@dataclass(frozen=True)
class EigenDecomposition:
    """Full spectrum of a real symmetric matrix, eigenvalues ascending."""

    values: np.ndarray
    vectors: np.ndarray

    def ground(self) -> tuple[float, np.ndarray]:
        return float(self.values[0]), self.vectors[:, 0]

    def validate(self, matrix: SymmetricMatrix | None = None, *,
                 ortho_tol: float = 1e-10, residual_tol: float = 1e-8) -> None:
        """Raise NumericError if ordering, orthonormality or residuals fail."""
        if np.any(np.diff(self.values) < 0):
            raise NumericError("eigenvalues are not non-decreasing")
        gram = self.vectors.T @ self.vectors
        dev = float(np.max(np.abs(gram - np.eye(gram.shape[0]))))
        if dev > ortho_tol:
            raise NumericError(f"eigenvector set not orthonormal: max deviation {dev:.3e}")
        if matrix is not None:
            scale = matrix.frobenius()
            resid = matrix.matvec(self.vectors) - self.vectors * self.values
            worst = float(np.max(np.linalg.norm(resid, axis=0)))
            if worst > residual_tol * max(scale, 1e-300):
                raise NumericError(
                    f"eigenpair residual {worst:.3e} exceeds {residual_tol:.1e} * |A|_F")


def _first_significant(v: np.ndarray, thresh: float) -> int:
    idx = np.nonzero(np.abs(v) > thresh)[0]
    return int(idx[0]) if idx.size else v.size


def _canonical_order(values: np.ndarray, vectors: np.ndarray, scale: float):
    """Deterministic post-pass: re-orthonormalize degenerate clusters, break
    exact ordering ties by first significant component, fix global signs."""
    n = values.size
    cluster_gap = 1e-10 * max(scale, 1.0)
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and values[stop] - values[stop - 1] < cluster_gap:
            stop += 1
        if stop - start > 1:
            block = vectors[:, start:stop]
            gram = block.T @ block
            if np.max(np.abs(gram - np.eye(stop - start))) > 1e-13:
                q, _ = np.linalg.qr(block)
                vectors[:, start:stop] = q
            # exact ties: order deterministically by leading support
            exact = np.nonzero(np.diff(values[start:stop]) == 0.0)[0]
            if exact.size:
                keys = [_first_significant(vectors[:, k], 1e-8) for k in range(start, stop)]
                order = np.argsort(np.asarray(keys), kind="stable")
                if np.all(values[start:stop][order] == values[start:stop]):
                    vectors[:, start:stop] = vectors[:, start:stop][:, order]
        start = stop
    for k in range(n):
        col = vectors[:, k]
        lead = _first_significant(col, 1e-8 * max(np.max(np.abs(col)), 1e-300))
        if lead < col.size and col[lead] < 0:
            vectors[:, k] = -col
    return values, vectors


def eigh_dense(matrix: SymmetricMatrix | np.ndarray, *,
               dense_threshold: int = DENSE_THRESHOLD_DEFAULT) -> EigenDecomposition:
    """Full eigendecomposition of a real symmetric matrix.

    The matrix must fit below ``dense_threshold``; larger problems belong to
    :func:`lanczos_ground`.
    """
    if isinstance(matrix, np.ndarray):
        matrix = SymmetricMatrix.from_dense(matrix)
    if matrix.dim > dense_threshold:
        raise InputError(
            f"dim {matrix.dim} exceeds dense threshold {dense_threshold}")
    a = matrix.to_dense()
    try:
        values, vectors = np.linalg.eigh(a)
    except np.linalg.LinAlgError as err:
        raise NumericError(f"dense eigensolver failed to converge: {err}") from err
    values, vectors = _canonical_order(values, vectors, matrix.frobenius())
    return EigenDecomposition(np.ascontiguousarray(values),
                              np.ascontiguousarray(vectors))


def _as_matvec(apply: ApplyLike, dim: int) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(apply, SymmetricMatrix):
        if apply.dim != dim:
            raise InputError("operator dimension does not match dim")
        return apply.matvec
    if isinstance(apply, np.ndarray):
        if apply.shape != (dim, dim):
            raise InputError("operator array shape does not match dim")
        return lambda x: apply @ x
    if callable(apply):
        return apply
    raise InputError("apply must be a SymmetricMatrix, ndarray or callable")


def _tridiag_ground(alphas: np.ndarray, betas: np.ndarray):
    w, v = scipy.linalg.eigh_tridiagonal(alphas, betas, select="i",
                                         select_range=(0, 0))
    return float(w[0]), v[:, 0]


def _lanczos_run(matvec, dim, start, tol, cap):
    v_basis = np.empty((dim, cap))
    alphas = np.empty(cap)
    betas = np.empty(cap)
    q = start / np.linalg.norm(start)
    q_prev = np.zeros(dim)
    beta_prev = 0.0
    theta = 0.0
    ritz = q
    for k in range(cap):
        v_basis[:, k] = q
        w = matvec(q)
        alpha = float(q @ w)
        alphas[k] = alpha
        w = w - alpha * q
        if k:
            w = w - beta_prev * q_prev
        # full reorthogonalization (two passes) against all Lanczos vectors
        basis = v_basis[:, :k + 1]
        w = w - basis @ (basis.T @ w)
        w = w - basis @ (basis.T @ w)
        beta = float(np.linalg.norm(w))
        theta, s = _tridiag_ground(alphas[:k + 1], betas[:k])
        resid = beta * abs(s[-1])
        normest = float(np.max(np.abs(alphas[:k + 1]))
                        + (np.max(np.abs(betas[:k])) if k else 0.0)) or 1.0
        ritz = basis @ s
        nrm = np.linalg.norm(ritz)
        if nrm > 0:
            ritz = ritz / nrm
        if resid <= tol * normest:
            return theta, ritz, resid, normest, "converged"
        if k == dim - 1:
            # Krylov space exhausted: tridiagonal problem is the full problem
            return theta, ritz, resid, normest, "converged"
        if beta <= 1e3 * np.finfo(float).eps * normest:
            return theta, ritz, resid, normest, "breakdown"
        betas[k] = beta
        q_prev = q
        q = w / beta
        beta_prev = beta
    return theta, ritz, resid, normest, "maxiter"


def lanczos_ground(apply: ApplyLike, dim: int, tol: float = 1e-10, *,
                   max_iter: int | None = None, seed: int = 0,
                   max_restarts: int = 3) -> tuple[float, np.ndarray]:
    """Lowest eigenpair of a real symmetric operator via Lanczos iteration.

    Parameters
    ----------
    apply : SymmetricMatrix, ndarray or callable
        Symmetric operator, or a matrix-vector oracle x -> A x.
    dim : int
        Operator dimension.
    tol : float
        Convergence threshold on the residual |A v - E v| relative to a
        Gershgorin estimate of |A|.
    max_iter, seed, max_restarts
        Iteration cap (default min(dim, 600)), RNG seed for the start
        vector, and number of perturbed restarts after a Krylov breakdown.

    Returns
    -------
    (energy, vector)
        Ritz value and unit-norm Ritz vector for the ground state.
    """
    if dim < 1:
        raise InputError("dim must be positive")
    if not tol > 0:
        raise InputError("tol must be positive")
    matvec = _as_matvec(apply, dim)
    if dim == 1:
        e = float(matvec(np.ones(1))[0])
        return e, np.ones(1)
    cap = int(max_iter) if max_iter else min(dim, 600)
    rng = np.random.default_rng(seed)
    start = rng.standard_normal(dim)
    best = None
    for _ in range(max_restarts + 1):
        theta, vector, resid, normest, status = _lanczos_run(matvec, dim, start, tol, cap)
        if status == "converged":
            lead = int(np.argmax(np.abs(vector)))
            if vector[lead] < 0:
                vector = -vector
            return theta, vector
        if best is None or resid < best[2]:
            best = (theta, vector, resid, normest)
        if status == "breakdown":
            start = vector + 0.05 * rng.standard_normal(dim)
        else:
            break
    raise NumericError(
        f"Lanczos did not converge within {cap} iterations: residual "
        f"{best[2]:.3e} vs bound {tol * best[3]:.3e}")


def spectral_propagate(decomp: EigenDecomposition, psi0: np.ndarray, t):
    """Survival amplitude <psi0| exp(-i H t) |psi0> from a full spectrum.

    ``t`` may be a scalar or an array; the amplitude is returned with the
    matching shape.
    """
    psi0 = np.asarray(psi0, dtype=float)
    if psi0.shape != (decomp.values.size,):
        raise InputError("state dimension does not match the decomposition")
    nrm = float(np.linalg.norm(psi0))
    if abs(nrm - 1.0) > 1e-6:
        raise InputError(f"psi0 must be unit norm (got {nrm:.8f})")
    weights = (decomp.vectors.T @ psi0) ** 2
    t_in = np.asarray(t, dtype=float)
    phases = np.exp(-1j * np.multiply.outer(np.atleast_1d(t_in), decomp.values))
    amp = phases @ weights
    if t_in.ndim == 0:
        return complex(amp[0])
    return amp
