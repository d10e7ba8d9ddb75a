"""Dense linear-algebra helpers shared by the rest of the package.

Everything here works on plain ``numpy`` arrays.  The eigensolver is a
Jacobi method with round-robin (tournament) pair ordering: each round applies
``m // 2`` disjoint plane rotations at once, so a sweep costs ``m - 1``
vectorised updates instead of ``m (m - 1) / 2`` scalar ones.

Random streams use numpy's PCG64 bit generator seeded through
``SeedSequence``; the stream for a given seed is identical on every platform
numpy supports, and ``substreams`` derives statistically independent child
generators for the separate stages of a pipeline.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, EmptyInput, NonConvergence

__all__ = [
    "EigenPairs",
    "as_data_matrix",
    "symmetrize",
    "sym_eigen",
    "quantile",
    "pca",
    "make_rng",
    "as_rng",
    "substreams",
]


def as_data_matrix(x, name: str = "x") -> np.ndarray:
    """Validate ``x`` as an ``n x d`` finite float matrix and return a float64 copy-free view."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise EmptyInput(f"{name} must have at least one row and one column, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DimensionError(f"{name} contains NaN or infinite entries")
    return arr


def symmetrize(a) -> np.ndarray:
    """Return a copy of ``a`` whose lower triangle mirrors its upper triangle exactly."""
    a = np.array(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    iu = np.triu_indices(a.shape[0], 1)
    a[(iu[1], iu[0])] = a[iu]
    return a


@dataclass(frozen=True)
class EigenPairs:
    """Eigenvalues in ascending order with matching orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray

    def __iter__(self):
        yield self.values
        yield self.vectors


def _tournament_orders(size: int) -> list[np.ndarray]:
    # Round-robin schedule over an even number of indices.  Each round is an
    # ordering in which positions (2i, 2i+1) hold one pair; across the
    # ``size - 1`` rounds every pair meets exactly once.
    players = list(range(size))
    half = size // 2
    orders = []
    for _ in range(size - 1):
        order = np.empty(size, dtype=np.intp)
        order[0::2] = players[:half]
        order[1::2] = players[half:][::-1]
        orders.append(order)
        players = [players[0], players[-1]] + players[1:-1]
    return orders


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    # Largest-magnitude entry of each column made nonnegative (first one on ties).
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _off_norm(a: np.ndarray) -> float:
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


# Above this order a Jacobi sweep is O(m^3) numpy passes; LAPACK takes over.
JACOBI_MAX_ORDER = 64


def sym_eigen(a, tol: float = 1e-12, max_sweeps: int = 60, method: str = "auto") -> EigenPairs:
    """Full eigendecomposition of a real symmetric matrix.

    Only the upper triangle of ``a`` is read.  Eigenvalues come back ascending
    and each eigenvector column has its largest-magnitude entry nonnegative.

    ``method`` is ``"jacobi"``, ``"lapack"`` (``numpy.linalg.eigh``) or
    ``"auto"``, which uses Jacobi up to order ``JACOBI_MAX_ORDER``.  Jacobi
    iteration stops once the off-diagonal Frobenius norm falls below
    ``0.1 * tol * max(1, ||a||_F)``, which bounds every eigenpair residual.

    Raises
    ------
    NonConvergence
        If ``max_sweeps`` Jacobi sweeps do not reach the tolerance.
    """
    work = symmetrize(a)
    m = work.shape[0]
    if m == 0:
        raise EmptyInput("matrix must have order >= 1")
    if not np.all(np.isfinite(work)):
        raise DimensionError("matrix contains NaN or infinite entries")
    if method not in ("auto", "jacobi", "lapack"):
        raise ValueError(f"unknown eigensolver {method!r}")
    if m == 1:
        return EigenPairs(work.diagonal().copy(), np.eye(1))
    if method == "lapack" or (method == "auto" and m > JACOBI_MAX_ORDER):
        try:
            values, vectors = np.linalg.eigh(work, UPLO="U")
        except np.linalg.LinAlgError as exc:
            raise NonConvergence(str(exc)) from exc
        order = np.argsort(values, kind="stable")
        return EigenPairs(values[order], _fix_signs(vectors[:, order]))

    norm = np.linalg.norm(work)
    target = 0.1 * tol * max(1.0, norm)

    # Pad to even order with a decoupled zero row/column; it never rotates.
    size = m + (m % 2)
    if size != m:
        padded = np.zeros((size, size))
        padded[:m, :m] = work
        work = padded
    half = size // 2
    orders = _tournament_orders(size)
    # Each round's matrix is kept permuted so pairs are adjacent; ``steps[r]``
    # maps round r's ordering to round r + 1's (wrapping to the first round).
    position = [np.argsort(o) for o in orders]
    steps = [position[r][orders[(r + 1) % len(orders)]] for r in range(len(orders))]

    current = orders[0]
    work = work[np.ix_(current, current)]
    vectors = np.eye(size)[:, current]
    diag_pairs = (np.arange(0, size, 2), np.arange(1, size, 2))
    converged = False

    for _ in range(max_sweeps):
        if _off_norm(work) <= target:
            converged = True
            break
        for r in range(len(orders)):
            apq = work[diag_pairs]
            app = work[diag_pairs[0], diag_pairs[0]]
            aqq = work[diag_pairs[1], diag_pairs[1]]
            nonzero = apq != 0.0
            theta = np.divide(aqq - app, 2.0 * apq, out=np.zeros(half), where=nonzero)
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
            t[~nonzero] = 0.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c

            rows = work.reshape(half, 2, size)
            rp = rows[:, 0, :].copy()
            rq = rows[:, 1, :]
            rows[:, 0, :] = c[:, None] * rp - s[:, None] * rq
            rows[:, 1, :] = s[:, None] * rp + c[:, None] * rq
            cols = work.reshape(size, half, 2)
            cp = cols[:, :, 0].copy()
            cq = cols[:, :, 1]
            cols[:, :, 0] = cp * c - cq * s
            cols[:, :, 1] = cp * s + cq * c
            work[diag_pairs] = 0.0
            work[diag_pairs[1], diag_pairs[0]] = 0.0

            vcols = vectors.reshape(size, half, 2)
            vp = vcols[:, :, 0].copy()
            vq = vcols[:, :, 1]
            vcols[:, :, 0] = vp * c - vq * s
            vcols[:, :, 1] = vp * s + vq * c

            step = steps[r]
            work = work[np.ix_(step, step)]
            vectors = vectors[:, step]
        work = 0.5 * (work + work.T)

    if not converged and _off_norm(work) > target:
        raise NonConvergence(
            f"Jacobi iteration did not converge in {max_sweeps} sweeps "
            f"(off-diagonal norm {_off_norm(work):.3e}, target {target:.3e})"
        )

    # Undo the round permutation and drop the padding index.
    back = np.argsort(current)
    work = work[np.ix_(back, back)][:m, :m]
    vectors = vectors[:, back][:m, :m]

    values = work.diagonal().copy()
    order = np.argsort(values, kind="stable")
    return EigenPairs(values[order], _fix_signs(vectors[:, order]))


def quantile(values, p):
    """Linear-interpolation quantile.

    With sorted values ``v`` and ``h = p * (len(v) - 1)``, returns
    ``v[floor(h)] + (h - floor(h)) * (v[ceil(h)] - v[floor(h)])``.
    ``p`` may be a scalar or a sequence of fractions.
    """
    v = np.sort(np.asarray(values, dtype=np.float64).ravel())
    if v.size == 0:
        raise EmptyInput("quantile of an empty list")
    if not np.all(np.isfinite(v)):
        raise DimensionError("quantile input contains NaN or infinite entries")
    ps = np.asarray(p, dtype=np.float64)
    if np.any((ps < 0) | (ps > 1)):
        raise ValueError("quantile fraction must lie in [0, 1]")
    h = ps * (v.size - 1)
    lo = np.floor(h).astype(np.intp)
    hi = np.ceil(h).astype(np.intp)
    out = v[lo] + (h - lo) * (v[hi] - v[lo])
    return float(out) if out.ndim == 0 else out


def pca(x, h: int) -> np.ndarray:
    """Project mean-centred rows of ``x`` onto the top ``h`` principal directions."""
    x = as_data_matrix(x)
    n, d = x.shape
    if not 1 <= h <= min(n, d):
        raise DimensionError(f"target dimension must lie in [1, {min(n, d)}], got {h}")
    centered = x - x.mean(axis=0)
    cov = centered.T @ centered / max(n - 1, 1)
    values, vectors = sym_eigen(cov)
    top = vectors[:, ::-1][:, :h]
    return centered @ top


def make_rng(seed: int | None) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def as_rng(rng) -> np.random.Generator:
    """Accept a Generator, an integer seed, or ``None``."""
    if isinstance(rng, np.random.Generator):
        return rng
    return make_rng(rng)


def substreams(seed, count: int) -> list[np.random.Generator]:
    """Independent child generators derived from one seed, one per pipeline stage."""
    if isinstance(seed, np.random.Generator):
        return list(seed.spawn(count))
    children: Sequence[np.random.SeedSequence] = np.random.SeedSequence(seed).spawn(count)
    return [np.random.Generator(np.random.PCG64(c)) for c in children]
