"""Robust linear regression under adversarial outliers.

Implements least squares with a pseudo-inverse fallback, hard thresholding,
the iterative hard-thresholding estimator (Torrent), exhaustive subset search
(BFS), and the subset spectral-ratio diagnostic used to certify when iterative
hard thresholding provably recovers the true coefficients.

Row indices in subsets are 1-based throughout, matching the frequency-index
convention of the rest of the package.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import FeasibilityError

SUBSET_ENUMERATION_CAP = 10_000_000


@dataclass(frozen=True)
class RegressionProblem:
    """An immutable (X, y) regression instance with finite entries.

    ``x`` is coerced to an (n, d) matrix (a 1-d input becomes a single
    column); ``y`` to an (n,) vector.
    """

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        # copy so marking the arrays read-only cannot affect caller-owned data
        x = np.array(self.x, dtype=float, copy=True)
        if x.ndim == 1:
            x = x[:, None]
        y = np.array(self.y, dtype=float, copy=True).ravel()
        if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
            raise ValueError(f"x must be a nonempty 2-d matrix, got shape {x.shape}")
        if y.shape[0] != x.shape[0]:
            raise ValueError(
                f"y must have one entry per row of x: {y.shape[0]} != {x.shape[0]}"
            )
        if not (np.isfinite(x).all() and np.isfinite(y).all()):
            raise ValueError("x and y must be finite (no NaN/Inf)")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]


@dataclass(frozen=True)
class RobustFit:
    """Result of a robust (or plain) regression fit.

    ``inliers`` is the final active set (1-based, sorted).  ``iterations`` is
    the number of least-squares refits performed; it is 0 for the one-shot
    methods (OLS, BFS).  ``converged`` is False only when the iteration cap
    was reached.
    """

    beta: np.ndarray
    inliers: np.ndarray
    iterations: int
    residual_norm: float
    converged: bool
    method: str


def _subset_to_indices(subset: Sequence[int] | np.ndarray, n: int) -> np.ndarray:
    idx = np.asarray(subset, dtype=int).ravel()
    if idx.size == 0:
        raise ValueError("subset must be non-empty")
    if idx.min() < 1 or idx.max() > n:
        raise ValueError(f"subset indices must lie in 1..{n}")
    return idx - 1


def _lstsq(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # rcond=None zeroes singular values below max(n, d) * eps * sigma_max,
    # which is exactly the rank rule we promise; the solution is the
    # minimum-norm (pseudo-inverse) one when rank deficient.
    return np.linalg.lstsq(x, y, rcond=None)[0]


def ols(problem: RegressionProblem, subset: Sequence[int] | None = None) -> np.ndarray:
    """Least-squares coefficients on the given row subset (default: all rows).

    Uses the Moore-Penrose pseudo-inverse solution when the subset design is
    rank deficient, so a degenerate subset yields the minimum-norm fit rather
    than an error.
    """
    if subset is None:
        rows = np.arange(problem.n)
    else:
        rows = _subset_to_indices(subset, problem.n)
    return _lstsq(problem.x[rows], problem.y[rows])


def hard_threshold(v: np.ndarray, a: int) -> np.ndarray:
    """Indices (1-based, ascending) of the ``a`` smallest entries of ``v``.

    Ties are broken toward the lower index (stable sort), which keeps the
    selection deterministic.
    """
    v = np.asarray(v, dtype=float).ravel()
    n = v.shape[0]
    if not 1 <= a <= n:
        raise ValueError(f"a must lie in 1..{n}, got {a}")
    order = np.argsort(v, kind="stable")[:a]
    order.sort()
    return order + 1


def resolve_count(a: float | int, n: int) -> int:
    """Turn a threshold given as a count or a fraction into a row count.

    An integral value is taken as an absolute count in ``1..n``; a float in
    (0, 1) is a fraction, converted as ``ceil(a * n)``.  ``1.0`` means all
    rows.
    """
    if isinstance(a, (int, np.integer)) or (isinstance(a, float) and a.is_integer() and a > 1):
        count = int(a)
    elif 0 < a <= 1:
        count = math.ceil(a * n) if a < 1 else n
    else:
        raise ValueError(f"threshold must be a count in 1..{n} or a fraction in (0,1], got {a}")
    if not 1 <= count <= n:
        raise ValueError(f"threshold count {count} out of range 1..{n}")
    return count


def torrent(
    problem: RegressionProblem, a: float | int, max_iter: int = 100
) -> RobustFit:
    """Iterative hard-thresholding regression.

    Starting from the full index set, alternate a least-squares fit on the
    current active set with reselection of the ``a`` rows of smallest absolute
    residual.  Stops at an active-set fixed point or as soon as the
    thresholded residual norm no longer strictly decreases; ``converged`` is
    False only if ``max_iter`` refits were exhausted first.

    Parameters
    ----------
    a : int or float
        Number of rows kept by each thresholding step, or a fraction of n
        (converted as ``ceil(a * n)``).
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    n, d = problem.n, problem.d
    a_count = resolve_count(a, n)
    if a_count < d:
        warnings.warn(
            f"threshold a={a_count} keeps fewer rows than the {d} coefficients; "
            "fits will be rank deficient",
            stacklevel=2,
        )
    x, y = problem.x, problem.y
    active = np.arange(1, n + 1)
    r_prev = float(np.linalg.norm(y))
    beta = np.zeros(d)
    converged = False
    iterations = 0
    while iterations < max_iter:
        iterations += 1
        rows = active - 1
        beta = _lstsq(x[rows], y[rows])
        v = np.abs(y - x @ beta)
        new_active = hard_threshold(v, a_count)
        r_new = float(np.linalg.norm(v[new_active - 1]))
        fixed_point = new_active.shape == active.shape and np.array_equal(new_active, active)
        active = new_active
        if fixed_point or r_new >= r_prev:
            converged = True
            break
        r_prev = r_new
    rows = active - 1
    residual_norm = float(np.linalg.norm(y[rows] - x[rows] @ beta))
    return RobustFit(
        beta=beta,
        inliers=active,
        iterations=iterations,
        residual_norm=residual_norm,
        converged=converged,
        method="Torrent",
    )


def candidate_sets_all_of_size(
    n: int, size: int, cap: int = SUBSET_ENUMERATION_CAP
) -> list[tuple[int, ...]]:
    """All subsets of {1, ..., n} of the given size, in lexicographic order.

    Raises
    ------
    FeasibilityError
        If ``C(n, size)`` exceeds ``cap``; exhaustive search is hopeless then
        and an iterative method (torrent) should be used instead.
    """
    if not 1 <= size <= n:
        raise ValueError(f"size must lie in 1..{n}, got {size}")
    count = math.comb(n, size)
    if count > cap:
        raise FeasibilityError(
            f"C({n},{size}) = {count} candidate sets exceeds the cap of {cap}; "
            "use torrent instead of exhaustive search"
        )
    return list(combinations(range(1, n + 1), size))


def _bfs_vectorized_1d(
    x: np.ndarray, y: np.ndarray, sets: np.ndarray
) -> tuple[int, np.ndarray, float]:
    """Single-covariate fast path: evaluate every candidate set in one batch."""
    xs = x[sets, 0]
    ys = y[sets]
    sxx = np.einsum("ij,ij->i", xs, xs)
    sxy = np.einsum("ij,ij->i", xs, ys)
    with np.errstate(divide="ignore", invalid="ignore"):
        beta = np.where(sxx > 0, sxy / np.where(sxx > 0, sxx, 1.0), 0.0)
    resid = ys - xs * beta[:, None]
    errs = np.mean(resid * resid, axis=1)
    best = int(np.argmin(errs))
    return best, np.array([beta[best]]), float(errs[best])


def bfs(
    problem: RegressionProblem,
    candidate_sets: Iterable[Sequence[int]],
) -> RobustFit:
    """Exhaustive search: fit each candidate inlier set, keep the best.

    Each candidate set S is scored by the per-row mean squared residual of its
    own least-squares fit, ``err(S) = |S|^-1 ||y_S - X_S beta_S||^2``; the
    first set attaining the strictly smallest error wins, so the result is
    deterministic in the iteration order of ``candidate_sets``.
    """
    sets = [np.asarray(s, dtype=int).ravel() for s in candidate_sets]
    if not sets:
        raise ValueError("candidate_sets must be non-empty")
    n = problem.n
    for s in sets:
        if s.size == 0:
            raise ValueError("candidate sets must be non-empty")
        if s.min() < 1 or s.max() > n:
            raise ValueError(f"candidate set indices must lie in 1..{n}")
    x, y = problem.x, problem.y

    uniform = len({s.size for s in sets}) == 1
    if uniform and problem.d == 1:
        idx = np.vstack(sets) - 1
        best, beta, _ = _bfs_vectorized_1d(x, y, idx)
    else:
        best, beta, best_err = -1, np.zeros(problem.d), np.inf
        for i, s in enumerate(sets):
            rows = s - 1
            b = _lstsq(x[rows], y[rows])
            r = y[rows] - x[rows] @ b
            err = float(r @ r / rows.size)
            if err < best_err:
                best, beta, best_err = i, b, err
    winner = np.sort(sets[best])
    rows = winner - 1
    residual_norm = float(np.linalg.norm(y[rows] - x[rows] @ beta))
    return RobustFit(
        beta=beta,
        inliers=winner,
        iterations=0,
        residual_norm=residual_norm,
        converged=True,
        method="BFS",
    )


def eta_condition(
    problem: RegressionProblem,
    a: int,
    inliers: Sequence[int],
    cap: int = SUBSET_ENUMERATION_CAP,
) -> float:
    """Worst-case subset spectral ratio against a known inlier set.

    For every subset S of size ``a``, compute
    ``||X_V(S)||_2 / sqrt(lambda_min(X_S^T X_S))`` where ``V(S)`` is the
    symmetric difference between S and the supplied inlier set, and return the
    maximum.  Values below ``1/sqrt(2)`` certify recovery for the iterative
    hard-thresholding estimator.  Returns ``inf`` if any subset design is
    singular.

    This needs the true inlier set, so it is a simulation-only diagnostic.
    """
    n, d = problem.n, problem.d
    a_count = resolve_count(a, n)
    count = math.comb(n, a_count)
    if count > cap:
        raise FeasibilityError(
            f"C({n},{a_count}) = {count} subsets exceeds the cap of {cap}"
        )
    inl = np.unique(np.asarray(inliers, dtype=int).ravel())
    if inl.size and (inl.min() < 1 or inl.max() > n):
        raise ValueError(f"inlier indices must lie in 1..{n}")
    x = problem.x
    worst = 0.0
    for subset in combinations(range(1, n + 1), a_count):
        s = np.asarray(subset, dtype=int)
        xs = x[s - 1]
        gram = xs.T @ xs
        eigs = np.linalg.eigvalsh(gram)
        lam_min, lam_max = float(eigs[0]), float(eigs[-1])
        if lam_max <= 0.0 or lam_min <= lam_max * max(a_count, d) * np.finfo(float).eps:
            return float("inf")
        v = np.setxor1d(s, inl)
        if v.size == 0:
            ratio = 0.0
        else:
            ratio = float(np.linalg.norm(x[v - 1], 2) / math.sqrt(lam_min))
        worst = max(worst, ratio)
    return worst
