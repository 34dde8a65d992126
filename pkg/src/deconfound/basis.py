"""Orthonormal basis matrices and the forward/inverse analysis transform.

The basis matrix ``Phi`` holds one basis function per column, evaluated at the
n sample points, and is normalized so that ``(1/n) Phi.T @ Phi = I`` exactly
(orthonormality under the empirical inner product ``<u, v> = (1/n) sum u_l v_l``).
The analysis transform of a series ``v`` is ``(1/n) Phi.T @ v``; synthesis is
``Phi @ coeffs``.

Two basis families are provided:

* cosine — the type-II discrete cosine system,
  ``Phi[j, k] = c_k cos(pi k (j + 1/2) / n)`` with ``c_0 = 1`` and
  ``c_k = sqrt(2)`` for ``k >= 1`` (0-based ``j, k``).  Sampling the continuous
  cosine functions on a regular grid instead would violate discrete
  orthonormality at order 1/n, so the discrete system is used directly.
* haar — the full orthonormal Haar wavelet system (constant function plus all
  dyadic dilates and translates of the mother wavelet); requires n to be a
  power of two.

Frequency indices are 1-based everywhere in the public API: index 1 is the
constant (lowest-frequency) function.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigurationError


class BasisKind(str, enum.Enum):
    """Supported orthonormal basis families."""

    COSINE = "cosine"
    HAAR = "haar"


@dataclass(frozen=True)
class BasisMatrix:
    """An n x n basis matrix together with its construction metadata.

    The horizon is informational only: the discrete matrix does not depend on
    it, it merely fixes the physical spacing ``horizon / n`` of the samples.
    """

    kind: BasisKind
    n: int
    matrix: np.ndarray
    horizon: float = 1.0

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (self.n, self.n):
            raise ConfigurationError(
                f"basis matrix must be {self.n}x{self.n}, got {m.shape}"
            )


class OrthonormalityCheck(NamedTuple):
    """Result of an orthonormality diagnostic."""

    ok: bool
    max_deviation: float


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _cosine_matrix(n: int) -> np.ndarray:
    j = np.arange(n) + 0.5
    k = np.arange(n)
    m = np.cos(np.pi * np.outer(j, k) / n)
    m[:, 1:] *= np.sqrt(2.0)
    return m


def _haar_matrix(n: int) -> np.ndarray:
    m = np.empty((n, n))
    m[:, 0] = 1.0
    col = 1
    level = 0
    while (1 << level) < n:
        width = n >> level
        half = width // 2
        amp = 2.0 ** (level / 2.0)
        for q in range(1 << level):
            lo = q * width
            m[:, col] = 0.0
            m[lo : lo + half, col] = amp
            m[lo + half : lo + width, col] = -amp
            col += 1
        level += 1
    return m


def build_basis(kind: BasisKind, n: int, horizon: float = 1.0) -> BasisMatrix:
    """Construct the n-point basis matrix of the given kind.

    Parameters
    ----------
    kind : BasisKind
        Cosine or Haar.
    n : int
        Number of sample points (and basis functions). Haar requires a power
        of two.
    horizon : float
        Length of the observation window; metadata only.

    Raises
    ------
    ConfigurationError
        If ``n < 1``, or if ``kind`` is Haar and ``n`` is not a power of two.
    """
    kind = BasisKind(kind)
    if n < 1:
        raise ConfigurationError(f"sample count must be positive, got n={n}")
    if horizon <= 0:
        raise ConfigurationError(f"horizon must be positive, got {horizon}")
    if kind is BasisKind.HAAR:
        if not _is_power_of_two(n):
            raise ConfigurationError(
                f"the Haar basis requires the sample count to be a power of two, got n={n}"
            )
        m = _haar_matrix(n)
    else:
        m = _cosine_matrix(n)
    m.setflags(write=False)
    return BasisMatrix(kind=kind, n=n, matrix=m, horizon=horizon)


def _as_columns(series: np.ndarray, n: int, what: str) -> tuple[np.ndarray, bool]:
    arr = np.asarray(series, dtype=float)
    was_1d = arr.ndim == 1
    if was_1d:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] != n:
        raise ValueError(
            f"{what} must have {n} rows to match the basis, got shape {np.shape(series)}"
        )
    return arr, was_1d


def transform(series: np.ndarray, basis: BasisMatrix) -> np.ndarray:
    """Analysis transform: component k of the output is (1/n) sum_l v_l Phi[l, k].

    Accepts an (n,) vector or an (n, d) matrix (column-wise transform) and
    returns the same shape.
    """
    arr, was_1d = _as_columns(series, basis.n, "series")
    out = basis.matrix.T @ arr / basis.n
    return out[:, 0] if was_1d else out


def inverse_transform(freq: np.ndarray, basis: BasisMatrix) -> np.ndarray:
    """Synthesis transform ``Phi @ freq``; the left inverse of :func:`transform`."""
    arr, was_1d = _as_columns(freq, basis.n, "coefficients")
    out = basis.matrix @ arr
    return out[:, 0] if was_1d else out


def check_orthonormality(basis: BasisMatrix, tol: float = 1e-10) -> OrthonormalityCheck:
    """Check ``(1/n) Phi.T Phi = I`` entrywise within ``tol``.

    Returns the pass/fail flag together with the worst entrywise deviation,
    which is useful for diagnosing hand-built or corrupted matrices.
    """
    n = basis.n
    gram = basis.matrix.T @ basis.matrix / n
    dev = float(np.max(np.abs(gram - np.eye(n))))
    return OrthonormalityCheck(ok=dev <= tol, max_deviation=dev)


def basis_to_csv(basis: BasisMatrix, path) -> None:
    """Dump the matrix as ``j,k,value`` rows (1-based indices, row-major)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("j,k,value\n")
        for j in range(basis.n):
            row = basis.matrix[j]
            for k in range(basis.n):
                fh.write(f"{j + 1},{k + 1},{row[k]!r}\n")
