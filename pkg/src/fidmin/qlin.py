"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Tolerances are
relative to the Frobenius norm of the input unless stated otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

ATOL = 1e-10


class DimensionError(ValueError):
    pass


class NotHermitianError(ValueError):
    pass


def as_matrix(a, square: bool = True) -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex array."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {arr.shape}")
    if square and arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def fro_norm(a) -> float:
    return float(np.linalg.norm(a))


def is_hermitian(a, tol: float = ATOL) -> bool:
    a = np.asarray(a)
    return fro_norm(a - a.conj().T) <= tol * max(fro_norm(a), 1.0)


def dagger(a) -> np.ndarray:
    return np.asarray(a).conj().T


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product with the first factor as the outer (slow) index."""
    return np.kron(as_matrix(a, square=False), as_matrix(b, square=False))


def partial_trace(rho, dims: tuple[int, int], keep: Literal["a", "b"] = "a") -> np.ndarray:
    """Reduce a bipartite operator to party ``a`` or party ``b``."""
    rho = as_matrix(rho)
    m, n = dims
    if rho.shape != (m * n, m * n):
        raise DimensionError(f"operator of shape {rho.shape} does not match dims {dims}")
    r = rho.reshape(m, n, m, n)
    if keep == "a":
        return np.einsum("ijkj->ik", r)
    if keep == "b":
        return np.einsum("ijil->jl", r)
    raise ValueError(f"keep must be 'a' or 'b', got {keep!r}")


@dataclass(frozen=True)
class HermitianEigenResult:
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # columns


def hermitian_eig(a, tol: float = ATOL) -> HermitianEigenResult:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    The input is symmetrized before solving, but an asymmetry larger than
    ``tol * ||a||_F`` raises :class:`NotHermitianError`.
    """
    a = as_matrix(a)
    if not is_hermitian(a, tol):
        raise NotHermitianError("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
    return HermitianEigenResult(w, v)


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product tr(a^dagger b)."""
    a = as_matrix(a, square=False)
    b = as_matrix(b, square=False)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def purity(rho) -> float:
    """tr(rho^2) for Hermitian rho."""
    rho = as_matrix(rho)
    return float(np.real(np.vdot(rho.conj().T, rho)))


def haar_unitary(d: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Haar-random unitary: QR of a complex Ginibre matrix with phase-fixed R.

    With ``size`` a stack of ``size`` independent unitaries is returned.
    """
    shape = (d, d) if size is None else (size, d, d)
    z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (diag / np.abs(diag))[..., None, :]
