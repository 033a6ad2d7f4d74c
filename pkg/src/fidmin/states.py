"""Bipartite density matrices, operator bases and the state families."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .qlin import (
    ATOL,
    DimensionError,
    as_matrix,
    hermitian_eig,
    hs_inner,
    is_hermitian,
    partial_trace,
    purity,
)


class InvalidStateError(ValueError):
    pass


def check_density_matrix(rho, tol: float = ATOL) -> np.ndarray:
    """Validate and return ``rho`` as a density matrix; raise naming the failed invariant."""
    try:
        rho = as_matrix(rho)
    except ValueError as exc:
        raise InvalidStateError(str(exc)) from exc
    scale = max(np.linalg.norm(rho), 1.0)
    if not is_hermitian(rho, tol):
        raise InvalidStateError("not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol * scale:
        raise InvalidStateError(f"trace is {np.trace(rho).real:.12g}, not 1")
    lam_min = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
    if lam_min < -tol:
        raise InvalidStateError(f"not positive semidefinite (smallest eigenvalue {lam_min:.3e})")
    return rho


@dataclass(frozen=True)
class BipartiteState:
    """Density matrix on C^m (x) C^n; party a is the outer tensor index."""

    dims: tuple[int, int]
    matrix: np.ndarray

    def __post_init__(self):
        m, n = (int(d) for d in self.dims)
        if m < 1 or n < 1:
            raise InvalidStateError(f"invalid dims {self.dims}")
        object.__setattr__(self, "dims", (m, n))
        mat = check_density_matrix(self.matrix)
        if mat.shape != (m * n, m * n):
            raise InvalidStateError(f"matrix shape {mat.shape} does not match dims {self.dims}")
        object.__setattr__(self, "matrix", mat)

    @property
    def m(self) -> int:
        return self.dims[0]

    @property
    def n(self) -> int:
        return self.dims[1]

    def marginal(self, keep="a") -> np.ndarray:
        return partial_trace(self.matrix, self.dims, keep)

    @cached_property
    def _purity(self) -> float:
        return purity(self.matrix)

    def purity(self) -> float:
        return self._purity

    def is_pure(self, tol: float = 1e-10) -> bool:
        return self.purity() >= 1.0 - tol

    def local_unitary(self, u, v) -> "BipartiteState":
        w = np.kron(as_matrix(u), as_matrix(v))
        return BipartiteState(self.dims, w @ self.matrix @ w.conj().T)


# --- operator bases -------------------------------------------------------


@dataclass(frozen=True)
class OperatorBasis:
    """Orthonormal Hermitian basis of d x d matrices, element 0 = I/sqrt(d)."""

    d: int
    elements: np.ndarray  # shape (d*d, d, d)

    def __len__(self):
        return len(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def gram(self) -> np.ndarray:
        flat = self.elements.reshape(len(self.elements), -1)
        return flat.conj() @ flat.T


def gell_mann_basis(d: int) -> OperatorBasis:
    """Normalized generalized Gell-Mann matrices prefixed by I/sqrt(d).

    Order after the identity: symmetric (j<k), antisymmetric (j<k), diagonal.
    """
    if d < 2:
        raise ValueError(f"basis dimension must be >= 2, got {d}")
    out = [np.eye(d, dtype=np.complex128) / np.sqrt(d)]
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    for j, k in pairs:
        g = np.zeros((d, d), dtype=np.complex128)
        g[j, k] = g[k, j] = 1 / np.sqrt(2)
        out.append(g)
    for j, k in pairs:
        g = np.zeros((d, d), dtype=np.complex128)
        g[j, k] = -1j / np.sqrt(2)
        g[k, j] = 1j / np.sqrt(2)
        out.append(g)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        out.append(np.diag(diag / np.sqrt(l * (l + 1))).astype(np.complex128))
    return OperatorBasis(d, np.array(out))


def rotated_basis(basis: OperatorBasis, orthogonal) -> OperatorBasis:
    """Mix the traceless elements of ``basis`` by a real orthogonal matrix.

    The result is again an orthonormal Hermitian basis with element 0 = I/sqrt(d).
    """
    o = np.asarray(orthogonal, dtype=float)
    k = len(basis) - 1
    if o.shape != (k, k):
        raise DimensionError(f"need a {k}x{k} orthogonal matrix")
    rest = np.einsum("ij,jab->iab", o, basis.elements[1:])
    return OperatorBasis(basis.d, np.concatenate([basis.elements[:1], rest]))


@dataclass(frozen=True)
class BlochDecomposition:
    gamma: np.ndarray  # real (m^2, n^2), gamma_ij = tr(rho X_i (x) Y_j)
    bloch_a: np.ndarray  # real (m^2 - 1,), coefficients of rho^a on X_1..
    basis_a: OperatorBasis
    basis_b: OperatorBasis

    @property
    def reduced(self) -> np.ndarray:
        """Gamma without the identity row (rows 1..m^2-1)."""
        return self.gamma[1:]

    @property
    def norm_sq(self) -> float:
        return float(np.sum(self.gamma**2))

    def reconstruct(self) -> np.ndarray:
        return np.einsum("ij,iab,jcd->acbd", self.gamma, self.basis_a.elements,
                         self.basis_b.elements).reshape(
            self.basis_a.d * self.basis_b.d, self.basis_a.d * self.basis_b.d)


def decompose(rho: BipartiteState, basis_a: OperatorBasis | None = None,
              basis_b: OperatorBasis | None = None) -> BlochDecomposition:
    m, n = rho.dims
    basis_a = basis_a if basis_a is not None else gell_mann_basis(m)
    basis_b = basis_b if basis_b is not None else gell_mann_basis(n)
    if basis_a.d != m or basis_b.d != n:
        raise DimensionError(f"bases of dimension ({basis_a.d}, {basis_b.d}) for dims {rho.dims}")
    r = rho.matrix.reshape(m, n, m, n)
    # tr(rho X_i (x) Y_j) = sum r[a,c,b,d] X_i[b,a] Y_j[d,c]
    g = np.einsum("acbd,iba,jdc->ij", r, basis_a.elements, basis_b.elements)
    if np.max(np.abs(g.imag), initial=0.0) > 1e-10:
        raise ValueError("correlation matrix has a non-negligible imaginary part")
    gamma = g.real
    return BlochDecomposition(gamma, np.sqrt(n) * gamma[1:, 0], basis_a, basis_b)


# --- pure states ----------------------------------------------------------


@dataclass(frozen=True)
class SchmidtDecomposition:
    coefficients: np.ndarray  # lambda_i, descending, sum to 1
    left: np.ndarray  # columns |alpha_i>
    right: np.ndarray  # columns |beta_i>

    def reconstruct(self) -> np.ndarray:
        return np.einsum("i,ai,bi->ab", np.sqrt(self.coefficients), self.left,
                         self.right).reshape(-1)


def schmidt(psi, dims: tuple[int, int], tol: float = ATOL) -> SchmidtDecomposition:
    psi = np.asarray(psi, dtype=np.complex128).reshape(-1)
    m, n = dims
    if psi.size != m * n:
        raise DimensionError(f"state of length {psi.size} does not match dims {dims}")
    if abs(np.linalg.norm(psi) - 1.0) > tol:
        raise InvalidStateError("state vector is not normalized")
    u, s, vh = np.linalg.svd(psi.reshape(m, n), full_matrices=False)
    return SchmidtDecomposition(s**2, u, vh.T)


def pure_state(psi, dims: tuple[int, int]) -> BipartiteState:
    psi = np.asarray(psi, dtype=np.complex128).reshape(-1)
    return BipartiteState(dims, np.outer(psi, psi.conj()))


def state_vector(rho: BipartiteState, tol: float = 1e-10) -> np.ndarray:
    """Dominant eigenvector of a pure density matrix."""
    if not rho.is_pure(tol):
        raise InvalidStateError("state is not pure")
    eig = hermitian_eig(rho.matrix)
    return eig.eigenvectors[:, -1]


def max_entangled_vector(m: int) -> np.ndarray:
    return np.eye(m, dtype=np.complex128).reshape(-1) / np.sqrt(m)


def bell_state() -> BipartiteState:
    return pure_state(max_entangled_vector(2), (2, 2))


def flip_operator(m: int) -> np.ndarray:
    f = np.zeros((m * m, m * m), dtype=np.complex128)
    for a in range(m):
        for b in range(m):
            f[a * m + b, b * m + a] = 1.0
    return f


# --- families -------------------------------------------------------------


def isotropic_state(m: int, x: float) -> BipartiteState:
    if m < 2:
        raise ValueError("m must be >= 2")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"isotropic parameter must lie in [0, 1], got {x}")
    psi = max_entangled_vector(m)
    d2 = m * m - 1
    mat = (1 - x) / d2 * np.eye(m * m) + (m * m * x - 1) / d2 * np.outer(psi, psi.conj())
    return BipartiteState((m, m), mat)


def werner_state(m: int, x: float) -> BipartiteState:
    if m < 2:
        raise ValueError("m must be >= 2")
    if not -1.0 <= x <= 1.0:
        raise ValueError(f"Werner parameter must lie in [-1, 1], got {x}")
    d3 = m**3 - m
    mat = (m - x) / d3 * np.eye(m * m) + (m * x - 1) / d3 * flip_operator(m)
    return BipartiteState((m, m), mat)


def random_state(m: int, n: int, rank: int | None = None, seed=None) -> BipartiteState:
    """Normalized G G^dagger with G an (mn) x rank complex Ginibre matrix.

    Uses ``numpy.random.default_rng(seed)`` (PCG64): the real parts of G are
    drawn first, then the imaginary parts, each in row-major order.
    """
    d = m * n
    rank = d if rank is None else rank
    if not 1 <= rank <= d:
        raise ValueError(f"rank must lie in [1, {d}], got {rank}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    w = g @ g.conj().T
    return BipartiteState((m, n), w / np.trace(w).real)


def random_pure_state(m: int, n: int, seed=None) -> BipartiteState:
    return random_state(m, n, 1, seed)


def random_density_matrix(d: int, rank: int | None = None, seed=None) -> np.ndarray:
    return random_state(d, 1, rank, seed).matrix


def product_state(rho_a, rho_b) -> BipartiteState:
    rho_a = check_density_matrix(rho_a)
    rho_b = check_density_matrix(rho_b)
    return BipartiteState((rho_a.shape[0], rho_b.shape[0]), np.kron(rho_a, rho_b))


def append_ancilla(rho: BipartiteState, rho_c) -> BipartiteState:
    """Return rho (x) rho_c regarded as an a:bc bipartite state."""
    rho_c = check_density_matrix(rho_c)
    k = rho_c.shape[0]
    return BipartiteState((rho.m, rho.n * k), np.kron(rho.matrix, rho_c))


def classical_quantum_state(probs: Sequence[float], blocks: Sequence) -> BipartiteState:
    """sum_i p_i |i><i| (x) rho_i with |i> the computational basis of party a."""
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or len(p) != len(blocks) or len(p) == 0:
        raise ValueError("need one probability per block")
    if np.any(p < 0) or abs(p.sum() - 1.0) > ATOL:
        raise ValueError("probabilities must be nonnegative and sum to 1")
    mats = [check_density_matrix(b) for b in blocks]
    n = mats[0].shape[0]
    if any(b.shape != (n, n) for b in mats):
        raise DimensionError("blocks must share one dimension")
    m = len(p)
    out = np.zeros((m * n, m * n), dtype=np.complex128)
    for i, (pi, b) in enumerate(zip(p, mats)):
        out[i * n:(i + 1) * n, i * n:(i + 1) * n] = pi * b
    return BipartiteState((m, n), out)



def unbias_qubit_marginal(rho: BipartiteState) -> BipartiteState:
    """Average rho with its image under a pi rotation of qubit a about an axis
    orthogonal to its Bloch vector.  The result has rho^a = I/2."""
    if rho.m != 2:
        raise ValueError("party a must be a qubit")
    ra = rho.marginal("a")
    bloch = np.real([ra[0, 1] + ra[1, 0], 1j * (ra[0, 1] - ra[1, 0]), ra[0, 0] - ra[1, 1]])
    helper = np.eye(3)[np.argmin(np.abs(bloch))]
    axis = np.cross(bloch, helper)
    if np.linalg.norm(axis) < 1e-14:
        axis = helper
    axis = axis / np.linalg.norm(axis)
    paulis = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]])
    w = np.kron(np.einsum("i,iab->ab", axis, paulis), np.eye(rho.n))
    return BipartiteState(rho.dims, 0.5 * (rho.matrix + w @ rho.matrix @ w.conj().T))
