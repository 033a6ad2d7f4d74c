"""Fidelity functional, local projective measurements and direct MIN evaluation.

Only measurements on party ``a`` that leave the marginal ``rho^a`` invariant
are admissible.  Every admissible measurement is a basis whose vectors each lie
in one eigenspace of ``rho^a``; :class:`InvariantMeasurementFamily` enumerates
them as one unitary per degenerate eigenspace.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .optimizer import BlockUnitaryPoint, OptimizerSettings, extremize
from .qlin import DimensionError, as_matrix, hermitian_eig, purity
from .states import BipartiteState

DEGENERACY_TOL = 1e-8


def _mat(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, BipartiteState) else as_matrix(rho)


def superfidelity(rho, sigma) -> float:
    """(tr rho sigma)^2 / (tr rho^2 tr sigma^2)."""
    a, b = _mat(rho), _mat(sigma)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    overlap = np.real(np.vdot(a, b))  # tr(a^dagger b) = tr(a b) for Hermitian a
    return float(overlap**2 / (purity(a) * purity(b)))


def sine_metric_sq(rho, sigma) -> float:
    return 1.0 - superfidelity(rho, sigma)


# --- measurements ---------------------------------------------------------


@dataclass(frozen=True)
class ProjectiveMeasurement:
    """Rank-1 von Neumann measurement; ``vectors[:, k]`` is ``|k>``."""

    vectors: np.ndarray

    def __post_init__(self):
        v = as_matrix(self.vectors)
        if np.linalg.norm(v.conj().T @ v - np.eye(v.shape[0])) > 1e-10:
            raise ValueError("measurement vectors are not orthonormal")
        object.__setattr__(self, "vectors", v)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def projectors(self) -> np.ndarray:
        v = self.vectors
        return np.einsum("ak,bk->kab", v, v.conj())

    def canonical(self, order=None) -> "ProjectiveMeasurement":
        """Fix ordering and phases; ``order`` gives a primary sort key per vector."""
        v = self.vectors.copy()
        primary = np.zeros(self.dim) if order is None else np.asarray(order)
        lead = np.argmax(np.round(np.abs(v), 9), axis=0)
        for k in range(self.dim):
            nz = np.flatnonzero(np.abs(v[:, k]) > 1e-12)
            ph = v[nz[0], k] / abs(v[nz[0], k])
            v[:, k] /= ph
        perm = np.lexsort((lead, primary))
        return ProjectiveMeasurement(v[:, perm])

    @classmethod
    def computational(cls, m: int) -> "ProjectiveMeasurement":
        return cls(np.eye(m, dtype=np.complex128))


def _conditional_blocks(rho: BipartiteState, vectors: np.ndarray) -> np.ndarray:
    """Unnormalized blocks (<k| (x) 1) rho (|k> (x) 1), shape (m, n, n)."""
    m, n = rho.dims
    left = (vectors.conj().T @ rho.matrix.reshape(m, -1)).reshape(m, n, m, n)
    both = left.transpose(0, 1, 3, 2) @ vectors  # [k, c, d, k']
    idx = np.arange(m)
    return both[idx, :, :, idx]


def apply_channel(rho: BipartiteState, measurement: ProjectiveMeasurement) -> BipartiteState:
    """sum_k (P_k (x) 1) rho (P_k (x) 1) with P_k = |k><k| on party a."""
    m, n = rho.dims
    if measurement.dim != m:
        raise DimensionError(f"measurement of dimension {measurement.dim} on party of dimension {m}")
    v = measurement.vectors
    blocks = _conditional_blocks(rho, v)
    out = np.einsum("ak,bk,kcd->acbd", v, v.conj(), blocks).reshape(m * n, m * n)
    return BipartiteState(rho.dims, out)


def post_measurement_purity(rho: BipartiteState, measurement: ProjectiveMeasurement) -> float:
    """tr(Pi(rho)^2), which also equals tr(rho Pi(rho))."""
    blocks = _conditional_blocks(rho, measurement.vectors)
    return float(np.real(np.einsum("kcd,kdc->", blocks, blocks)))


# --- invariant family -----------------------------------------------------


@dataclass(frozen=True)
class EigenCluster:
    value: float
    vectors: np.ndarray  # (m, multiplicity), orthonormal columns

    @property
    def multiplicity(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class InvariantMeasurementFamily:
    """Marginal-invariant measurements, clusters ordered by descending eigenvalue."""

    clusters: tuple[EigenCluster, ...]
    degeneracy_tol: float

    @property
    def dim(self) -> int:
        return sum(c.multiplicity for c in self.clusters)

    @property
    def block_dims(self) -> tuple[int, ...]:
        return tuple(c.multiplicity for c in self.clusters if c.multiplicity >= 2)

    @property
    def free_parameters(self) -> int:
        return sum(d * d for d in self.block_dims)

    def measurement(self, point: BlockUnitaryPoint | None = None) -> ProjectiveMeasurement:
        """Measurement induced by one unitary per degenerate cluster."""
        blocks = iter(point.blocks) if point is not None else iter(())
        cols = []
        for c in self.clusters:
            if c.multiplicity >= 2:
                u = next(blocks, None)
                cols.append(c.vectors if u is None else c.vectors @ u)
            else:
                cols.append(c.vectors)
        return ProjectiveMeasurement(np.hstack(cols))

    def cluster_order(self) -> np.ndarray:
        """Rank of each measurement vector's cluster (0 = largest eigenvalue)."""
        return np.concatenate([np.full(c.multiplicity, i) for i, c in enumerate(self.clusters)])

    def summary(self) -> list[tuple[float, int]]:
        return [(c.value, c.multiplicity) for c in self.clusters]


def invariant_family(rho: BipartiteState, degeneracy_tol: float = DEGENERACY_TOL
                     ) -> InvariantMeasurementFamily:
    """Cluster the spectrum of rho^a; consecutive gaps <= tol share a cluster."""
    eig = hermitian_eig(rho.marginal("a"))
    w = eig.eigenvalues[::-1]
    v = eig.eigenvectors[:, ::-1]
    groups = [[0]]
    for i in range(1, len(w)):
        if w[i - 1] - w[i] <= degeneracy_tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    clusters = tuple(EigenCluster(float(np.mean(w[g])), v[:, g]) for g in groups)
    return InvariantMeasurementFamily(clusters, degeneracy_tol)


def marginal_invariance_error(rho: BipartiteState, measurement: ProjectiveMeasurement) -> float:
    ra = rho.marginal("a")
    p = measurement.projectors()
    return float(np.linalg.norm(np.einsum("kab,bc,kcd->ad", p, ra, p) - ra))


# --- MIN evaluation -------------------------------------------------------


@dataclass
class MINResult:
    value: float
    measurement: ProjectiveMeasurement
    method: str  # direct | closed-form | bound | formula
    measure: str = "fidelity"  # fidelity | hs; the [0, 1] range applies to fidelity only
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.measure == "fidelity" and not -1e-10 <= self.value <= 1 + 1e-10:
            raise ValueError(f"fidelity MIN {self.value} outside [0, 1]")


StateObjective = Callable[[BipartiteState, ProjectiveMeasurement], float]


def fidelity_objective(rho: BipartiteState, measurement: ProjectiveMeasurement) -> float:
    """Squared sine metric between rho and Pi(rho), via tr(rho Pi(rho)) = tr(Pi(rho)^2)."""
    return 1.0 - post_measurement_purity(rho, measurement) / rho.purity()


def hs_objective(rho: BipartiteState, measurement: ProjectiveMeasurement) -> float:
    """||rho - Pi(rho)||_F^2 = tr(rho^2) - tr(Pi(rho)^2)."""
    return rho.purity() - post_measurement_purity(rho, measurement)


def min_generic(rho: BipartiteState, objective: StateObjective, maximize: bool = True,
                settings: OptimizerSettings = OptimizerSettings(),
                degeneracy_tol: float = DEGENERACY_TOL, measure: str = "fidelity",
                force_search: bool = False) -> MINResult:
    """Extremize ``objective(rho, Pi)`` over the marginal-invariant measurements."""
    family = invariant_family(rho, degeneracy_tol)
    sign = 1.0 if maximize else -1.0

    def f(point):
        return sign * objective(rho, family.measurement(point))

    res = extremize(f, family, settings, force_search=force_search)
    measurement = family.measurement(res.point).canonical(family.cluster_order())
    value = sign * res.value
    diagnostics = {
        "restarts": len(res.restart_values) if family.block_dims or force_search else 0,
        "restart_values": [sign * v for v in res.restart_values],
        "converged": res.converged,
        "iterations": res.iterations,
        "evaluations": res.evaluations,
        "clusters": family.summary(),
        "free_parameters": family.free_parameters,
        "degeneracy_tol": degeneracy_tol,
        "seed": settings.seed,
    }
    return MINResult(value, measurement, "direct", measure, diagnostics)


def min_fidelity(rho: BipartiteState, settings: OptimizerSettings = OptimizerSettings(),
                 degeneracy_tol: float = DEGENERACY_TOL, force_search: bool = False) -> MINResult:
    return min_generic(rho, fidelity_objective, True, settings, degeneracy_tol, "fidelity",
                       force_search)


def min_hs(rho: BipartiteState, settings: OptimizerSettings = OptimizerSettings(),
           degeneracy_tol: float = DEGENERACY_TOL) -> MINResult:
    return min_generic(rho, hs_objective, True, settings, degeneracy_tol, "hs")
