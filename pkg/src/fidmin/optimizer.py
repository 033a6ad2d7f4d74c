"""Search over unitaries acting inside degenerate eigenspaces.

A point is one unitary per block; the objective is always *maximized*.
Local refinement is a derivative-free compass search: each move right-multiplies
one block by ``exp(i t G)`` for an off-diagonal Hermitian generator ``G``.
Diagonal generators are skipped because they only rephase basis vectors.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .qlin import haar_unitary

_REFINE_STREAM = 0
_ORACLE_STREAM = 1
_ORACLE_CHUNK = 256


@dataclass(frozen=True)
class OptimizerSettings:
    restarts: int = 24
    max_iterations: int = 500
    tol: float = 1e-10
    seed: int = 0
    oracle_samples: int = 20000
    initial_step: float = 0.5

    def __post_init__(self):
        if min(self.restarts, self.max_iterations, self.oracle_samples) < 1:
            raise ValueError("optimizer counts must be positive")
        if self.tol <= 0 or self.initial_step <= 0:
            raise ValueError("tolerance and step must be positive")

    @property
    def min_step(self) -> float:
        # objective error scales with step**2 near a smooth optimum
        return float(np.sqrt(self.tol))


@dataclass(frozen=True)
class BlockUnitaryPoint:
    blocks: tuple[np.ndarray, ...] = ()

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(b.shape[0] for b in self.blocks)

    def replace(self, index: int, block: np.ndarray) -> "BlockUnitaryPoint":
        blocks = list(self.blocks)
        blocks[index] = block
        return BlockUnitaryPoint(tuple(blocks))

    @classmethod
    def identity(cls, dims: Sequence[int]) -> "BlockUnitaryPoint":
        return cls(tuple(np.eye(d, dtype=np.complex128) for d in dims))


@dataclass
class ExtremizeResult:
    point: BlockUnitaryPoint
    value: float
    restart_values: list[float] = field(default_factory=list)
    converged: bool = True
    iterations: int = 0
    evaluations: int = 0


Objective = Callable[[BlockUnitaryPoint], float]


def _block_dims(family) -> tuple[int, ...]:
    if hasattr(family, "block_dims"):
        return tuple(family.block_dims)
    return tuple(family)


def rng_stream(seed: int, index: int, stream: int = _REFINE_STREAM) -> np.random.Generator:
    """Independent generator for restart ``index`` of a run seeded with ``seed``."""
    return np.random.default_rng([stream, int(seed), int(index)])


def haar_block_sample(family, seed) -> BlockUnitaryPoint:
    """Independent Haar unitary for every degenerate block of ``family``.

    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return BlockUnitaryPoint(tuple(haar_unitary(d, rng) for d in _block_dims(family)))


@lru_cache(maxsize=None)
def _generators(d: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Eigendecompositions (w, V) of the off-diagonal Hermitian generators."""
    out = []
    for j in range(d):
        for k in range(j + 1, d):
            for entry in (1.0, -1j):
                g = np.zeros((d, d), dtype=np.complex128)
                g[j, k] = entry
                g[k, j] = np.conj(entry)
                w, v = np.linalg.eigh(g)
                out.append((w, v))
    return tuple(out)


def _rotate(u: np.ndarray, gen, t: float) -> np.ndarray:
    w, v = gen
    return u @ ((v * np.exp(1j * t * w)) @ v.conj().T)


def _checked(objective: Objective, point: BlockUnitaryPoint) -> float:
    val = float(objective(point))
    if not np.isfinite(val):
        raise ValueError("objective returned a non-finite value")
    return val


def local_refine(objective: Objective, start: BlockUnitaryPoint,
                 settings: OptimizerSettings = OptimizerSettings()):
    """Compass search from ``start``; returns ``(point, value, info)``.

    Accepted moves strictly increase the objective, so the value sequence is
    monotone.  The step grows by 1.5 after a successful sweep and halves after
    a failed one; the search stops once it drops below ``settings.min_step``.
    """
    point = start
    value = _checked(objective, point)
    info = {"iterations": 0, "improving_iterations": 0, "evaluations": 1, "converged": True}
    moves = [(b, gen) for b, d in enumerate(point.dims) for gen in _generators(d)]
    if not moves:
        return point, value, info
    step = settings.initial_step
    info["converged"] = False
    while info["iterations"] < settings.max_iterations:
        info["iterations"] += 1
        improved = False
        for b, gen in moves:
            for sign in (1.0, -1.0):
                trial = point.replace(b, _rotate(point.blocks[b], gen, sign * step))
                tv = _checked(objective, trial)
                info["evaluations"] += 1
                if tv > value + settings.tol * 1e-3:
                    point, value, improved = trial, tv, True
                    break
        if improved:
            info["improving_iterations"] += 1
            step = min(step * 1.5, np.pi)
        else:
            step *= 0.5
            if step < settings.min_step:
                info["converged"] = True
                break
    return point, value, info


def extremize(objective: Objective, family, settings: OptimizerSettings = OptimizerSettings(),
              force_search: bool = False) -> ExtremizeResult:
    """Best of ``settings.restarts`` Haar starts, each locally refined.

    A family without degenerate blocks is evaluated once, exactly, unless
    ``force_search`` is set.  Ties are resolved towards the lowest restart index.
    """
    dims = _block_dims(family)
    if not dims and not force_search:
        point = BlockUnitaryPoint()
        val = _checked(objective, point)
        return ExtremizeResult(point, val, [val], True, 0, 1)
    best = None
    values = []
    converged = True
    iterations = evaluations = 0
    for r in range(settings.restarts):
        start = haar_block_sample(dims, rng_stream(settings.seed, r))
        point, val, info = local_refine(objective, start, settings)
        values.append(val)
        converged &= info["converged"]
        iterations += info["iterations"]
        evaluations += info["evaluations"]
        if best is None or val > best[1]:
            best = (point, val)
    return ExtremizeResult(best[0], best[1], values, converged, iterations, evaluations)


def oracle_sample(objective: Objective, family,
                  settings: OptimizerSettings = OptimizerSettings()) -> float:
    """Best objective over ``settings.oracle_samples`` Haar points, no refinement."""
    dims = _block_dims(family)
    if not dims:
        return _checked(objective, BlockUnitaryPoint())
    rng = rng_stream(settings.seed, 0, _ORACLE_STREAM)
    best = -np.inf
    done = 0
    while done < settings.oracle_samples:
        # fixed chunking keeps every sample prefix identical across sample counts
        stacks = [haar_unitary(d, rng, _ORACLE_CHUNK) for d in dims]
        take = min(_ORACLE_CHUNK, settings.oracle_samples - done)
        for i in range(take):
            point = BlockUnitaryPoint(tuple(s[i] for s in stacks))
            best = max(best, _checked(objective, point))
        done += take
    return best
