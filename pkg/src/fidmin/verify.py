"""Randomized verification suites comparing independent MIN evaluation routes."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .closedform import eigen_bound, min_2xn, pure_min
from .measure import min_fidelity, min_hs
from .optimizer import OptimizerSettings
from .qlin import haar_unitary, purity
from .states import (
    BipartiteState,
    append_ancilla,
    classical_quantum_state,
    decompose,
    product_state,
    random_density_matrix,
    random_state,
    schmidt,
    state_vector,
    isotropic_state,
    unbias_qubit_marginal,
    werner_state,
)


@dataclass
class TrialOutcome:
    index: int
    ok: bool
    deviation: float
    detail: str = ""


@dataclass
class SuiteReport:
    name: str
    tolerance: float
    trials: list[TrialOutcome] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(t.ok for t in self.trials)

    @property
    def failures(self) -> int:
        return sum(not t.ok for t in self.trials)

    @property
    def worst(self) -> float:
        return max((t.deviation for t in self.trials), default=0.0)

    def lines(self):
        for t in self.trials:
            yield f"[{'PASS' if t.ok else 'FAIL'}] {self.name} trial {t.index}: deviation {t.deviation:.3e} {t.detail}".rstrip()
        yield (f"{self.name}: {len(self.trials) - self.failures}/{len(self.trials)} passed, "
               f"worst deviation {self.worst:.3e} (tolerance {self.tolerance:g})")


def _seed(seed: int, trial: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(seed), int(trial)])


def _pure(trial, rng, settings):
    m, n = (int(d) for d in rng.integers(2, 5, size=2))
    rho = random_state(m, n, 1, rng)
    theory = pure_min(schmidt(state_vector(rho), rho.dims))
    d_f = abs(theory - min_fidelity(rho, settings).value)
    d_hs = abs(theory - min_hs(rho, settings).value)
    return max(d_f, d_hs), f"{m}x{n} pure_formula={theory:.10f}"


def twoxn_state(trial: int, rng) -> tuple[BipartiteState, str]:
    """Cycle through full-rank, rank-deficient and zero-Bloch-vector 2 x n states."""
    n = 2 + trial % 2
    kind = (trial // 2) % 3
    rank = 2 * n if kind == 0 else int(rng.integers(1, 2 * n))
    rho = random_state(2, n, rank, rng)
    if kind == 2:
        rho = unbias_qubit_marginal(rho)
    return rho, f"2x{n} {['full-rank', 'rank-deficient', 'x=0'][kind]} rank<={rank}"


def _twoxn(trial, rng, settings):
    rho, label = twoxn_state(trial, rng)
    return abs(min_2xn(rho).value - min_fidelity(rho, settings).value), label


def _bound(trial, rng, settings):
    m, n = (int(d) for d in rng.integers(2, 4, size=2))
    rank = int(rng.integers(1, m * n + 1))
    rho = random_state(m, n, rank, rng)
    if trial % 10 == 9:
        x = float(rng.uniform(-1, 1))
        rho = werner_state(m, x) if x < 0 else isotropic_state(m, x)
        n = m
    elif m == 2 and trial % 4 == 3:
        rho = unbias_qubit_marginal(rho)
    direct = min_fidelity(rho, settings).value
    bound = eigen_bound(decompose(rho))
    # signed: positive means the bound is violated
    return direct - bound, f"{m}x{n} rank {rank} bound={bound:.8f} direct={direct:.8f}"


def _ancilla(trial, rng, settings):
    rho = random_state(2, 2, int(rng.integers(1, 5)), rng)
    if trial % 4 == 3:
        rho = unbias_qubit_marginal(rho)
    rho_c = random_density_matrix(2, 2, rng)
    big = append_ancilla(rho, rho_c)
    d_f = abs(min_fidelity(big, settings).value - min_fidelity(rho, settings).value)
    d_hs = abs(min_hs(big, settings).value - min_hs(rho, settings).value * purity(rho_c))
    return max(d_f, d_hs), f"dF={d_f:.2e} dHS={d_hs:.2e}"


def _unitary(trial, rng, settings):
    m, n = (int(d) for d in rng.integers(2, 4, size=2))
    rho = random_state(m, n, int(rng.integers(1, m * n + 1)), rng)
    if m == 2 and trial % 4 == 3:
        rho = unbias_qubit_marginal(rho)
    moved = rho.local_unitary(haar_unitary(m, rng), haar_unitary(n, rng))
    return abs(min_fidelity(moved, settings).value - min_fidelity(rho, settings).value), f"{m}x{n}"


def _nullity(trial, rng, settings):
    m, n = (int(d) for d in rng.integers(2, 4, size=2))
    if trial % 2 == 0:
        rho = product_state(random_density_matrix(m, None, rng), random_density_matrix(n, None, rng))
        label = f"product {m}x{n}"
    else:
        p = np.sort(rng.dirichlet(np.ones(m)))[::-1]
        rho = classical_quantum_state(p, [random_density_matrix(n, None, rng) for _ in range(m)])
        label = f"classical-quantum {m}x{n}"
    return min_fidelity(rho, settings).value, label


SUITES: dict[str, tuple[Callable, float]] = {
    "pure": (_pure, 1e-6),
    "twoxn": (_twoxn, 1e-7),
    "bound": (_bound, 1e-9),
    "ancilla": (_ancilla, 1e-7),
    "unitary": (_unitary, 1e-7),
    "nullity": (_nullity, 1e-9),
}


def run_suite(name: str, trials: int, seed: int = 0,
              settings: OptimizerSettings | None = None) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    check, tol = SUITES[name]
    settings = settings or OptimizerSettings(seed=seed)
    report = SuiteReport(name, tol)
    for t in range(trials):
        rng = np.random.default_rng(_seed(seed, t))
        dev, detail = check(t, rng, settings)
        report.trials.append(TrialOutcome(t, bool(dev <= tol), float(dev), detail))
    return report
