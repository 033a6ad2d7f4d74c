"""Fidelity-based measurement-induced nonlocality of bipartite states."""
from .closedform import (
    eigen_bound,
    hs_min_closed_2xn,
    isotropic_min_formula,
    min_2xn,
    pure_min,
    werner_min_formula,
)
from .measure import (
    MINResult,
    ProjectiveMeasurement,
    apply_channel,
    invariant_family,
    min_fidelity,
    min_generic,
    min_hs,
    sine_metric_sq,
    superfidelity,
)
from .optimizer import OptimizerSettings
from .states import (
    BipartiteState,
    append_ancilla,
    classical_quantum_state,
    decompose,
    gell_mann_basis,
    isotropic_state,
    random_state,
    schmidt,
    werner_state,
)

__all__ = [name for name in dir() if not name.startswith("_")]
