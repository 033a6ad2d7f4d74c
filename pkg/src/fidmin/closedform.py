"""Analytic MIN evaluators and the eigenvalue upper bound.

Notation: ``Gamma`` is the correlation matrix over product operator bases,
``g0`` its identity row, ``Gamma_r`` the remaining rows.  For a measurement
with coefficient matrix ``A`` (``a_ki = <k|X_i|k>``)::

    tr Pi(rho)^2 = ||A Gamma||^2 = ||g0||^2 + ||A_r Gamma_r||^2

because the traceless columns of ``A`` sum to zero.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measure import MINResult, ProjectiveMeasurement
from .states import (
    BipartiteState,
    BlochDecomposition,
    OperatorBasis,
    SchmidtDecomposition,
    decompose,
    gell_mann_basis,
)

ZERO_BLOCH_TOL = 1e-8


class MethodNotApplicable(ValueError):
    pass


def pure_min(schmidt: SchmidtDecomposition) -> float:
    lam = np.asarray(schmidt.coefficients, dtype=float)
    return float(1.0 - np.sum(lam**2))


def measurement_coefficients(measurement: ProjectiveMeasurement, basis: OperatorBasis) -> np.ndarray:
    """Real m x m^2 matrix a_ki = tr(|k><k| X_i)."""
    v = measurement.vectors
    return np.real(np.einsum("ak,iab,bk->ki", v.conj(), basis.elements, v))


@dataclass(frozen=True)
class ClosedFormIntermediates:
    A: np.ndarray
    mu: np.ndarray  # ascending eigenvalues of Gamma Gamma^t
    mu_reduced: np.ndarray  # ascending eigenvalues of Gamma_r Gamma_r^t
    epsilon: float  # tr(A Gamma Gamma^t A^t)
    gamma_norm_sq: float


def intermediates(dec: BlochDecomposition, measurement: ProjectiveMeasurement) -> ClosedFormIntermediates:
    gamma = dec.gamma
    a = measurement_coefficients(measurement, dec.basis_a)
    return ClosedFormIntermediates(
        A=a,
        mu=np.linalg.eigvalsh(gamma @ gamma.T),
        mu_reduced=np.linalg.eigvalsh(dec.reduced @ dec.reduced.T),
        epsilon=float(np.sum((a @ gamma) ** 2)),
        gamma_norm_sq=dec.norm_sq,
    )


def bound_readings(dec: BlochDecomposition) -> dict[str, float]:
    """Upper bound under the possible eigenvalue conventions.

    ``derived`` relaxes the traceless part of ``A`` to any (m-1) orthonormal
    rows and keeps the identity-row contribution; it is the one returned by
    :func:`eigen_bound`.  The others are reported for comparison only.
    """
    m = dec.basis_a.d
    g2 = dec.norm_sq
    mu = np.linalg.eigvalsh(dec.gamma @ dec.gamma.T)
    mu_r = np.linalg.eigvalsh(dec.reduced @ dec.reduced.T)
    g0 = float(np.sum(dec.gamma[0] ** 2))
    return {
        "derived": (g2 - g0 - mu_r[: m - 1].sum()) / g2,
        "full_drop_m_smallest": (g2 - mu[:m].sum()) / g2,
        "full_drop_m_minus_1_smallest_and_largest": (g2 - mu[: m - 1].sum() - mu[-1]) / g2,
        "reduced_without_identity_row": (g2 - mu_r[: m - 1].sum()) / g2,
    }


def eigen_bound(dec: BlochDecomposition, m: int | None = None) -> float:
    """Eigenvalue upper bound on the fidelity MIN of an m x n state."""
    if m is not None and m != dec.basis_a.d:
        raise ValueError(f"decomposition is for m={dec.basis_a.d}, not {m}")
    return float(bound_readings(dec)["derived"])


def _qubit_measurement(direction: np.ndarray, basis: OperatorBasis) -> ProjectiveMeasurement:
    """Eigenbasis of I/2 + sum_i n_i X_i / sqrt(2) for a unit Bloch direction n."""
    proj = np.eye(2) / 2 + np.einsum("i,iab->ab", direction, basis.elements[1:]) / np.sqrt(2)
    w, v = np.linalg.eigh(proj)
    return ProjectiveMeasurement(v[:, ::-1])


def _optimal_direction(dec: BlochDecomposition, zero_tol: float):
    x = dec.bloch_a
    xn = float(np.linalg.norm(x))
    if xn > zero_tol:
        return x / xn, False
    t = dec.reduced
    w, v = np.linalg.eigh(t @ t.T)
    return v[:, 0], True


def min_2xn(rho: BipartiteState, basis_a: OperatorBasis | None = None,
            basis_b: OperatorBasis | None = None, zero_tol: float = ZERO_BLOCH_TOL) -> MINResult:
    """Exact fidelity MIN of a 2 x n state.

    Nonzero Bloch vector: the marginal eigenbasis is the only admissible
    measurement.  Zero Bloch vector: every qubit basis is admissible and the
    optimum measures along the smallest-eigenvalue direction of Gamma_r Gamma_r^t.
    """
    if rho.m != 2:
        raise MethodNotApplicable(f"closed form needs m = 2, got m = {rho.m}")
    dec = decompose(rho, basis_a, basis_b)
    direction, degenerate = _optimal_direction(dec, zero_tol)
    meas = _qubit_measurement(direction, dec.basis_a)
    im = intermediates(dec, meas)
    g2 = im.gamma_norm_sq
    value = (g2 - im.epsilon) / g2
    diagnostics = {
        "branch": "x=0" if degenerate else "x!=0",
        "bloch_norm": float(np.linalg.norm(dec.bloch_a)),
        "epsilon": im.epsilon,
        "gamma_norm_sq": g2,
        "mu": im.mu.tolist(),
        "mu_reduced": im.mu_reduced.tolist(),
    }
    if degenerate:
        # the smallest-eigenvalue-only readings of the x = 0 branch
        diagnostics["reading_full_mu1"] = float((g2 - im.mu[0]) / g2)
        diagnostics["reading_reduced_mu1"] = float((g2 - im.mu_reduced[0]) / g2)
    return MINResult(float(value), meas, "closed-form", "fidelity", diagnostics)


def hs_min_closed_2xn(rho: BipartiteState, zero_tol: float = ZERO_BLOCH_TOL) -> float:
    """Hilbert-Schmidt MIN of a 2 x n state: ||T||^2 - n^t T T^t n.

    ``T`` is the traceless block of the correlation matrix and ``n`` the unit
    Bloch direction of rho^a (smallest eigenvector of T T^t when it vanishes).
    """
    if rho.m != 2:
        raise MethodNotApplicable(f"closed form needs m = 2, got m = {rho.m}")
    dec = decompose(rho)
    t = dec.reduced
    tt = t @ t.T
    x = dec.bloch_a
    xn = float(np.linalg.norm(x))
    if xn > zero_tol:
        return float(np.trace(tt) - x @ tt @ x / xn**2)
    return float(np.trace(tt) - np.linalg.eigvalsh(tt)[0])


# --- state families -------------------------------------------------------


def _check(m, x, lo, hi):
    if m < 2:
        raise ValueError("m must be >= 2")
    if not lo <= x <= hi:
        raise ValueError(f"parameter {x} outside [{lo}, {hi}]")


def isotropic_min_formula(m: int, x: float) -> float:
    _check(m, x, 0.0, 1.0)
    q = (m * m * x - 1) ** 2 / m
    return float(q / (m * (1 - x) ** 2 + (m - 1) / m * (1 + m * x) ** 2 + q))


def werner_min_formula(m: int, x: float) -> float:
    """Fidelity MIN of the m x m Werner state with tr(rho F) = x.

    With rho = a 1 + b F, any basis measurement gives ||rho - Pi(rho)||^2 =
    b^2 (m^2 - m) and tr rho^2 = a^2 m^2 + 2abm + b^2 m^2.
    """
    _check(m, x, -1.0, 1.0)
    p, q = m - x, m * x - 1
    return float((m - 1) * q**2 / (m * p**2 + 2 * p * q + m * q**2))


def isotropic_hs_formula(m: int, x: float) -> float:
    _check(m, x, 0.0, 1.0)
    return float((m * m * x - 1) ** 2 / (m * (m - 1) * (m + 1) ** 2))


def werner_hs_formula(m: int, x: float) -> float:
    _check(m, x, -1.0, 1.0)
    return float((m * x - 1) ** 2 / (m * (m - 1) * (m + 1) ** 2))


FAMILY_FORMULAS = {
    "isotropic": (isotropic_min_formula, isotropic_hs_formula, (0.0, 1.0)),
    "werner": (werner_min_formula, werner_hs_formula, (-1.0, 1.0)),
}


def vanishing_point(family: str, m: int) -> float:
    return 1.0 / (m * m) if family == "isotropic" else 1.0 / m
