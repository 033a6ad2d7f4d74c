import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def raw_post_measurement(rho, dims, vectors):
    """sum_k (P_k (x) 1) rho (P_k (x) 1), assembled with explicit Kronecker products."""
    m, n = dims
    out = np.zeros_like(rho)
    for k in range(m):
        p = np.kron(np.outer(vectors[:, k], vectors[:, k].conj()), np.eye(n))
        out += p @ rho @ p
    return out


def raw_sine_sq(rho, sigma):
    f = np.trace(rho @ sigma).real ** 2 / (np.trace(rho @ rho).real * np.trace(sigma @ sigma).real)
    return 1.0 - f


def brute_force_qubit_min(rho, dims, n_theta=121, n_phi=240):
    """Oracle for qubit-a states with rho^a = I/2: grid over all measurement axes."""
    best = -np.inf
    for theta in np.linspace(0, np.pi / 2, n_theta):
        for phi in np.linspace(0, 2 * np.pi, n_phi, endpoint=False):
            v0 = np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])
            v1 = np.array([-np.exp(-1j * phi) * np.sin(theta / 2), np.cos(theta / 2)])
            vecs = np.stack([v0, v1], axis=1)
            best = max(best, raw_sine_sq(rho, raw_post_measurement(rho, dims, vecs)))
    return best


@pytest.fixture
def bell():
    from fidmin.states import bell_state

    return bell_state()
