"""Independent reference computations used to cross-check the fast paths.

Nothing here touches the eigenbasis propagator or the closed-form
concurrence; these work from scratch on dense matrices or on the full
2**n qubit register.
"""

from __future__ import annotations

from math import ceil, log2

import numpy as np

YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]])).real


def expm_taylor(A: np.ndarray, terms: int = 24) -> np.ndarray:
    """exp(A) by scaling and squaring with a truncated Taylor series."""
    A = np.asarray(A, dtype=complex)
    norm = np.linalg.norm(A, 1)
    s = max(0, int(ceil(log2(norm))) + 4) if norm > 0 else 0
    B = A / 2**s
    out = np.eye(len(A), dtype=complex)
    term = np.eye(len(A), dtype=complex)
    for k in range(1, terms + 1):
        term = term @ B / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def evolve_expm(H: np.ndarray, psi0: np.ndarray, t: float) -> np.ndarray:
    return expm_taylor(-1j * t * np.asarray(H)) @ np.asarray(psi0, dtype=complex)


def register_state(amplitudes: np.ndarray) -> np.ndarray:
    """Embed one-flip amplitudes into the full 2**n register.

    Site 0 is the most significant qubit; |1> marks the flipped spin.
    """
    n = len(amplitudes)
    full = np.zeros(2**n, dtype=complex)
    for k, a in enumerate(amplitudes):
        full[1 << (n - 1 - k)] = a
    return full


def wootters_concurrence(full: np.ndarray, n: int, i: int, j: int) -> float:
    """Concurrence of qubits i, j of an n-qubit pure state.

    With A the (4, 2**(n-2)) matrix of the state split as (i j | rest),
    the Wootters lambdas are the singular values of A^T (Y x Y) A.
    """
    psi = np.asarray(full, dtype=complex).reshape((2,) * n)
    A = np.moveaxis(psi, (i, j), (0, 1)).reshape(4, -1)
    lam = np.linalg.svd(A.T @ YY @ A, compute_uv=False)
    lam = np.concatenate([np.sort(lam)[::-1], np.zeros(4)])[:4]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def reduced_two_site(full: np.ndarray, n: int, i: int, j: int) -> np.ndarray:
    psi = np.asarray(full, dtype=complex).reshape((2,) * n)
    A = np.moveaxis(psi, (i, j), (0, 1)).reshape(4, -1)
    return A @ A.conj().T
