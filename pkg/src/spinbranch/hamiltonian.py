"""Single-excitation Hamiltonian block and exact propagation.

In the one-flip sector the XY Hamiltonian reduces to an n x n real
symmetric matrix: onsite energies on the diagonal and the bond coupling
J_kl on the (k, l) entries of every edge. A uniform onsite energy only
adds a global phase, so the default diagonal is zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, IncompleteNetworkError, SymmetryError
from .topology import SpinNetwork


def build_block(network: SpinNetwork) -> np.ndarray:
    if network.couplings is None:
        raise IncompleteNetworkError("couplings have not been assigned")
    H = np.diag(np.asarray(network.onsite_energy, dtype=float))
    for u, v, j in network.edges:
        H[u, v] = H[v, u] = j
    return H


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dimension(self) -> int:
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.T


def spectral_decompose(H: np.ndarray, tol: float = 1e-12) -> SpectralDecomposition:
    H = np.asarray(H, dtype=float)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {H.shape}")
    scale = max(1.0, float(np.max(np.abs(H), initial=0.0)))
    if np.max(np.abs(H - H.T), initial=0.0) > tol * scale:
        raise SymmetryError("Hamiltonian block is not symmetric")
    evals, evecs = np.linalg.eigh(H)
    evals.setflags(write=False)
    evecs.setflags(write=False)
    return SpectralDecomposition(evals, evecs)


def evolve(decomp: SpectralDecomposition, psi0: np.ndarray, t: float) -> np.ndarray:
    """Apply exp(-iHt) (hbar = 1) through the eigenbasis."""
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (decomp.dimension,):
        raise DimensionError(f"state has shape {psi0.shape}, Hamiltonian has dimension {decomp.dimension}")
    if t == 0:
        return psi0.copy()
    V = decomp.eigenvectors
    return V @ (np.exp(-1j * decomp.eigenvalues * t) * (V.T @ psi0))


def propagator(decomp: SpectralDecomposition, t: float) -> np.ndarray:
    V = decomp.eigenvectors
    return (V * np.exp(-1j * decomp.eigenvalues * t)) @ V.T
