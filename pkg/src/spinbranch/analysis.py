"""Target states, overlaps and entanglement measures on the one-flip sector."""

from __future__ import annotations

from dataclasses import dataclass
from math import pi, sqrt
from typing import Sequence

import numpy as np

from .errors import UnsupportedVariantError
from .hamiltonian import SpectralDecomposition, evolve
from .topology import SpinNetwork, leaf_weights, node_weights


@dataclass(frozen=True)
class TargetState:
    support: tuple[int, ...]
    amplitudes: np.ndarray

    def embed(self, n: int) -> np.ndarray:
        psi = np.zeros(n, dtype=complex)
        psi[list(self.support)] = self.amplitudes
        return psi


def w_target(leaves: Sequence[int], variant: str = "0") -> TargetState:
    """Equal-weight W state over ``leaves``; ``"+"``/``"-"`` give the two
    tripartite states with cube-root-of-unity phases orthogonal to it."""
    leaves = tuple(int(k) for k in leaves)
    p = len(leaves)
    variant = str(variant)
    if variant in ("0", "W0"):
        if p < 2:
            raise UnsupportedVariantError("a W state needs at least two sites")
        return TargetState(leaves, np.full(p, 1 / sqrt(p), dtype=complex))
    if variant in ("+", "-", "W+", "W-"):
        if p != 3:
            raise UnsupportedVariantError(f"W+/W- are tripartite, got {p} sites")
        s = 1 if "+" in variant else -1
        w = np.exp(s * 2j * pi / 3)
        return TargetState(leaves, np.array([1, w, np.conj(w)]) / sqrt(3))
    raise UnsupportedVariantError(f"unknown W variant {variant!r}")


def distributed_target(network: SpinNetwork) -> TargetState:
    """State the tree creates at the arrival time, up to a global phase."""
    return TargetState(tuple(network.leaves), leaf_weights(network).astype(complex))


def fidelity(psi: np.ndarray, target: TargetState | np.ndarray) -> float:
    psi = np.asarray(psi, dtype=complex)
    ref = target.embed(len(psi)) if isinstance(target, TargetState) else np.asarray(target, dtype=complex)
    return float(abs(np.vdot(ref, psi)) ** 2)


def site_populations(psi: np.ndarray) -> np.ndarray:
    return np.abs(np.asarray(psi)) ** 2


def pairwise_concurrence(psi: np.ndarray, i: int, j: int) -> float:
    # For a single flip, the two-spin reduced state is X-shaped and Wootters'
    # formula collapses to 2|a_i||a_j|.
    if i == j:
        raise ValueError("concurrence needs two distinct sites")
    return float(2 * abs(psi[i]) * abs(psi[j]))


def stationarity_drift(decomp: SpectralDecomposition, psi: np.ndarray, horizon: float, samples: int = 1001) -> float:
    """Largest population change at any node over a uniform grid on [0, horizon]."""
    if samples < 2:
        raise ValueError("need at least two samples")
    psi = np.asarray(psi, dtype=complex)
    p0 = site_populations(psi)
    V = decomp.eigenvectors
    coeff = V.T @ psi
    ts = np.linspace(0.0, horizon, samples)
    amps = (np.exp(-1j * np.outer(ts, decomp.eigenvalues)) * coeff) @ V.T
    return float(np.max(np.abs(np.abs(amps) ** 2 - p0)))


def column_project(network: SpinNetwork, psi: np.ndarray) -> np.ndarray:
    """Overlap of ``psi`` with each column's symmetric mode.

    Column c's mode is sum_k w_k |k> over the nodes in that column, with w_k
    the hub-product weight. These modes evolve exactly like the sites of the
    equivalent 1D chain.
    """
    n_eq = network.equivalent_length
    w = node_weights(network)
    out = np.zeros(n_eq, dtype=complex)
    np.add.at(out, np.asarray(network.column), w * np.asarray(psi, dtype=complex))
    return out


def fidelity_trace(decomp: SpectralDecomposition, psi0: np.ndarray, target: TargetState, times: Sequence[float]) -> np.ndarray:
    return np.array([fidelity(evolve(decomp, psi0, t), target) for t in times])


def revival_times(
    decomp: SpectralDecomposition,
    psi0: np.ndarray,
    target: TargetState,
    horizon: float,
    alpha: float = 1.0,
    threshold: float = 0.99,
) -> np.ndarray:
    """Times of local fidelity maxima above ``threshold`` on [0, horizon].

    Sampled on a uniform grid of step pi/(200*alpha); resolution is one step.
    """
    step = pi / (200 * alpha)
    times = np.arange(0.0, horizon + 0.5 * step, step)
    f = fidelity_trace(decomp, psi0, target, times)
    interior = (f[1:-1] >= f[:-2]) & (f[1:-1] > f[2:]) & (f[1:-1] >= threshold)
    return times[1:-1][interior]
