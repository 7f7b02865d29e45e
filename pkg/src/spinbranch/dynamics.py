"""Site-basis states, instantaneous pulses, measurements and schedules.

States are plain complex numpy vectors indexed by node. A measurement that
finds the excitation removes it from the network; the simulator keeps no
zero-excitation dynamics and marks the run as vacuum from then on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import pi
from typing import Optional, Sequence, Union

import numpy as np

from .analysis import stationarity_drift
from .couplings import assign_couplings, transfer_time
from .errors import ImpossibleBranchError, InvalidNodeError, ParityError, UnsortedEventsError
from .hamiltonian import SpectralDecomposition, build_block, evolve, spectral_decompose
from .topology import SpinNetwork, build_star


@dataclass(frozen=True)
class PulseEvent:
    time: float
    node: int
    phase: float


@dataclass(frozen=True)
class MeasureEvent:
    time: float
    node: int
    forced_outcome: Optional[int] = None


Event = Union[PulseEvent, MeasureEvent]


@dataclass(frozen=True)
class MeasurementRecord:
    node: int
    outcome: int
    probability: float
    p_one: float
    post_state: Optional[np.ndarray]
    time: float = 0.0

    @property
    def vacuum(self) -> bool:
        """True when the excitation was found, leaving no flipped spin behind."""
        return self.post_state is None


def basis_state(network: SpinNetwork, node: int) -> np.ndarray:
    node = network.check_node(node)
    psi = np.zeros(network.node_count, dtype=complex)
    psi[node] = 1.0
    return psi


def _check_index(psi: np.ndarray, node: int) -> int:
    if isinstance(node, bool) or int(node) != node or not 0 <= node < len(psi):
        raise InvalidNodeError(f"node {node!r} is not in a {len(psi)}-node state")
    return int(node)


def apply_phase(psi: np.ndarray, node: int, theta: float) -> np.ndarray:
    node = _check_index(psi, node)
    out = np.array(psi, dtype=complex)
    out[node] *= np.exp(1j * theta)
    return out


def freeze_phases(p: int, scheme: str = "roots") -> list[float]:
    """Leaf phases whose unit phasors sum to zero.

    ``"roots"`` uses the p-th roots of unity, ``"pi-half"`` puts pi on the
    first p/2 outputs (even p only).
    """
    if p < 2:
        raise ValueError(f"need at least two outputs, got p={p}")
    if scheme in ("roots", "roots-of-unity"):
        return [2 * pi * k / p for k in range(p)]
    if scheme in ("pi-half", "pi-on-half"):
        if p % 2:
            raise ParityError(f"the pi-on-half scheme needs an even number of outputs, got p={p}")
        return [pi] * (p // 2) + [0.0] * (p // 2)
    raise ValueError(f"unknown freezing scheme {scheme!r}")


def measure_site(
    psi: np.ndarray,
    node: int,
    forced_outcome: Optional[int] = None,
    seed: Union[int, np.random.Generator, None] = 0,
    time: float = 0.0,
) -> MeasurementRecord:
    """Projective computational-basis measurement of one spin.

    Outcome 1 means the flipped spin was found at ``node``.
    """
    node = _check_index(psi, node)
    psi = np.asarray(psi, dtype=complex)
    total = float(np.vdot(psi, psi).real)
    p_one = min(1.0, float(abs(psi[node]) ** 2) / total)
    if forced_outcome is None:
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        outcome = int(rng.random() < p_one)
    elif forced_outcome in (0, 1):
        outcome = int(forced_outcome)
    else:
        raise ValueError(f"forced outcome must be 0 or 1, got {forced_outcome!r}")

    prob = float(p_one if outcome else 1.0 - p_one)
    if prob < 1e-15:
        raise ImpossibleBranchError(f"outcome {outcome} at node {node} has probability {prob:.3g}")
    if outcome:
        return MeasurementRecord(node, 1, prob, p_one, None, time)
    post = psi.copy()
    post[node] = 0.0
    post /= np.linalg.norm(post)
    return MeasurementRecord(node, 0, prob, p_one, post, time)


@dataclass
class TimeSeries:
    times: np.ndarray
    amplitudes: np.ndarray  # (len(times), n) complex
    vacuum: np.ndarray  # (len(times),) bool
    measurements: list[MeasurementRecord] = field(default_factory=list)

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def run_schedule(
    decomp: SpectralDecomposition,
    psi0: np.ndarray,
    events: Sequence[Event],
    sample_times: Sequence[float],
    seed: Union[int, np.random.Generator, None] = 0,
) -> TimeSeries:
    """Piecewise free evolution with instantaneous events.

    An event that shares a timestamp with a sample is applied before the
    sample is taken; simultaneous events run in list order.
    """
    times = np.asarray(sample_times, dtype=float)
    event_times = [e.time for e in events]
    if any(t < 0 for t in event_times) or np.any(times < 0):
        raise ValueError("event and sample times must be non-negative")
    if any(b < a for a, b in zip(event_times, event_times[1:])):
        raise UnsortedEventsError("events must be sorted by time")
    if np.any(np.diff(times) < 0):
        raise UnsortedEventsError("sample times must be ascending")

    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n = decomp.dimension
    amps = np.zeros((len(times), n), dtype=complex)
    vac = np.zeros(len(times), dtype=bool)
    records: list[MeasurementRecord] = []

    psi: Optional[np.ndarray] = np.asarray(psi0, dtype=complex).copy()
    now = 0.0
    nxt = 0
    for row, ts in enumerate(times):
        while nxt < len(events) and events[nxt].time <= ts:
            ev = events[nxt]
            nxt += 1
            if psi is None:
                continue
            psi = evolve(decomp, psi, ev.time - now)
            now = ev.time
            if isinstance(ev, PulseEvent):
                psi = apply_phase(psi, ev.node, ev.phase)
            else:
                rec = measure_site(psi, ev.node, ev.forced_outcome, rng, time=ev.time)
                records.append(rec)
                psi = rec.post_state
        if psi is None:
            vac[row] = True
            continue
        psi = evolve(decomp, psi, ts - now)
        now = ts
        amps[row] = psi
    return TimeSeries(times, amps, vac, records)


@dataclass(frozen=True)
class SingletReport:
    alpha: float
    t_star: float
    outcome: int
    probability: float
    post_state: Optional[np.ndarray]
    drift: Optional[float]

    @property
    def excitation_consumed(self) -> bool:
        return self.post_state is None


def singlet_protocol(
    alpha: float = 1.0,
    forced_outcome: Optional[int] = None,
    seed: Union[int, np.random.Generator, None] = 0,
    drift_samples: int = 2001,
) -> SingletReport:
    """Measure one output of the freshly created tripartite W state, then
    flip the sign of one survivor to leave a frozen singlet on the other two.
    """
    net = assign_couplings(build_star(2, 3, 1), alpha)
    decomp = spectral_decompose(build_block(net))
    t_star = transfer_time(alpha)
    psi = evolve(decomp, basis_state(net, net.input), t_star)
    _, second, measured = net.leaves
    rec = measure_site(psi, measured, forced_outcome, seed, time=t_star)
    if rec.vacuum:
        return SingletReport(alpha, t_star, rec.outcome, rec.probability, None, None)
    post = apply_phase(rec.post_state, second, pi)
    drift = stationarity_drift(decomp, post, 10 * pi / alpha, drift_samples)
    return SingletReport(alpha, t_star, rec.outcome, rec.probability, post, drift)
