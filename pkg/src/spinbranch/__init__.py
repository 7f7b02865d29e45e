"""Single-excitation dynamics on branched spin-chain networks."""

from .analysis import (
    TargetState,
    column_project,
    distributed_target,
    fidelity,
    pairwise_concurrence,
    site_populations,
    stationarity_drift,
    w_target,
)
from .couplings import CouplingRule, assign_couplings, christandl_couplings, transfer_time
from .dynamics import (
    MeasureEvent,
    MeasurementRecord,
    PulseEvent,
    SingletReport,
    TimeSeries,
    apply_phase,
    basis_state,
    freeze_phases,
    measure_site,
    run_schedule,
    singlet_protocol,
)
from .hamiltonian import SpectralDecomposition, build_block, evolve, spectral_decompose
from .topology import BranchSpec, SpinNetwork, build_chain, build_star, build_tree, leaf_weights, node_weights

__version__ = "0.1.0"
