import numpy as np
import pytest
from hypothesis import assume, strategies as st

from spinbranch import BranchSpec, assign_couplings, build_block, build_star, build_tree, spectral_decompose

PANEL_B = BranchSpec(2, (BranchSpec(2), BranchSpec(1, (BranchSpec(1), BranchSpec(1)))))


@st.composite
def equal_depth_specs(draw, max_nodes=50, max_depth=7):
    """Random BranchSpec whose leaves all sit at the same depth."""
    depth = draw(st.integers(1, max_depth))
    used = [0]

    def grow(remaining):
        seg = draw(st.integers(1, remaining))
        k = draw(st.integers(2, 4))
        # keep the tree under max_nodes by finishing the branch when a split could overflow
        if seg == remaining or used[0] + seg + k * (remaining - seg) > max_nodes:
            used[0] += remaining
            return BranchSpec(remaining)
        used[0] += seg
        return BranchSpec(seg, tuple(grow(remaining - seg) for _ in range(k)))

    spec = grow(depth)
    assume(spec.node_count <= max_nodes)
    return spec


@st.composite
def random_specs(draw, max_nodes=30):
    """Random BranchSpec with no depth constraint."""

    def grow(level):
        seg = draw(st.integers(1, 3))
        if level >= 3 or draw(st.booleans()):
            return BranchSpec(seg)
        return BranchSpec(seg, tuple(grow(level + 1) for _ in range(draw(st.integers(2, 3)))))

    spec = grow(0)
    assume(spec.node_count <= max_nodes)
    return spec


def random_network(rng, max_nodes=30):
    """Random tree (any depths) with random positive couplings, via numpy rng."""
    while True:
        spec = _rng_spec(rng, int(rng.integers(0, 4)))
        if spec.node_count <= max_nodes:
            break
    net = build_tree(spec, allow_unequal_depth=True)
    return net.with_couplings(rng.uniform(0.1, 3.0, net.node_count - 1))


def _rng_spec(rng, budget):
    seg = int(rng.integers(1, 4))
    if budget <= 0 or rng.random() < 0.3:
        return BranchSpec(seg)
    k = int(rng.integers(2, 4))
    return BranchSpec(seg, tuple(_rng_spec(rng, budget - 1) for _ in range(k)))


def random_state(rng, n):
    psi = rng.normal(size=n) + 1j * rng.normal(size=n)
    return psi / np.linalg.norm(psi)


@pytest.fixture
def fig1():
    net = assign_couplings(build_star(2, 3, 1), 1.0)
    return net, spectral_decompose(build_block(net))


@pytest.fixture
def panel_b():
    net = assign_couplings(build_tree(PANEL_B), 1.0)
    return net, spectral_decompose(build_block(net))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import REPORT
    except ImportError:
        return
    if REPORT:
        terminalreporter.section("acceptance criteria")
        for line in REPORT:
            terminalreporter.write_line(line)
