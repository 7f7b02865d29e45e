"""Branched spin-chain trees.

A network is a rooted tree grown from a nested ``BranchSpec``. Nodes are
numbered breadth-first from the input spin (node 0), visiting children in
the order they appear in the spec. The last spin of every segment that has
children is a hub.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from math import sqrt
from typing import Optional, Sequence

import numpy as np

from .errors import DepthMismatchError, InvalidBranchingError, InvalidNodeError, InvalidSizeError


@dataclass(frozen=True)
class BranchSpec:
    segment_length: int
    children: tuple[BranchSpec, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if int(self.segment_length) != self.segment_length or self.segment_length < 1:
            raise InvalidSizeError(f"segment_length must be a positive integer, got {self.segment_length!r}")
        if len(self.children) == 1:
            raise InvalidBranchingError("a branch with exactly one child is ambiguous; extend the segment instead")

    @property
    def node_count(self) -> int:
        return self.segment_length + sum(c.node_count for c in self.children)

    def leaf_depths(self) -> list[int]:
        """Node count from the start of this branch to each of its leaves."""
        if not self.children:
            return [self.segment_length]
        return [self.segment_length + d for c in self.children for d in c.leaf_depths()]

    def to_dict(self) -> dict:
        out: dict = {"segment": self.segment_length}
        if self.children:
            out["children"] = [c.to_dict() for c in self.children]
        return out


@dataclass(frozen=True)
class SpinNetwork:
    """Immutable tree of spins.

    ``parent[k]`` is the parent of node ``k`` (``-1`` for the input).
    ``couplings[k - 1]`` is the coupling on the edge ``(parent[k], k)``;
    ``couplings`` is ``None`` until assigned.
    """

    parent: tuple[int, ...]
    column: tuple[int, ...]
    leaves: tuple[int, ...]
    couplings: Optional[tuple[float, ...]] = None
    onsite_energy: tuple[float, ...] = ()
    equal_depth: bool = True
    spec: Optional[BranchSpec] = field(default=None, compare=False)

    def __post_init__(self):
        if not self.onsite_energy:
            object.__setattr__(self, "onsite_energy", (0.0,) * len(self.parent))
        if len(self.onsite_energy) != len(self.parent):
            raise InvalidSizeError("onsite_energy must have one entry per node")
        if self.couplings is not None:
            if len(self.couplings) != len(self.parent) - 1:
                raise InvalidSizeError("couplings must have one entry per edge")
            if any(not (j > 0) for j in self.couplings):
                raise InvalidSizeError("couplings must be strictly positive")

    @property
    def node_count(self) -> int:
        return len(self.parent)

    @property
    def input(self) -> int:
        return 0

    @property
    def depth(self) -> int:
        """Column of the deepest leaf."""
        return max(self.column[k] for k in self.leaves)

    @property
    def equivalent_length(self) -> int:
        """Length of the column-projected 1D chain."""
        self.require_equal_depth()
        return self.depth + 1

    @property
    def children(self) -> tuple[tuple[int, ...], ...]:
        kids: list[list[int]] = [[] for _ in self.parent]
        for k, u in enumerate(self.parent):
            if u >= 0:
                kids[u].append(k)
        return tuple(tuple(c) for c in kids)

    @property
    def hubs(self) -> tuple[int, ...]:
        return tuple(k for k, c in enumerate(self.children) if len(c) >= 2)

    @property
    def edges(self) -> list[tuple[int, int, Optional[float]]]:
        out = []
        for k in range(1, self.node_count):
            j = None if self.couplings is None else self.couplings[k - 1]
            out.append((self.parent[k], k, j))
        return out

    def require_equal_depth(self):
        if not self.equal_depth:
            raise DepthMismatchError("operation requires all leaves at the same column")

    def with_couplings(self, couplings: Sequence[float]) -> SpinNetwork:
        return replace(self, couplings=tuple(float(j) for j in couplings))

    def with_energies(self, energies: Sequence[float]) -> SpinNetwork:
        return replace(self, onsite_energy=tuple(float(e) for e in energies))

    def check_node(self, node: int) -> int:
        if isinstance(node, bool) or int(node) != node or not 0 <= node < self.node_count:
            raise InvalidNodeError(f"node {node!r} is not in a {self.node_count}-node network")
        return int(node)


def build_tree(spec: BranchSpec, allow_unequal_depth: bool = False) -> SpinNetwork:
    depths = spec.leaf_depths()
    equal = len(set(depths)) == 1
    if not equal and not allow_unequal_depth:
        raise DepthMismatchError(f"leaf depths differ: {sorted(set(depths))}")

    parent: list[int] = []
    column: list[int] = []
    leaves: list[int] = []

    # One entry per spin still to place: (branch, offset within its segment, parent node).
    pending: deque[tuple[BranchSpec, int, int]] = deque([(spec, 0, -1)])
    while pending:
        branch, offset, up = pending.popleft()
        node = len(parent)
        parent.append(up)
        column.append(0 if up < 0 else column[up] + 1)
        if offset + 1 < branch.segment_length:
            pending.append((branch, offset + 1, node))
        elif branch.children:
            for child in branch.children:
                pending.append((child, 0, node))
        else:
            leaves.append(node)

    return SpinNetwork(
        parent=tuple(parent),
        column=tuple(column),
        leaves=tuple(leaves),
        equal_depth=equal,
        spec=spec,
    )


def build_star(m: int, p: int, l: int) -> SpinNetwork:
    """Star family member (m, l, ..., l): input branch of m spins, p outputs of l spins."""
    if p < 2:
        raise InvalidBranchingError(f"a star needs at least two output branches, got p={p}")
    if m < 1 or l < 1:
        raise InvalidSizeError(f"branch lengths must be positive, got m={m}, l={l}")
    return build_tree(star_spec(m, p, l))


def star_spec(m: int, p: int, l: int) -> BranchSpec:
    return BranchSpec(m, tuple(BranchSpec(l) for _ in range(p)))


def build_chain(n: int) -> SpinNetwork:
    return build_tree(BranchSpec(n))


def node_weights(network: SpinNetwork) -> np.ndarray:
    """Product of 1/sqrt(child count) over the hubs strictly above each node."""
    kids = network.children
    w = np.ones(network.node_count)
    for k in range(1, network.node_count):
        u = network.parent[k]
        w[k] = w[u] / sqrt(len(kids[u]))
    return w


def leaf_weights(network: SpinNetwork) -> np.ndarray:
    network.require_equal_depth()
    return node_weights(network)[list(network.leaves)]
