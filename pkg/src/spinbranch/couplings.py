"""Perfect-transfer coupling profiles for chains and branched trees."""

from __future__ import annotations

from dataclasses import dataclass
from math import pi, sqrt

from .errors import InvalidLengthError, InvalidScaleError
from .topology import SpinNetwork


@dataclass(frozen=True)
class CouplingRule:
    alpha: float = 1.0

    def __post_init__(self):
        _check_alpha(self.alpha)


def _check_alpha(alpha: float):
    if not alpha > 0:
        raise InvalidScaleError(f"alpha must be positive, got {alpha!r}")


def christandl_couplings(n: int, alpha: float = 1.0) -> list[float]:
    """Couplings alpha*sqrt(i*(n-i)), i = 1..n-1, for an n-site mirror chain."""
    if n < 2:
        raise InvalidLengthError(f"a chain needs at least two sites, got {n}")
    _check_alpha(alpha)
    # sqrt of an exact integer product keeps the profile exactly palindromic
    return [alpha * sqrt(i * (n - i)) for i in range(1, n)]


def assign_couplings(network: SpinNetwork, rule: CouplingRule | float = 1.0) -> SpinNetwork:
    """Return a copy of ``network`` with perfect-transfer couplings.

    The edge below a node in column c carries the 1D value for the bond
    (c, c+1) of the equivalent chain, divided by sqrt of that node's child
    count.
    """
    alpha = rule.alpha if isinstance(rule, CouplingRule) else float(rule)
    n_eq = network.equivalent_length
    if network.node_count == 1:
        return network.with_couplings(())
    chain = christandl_couplings(n_eq, alpha)
    kids = network.children
    couplings = []
    for k in range(1, network.node_count):
        u = network.parent[k]
        couplings.append(chain[network.column[u]] / sqrt(len(kids[u])))
    return network.with_couplings(couplings)


def transfer_time(rule: CouplingRule | float = 1.0) -> float:
    alpha = rule.alpha if isinstance(rule, CouplingRule) else float(rule)
    _check_alpha(alpha)
    return pi / (2 * alpha)
