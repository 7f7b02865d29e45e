"""Experiment configuration (JSON) parsing and validation.

Unknown keys are rejected everywhere. Times may be numbers or a small
grammar of named terms joined by ``+``: ``t_star``, ``pi/alpha``, ``pi``,
each optionally prefixed with ``<number>*``.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .couplings import assign_couplings, transfer_time
from .dynamics import MeasureEvent, PulseEvent, freeze_phases
from .errors import SpinBranchError
from .topology import BranchSpec, SpinNetwork, build_star, build_tree


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


FIDELITY_TARGETS = ("W0", "W+", "W-", "distributed")

_TERM = re.compile(r"^(?:(?P<coef>[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*\*\s*)?(?P<sym>t_star|pi/alpha|pi)$|^(?P<num>[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)$")


def resolve_time(value: Any, alpha: float, where: str) -> float:
    if isinstance(value, bool):
        raise ConfigError(where, "expected a time")
    if isinstance(value, (int, float)):
        t = float(value)
    elif isinstance(value, str):
        t = 0.0
        for raw in value.split("+"):
            m = _TERM.match(raw.strip())
            if m is None:
                raise ConfigError(where, f"cannot parse time {value!r}")
            if m["num"] is not None:
                t += float(m["num"])
                continue
            unit = {"t_star": transfer_time(alpha), "pi/alpha": math.pi / alpha, "pi": math.pi}[m["sym"]]
            t += float(m["coef"] or 1.0) * unit
    else:
        raise ConfigError(where, "expected a number or a named time")
    if not math.isfinite(t) or t < 0:
        raise ConfigError(where, "times must be finite and non-negative")
    return t


@dataclass
class SampleGrid:
    t_start: float
    t_end: float
    steps: int

    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.steps)


@dataclass
class ExperimentConfig:
    network: SpinNetwork
    family: str
    alpha: float
    events: list = field(default_factory=list)
    has_measurements: bool = False
    grid: Optional[SampleGrid] = None
    populations: bool = True
    amplitudes: bool = False
    fidelity: list[str] = field(default_factory=list)
    seed: int = 0


def _keys(obj: Any, where: str, required: set[str], optional: set[str] = frozenset()) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(where, "expected an object")
    for k in obj:
        if k not in required and k not in optional:
            raise ConfigError(f"{where}.{k}" if where else k, "unknown field")
    for k in sorted(required):
        if k not in obj:
            raise ConfigError(f"{where}.{k}" if where else k, "missing required field")
    return obj


def _int(value: Any, where: str, lo: Optional[int] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(where, "expected an integer")
    if lo is not None and value < lo:
        raise ConfigError(where, f"must be >= {lo}")
    return value


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(where, "expected a finite number")
    return float(value)


def _branch(obj: Any, where: str) -> BranchSpec:
    _keys(obj, where, {"segment"}, {"children"})
    seg = _int(obj["segment"], f"{where}.segment", 1)
    kids = obj.get("children", [])
    if not isinstance(kids, list):
        raise ConfigError(f"{where}.children", "expected a list")
    if len(kids) == 1:
        raise ConfigError(f"{where}.children", "a branch with exactly one child is not allowed")
    return BranchSpec(seg, tuple(_branch(c, f"{where}.children[{i}]") for i, c in enumerate(kids)))


def _topology(obj: Any) -> tuple[str, SpinNetwork]:
    if not isinstance(obj, dict) or "family" not in obj:
        raise ConfigError("topology.family", "missing required field")
    family = obj["family"]
    try:
        if family == "star":
            _keys(obj, "topology", {"family", "m", "p", "l"})
            m = _int(obj["m"], "topology.m", 1)
            p = _int(obj["p"], "topology.p", 2)
            l = _int(obj["l"], "topology.l", 1)
            return family, build_star(m, p, l)
        if family == "chain":
            _keys(obj, "topology", {"family", "N"})
            return family, build_tree(BranchSpec(_int(obj["N"], "topology.N", 2)))
        if family == "tree":
            _keys(obj, "topology", {"family", "spec"})
            return family, build_tree(_branch(obj["spec"], "topology.spec"))
    except ConfigError:
        raise
    except SpinBranchError as exc:
        raise ConfigError("topology", str(exc)) from exc
    raise ConfigError("topology.family", f"unknown family {family!r}; expected star, chain or tree")


def _node_ref(obj: dict, network: SpinNetwork, where: str) -> int:
    if ("leaf" in obj) == ("node" in obj):
        raise ConfigError(where, "give exactly one of 'leaf' or 'node'")
    if "leaf" in obj:
        idx = _int(obj["leaf"], f"{where}.leaf", 0)
        if idx >= len(network.leaves):
            raise ConfigError(f"{where}.leaf", f"network has {len(network.leaves)} leaves")
        return network.leaves[idx]
    idx = _int(obj["node"], f"{where}.node", 0)
    if idx >= network.node_count:
        raise ConfigError(f"{where}.node", f"network has {network.node_count} nodes")
    return idx


def parse_config(data: Any) -> ExperimentConfig:
    _keys(data, "", {"topology", "alpha"}, {"schedule", "measurements", "samples", "outputs", "seed"})
    family, network = _topology(data["topology"])
    alpha = _number(data["alpha"], "alpha")
    if alpha <= 0:
        raise ConfigError("alpha", "must be positive")
    network = assign_couplings(network, alpha)

    timed: list[tuple[float, int, object]] = []
    schedule = data.get("schedule", [])
    if not isinstance(schedule, list):
        raise ConfigError("schedule", "expected a list")
    for i, item in enumerate(schedule):
        where = f"schedule[{i}]"
        if not isinstance(item, dict):
            raise ConfigError(where, "expected an object")
        if "scheme" in item:
            _keys(item, where, {"time", "scheme"})
            t = resolve_time(item["time"], alpha, f"{where}.time")
            scheme = item["scheme"]
            try:
                phases = freeze_phases(len(network.leaves), scheme)
            except ValueError as exc:
                raise ConfigError(f"{where}.scheme", str(exc)) from exc
            for leaf, theta in zip(network.leaves, phases):
                timed.append((t, len(timed), PulseEvent(t, leaf, theta)))
        else:
            _keys(item, where, {"time", "phase"}, {"leaf", "node"})
            t = resolve_time(item["time"], alpha, f"{where}.time")
            node = _node_ref(item, network, where)
            timed.append((t, len(timed), PulseEvent(t, node, _number(item["phase"], f"{where}.phase"))))

    measurements = data.get("measurements", [])
    if not isinstance(measurements, list):
        raise ConfigError("measurements", "expected a list")
    for i, item in enumerate(measurements):
        where = f"measurements[{i}]"
        _keys(item, where, {"time"}, {"leaf", "node", "forced"})
        t = resolve_time(item["time"], alpha, f"{where}.time")
        node = _node_ref(item, network, where)
        forced = item.get("forced")
        if forced is not None and (isinstance(forced, bool) or forced not in (0, 1)):
            raise ConfigError(f"{where}.forced", "expected 0, 1 or null")
        timed.append((t, len(timed), MeasureEvent(t, node, forced)))
    events = [ev for _, _, ev in sorted(timed, key=lambda x: (x[0], x[1]))]

    grid = None
    if "samples" in data:
        s = _keys(data["samples"], "samples", {"t_start", "t_end", "steps"})
        grid = SampleGrid(
            resolve_time(s["t_start"], alpha, "samples.t_start"),
            resolve_time(s["t_end"], alpha, "samples.t_end"),
            _int(s["steps"], "samples.steps", 0),
        )
        if grid.t_end < grid.t_start:
            raise ConfigError("samples.t_end", "must not precede t_start")

    cfg = ExperimentConfig(network, family, alpha, events, bool(measurements), grid)
    if "outputs" in data:
        out = _keys(data["outputs"], "outputs", set(), {"populations", "amplitudes", "fidelity"})
        for key in ("populations", "amplitudes"):
            if key in out:
                if not isinstance(out[key], bool):
                    raise ConfigError(f"outputs.{key}", "expected true or false")
                setattr(cfg, key, out[key])
        fids = out.get("fidelity", [])
        if not isinstance(fids, list):
            raise ConfigError("outputs.fidelity", "expected a list")
        for i, name in enumerate(fids):
            if name not in FIDELITY_TARGETS:
                raise ConfigError(f"outputs.fidelity[{i}]", f"unknown target {name!r}")
            if name in ("W+", "W-") and len(network.leaves) != 3:
                raise ConfigError(f"outputs.fidelity[{i}]", f"{name} needs exactly three leaves")
        cfg.fidelity = list(fids)
    if "seed" in data:
        cfg.seed = _int(data["seed"], "seed", 0)
    return cfg


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return parse_config(data)
