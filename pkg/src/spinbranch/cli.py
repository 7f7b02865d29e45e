"""Command-line front end: ``spinbranch generate | evolve | verify``.

Exit codes: 0 success, 1 verification failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Optional, TextIO

import numpy as np

from .analysis import distributed_target, fidelity, w_target
from .config import ConfigError, ExperimentConfig, load_config
from .couplings import transfer_time
from .dynamics import basis_state, run_schedule
from .errors import SpinBranchError
from .hamiltonian import build_block, spectral_decompose
from .topology import leaf_weights, node_weights


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def network_document(cfg: ExperimentConfig) -> dict:
    net = cfg.network
    weights = node_weights(net)
    return {
        "family": cfg.family,
        "alpha": cfg.alpha,
        "node_count": net.node_count,
        "input": net.input,
        "equivalent_length": net.equivalent_length,
        "transfer_time": transfer_time(cfg.alpha),
        "nodes": [
            {"id": k, "column": net.column[k], "energy": net.onsite_energy[k], "weight": float(weights[k])}
            for k in range(net.node_count)
        ],
        "edges": [{"u": u, "v": v, "coupling": j} for u, v, j in net.edges],
        "leaves": list(net.leaves),
        "leaf_weights": [float(w) for w in leaf_weights(net)],
    }


def write_timeseries(cfg: ExperimentConfig, out: TextIO):
    net = cfg.network
    n = net.node_count
    times = cfg.grid.times() if cfg.grid is not None else np.zeros(0)

    targets = []
    for name in cfg.fidelity:
        if name == "distributed":
            targets.append(distributed_target(net))
        else:
            targets.append(w_target(net.leaves, name[1:]))

    header = ["time"]
    if cfg.populations:
        header += [f"pop_{k}" for k in range(n)]
    if cfg.amplitudes:
        header += [f"{part}_{k}" for k in range(n) for part in ("re", "im")]
    header += [f"fid_{name}" for name in cfg.fidelity]
    if cfg.has_measurements:
        header.append("vacuum")

    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    if len(times) == 0:
        return
    decomp = spectral_decompose(build_block(net))
    series = run_schedule(decomp, basis_state(net, net.input), cfg.events, times, seed=cfg.seed)
    pops = series.populations
    for row, t in enumerate(series.times):
        psi = series.amplitudes[row]
        line = [_fmt(t)]
        if cfg.populations:
            line += [_fmt(p) for p in pops[row]]
        if cfg.amplitudes:
            line += [_fmt(v) for a in psi for v in (a.real, a.imag)]
        line += [_fmt(fidelity(psi, tgt)) for tgt in targets]
        if cfg.has_measurements:
            line.append("1" if series.vacuum[row] else "0")
        writer.writerow(line)


def _fail(field: str, message: str) -> int:
    print(json.dumps({"error": "invalid-input", "field": field, "message": message}), file=sys.stderr)
    return 2


def _load(args) -> ExperimentConfig:
    if args.config is None:
        raise ConfigError("--config", "a config file is required")
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def _open_out(path: Optional[str]) -> TextIO:
    return sys.stdout if path in (None, "-") else open(path, "w", encoding="utf-8", newline="")


def cmd_generate(args) -> int:
    cfg = _load(args)
    out = _open_out(args.out)
    try:
        json.dump(network_document(cfg), out, indent=2)
        out.write("\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_evolve(args) -> int:
    cfg = _load(args)
    out = _open_out(args.out)
    try:
        write_timeseries(cfg, out)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_verify(args) -> int:
    from .verify import run_checks

    results = run_checks(perturb=args.perturb_coupling)
    lines = [r.line() for r in results]
    ok = all(r.passed for r in results)
    summary = {"passed": ok, "checks": [r.to_dict() for r in results]}
    out = _open_out(args.out)
    try:
        out.write("\n".join(lines) + "\n")
        out.write(json.dumps(summary) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0 if ok else 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(2, json.dumps({"error": "invalid-input", "field": "arguments", "message": message}) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spinbranch", description="Single-excitation dynamics on branched spin chains.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, help_ in (
        ("generate", cmd_generate, "write the network description as JSON"),
        ("evolve", cmd_evolve, "run the configured schedule and write a CSV time series"),
        ("verify", cmd_verify, "run the built-in checks"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="experiment config (JSON)")
        p.add_argument("--out", help="output path (default: standard output)")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.set_defaults(func=func)
        if name == "verify":
            p.add_argument("--perturb-coupling", type=float, default=0.0, help=argparse.SUPPRESS)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail(exc.field, exc.message)
    except SpinBranchError as exc:
        return _fail("config", str(exc))
    except OSError as exc:
        return _fail("--out", str(exc))


if __name__ == "__main__":
    sys.exit(main())
