"""Command-line surface for batch experiments and scripting.

Exit codes: 0 on success, 2 for usage/format/shape problems, 3 for numerical
failures. Every command is deterministic given its inputs and flags; all
randomized commands require an explicit --seed.
"""

from __future__ import annotations

import argparse
import glob
import json
import sys
from pathlib import Path

import numpy as np

from .exceptions import NumericalError
from .filtering import filter_update
from .formats import format_record, read_matrix, write_matrix
from .linalg import svd
from .metrics import DEFAULT_TRACKED_COUNT, SpectralReport, _report_for
from .perturb import PerturbationSpec, generate
from .simulate import SimulationConfig, SimulationResult, run, run_many
from .subspace import DEFAULT_TAU, energy_groups

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except NumericalError as exc:
        print(f"specshield: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"specshield: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specshield",
        description="Subspace-protected update filtering, spectral drift metrics, and synthetic editing simulations.",
    )
    sub = parser.add_subparsers(required=True, metavar="command")

    p = sub.add_parser("filter", help="remove the protected-subspace components of an update")
    p.add_argument("--base", required=True, help="matrix file with the matrix being edited")
    p.add_argument("--delta", required=True, help="matrix file with the raw update")
    p.add_argument("--tau", type=float, default=DEFAULT_TAU, help="energy threshold in [0, 1) (default 0.10)")
    p.add_argument("--out", required=True, help="output matrix file for the safe update")
    p.add_argument("--report", help="optional record file with k and removed energy")
    p.set_defaults(handler=_cmd_filter)

    p = sub.add_parser("analyze", help="drift metrics of snapshots against a baseline")
    p.add_argument("--baseline", required=True, help="matrix file with the original matrix")
    p.add_argument("--snapshots", required=True, help="glob of snapshot matrix files (sorted by name)")
    p.add_argument("--energy-fraction", type=float, default=DEFAULT_TAU, help="reconstruction energy fraction (default 0.10)")
    p.add_argument("--tracked", type=int, default=DEFAULT_TRACKED_COUNT, help="leading directions to track (default 10)")
    p.add_argument("--out", required=True, help="output record file, one line per snapshot")
    p.set_defaults(handler=_cmd_analyze)

    p = sub.add_parser("perturb", help="inject a norm-controlled perturbation into one energy band")
    p.add_argument("--base", required=True, help="matrix file to perturb")
    p.add_argument("--side", required=True, choices=("input", "output"))
    p.add_argument("--group", required=True, help="band as g/G, e.g. 1/10 for the top band of ten")
    p.add_argument("--epsilon", required=True, help="perturbation Frobenius norm; append %% to scale by ||W||_F")
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--out", required=True, help="output matrix file with W + perturbation")
    p.set_defaults(handler=_cmd_perturb)

    p = sub.add_parser("simulate", help="run one sequential-editing simulation from a config file")
    p.add_argument("--config", required=True, help="JSON config file")
    p.add_argument("--out", required=True, help="output record file, one line per round")
    p.add_argument("--snapshots", help="optional directory for per-round matrix files")
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("sweep-tau", help="run a config once per threshold and summarize")
    p.add_argument("--config", required=True, help="JSON config file (filtering is forced on)")
    p.add_argument("--taus", required=True, help="comma-separated thresholds, each in [0, 1)")
    p.add_argument("--out", required=True, help="output record file, one summary line per threshold")
    p.set_defaults(handler=_cmd_sweep_tau)

    return parser


def _cmd_filter(args) -> int:
    base = read_matrix(args.base)
    delta = read_matrix(args.delta)
    outcome = filter_update(base, delta, args.tau)
    write_matrix(args.out, outcome.safe_delta)
    if args.report:
        record = {
            "kind": "filter",
            "tau": outcome.tau_used,
            "k_used": outcome.k_used,
            "removed_energy_fraction": outcome.removed_energy_fraction,
        }
        Path(args.report).write_text(format_record(record) + "\n", encoding="utf-8")
    return EXIT_OK


def _report_record(kind: str, report: SpectralReport, **extra) -> dict:
    record = {
        "kind": kind,
        "round": report.round_index,
        **extra,
        "ls": report.ls,
        "frobenius_distance": report.frobenius_distance,
        "ss_max": [row.max_value for row in report.ss_rows],
        "ss_argmax": [row.argmax for row in report.ss_rows],
        "degenerate": report.degenerate,
    }
    return record


def _cmd_analyze(args) -> int:
    baseline = read_matrix(args.baseline)
    if args.tracked < 1:
        raise ValueError(f"--tracked must be >= 1, got {args.tracked}")
    paths = sorted(glob.glob(args.snapshots))
    if not paths:
        raise ValueError(f"no snapshots match {args.snapshots!r}")
    b0 = svd(baseline)
    lines = []
    for t, path in enumerate(paths, start=1):
        wt = read_matrix(path)
        if wt.shape != baseline.shape:
            raise ValueError(f"{path}: shape {wt.shape} does not match baseline {baseline.shape}")
        report = _report_for(b0, svd(wt), baseline, wt, t, args.energy_fraction, args.tracked)
        lines.append(_report_record("analyze", report, snapshot=Path(path).name))
    _write_lines(args.out, lines)
    return EXIT_OK


def _parse_group(text: str) -> tuple[int, int]:
    try:
        g_text, count_text = text.split("/", 1)
        g, count = int(g_text), int(count_text)
    except ValueError as exc:
        raise ValueError(f"--group must look like g/G, got {text!r}") from exc
    if not 1 <= g <= count:
        raise ValueError(f"--group index {g} outside 1..{count}")
    return g, count


def _parse_epsilon(text: str, base_norm: float) -> float:
    relative = text.endswith("%")
    value = float(text[:-1] if relative else text)
    if not value > 0.0:
        raise ValueError(f"--epsilon must be positive, got {text!r}")
    return value * base_norm if relative else value


def _cmd_perturb(args) -> int:
    base = read_matrix(args.base)
    g, group_count = _parse_group(args.group)
    basis = svd(base)
    groups = energy_groups(basis, group_count)
    indices = groups[g - 1]
    if not indices:
        raise ValueError(f"energy band {g}/{group_count} contains no spectral components for this matrix")
    epsilon = _parse_epsilon(args.epsilon, float(np.linalg.norm(base)))
    spec = PerturbationSpec(side=args.side, group=tuple(indices), epsilon=epsilon, seed=args.seed)
    delta = generate(basis, spec)
    write_matrix(args.out, base + delta)
    record = {
        "kind": "perturb",
        "side": args.side,
        "group": g,
        "group_count": group_count,
        "epsilon": epsilon,
        "achieved_norm": float(np.linalg.norm(delta)),
        "seed": args.seed,
    }
    print(format_record(record))
    return EXIT_OK


def _load_config(path) -> SimulationConfig:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    return SimulationConfig.from_dict(data)


def _simulation_records(result: SimulationResult) -> list[dict]:
    lines = [{"kind": "config", **result.config.to_dict()}]
    for i, report in enumerate(result.reports):
        lines.append(
            _report_record(
                "round",
                report,
                probe_fidelity=result.probe_fidelity[i],
                edit_retention=result.edit_retention[i],
                side_condition_ok=result.side_condition_ok[i],
                sigma_top=report.energy_profile[:10],
            )
        )
    return lines


def _cmd_simulate(args) -> int:
    config = _load_config(args.config)
    result = run(config)
    lines = _simulation_records(result)
    if result.failed_round is not None:
        lines.append({"kind": "error", "round": result.failed_round, "message": result.error})
    _write_lines(args.out, lines)
    if args.snapshots:
        directory = Path(args.snapshots)
        directory.mkdir(parents=True, exist_ok=True)
        for i, snap in enumerate(result.snapshots, start=1):
            write_matrix(directory / f"round_{i:04d}.sgm", snap)
    if result.failed_round is not None:
        print(f"specshield: numerical failure in round {result.failed_round}: {result.error}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_sweep_tau(args) -> int:
    config = _load_config(args.config)
    taus = []
    for piece in args.taus.split(","):
        piece = piece.strip()
        if not piece:
            continue
        tau = float(piece)
        if not 0.0 <= tau < 1.0:
            raise ValueError(f"--taus entries must lie in [0, 1), got {tau}")
        if tau in taus:
            print(f"specshield: duplicate tau {tau} ignored", file=sys.stderr)
            continue
        taus.append(tau)
    if not taus:
        raise ValueError("--taus supplied no values")

    variants = [
        SimulationConfig.from_dict({**config.to_dict(), "tau": tau, "filter_enabled": True}) for tau in taus
    ]
    lines = []
    for tau, result in zip(taus, run_many(variants)):
        if result.failed_round is not None:
            _write_lines(args.out, lines)
            print(f"specshield: numerical failure at tau={tau}: {result.error}", file=sys.stderr)
            return EXIT_NUMERICAL
        final = result.reports[-1]
        lines.append(
            {
                "kind": "tau_summary",
                "tau": tau,
                "rounds": len(result.reports),
                "final_ls": final.ls,
                "final_ss_max": max(row.max_value for row in final.ss_rows),
                "final_probe_fidelity": result.probe_fidelity[-1],
                "final_edit_retention": result.edit_retention[-1],
            }
        )
    _write_lines(args.out, lines)
    return EXIT_OK


def _write_lines(path, records) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(format_record(record) + "\n")


if __name__ == "__main__":
    sys.exit(main())
