"""Command-line interface: parse pulse files, verify sequences, run experiments.

Commands:
    parse <file>                       canonical text + element/duration table
    verify [--isotropic] [--flip-h]    pulse sequences vs gate-level targets
    run <f|all> [options]              reference + search experiments, spectra

Exit codes: 0 success, 2 pulse-text parse failure, 3 verification failure,
4 configuration error.

Structured-record output (``--format records`` and every ``--out`` file)
uses fixed 12-significant-digit decimals and deterministic ordering, so
identical inputs produce byte-identical output.  Human output rounds to 4
significant digits.
"""

from __future__ import annotations

import argparse
import json
import sys as _sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from .circuits import gates_to_text, disentangle_circuit, grover_circuit, verify_pulse_against_gate
from .dynamics import ExecutionOptions
from .experiment import (
    ExperimentResult,
    Werner,
    run_grover,
    run_reference,
    spectrum_records,
)
from .pulse_dsl import ParseError, duration_of, parse, serialize, serialize_element
from .spin_model import BASIS_LABELS, Delay, GroverFunction, SpinSystem, resolve_duration

__all__ = [
    "EXIT_OK",
    "EXIT_PARSE_FAILURE",
    "EXIT_VERIFY_FAILURE",
    "EXIT_CONFIG_ERROR",
    "main",
]

EXIT_OK = 0
EXIT_PARSE_FAILURE = 2
EXIT_VERIFY_FAILURE = 3
EXIT_CONFIG_ERROR = 4

_VERIFY_THRESHOLD = 1.0 - 1e-6


class _ConfigError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    """argparse that exits with the configuration-error code."""

    def error(self, message: str):
        self.print_usage(_sys.stderr)
        _sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_CONFIG_ERROR)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _fmt_human(x: float) -> str:
    return f"{x:.4g}"


def _load_system(path: Optional[str]) -> SpinSystem:
    if path is None:
        return SpinSystem()
    try:
        return SpinSystem.load(path)
    except (OSError, ValueError) as exc:
        raise _ConfigError(f"cannot load spin system from {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# parse
# ---------------------------------------------------------------------------

def _cmd_parse(args: argparse.Namespace) -> int:
    try:
        text = Path(args.file).read_text(encoding="utf-8")
    except OSError as exc:
        _sys.stderr.write(f"error: cannot read {args.file}: {exc}\n")
        return EXIT_CONFIG_ERROR
    try:
        seq = parse(text)
    except ParseError as exc:
        _sys.stderr.write(f"parse error: {exc}\n")
        return EXIT_PARSE_FAILURE
    sys_ = SpinSystem()
    print(f"canonical: {serialize(seq)}")
    print("idx element duration_s")
    for i, el in enumerate(seq, start=1):
        dur = resolve_duration(el.duration, sys_) if isinstance(el, Delay) else 0.0
        print(f"{i} {serialize_element(el)} {_fmt(dur)}")
    print(f"total_delay_s {_fmt(duration_of(seq, sys_))}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _cmd_verify(args: argparse.Namespace) -> int:
    sys_ = _load_system(args.system)
    if args.isotropic:
        sys_ = replace(sys_, coupling_model="isotropic")
    h_positive_y = not args.flip_h
    checks: list[tuple[str, float]] = [
        ("P_prep", verify_pulse_against_gate(sys_, "P_prep", h_positive_y=h_positive_y))
    ]
    for label in BASIS_LABELS:
        fid = verify_pulse_against_gate(
            sys_, "grover", GroverFunction(label), h_positive_y=h_positive_y
        )
        checks.append((f"P_{label}", fid))
    failed = False
    for name, fid in checks:
        ok = fid >= _VERIFY_THRESHOLD
        failed = failed or not ok
        print(f"{name} fidelity={_fmt(fid)} {'PASS' if ok else 'FAIL'}")
    return EXIT_VERIFY_FAILURE if failed else EXIT_OK


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------

def _outcome_label(result: ExperimentResult) -> Optional[str]:
    if result.outcome is None:
        return None
    return f"{result.outcome[0]}{result.outcome[1]}"


def _run_record(name: str, result: ExperimentResult, eps_requested: float, eps_used: float,
                mode: str, relaxation: bool) -> str:
    outcome = _outcome_label(result)
    fields = [
        f'"run": "{name}"',
        f'"mode": "{mode}"',
        f'"epsilon_requested": {_fmt(eps_requested)}',
        f'"epsilon_used": {_fmt(eps_used)}',
        f'"relaxation": {"true" if relaxation else "false"}',
        f'"outcome": {"null" if outcome is None else json.dumps(outcome)}',
        f'"confidence_q1": {_fmt(result.confidence[0])}',
        f'"confidence_q2": {_fmt(result.confidence[1])}',
        f'"attenuation": {_fmt(result.attenuation)}',
        f'"total_delay_s": {_fmt(result.total_delay_s)}',
    ]
    return "{" + ", ".join(fields) + "}"


def _report_text(name: str, result: ExperimentResult, eps_requested: float, eps_used: float,
                 mode: str, relaxation: bool) -> str:
    outcome = _outcome_label(result)
    lines = [
        f"experiment = {'reference' if name == 'reference' else 'grover'}",
        f"run = {name}",
        f"mode = {mode}",
        f"epsilon_requested = {_fmt(eps_requested)}",
        f"epsilon_used = {_fmt(eps_used)}",
        f"relaxation = {'on' if relaxation else 'off'}",
        f"outcome = {outcome if outcome is not None else 'ambiguous'}",
        f"confidence_q1 = {_fmt(result.confidence[0])}",
        f"confidence_q2 = {_fmt(result.confidence[1])}",
        f"attenuation = {_fmt(result.attenuation)}",
        f"total_delay_s = {_fmt(result.total_delay_s)}",
        f"sequence = {result.sequence_text}",
    ]
    return "\n".join(lines) + "\n"


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        sys_ = _load_system(args.system)
        eps_requested = args.epsilon
        eps_used = eps_requested
        if eps_requested > 1.0 and args.clamp_epsilon:
            eps_used = 1.0
        try:
            spec = Werner(eps_used)
        except ValueError as exc:
            raise _ConfigError(str(exc)) from exc
    except _ConfigError as exc:
        _sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG_ERROR

    opts = ExecutionOptions(relaxation_enabled=args.relaxation)
    labels = list(BASIS_LABELS) if args.oracle == "all" else [args.oracle]

    runs: list[tuple[str, ExperimentResult, str]] = [
        ("reference", run_reference(sys_, spec, opts), "pulse")
    ]
    for label in labels:
        result = run_grover(sys_, GroverFunction(label), spec, args.mode, opts)
        runs.append((label, result, args.mode))

    if eps_used != eps_requested:
        print(f"note: epsilon clamped from {_fmt(eps_requested)} to {_fmt(eps_used)}")

    if args.format == "human":
        print("run outcome conf_q1 conf_q2 attenuation delay_s")
        for name, result, mode in runs:
            outcome = _outcome_label(result) or "ambiguous"
            print(
                f"{name} {outcome} {_fmt_human(result.confidence[0])} "
                f"{_fmt_human(result.confidence[1])} {_fmt_human(result.attenuation)} "
                f"{_fmt_human(result.total_delay_s)}"
            )
        if args.mode == "circuit":
            for label in labels:
                print(f"circuit {label}:")
                print(gates_to_text(disentangle_circuit() + grover_circuit(GroverFunction(label))))
    else:
        for name, result, mode in runs:
            print(_run_record(name, result, eps_requested, eps_used, mode, args.relaxation))

    if args.out is not None:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        manifest: dict[str, object] = {
            "epsilon_requested": _fmt(eps_requested),
            "epsilon_used": _fmt(eps_used),
            "mode": args.mode,
            "relaxation": args.relaxation,
            "runs": [],
        }
        for name, result, mode in runs:
            spectrum_file = f"spectrum_{name}.jsonl"
            report_file = f"report_{name}.txt"
            (out_dir / spectrum_file).write_text(
                "\n".join(spectrum_records(result.spectrum)) + "\n", encoding="utf-8"
            )
            (out_dir / report_file).write_text(
                _report_text(name, result, eps_requested, eps_used, mode, args.relaxation),
                encoding="utf-8",
            )
            manifest["runs"].append(
                {"run": name, "spectrum": spectrum_file, "report": report_file}
            )
        (out_dir / "manifest.json").write_text(
            json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser() -> _ArgumentParser:
    parser = _ArgumentParser(
        prog="nmrgrover",
        description="Two-qubit pulse-level NMR simulator: parse pulse files, "
        "verify sequences against gate circuits, run search experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_parse = sub.add_parser("parse", help="parse a .seq pulse file")
    p_parse.add_argument("file", help="pulse-sequence text file")
    p_parse.set_defaults(func=_cmd_parse)

    p_verify = sub.add_parser("verify", help="verify pulse sequences against gate targets")
    p_verify.add_argument("--isotropic", action="store_true",
                          help="use the isotropic coupling model")
    p_verify.add_argument("--flip-h", action="store_true",
                          help="flip the pseudo-Hadamard axis convention")
    p_verify.add_argument("--system", help="spin-system config file")
    p_verify.set_defaults(func=_cmd_verify)

    p_run = sub.add_parser("run", help="run the reference and search experiments")
    p_run.add_argument("oracle", choices=list(BASIS_LABELS) + ["all"],
                       help="oracle satisfying input, or 'all'")
    p_run.add_argument("--epsilon", type=float, default=1.0, help="initial-state purity")
    p_run.add_argument("--clamp-epsilon", action="store_true",
                       help="clamp epsilon above 1 down to 1 instead of failing")
    p_run.add_argument("--mode", choices=["circuit", "pulse"], default="pulse")
    p_run.add_argument("--relaxation", action="store_true", help="enable T2 dephasing")
    p_run.add_argument("--system", help="spin-system config file")
    p_run.add_argument("--out", help="directory for spectrum/report files")
    p_run.add_argument("--format", choices=["human", "records"], default="human")
    p_run.set_defaults(func=_cmd_run)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _ConfigError as exc:
        _sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
