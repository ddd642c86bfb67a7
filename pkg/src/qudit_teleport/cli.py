"""Command-line interface: ``run``, ``verify`` and ``sweep``.

Reports are JSON with a fixed key order and every float written with 17
significant digits, so identical flags give byte-identical output apart
from the trailing ``elapsed_ms`` field.

Exit codes: 0 pass, 1 verification or fidelity failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import oracle, protocol
from .errors import TeleportError
from .hilbert import make_shape

SCHEMA_VERSION = "1.0"
FIDELITY_FLOOR = 1.0 - 1e-10

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2


class InputError(Exception):
    pass


def _format(value, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"non-finite float {value} in report")
        text = format(value, ".17g")
        return text if any(c in text for c in ".en") else text + ".0"
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_format(v, indent, level + 1)}"
                 for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        # short numeric leaves (complex pairs) stay on one line
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool)
               for v in value):
            return "[" + ", ".join(_format(v, indent, level + 1) for v in value) + "]"
        items = [pad + _format(v, indent, level + 1) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps_report(report: dict) -> str:
    """Canonical text for a report dict; key order is the dict's insertion order."""
    return _format(report, 2, 0) + "\n"


def _emit(report: dict, output: str | None) -> None:
    text = dumps_report(report)
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _complex_pairs(values) -> list[list[float]]:
    return [[float(np.real(v)), float(np.imag(v))] for v in values]


def _u64(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer: {text}")
    return value


def _parse_outcomes(text: str) -> protocol.OutcomeSpec | tuple:
    if text == "exhaustive":
        return protocol.Exhaustive()
    kind, _, arg = text.partition(":")
    try:
        if kind == "sample":
            trials = int(arg)
            if trials < 1:
                raise ValueError
            return ("sample", trials)
        if kind == "forced":
            j, n = (int(x) for x in arg.split(","))
            return protocol.Forced(j, n)
    except ValueError:
        pass
    raise InputError(f"--outcomes must be exhaustive, sample:K or forced:J,N; got {text!r}")


def _load_state(path: str, s_level: int) -> tuple[np.ndarray, bool]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read state file {path}: {exc}")
    if not isinstance(doc, dict) or not isinstance(doc.get("amplitudes"), list):
        raise InputError('state file must be {"amplitudes": [[re, im], ...]}')
    amps = []
    for pair in doc["amplitudes"]:
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)):
            raise InputError(f"amplitude entries must be [re, im] pairs, got {pair!r}")
        amps.append(complex(pair[0], pair[1]))
    if len(amps) != s_level:
        raise InputError(f"state file has {len(amps)} amplitudes, s-level is {s_level}")
    return np.array(amps, dtype=np.complex128), bool(doc.get("normalize", False))


def _input_amplitudes(state_flag: str, s_level: int, seed: int):
    if state_flag == "random":
        return protocol.random_amplitudes(s_level, seed), False
    return _load_state(state_flag, s_level)


def _run_report(shape, amps, normalize, mode, outcomes, seed) -> tuple[dict, bool]:
    if isinstance(outcomes, tuple):
        spec = protocol.Sampled(seed, outcomes[1])
    else:
        spec = outcomes
    transcripts = protocol.run_teleportation(shape, amps, mode=mode, outcome=spec,
                                             normalize=normalize)
    entries = []
    for tr in transcripts:
        entry = {}
        if tr.trial is not None:
            entry["trial"] = tr.trial
            entry["seed"] = tr.seed
        entry.update(j=tr.record.j, n=tr.record.n, probability=tr.record.probability,
                     fidelity=tr.fidelity)
        entries.append(entry)
    fids = [tr.fidelity for tr in transcripts]
    report = {
        "schema_version": SCHEMA_VERSION,
        "s_level": shape.s_level,
        "qubit_count": shape.qubit_count,
        "n_dim": shape.n_dim,
        "bit_order": "little-endian: bit k of n/b is qubit A_k/B_k",
        "mode": mode,
        "seed": seed,
        "input_amplitudes": _complex_pairs(transcripts[0].input_amplitudes),
        "outcomes": entries,
        "mean_fidelity": float(np.mean(fids)),
        "min_fidelity": float(np.min(fids)),
    }
    return report, bool(min(fids) >= FIDELITY_FLOOR)


def _verify_report(report: oracle.VerificationReport) -> dict:
    return {
        "passed": report.passed,
        "checks": [
            {"name": c.name, "passed": c.passed, "skipped": c.skipped,
             "deviation": c.deviation, "tolerance": c.tolerance, "detail": c.detail}
            for c in report.checks
        ],
    }


def cmd_run(args) -> int:
    shape = make_shape(args.s_level, args.qubits)
    outcomes = _parse_outcomes(args.outcomes)
    amps, normalize = _input_amplitudes(args.state, shape.s_level, args.seed)
    start = time.perf_counter()
    report, ok = _run_report(shape, amps, normalize, args.mode, outcomes, args.seed)
    report["passed"] = ok
    report["elapsed_ms"] = (time.perf_counter() - start) * 1e3
    _emit(report, args.output)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args) -> int:
    shape = make_shape(args.s_level, args.qubits)
    start = time.perf_counter()
    result = oracle.check_all(shape, trials=args.trials, seed=args.seed, dense_cap=args.dense_cap)
    report = {
        "schema_version": SCHEMA_VERSION,
        "s_level": shape.s_level,
        "qubit_count": shape.qubit_count,
        "n_dim": shape.n_dim,
        "trials": args.trials,
        "seed": args.seed,
        "dense_cap": args.dense_cap,
    }
    report.update(_verify_report(result))
    report["elapsed_ms"] = (time.perf_counter() - start) * 1e3
    _emit(report, args.output)
    return EXIT_OK if result.passed else EXIT_FAIL


def cmd_sweep(args) -> int:
    if args.s_min < 2 or args.s_max < 2:
        raise InputError("s-min and s-max must be ≥ 2")
    if args.s_min > args.s_max:
        raise InputError(f"s-min ({args.s_min}) exceeds s-max ({args.s_max})")
    shapes = [make_shape(s, args.qubits) for s in range(args.s_min, args.s_max + 1)]
    start = time.perf_counter()
    entries = {}
    all_ok = True
    for shape in shapes:
        S = shape.s_level
        entry_seed = protocol.mix_seed(args.seed, S)
        min_fid = 1.0
        max_prob_dev = 0.0
        for t in range(args.trials):
            amps = protocol.random_amplitudes(S, protocol.mix_seed(entry_seed, t))
            for tr in protocol.run_teleportation(shape, amps, mode=args.mode):
                min_fid = min(min_fid, tr.fidelity)
                max_prob_dev = max(max_prob_dev,
                                   abs(tr.record.probability - 1.0 / (S * shape.n_dim)))
        verification = oracle.check_all(shape, trials=args.trials, seed=entry_seed,
                                        dense_cap=args.dense_cap)
        run_ok = min_fid >= FIDELITY_FLOOR and max_prob_dev <= oracle.UNIFORMITY_TOL
        ok = run_ok and verification.passed
        all_ok &= ok
        entries[str(S)] = {
            "s_level": S,
            "qubit_count": shape.qubit_count,
            "n_dim": shape.n_dim,
            "passed": ok,
            "run": {
                "mode": args.mode,
                "trials": args.trials,
                "outcomes_per_trial": S * shape.n_dim,
                "min_fidelity": min_fid,
                "max_probability_deviation": max_prob_dev,
            },
            "verify": _verify_report(verification),
        }
    report = {
        "schema_version": SCHEMA_VERSION,
        "s_min": args.s_min,
        "s_max": args.s_max,
        "trials": args.trials,
        "seed": args.seed,
        "passed": all_ok,
        "entries": entries,
        "elapsed_ms": (time.perf_counter() - start) * 1e3,
    }
    _emit(report, args.output)
    return EXIT_OK if all_ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qudit-teleport",
        description="Teleport S-level qudit states through two-level EPR pairs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, s_level_required=True):
        if s_level_required:
            p.add_argument("--s-level", type=int, required=True)
        p.add_argument("--qubits", type=int, default=None,
                       help="EPR pair count L (default: smallest L with 2**L >= S)")
        p.add_argument("--seed", type=_u64, default=0)
        p.add_argument("--mode", choices=("direct", "decomposed"), default="direct")
        p.add_argument("--output", default=None, help="report path (default: stdout)")

    run = sub.add_parser("run", help="teleport one input state")
    common(run)
    run.add_argument("--state", default="random",
                     help="'random' or a JSON file {\"amplitudes\": [[re, im], ...]}")
    run.add_argument("--outcomes", default="exhaustive",
                     help="exhaustive | sample:K | forced:J,N")
    run.set_defaults(func=cmd_run)

    verify = sub.add_parser("verify", help="check every claim against the brute-force oracle")
    common(verify)
    verify.add_argument("--trials", type=int, default=32)
    verify.add_argument("--dense-cap", type=int, default=oracle.DEFAULT_DENSE_CAP)
    verify.set_defaults(func=cmd_verify)

    sweep = sub.add_parser("sweep", help="run and verify over a range of S")
    common(sweep, s_level_required=False)
    sweep.add_argument("--s-min", type=int, required=True)
    sweep.add_argument("--s-max", type=int, required=True)
    sweep.add_argument("--trials", type=int, default=16)
    sweep.add_argument("--dense-cap", type=int, default=oracle.DEFAULT_DENSE_CAP)
    sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if getattr(args, "trials", 1) < 0:
        print("error: trials must be >= 0", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, TeleportError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
