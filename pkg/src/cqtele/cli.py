"""Command-line harness.

    cqtele teleport --trials N --seed S --out PATH
    cqtele sdc --message BITS --permission {true|false} --adversary {none|ir-z|ir-x|depol}
               [--p P] [--target {A|B}] --seed S --out PATH
    cqtele verify --trials N --adversary ... --seed S [--out PATH]
    cqtele table

``SIM_SEED`` supplies the seed when ``--seed`` is absent. Output files are
deterministic for a given configuration; the optional ``metadata`` block
(``--metadata``) is the only part that varies between runs.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from scipy.stats import binomtest

from . import __version__, kernels
from .rng import trial_uniforms
from .sdc import (
    AdversaryModel,
    AttackKind,
    VerificationPolicy,
    prepare_channel,
    run_session,
    run_tests,
)
from .teleport import BellOutcome, CharlieBit, CorrectionOp, correction_for, haar_amplitudes, teleport_many

SCHEMA_VERSION = 1
FIDELITY_FLOOR = 1 - 1e-9
CHUNK = 1 << 15

EXIT_OK = 0
EXIT_TRIAL_FAILED = 1
EXIT_USAGE = 2


@dataclass
class AggregateStats:
    trials: int
    counts: dict[str, int] = field(default_factory=dict)
    mean_fidelity: float | None = None
    min_fidelity: float | None = None
    decode_accuracy: float | None = None
    failure_rates: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"trials": self.trials, "counts": self.counts}
        for key in ("mean_fidelity", "min_fidelity", "decode_accuracy"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        if self.failure_rates:
            out["failure_rates"] = self.failure_rates
        return out


def branch_key(charlie: int, bell: int) -> str:
    return f"{CharlieBit(charlie).name}/{BellOutcome(bell).name}"


def dumps_transcript(doc: dict) -> str:
    """Pretty JSON with one line per entry of the ``records`` array."""
    parts = []
    for key, value in doc.items():
        if key == "records" and value:
            lines = ",\n".join("    " + json.dumps(r, separators=(", ", ": ")) for r in value)
            text = "[\n" + lines + "\n  ]"
        else:
            text = json.dumps(value, indent=2).replace("\n", "\n  ")
        parts.append(f"  {json.dumps(key)}: {text}")
    return "{\n" + ",\n".join(parts) + "\n}\n"


def write_transcript(path: str | None, doc: dict, metadata: bool) -> None:
    if metadata:
        doc["metadata"] = {
            "created": datetime.now(timezone.utc).isoformat(),
            "backend": kernels.BACKEND,
            "tool_version": __version__,
        }
    if path:
        Path(path).write_text(dumps_transcript(doc), encoding="utf-8")


def envelope(kind: str, seed: int, config: dict, records: list, summary: dict) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "kind": kind,
        "seed": seed,
        "config": config,
        "records": records,
        "summary": summary,
    }


def _teleport_chunk(seed: int, start: int, stop: int):
    u = trial_uniforms(seed, np.arange(start, stop), 4)
    inputs = haar_amplitudes(u[:, 0], u[:, 1])
    return inputs, teleport_many(inputs, u[:, 2:4])


def cmd_teleport(args) -> int:
    bounds = [(s, min(s + CHUNK, args.trials)) for s in range(0, args.trials, CHUNK)]
    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        chunks = list(pool.map(lambda b: _teleport_chunk(args.seed, *b), bounds))
    inputs = np.concatenate([c[0] for c in chunks])
    charlie = np.concatenate([c[1].charlie for c in chunks])
    bell = np.concatenate([c[1].bell for c in chunks])
    correction = np.concatenate([c[1].correction for c in chunks])
    fid = np.concatenate([c[1].fidelity for c in chunks])

    counts = np.zeros((2, 4), dtype=np.int64)
    np.add.at(counts, (charlie, bell), 1)
    stats = AggregateStats(
        trials=args.trials,
        counts={branch_key(c, b): int(counts[c, b]) for c in CharlieBit for b in BellOutcome},
        mean_fidelity=float(fid.mean()),
        min_fidelity=float(fid.min()),
    )
    failed = int(np.sum(fid < FIDELITY_FLOOR))
    summary = stats.to_dict() | {"failed_trials": failed}

    records = []
    if args.out and not args.no_records:
        for i in range(args.trials):
            a, b = inputs[i]
            records.append(
                {
                    "trial": i,
                    "input": [float(a.real), float(a.imag), float(b.real), float(b.imag)],
                    "charlie": CharlieBit(charlie[i]).name,
                    "bell": BellOutcome(bell[i]).name,
                    "correction": CorrectionOp(correction[i]).name,
                    "fidelity": float(fid[i]),
                }
            )
    config = {"subcommand": "teleport", "trials": args.trials, "seed": args.seed}
    write_transcript(args.out, envelope("teleport", args.seed, config, records, summary), args.metadata)
    print(json.dumps(summary, indent=2))
    return EXIT_TRIAL_FAILED if failed else EXIT_OK


def _adversary(args, parser) -> AdversaryModel:
    kind = AttackKind(args.adversary)
    if kind is AttackKind.DEPOLARIZE and args.p is None:
        parser.error("--adversary depol requires --p")
    if kind is not AttackKind.DEPOLARIZE and args.p is not None:
        parser.error("--p only applies to --adversary depol")
    try:
        return AdversaryModel(kind, args.p, args.target)
    except ValueError as exc:
        parser.error(str(exc))


def _policy(args, parser) -> VerificationPolicy:
    try:
        return VerificationPolicy(
            sacrifice_fraction=args.sacrifice_fraction,
            min_sacrifice=args.min_sacrifice,
            z_test_weight=args.z_weight,
            failure_threshold=args.threshold,
        )
    except ValueError as exc:
        parser.error(str(exc))


def cmd_sdc(args, parser) -> int:
    adversary = _adversary(args, parser)
    policy = _policy(args, parser)
    transcript = run_session(
        args.message,
        args.permission,
        policy,
        adversary,
        args.seed,
        withhold_charlie=args.withhold_charlie,
    )
    core = transcript.to_dict()
    summary = {
        "message": core["message"],
        "decoded": core["decoded"],
        "accuracy": core["accuracy"],
        "aborted": transcript.aborted_reason is not None,
        "aborted_reason": transcript.aborted_reason,
        "prepared": transcript.prepared,
        "teleported": transcript.teleported,
        "verification": core["verification"],
    }
    config = {
        "subcommand": "sdc",
        "message": core["message"],
        "permission": args.permission,
        "adversary": adversary.to_dict(),
        "policy": policy.to_dict(),
        "withhold_charlie": args.withhold_charlie,
        "seed": args.seed,
    }
    write_transcript(
        args.out, envelope("sdc", args.seed, config, core["entries"], summary), args.metadata
    )
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def rate_with_interval(failures: int, tested: int, confidence: float) -> dict:
    if tested == 0:
        return {"tested": 0, "failures": 0, "rate": None, "ci_low": None, "ci_high": None}
    ci = binomtest(failures, tested).proportion_ci(confidence_level=confidence, method="wilson")
    return {
        "tested": tested,
        "failures": failures,
        "rate": failures / tested,
        "ci_low": float(ci.low),
        "ci_high": float(ci.high),
    }


def cmd_verify(args, parser) -> int:
    adversary = _adversary(args, parser)
    if not 0.0 <= args.z_weight <= 1.0:
        parser.error("--z-weight must be in [0, 1]")
    rng = np.random.default_rng(args.seed)
    triplets = prepare_channel(args.trials, adversary, rng)
    z_tests = rng.random(args.trials) < args.z_weight
    uniforms = rng.random(args.trials)
    failed = run_tests(np.stack([t.amps for t in triplets]), z_tests, uniforms)

    z_fail = int(np.sum(failed & z_tests))
    x_fail = int(np.sum(failed & ~z_tests))
    z_tested = int(np.sum(z_tests))
    summary = {
        "trials": args.trials,
        "confidence": args.confidence,
        "z_test": rate_with_interval(z_fail, z_tested, args.confidence),
        "x_test": rate_with_interval(x_fail, args.trials - z_tested, args.confidence),
        "overall_failure_rate": (z_fail + x_fail) / args.trials,
    }
    records = [
        {"index": i, "test": "Z" if z else "X", "failed": bool(f)}
        for i, (z, f) in enumerate(zip(z_tests, failed))
    ] if args.out else []
    config = {
        "subcommand": "verify",
        "trials": args.trials,
        "adversary": adversary.to_dict(),
        "z_test_weight": args.z_weight,
        "seed": args.seed,
    }
    write_transcript(args.out, envelope("verify", args.seed, config, records, summary), args.metadata)
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def cmd_table(args) -> int:
    rows = [(c.name, b.name, correction_for(c, b).name) for c in CharlieBit for b in BellOutcome]
    if args.json:
        print(json.dumps([{"charlie": c, "bell": b, "correction": op} for c, b, op in rows], indent=2))
    else:
        print(f"{'charlie':<8}{'bell':<11}correction")
        for c, b, op in rows:
            print(f"{c:<8}{b:<11}{op}")
    return EXIT_OK


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be non-negative")
    return value


def _bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def _bits(text: str) -> str:
    if not text or set(text) - {"0", "1"}:
        raise argparse.ArgumentTypeError("message must match [01]+")
    return text


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cqtele", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=None)
    common.add_argument("--out", default=None, help="transcript path (JSON)")
    common.add_argument("--metadata", action="store_true", help="add a wall-clock metadata block")

    attack = argparse.ArgumentParser(add_help=False)
    attack.add_argument("--adversary", choices=[k.value for k in AttackKind], default="none")
    attack.add_argument("--p", type=float, default=None, help="depolarizing probability")
    attack.add_argument("--target", choices=["A", "B"], default="B")

    tp = sub.add_parser("teleport", parents=[common], help="random-input teleportation trials")
    tp.add_argument("--trials", type=_positive, required=True)
    tp.add_argument("--workers", type=_positive, default=1)
    tp.add_argument("--no-records", action="store_true", help="omit per-trial records")

    sp = sub.add_parser("sdc", parents=[common, attack], help="one direct-communication session")
    sp.add_argument("--message", type=_bits, required=True)
    sp.add_argument("--permission", type=_bool, default=True)
    sp.add_argument("--sacrifice-fraction", type=float, default=0.25)
    sp.add_argument("--min-sacrifice", type=int, default=20)
    sp.add_argument("--z-weight", type=float, default=0.5)
    sp.add_argument("--threshold", type=float, default=0.0)
    sp.add_argument(
        "--withhold-charlie",
        action="store_true",
        help="diagnostic: Bob never learns Charlie's bit and applies no correction",
    )

    vp = sub.add_parser("verify", parents=[common, attack], help="channel-check failure rates")
    vp.add_argument("--trials", type=_positive, required=True)
    vp.add_argument("--z-weight", type=float, default=0.5)
    vp.add_argument("--confidence", type=float, default=0.95)

    table = sub.add_parser("table", help="print the correction table")
    table.add_argument("--json", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", "absent") is None:
        env = os.environ.get("SIM_SEED")
        try:
            args.seed = _seed(env) if env is not None else 0
        except (ValueError, argparse.ArgumentTypeError):
            parser.error(f"SIM_SEED must be a non-negative integer, got {env!r}")
    if args.subcommand == "teleport":
        return cmd_teleport(args)
    if args.subcommand == "sdc":
        return cmd_sdc(args, parser)
    if args.subcommand == "verify":
        return cmd_verify(args, parser)
    return cmd_table(args)


if __name__ == "__main__":
    sys.exit(main())
