"""Command-line entry point: ``framefree {verify,play,bound,bell,tasks}``.

JSON is the canonical output; the same arguments always give the same bytes.
Exit codes: 0 success, 1 failed check, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import games, protocols, states, tasks
from .core import RngStream

DEFAULT_SEED = 20031
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(payload: dict, args, rows: list[dict] | None = None) -> None:
    if args.format == "json":
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    elif args.format == "csv":
        if rows is None:
            raise UsageError(f"--format csv needs per-trial data; '{args.command}' has none")
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else [], lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
    else:
        text = _human(payload)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _human(payload: dict, indent: str = "") -> str:
    lines = []
    for key, value in payload.items():
        if isinstance(value, dict):
            lines.append(f"{indent}{key}:")
            lines.append(_human(value, indent + "  ").rstrip("\n"))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{indent}{key}:")
            for item in value:
                lines.append(indent + "  - " + ", ".join(f"{k}={v}" for k, v in item.items()))
        else:
            lines.append(f"{indent}{key}: {value}")
    return "\n".join(lines) + "\n"


def cmd_verify(args) -> int:
    trials = args.trials if args.trials is not None else 100
    flip = ("GHZ:zzz", 1) if args.corrupt else None
    decomps = states.verify_decompositions(flip=flip)
    expansions = states.verify_expansions()
    constants = states.verify_constants()
    master = RngStream(args.seed)
    invariance = [
        states.verify_u4_invariance(name, trials, master.child(i))
        for i, name in enumerate(("phi0", "phi1", "psi0", "psi1"))
    ]
    invariance.append(states.verify_psi12_invariance(trials, master.child(4)))
    failures = [c.name for c in decomps + expansions if not c.passed]
    failures += ["constants:" + c.name for c in constants if not c.passed]
    failures += [r.name + ":invariance" for r in invariance if not r.passed]
    payload = {
        "command": "verify",
        "seed": args.seed,
        "rng": RngStream.algorithm,
        "trials": trials,
        "decompositions": [c.to_dict() for c in decomps],
        "expansions": [c.to_dict() for c in expansions],
        "constants": [c.to_dict() for c in constants],
        "invariance": [r.to_dict() for r in invariance],
        "passed": not failures,
        "first_failure": failures[0] if failures else None,
    }
    if args.tables:
        payload["tables"] = protocols.export_tables()
    _emit(payload, args)
    if failures:
        print(f"verification failed: {failures[0]}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_play(args) -> int:
    trials = args.trials if args.trials is not None else 10_000
    log = [] if args.transcripts else None
    records = games.run_trials(args.strategy, args.adversary, trials, args.seed, transcripts=log)
    payload = games.summarize(records, args.strategy, args.adversary, args.seed)
    payload["command"] = "play"
    if args.transcripts:
        if args.strategy != "frame-free":
            raise UsageError("--transcripts is only available for the frame-free strategy")
        with open(args.transcripts, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["trial", "block", "qubit", "basis", "outcome"])
            for trial, block, outcome in log:
                writer.writerows(protocols.transcript_rows(trial, block, outcome))
    _emit(payload, args, rows=[r.to_row() for r in records])
    return EXIT_OK


def cmd_bound(args) -> int:
    if args.game == "vaidman":
        best, maximizers = games.classical_bound_bruteforce()
        rescored = all(games.classical_score(s) == best for s in maximizers)
        payload = {
            "command": "bound",
            "game": "vaidman",
            "bound": str(best),
            "bound_float": float(best),
            "n_strategies": 64,
            "n_maximizers": len(maximizers),
            "maximizers": [s.label() for s in maximizers],
            "rescored": rescored,
        }
        ok = rescored and bool(maximizers)
    else:
        best = tasks.apples_classical_bound()
        payload = {
            "command": "bound",
            "game": "apples",
            "bound": str(best),
            "bound_float": float(best),
            "n_allotments": len(tasks.all_allotments()),
        }
        ok = True
    _emit(payload, args)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_bell(args) -> int:
    report = games.hidden_variable_check(drop=args.drop_constraint)
    payload = {"command": "bell", "dropped": args.drop_constraint, **report.to_dict()}
    _emit(payload, args)
    return EXIT_OK


def cmd_tasks(args) -> int:
    if args.task in ("apples", "apples-frame-free"):
        trials = args.trials if args.trials is not None else 100
        adversary = args.adversary if args.task == "apples-frame-free" else "none"
        payload = tasks.run_apples(args.task, trials, args.seed, adversary)
        payload.update(command="tasks", qber=None, sift_rate=None)
        _emit(payload, args)
        return EXIT_OK
    trials = args.trials if args.trials is not None else 10_000
    result = tasks.secret_share(trials, args.seed, args.adversary, args.eavesdropper)
    payload = result.report()
    payload["command"] = "tasks"
    rows = [
        {
            "round": r.round_id,
            "bases": r.bases,
            "kept": int(r.kept),
            "sampled": int(r.sampled) if r.kept else "",
            "answers": "".join(map(str, r.answers)) if r.answers else "",
            "reconstructed": "" if r.reconstructed is None else r.reconstructed,
        }
        for r in result.rounds
    ]
    _emit(payload, args, rows=rows)
    return EXIT_OK


def _drop(value: str) -> int:
    n = int(value)
    if not 1 <= n <= len(games.CONSTRAINTS):
        raise argparse.ArgumentTypeError(f"constraint index must be 1..{len(games.CONSTRAINTS)}")
    return n


def _seed(value: str) -> int:
    n = int(value)
    if not 0 <= n < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return n


def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    common.add_argument("--trials", type=_positive, default=None, help="trial count (per-command default)")
    common.add_argument("--format", choices=("json", "csv", "human"), default="json")
    common.add_argument("--out", default=None, help="write to this path instead of stdout")

    parser = argparse.ArgumentParser(prog="framefree", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="state identities, expansions, invariance")
    p.add_argument("--corrupt", action="store_true", help="flip one sign in a decomposition (self-test)")
    p.add_argument("--tables", action="store_true", help="include the readout classification tables")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("play", parents=[common], help="play the three-player game")
    p.add_argument("--strategy", choices=games.STRATEGIES, default="frame-free")
    p.add_argument("--adversary", choices=games.ADVERSARIES, default="none")
    p.add_argument("--transcripts", default=None, metavar="PATH", help="per-measurement CSV log (frame-free only)")
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("bound", parents=[common], help="exact classical bounds")
    p.add_argument("--game", choices=("vaidman", "apples"), default="vaidman")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("bell", parents=[common], help="hidden-variable assignment count")
    p.add_argument("--drop-constraint", type=_drop, default=None, metavar="{1,2,3,4}")
    p.set_defaults(func=cmd_bell)

    p = sub.add_parser("tasks", parents=[common], help="apples game and secret sharing")
    p.add_argument("--task", choices=("apples", "apples-frame-free", "secret-share"), default="apples")
    p.add_argument("--adversary", choices=games.ADVERSARIES, default="none")
    p.add_argument("--eavesdropper", choices=tasks.EAVESDROPPERS, default="off")
    p.set_defaults(func=cmd_tasks)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"framefree: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
