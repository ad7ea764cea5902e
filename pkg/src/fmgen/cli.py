"""Command-line interface.

Exit codes: 0 success, 2 verification failure, 3 infeasible or unsupported
request, 4 I/O or parse failure (including bad command-line usage).
"""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager
from typing import Optional, Sequence

from . import __version__
from .base import GenerationConfig
from .errors import (
    CapabilityError, DegenerateInputError, DomainError, InfeasibleError, RejectionError,
)
from .experiment import PAPER_NUMS, run_row, table_csv
from .generate import generate_batch, verified_tags
from .linext import count_extensions, iter_extensions
from .psym import Partition
from .records import CapacityRecord, RecordError, read_jsonl, write_csv, write_jsonl
from .setfn import dual
from .verify import MeasureClassSpec, check_class, dual_label

EXIT_OK, EXIT_VERIFY, EXIT_INFEASIBLE, EXIT_IO = 0, 2, 3, 4
GENERATOR = f"fmgen {__version__}"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


@contextmanager
def _output(path: Optional[str]):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _read(path: str):
    if path == "-":
        return read_jsonl(sys.stdin)
    with open(path, encoding="utf-8", newline="") as fh:
        return read_jsonl(fh)


def _spec_from_args(args) -> MeasureClassSpec:
    params = {"strict": args.strict}
    if args.K is not None:
        params["K"] = args.K
    if args.partition is not None:
        params["partition"] = Partition.parse(args.partition).blocks
        params["inner"] = args.inner
    label = args.cls
    if args.k is not None:
        if label.startswith("k-") or label.startswith(("upper-k-", "dual-k-")):
            return MeasureClassSpec(label, k=args.k, **params)
    return MeasureClassSpec.from_label(label, **params)


def cmd_gen(args) -> int:
    spec = _spec_from_args(args)
    config = GenerationConfig(seed=args.seed, walk_steps=args.walk_steps, rounds=args.rounds,
                              eta_fraction=args.eta_fraction, batch=max(args.count, 1))
    batch = generate_batch(args.n, spec, config, args.count, workers=args.threads)
    records = [
        CapacityRecord(args.n, tuple(mu.tolist()), tuple(verified_tags(spec, rep)), spec.to_json(),
                       args.seed, i, GENERATOR)
        for i, (mu, rep) in enumerate(batch)
    ]
    with _output(args.out) as out:
        if args.format == "csv":
            write_csv(records, out)
        else:
            write_jsonl(records, out, len(records), GENERATOR)
    return EXIT_OK


def _record_spec(rec: CapacityRecord, override: Optional[MeasureClassSpec]) -> MeasureClassSpec:
    if override is not None:
        return override
    if not rec.spec:
        raise RecordError(f"record {rec.index} carries no class spec")
    try:
        return MeasureClassSpec.from_json(rec.spec)
    except (DomainError, KeyError, TypeError) as exc:
        raise RecordError(f"record {rec.index}: bad class spec ({exc})") from None


def cmd_verify(args) -> int:
    _, records = _read(args.path)
    override = _spec_from_args(args) if args.cls else None
    failures = 0
    for pos, rec in enumerate(records):
        spec = _record_spec(rec, override)
        rep = check_class(rec.measure(), spec, args.tol)
        if not rep.passed:
            failures += 1
            print(f"record {pos}: fails {rep.tag}: violation {rep.worst_violation:.6g} at {rep.witness}")
    print(f"{len(records) - failures}/{len(records)} records pass")
    return EXIT_VERIFY if failures else EXIT_OK


def cmd_dual(args) -> int:
    _, records = _read(args.path)
    out_records = []
    for rec in records:
        spec = _record_spec(rec, None).dual() if rec.spec else None
        mu = dual(rec.measure())
        if spec is not None:
            rep = check_class(mu, spec, args.tol)
            if not rep.passed:
                print(f"record {rec.index}: dual fails {rep.tag} at {rep.witness}", file=sys.stderr)
                return EXIT_VERIFY
        tags = tuple(dual_label(t) for t in rec.tags)
        out_records.append(CapacityRecord(rec.n, tuple(mu.tolist()), tags,
                                          spec.to_json() if spec else {}, rec.seed, rec.index, rec.generator))
    with _output(args.out) as out:
        write_jsonl(out_records, out, len(out_records), GENERATOR)
    return EXIT_OK


def cmd_experiment(args) -> int:
    ns = args.n or [3, 4, 5, 6]
    nums = args.num or [PAPER_NUMS[n] for n in ns if n in PAPER_NUMS]
    if len(nums) != len(ns):
        raise UsageError("give one --num per --n")
    rows = [run_row(n, num, args.iterations, args.seed, args.attempts) for n, num in zip(ns, nums)]
    with _output(args.out) as out:
        out.write(table_csv(rows, with_stderr=args.stderr))
    return EXIT_OK


def cmd_enumerate(args) -> int:
    total = count_extensions(args.n)
    if args.count_only:
        print(total)
        return EXIT_OK
    with _output(args.out) as out:
        for order in iter_extensions(args.n):
            out.write(json.dumps(list(order)) + "\n")
    print(total, file=sys.stderr)
    return EXIT_OK


def _add_class_args(p, required: bool):
    p.add_argument("--class", dest="cls", required=required,
                   help="class tag, e.g. supermodular, k-additive or 2-additive")
    p.add_argument("--k", type=int, help="order for k-families")
    p.add_argument("--K", type=float, help="level at |A| = k+1 for k-interactive")
    p.add_argument("--partition", help='p-symmetric blocks, e.g. "1,2|3"')
    p.add_argument("--inner", default="normal", help="class enforced on the p-symmetric quotient")
    p.add_argument("--strict", action="store_true", help="require strict inequalities")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fmgen", description="Random generation and verification of capacities.")
    parser.add_argument("--version", action="version", version=GENERATOR)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate verified measures")
    _add_class_args(g, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--walk-steps", type=int, default=10)
    g.add_argument("--rounds", type=int, default=None, help="range adjustments per measure")
    g.add_argument("--eta-fraction", type=float, default=0.5)
    g.add_argument("--threads", type=int, default=None, help="worker processes (default: FMGEN_THREADS or CPU count)")
    g.add_argument("--format", choices=("json", "csv"), default="json")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", help="check records against their class")
    v.add_argument("path")
    _add_class_args(v, required=False)
    v.add_argument("--tol", type=float, default=1e-9)
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("dual", help="convert records to their dual measures")
    d.add_argument("path")
    d.add_argument("--tol", type=float, default=1e-9)
    d.add_argument("--out")
    d.set_defaults(func=cmd_dual)

    e = sub.add_parser("experiment", help="repetition-ratio table over additive batches")
    e.add_argument("--n", type=int, nargs="+")
    e.add_argument("--num", type=int, nargs="+")
    e.add_argument("--iterations", type=int, default=10)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--attempts", type=int, default=16, help="subset redraws for a blocked move")
    e.add_argument("--stderr", action="store_true", help="add standard-error columns")
    e.add_argument("--out")
    e.set_defaults(func=cmd_experiment)

    n = sub.add_parser("enumerate", help="list all linear extensions (n <= 4)")
    n.add_argument("--n", type=int, required=True)
    n.add_argument("--count-only", action="store_true", help="print the count only (n <= 5)")
    n.add_argument("--out")
    n.set_defaults(func=cmd_enumerate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"fmgen: {exc}", file=sys.stderr)
        return EXIT_IO
    except (RecordError, OSError, UnicodeDecodeError) as exc:
        print(f"fmgen: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InfeasibleError, CapabilityError, DomainError, DegenerateInputError) as exc:
        print(f"fmgen: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except RejectionError as exc:
        print(f"fmgen: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
