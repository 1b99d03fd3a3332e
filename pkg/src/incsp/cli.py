"""Command-line front end.

Exit status is 0 on success, 1 for usage or input errors and 2 when
``verify`` finds a violation.
"""
from __future__ import annotations

import argparse
import csv
import math
import random
import sys
import time
from typing import TextIO

from . import oracle
from .apsp import DETERMINISTIC, RANDOMIZED, IncAPSP
from .graph import Update, UpdateError, generate_random_sequence
from .instance import Instance, InstanceFormatError, Query, format_instance, parse_instance
from .offline import OfflineSSSP
from .sssp import SourceSSSP, default_xi

BENCH_COLUMNS = [
    "updates_applied",
    "queue_pops",
    "pushes",
    "edge_scans",
    "rank_increases",
    "shortcut_decreases",
    "wall_time_ns",
]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def fmt_value(x: float) -> str:
    if x == math.inf:
        return "inf"
    return repr(float(x))


def _max_weight(inst: Instance) -> float:
    return max([1.0] + [w for _, _, w in inst.edges] + [u.weight for u in inst.updates])


# structure builders ---------------------------------------------------------

def make_sssp(inst: Instance, eps: float, source: int) -> SourceSSSP:
    m = inst.n + len(inst.edges) + len(inst.updates)
    return SourceSSSP(inst.graph(), source, default_xi(eps, m), W=_max_weight(inst))


def make_apsp(inst: Instance, eps: float, variant: str, seed: int) -> IncAPSP:
    return IncAPSP(inst.graph(), eps, variant=variant, seed=seed,
                   m_hint=len(inst.edges) + len(inst.updates), W=_max_weight(inst))


def _replay(inst: Instance, apply, answer) -> list[str]:
    """Walk the ops in file order; ``apply`` takes updates, ``answer`` queries."""
    shadow = inst.graph()
    out = []
    for op, lineno in zip(inst.ops, inst.lines):
        try:
            if isinstance(op, Update):
                shadow.apply_update(op)
                apply(op)
            else:
                out.append(answer(op))
        except (UpdateError, UsageError) as exc:
            raise InstanceFormatError(lineno, str(exc)) from None
    return out


def run_sssp(inst: Instance, eps: float, source: int = 0) -> tuple[SourceSSSP, list[str]]:
    ds = make_sssp(inst, eps, source)

    def apply(op: Update):
        if op.tail != source:
            raise UsageError(f"update tail {op.tail} is not the source {source}")
        ds.source_insert(op.head, op.weight)

    def answer(q: Query):
        if q.kind != "sssp":
            raise UsageError(f"run-sssp cannot answer {q.kind} queries")
        (v,) = q.args
        return f"{v} {fmt_value(ds.estimate(v))}"

    return ds, _replay(inst, apply, answer)


def run_apsp(inst: Instance, eps: float, variant: str, seed: int) -> tuple[IncAPSP, list[str]]:
    x = make_apsp(inst, eps, variant, seed)

    def answer(q: Query):
        if q.kind == "apsp":
            u, v = q.args
        elif q.kind == "sssp":
            u, v = 0, q.args[0]
        else:
            raise UsageError("run-apsp cannot answer offline queries")
        return f"{u} {v} {fmt_value(x.query(u, v))}"

    return x, _replay(inst, x.update, answer)


def run_offline(inst: Instance, eps: float, source: int = 0) -> tuple[OfflineSSSP, list[str]]:
    g = inst.graph()
    for op, lineno in zip(inst.ops, inst.lines):
        if isinstance(op, Update):
            try:
                g.apply_update(op)
            except UpdateError as exc:
                raise InstanceFormatError(lineno, str(exc)) from None
    o = OfflineSSSP.build(inst.graph(), inst.updates, eps, source)
    out = []
    for op, lineno in zip(inst.ops, inst.lines):
        if isinstance(op, Query):
            if op.kind != "offline":
                raise InstanceFormatError(lineno, f"run-offline cannot answer {op.kind} queries")
            v, j = op.args
            if not 0 <= j <= o.delta:
                raise InstanceFormatError(lineno, f"version {j} outside [0, {o.delta}]")
            out.append(f"{v} {j} {fmt_value(o.query(v, j))}")
    return o, out


# benchmarking -----------------------------------------------------------------

def _sssp_counters(structures) -> dict:
    return {
        "queue_pops": sum(ds.stats.pops for ds in structures),
        "pushes": sum(ds.stats.pushes for ds in structures),
        "edge_scans": sum(ds.stats.edge_scans for ds in structures),
        "rank_increases": sum(sum(ds.rank_increases) for ds in structures),
    }


def bench(kind: str, inst: Instance, eps: float, *, variant: str = DETERMINISTIC, seed: int = 0,
          source: int = 0, every: int = 0) -> list[dict]:
    """Cumulative work counters every ``every`` updates (and after the last one)."""
    if kind == "sssp":
        ds = make_sssp(inst, eps, source)
        structures = [ds]
        apply = lambda op: ds.source_insert(op.head, op.weight)  # noqa: E731
        shortcuts = lambda: 0  # noqa: E731
    elif kind == "apsp":
        x = make_apsp(inst, eps, variant, seed)
        structures = x.D + x.DR
        apply = x.update
        shortcuts = lambda: x.stats.shortcut_decreases  # noqa: E731
    else:
        raise UsageError(f"bench supports sssp and apsp, not {kind!r}")
    updates = inst.updates
    rows = []
    elapsed = 0
    for i, op in enumerate(updates, 1):
        if kind == "sssp" and op.tail != source:
            raise UsageError(f"update {i}: tail {op.tail} is not the source {source}")
        t0 = time.perf_counter_ns()
        apply(op)
        elapsed += time.perf_counter_ns() - t0
        if (every and i % every == 0) or i == len(updates):
            rows.append({"updates_applied": i, **_sssp_counters(structures),
                         "shortcut_decreases": shortcuts(), "wall_time_ns": elapsed})
    return rows


def write_bench_csv(rows: list[dict], fh: TextIO, extra: dict | None = None) -> None:
    cols = list(extra or {}) + BENCH_COLUMNS
    w = csv.DictWriter(fh, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({**(extra or {}), **{k: repr(v) if isinstance(v, float) else v for k, v in row.items()}})


# argument handling ------------------------------------------------------------

def _epsilon(text: str) -> float:
    try:
        eps = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < eps < 1:
        raise argparse.ArgumentTypeError(f"epsilon must lie in (0, 1), got {eps}")
    return eps


def _positive(text: str) -> int:
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if k < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {k}")
    return k


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="incsp", description="Incremental and offline approximate shortest paths.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, structure=True):
        sp.add_argument("--in", dest="input", required=True, help="instance file ('-' for stdin)")
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--epsilon", type=_epsilon, default=0.5)
        if structure:
            sp.add_argument("--variant", choices=[DETERMINISTIC, RANDOMIZED], default=DETERMINISTIC)
            sp.add_argument("--seed", type=int)
        sp.add_argument("--source", type=int, default=0)

    g = sub.add_parser("gen", help="write a seeded random instance")
    g.add_argument("--n", type=_positive, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--W", type=_positive, default=10)
    g.add_argument("--delta", type=int, required=True, help="number of updates")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--source", type=int, help="make every update an edge out of this vertex")
    g.add_argument("--query-kind", choices=["none", "apsp", "sssp", "offline"], default="none")
    g.add_argument("--query-every", type=_positive, default=1)
    g.add_argument("--out")

    for name in ("run-sssp", "run-offline"):
        common(sub.add_parser(name), structure=False)
    common(sub.add_parser("run-apsp"))

    v = sub.add_parser("verify", help="replay with oracle checks; exit 2 on a violation")
    v.add_argument("structure", choices=["sssp", "apsp", "offline"])
    common(v)
    v.add_argument("--check-every", type=_positive, default=1)

    b = sub.add_parser("bench", help="replay and emit work counters as CSV")
    b.add_argument("structure", choices=["sssp", "apsp"])
    common(b)
    b.add_argument("--check-every", type=_positive, default=1, help="rows every this many updates")
    b.add_argument("--bench-csv", help="CSV destination (default --out or stdout)")
    return p


def _read(path: str) -> Instance:
    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    return parse_instance(text)


def _write(path: str | None, text: str) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _gen(args) -> str:
    g, updates = generate_random_sequence(args.n, args.m, args.W, args.delta, args.seed, source=args.source)
    ops: list = []
    rng = random.Random(args.seed + 1)
    for i, upd in enumerate(updates, 1):
        ops.append(upd)
        if args.query_kind != "none" and i % args.query_every == 0:
            v = rng.randrange(args.n)
            if args.query_kind == "apsp":
                ops.append(Query("apsp", (rng.randrange(args.n), v)))
            elif args.query_kind == "sssp":
                ops.append(Query("sssp", (v,)))
            else:
                ops.append(Query("offline", (v, rng.randint(0, len(updates)))))
    return format_instance(g.n, g.snapshot(), ops)


def run(args) -> int:
    if args.command == "gen":
        if args.source is not None and not 0 <= args.source < args.n:
            raise UsageError(f"source {args.source} out of range")
        _write(args.out, _gen(args))
        return 0
    if getattr(args, "variant", None) == RANDOMIZED and args.seed is None:
        raise UsageError("the randomized variant requires --seed")
    seed = args.seed if getattr(args, "seed", None) is not None else 0
    inst = _read(args.input)
    if not 0 <= args.source < inst.n:
        raise UsageError(f"source {args.source} out of range [0, {inst.n})")
    if args.command == "run-sssp":
        _, lines = run_sssp(inst, args.epsilon, args.source)
    elif args.command == "run-apsp":
        _, lines = run_apsp(inst, args.epsilon, args.variant, seed)
    elif args.command == "run-offline":
        _, lines = run_offline(inst, args.epsilon, args.source)
    elif args.command == "verify":
        report = oracle.verify_replay(args.structure, inst, args.epsilon, args.check_every,
                                      variant=args.variant, seed=seed, source=args.source)
        _write(args.out, report.to_jsonl())
        bad = report.first_failure
        if bad is not None:
            print(f"violation: {bad.check} at {bad.location}: observed {bad.observed}, bound {bad.bound}",
                  file=sys.stderr)
            return 2
        return 0
    else:
        rows = bench(args.structure, inst, args.epsilon, variant=args.variant, seed=seed,
                     source=args.source, every=args.check_every)
        path = args.bench_csv or args.out
        if path:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                write_bench_csv(rows, fh)
        else:
            write_bench_csv(rows, sys.stdout)
        return 0
    _write(args.out, "".join(line + "\n" for line in lines))
    return 0


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # --help or a usage error
        return int(exc.code or 0)
    try:
        return run(args)
    except (UsageError, OSError, ValueError) as exc:
        print(f"incsp: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
