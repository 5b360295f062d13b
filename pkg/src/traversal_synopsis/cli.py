"""Command line harness: traces, sweeps, hash chains and VM rollback.

Exit codes: 0 success, 2 bad input, 3 a bound or invariant was violated.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time

from . import harness
from .amortized import ceil_log2
from .hashchain import HASHES, Backstepper, resolve_hash
from .harness import BoundViolation, TraceError
from .rollback import AssemblyError, DeltaStore, MiniVM, ReversibleVM, assemble, state_digest
from .worstcase import SynopsisError

EXIT_OK, EXIT_INPUT, EXIT_BOUND = 0, 2, 3

CSV_COLUMNS = ["variant", "n", "k", "total_back_list_steps", "pebbles_max",
               "worst_back_step", "wall_ns"]

DEMO_PROGRAM = """\
; count r0 down to zero, storing r1 += r0 on the tape as we go
add r2 r2 #1        ; r2 = 1
add r1 r1 r0        ; loop:
store r0 r1
sub r0 r0 r2
jnz r0 1
halt
"""


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


# -- trace

def cmd_trace(args) -> int:
    try:
        script = harness.parse_trace(_read(args.script))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TraceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    hdr = script.header
    variant = args.variant or hdr.get("variant", "refined")
    n = args.n or hdr.get("n", 1024)
    k = args.k or hdr.get("k", 2)
    epsilon = args.epsilon if args.epsilon is not None else hdr.get("epsilon")
    seed = args.seed if args.seed is not None else hdr.get("seed", 0)
    if variant not in harness.VARIANTS:
        print(f"error: unknown variant {variant!r}", file=sys.stderr)
        return EXIT_INPUT
    if epsilon is not None and variant != "worstcase":
        print("error: --epsilon applies to the worstcase variant only", file=sys.stderr)
        return EXIT_INPUT
    try:
        res = harness.run_ops(script.ops, variant, n, k, epsilon=epsilon,
                              seed=seed, log_ops=args.log_ops)
    except BoundViolation as exc:
        print(f"violation: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except (ValueError, SynopsisError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out = res.metrics(with_log=args.log_ops)
    if epsilon is not None:
        out["epsilon"] = epsilon
    _emit(json.dumps(out, sort_keys=True, indent=2) + "\n", args.out)
    return EXIT_OK


# -- bench

def bench_rows(variants, ns, ks, seed: int = 0, timing: bool = False):
    """One row per (variant, n[, k]): a full walk to the end and back."""
    rows = []
    for variant in variants:
        for n in ns:
            klist = ks if variant in ("sparse", "dense") else [0]
            for k in klist:
                if k and not 2 <= k <= ceil_log2(n):
                    continue
                t0 = time.perf_counter_ns()
                total, pmax, worst, _ = harness.full_back_traversal(
                    variant, n, k or 2, seed=seed)
                wall = time.perf_counter_ns() - t0 if timing else 0
                cap = harness.caps(variant, n, k or 2)["total"]
                if pmax > cap:
                    raise BoundViolation(
                        f"{variant} n={n} k={k}: pebbles_max {pmax} exceeds {cap:g}")
                rows.append([variant, n, k, total, pmax, worst, wall])
    return rows


def cmd_bench(args) -> int:
    variants = args.variant or list(harness.VARIANTS)
    ns = args.n or [1 << j for j in range(args.log_n_min, args.log_n_max + 1)]
    ks = args.k or [2, 3, 4]
    for n in ns:
        if n < 3 or n & (n - 1):
            print(f"error: n must be a power of two >= 4, got {n}", file=sys.stderr)
            return EXIT_INPUT
    try:
        rows = bench_rows(variants, ns, ks, seed=args.seed or 0, timing=args.timing)
    except BoundViolation as exc:
        print(f"violation: {exc}", file=sys.stderr)
        return EXIT_BOUND
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    w.writerows(rows)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


# -- hash chain

def cmd_hashchain(args) -> int:
    try:
        seed = bytes.fromhex(args.seed_hex)
    except ValueError:
        print(f"error: bad hex seed {args.seed_hex!r}", file=sys.stderr)
        return EXIT_INPUT
    if args.n < 1:
        print("error: n must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    h = resolve_hash(args.hash)
    mode = args.variant or "sparse"
    if mode not in ("sparse", "dense", "worstcase"):
        print("error: hashchain runs sparse, dense or worstcase", file=sys.stderr)
        return EXIT_INPUT
    k = args.k or 2
    try:
        walker = Backstepper(seed, args.n, k=k, mode=mode, h=h)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    # the public end of the chain, as a verifier would hold it
    anchor = seed
    for _ in range(args.n - 1):
        anchor = h(anchor)
    lines = []
    ok = 0
    later = None
    for i, v in walker:
        good = (v == anchor) if later is None else (h(v) == later)
        ok += good
        lines.append(f"{i} {v.hex()} verify={'true' if good else 'false'}")
        later = v
    lines.append(f"# verified {ok}/{args.n} hash_evals={walker.hash_evals} "
                 f"stored_max={walker.stored_max}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if ok == args.n else EXIT_BOUND


# -- vm

def parse_vm_script(text: str) -> list[tuple[str, int]]:
    """``F [count]`` runs forward, ``B [count]`` rolls back."""
    ops = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        op = tok[0].upper()
        if op not in ("F", "B") or len(tok) > 2:
            raise TraceError(f"line {lineno}: expected 'F [count]' or 'B [count]'")
        try:
            count = int(tok[1]) if len(tok) == 2 else 1
        except ValueError:
            raise TraceError(f"line {lineno}: bad count {tok[1]!r}") from None
        if count < 0:
            raise TraceError(f"line {lineno}: negative count")
        ops.append((op, count))
    return ops


def cmd_vm(args) -> int:
    try:
        program = assemble(_read(args.program) if args.program else DEMO_PROGRAM)
        script = parse_vm_script(_read(args.script)) if args.script else [("F", 40), ("B", 25)]
        inputs = [int(x, 0) for x in args.inputs.split(",")] if args.inputs else [7]
    except (OSError, AssemblyError, TraceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    vm = MiniVM(program, inputs)
    rvm = DeltaStore(vm, args.delta) if args.delta else ReversibleVM(vm)
    # record-all oracle for --check
    states = [vm.initial] if args.check else None
    lines = []
    for op, count in script:
        for _ in range(count):
            if op == "F":
                rvm.run_forward()
                if states is not None and rvm.index == len(states):
                    states.append(vm.step(states[-1]))
            else:
                if rvm.index == 0:
                    print("violation: rollback before the initial state", file=sys.stderr)
                    return EXIT_BOUND
                rvm.rollback()
            if states is not None and rvm.state != states[rvm.index]:
                print(f"violation: state {rvm.index} differs from the record", file=sys.stderr)
                return EXIT_BOUND
        lines.append(f"{op} {count} -> step {rvm.index} state={state_digest(rvm.state)}")
    lines.append(f"# re_steps={rvm.re_steps} snapshots_max="
                 f"{(rvm.blocks if args.delta else rvm.provider).counters.pebbles_max}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


# -- parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="traversal-synopsis",
                                 description="Back-traversal of singly linked lists in small memory.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, multi=False):
        act = "append" if multi else "store"
        p.add_argument("--variant", choices=harness.VARIANTS, action=act)
        p.add_argument("--n", type=int, action=act)
        p.add_argument("--k", type=int, action=act)
        p.add_argument("--epsilon", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--log-ops", action="store_true")
        p.add_argument("--out")

    p = sub.add_parser("trace", help="run a trace script, print JSON metrics")
    p.add_argument("script", help="trace file, or - for stdin")
    common(p)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("bench", help="sweep variants and sizes, print CSV")
    common(p, multi=True)
    p.add_argument("--log-n-min", type=int, default=10)
    p.add_argument("--log-n-max", type=int, default=14)
    p.add_argument("--timing", action="store_true",
                   help="fill wall_ns (otherwise 0 so output is byte-stable)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("hashchain", help="print a hash chain backwards")
    common(p)
    p.add_argument("--seed-hex", default="00")
    p.add_argument("--hash", choices=sorted(HASHES), default="toy")
    p.set_defaults(func=cmd_hashchain)

    p = sub.add_parser("vm", help="run a mini-VM program with rollbacks")
    common(p)
    p.add_argument("--program", help="assembly file (default: a built-in demo)")
    p.add_argument("--script", help="lines of 'F [count]' / 'B [count]'")
    p.add_argument("--inputs", help="comma-separated initial register values")
    p.add_argument("--delta", type=int, default=0, metavar="ELL",
                   help="keep reverse deltas for the last ELL steps")
    p.add_argument("--check", action="store_true",
                   help="compare every state with a record-all run")
    p.set_defaults(func=cmd_vm)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.command == "hashchain":
        args.n = args.n if args.n is not None else 8
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
