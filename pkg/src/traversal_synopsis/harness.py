"""Shared plumbing for traces and sweeps: variant factory, bounds, runner."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterable

from .amortized import BasicSynopsis, RefinedSynopsis, ceil_log2
from .psp import EndOfList, VectorProvider
from .supernode import SuperNodeSynopsis
from .tradeoff import KarySynopsis, Mode, TradeoffConfig
from .vtree import TreeShape
from .worstcase import SynopsisError, WorstCaseSynopsis

VARIANTS = ("basic", "refined", "worstcase", "sparse", "dense")


class TraceError(ValueError):
    """Malformed trace text."""


class BoundViolation(Exception):
    """A run broke a cost or memory bound, or a trace underflowed the list."""


def list_payloads(n: int, seed: int = 0) -> list[int]:
    """Distinct-looking 64-bit payloads so a wrong position is caught."""
    rng = random.Random(seed)
    return [rng.getrandbits(64) for _ in range(n)]


def build(variant: str, provider, n: int, k: int = 2,
          epsilon: float | None = None):
    if variant == "basic":
        return BasicSynopsis(provider, n)
    if variant == "refined":
        return RefinedSynopsis(provider, n)
    if variant == "worstcase":
        if epsilon is not None:
            return SuperNodeSynopsis(provider, epsilon)
        return WorstCaseSynopsis(provider)
    if variant in ("sparse", "dense"):
        return KarySynopsis(provider, TradeoffConfig(n, k, Mode(variant)))
    raise ValueError(f"unknown variant {variant!r}")


def caps(variant: str, n: int, k: int = 2) -> dict[str, float]:
    """Pebble limits checked after every operation, by census field."""
    lg = ceil_log2(n)
    if variant == "basic":
        h = TreeShape.binary_for(n).depth
        return {"total": (h + 1) ** 2}
    if variant == "refined":
        return {"total": 2 * lg, "green": lg}
    if variant == "worstcase":
        return {"total": lg + 3, "green": lg, "red": lg / 2 + 1}
    if variant == "sparse":
        return {"total": 3 * k}
    if variant == "dense":
        return {"total": 2 * k * math.ceil(n ** (1 / k) - 1e-9)}
    raise ValueError(f"unknown variant {variant!r}")


# -- trace scripts

@dataclass
class TraceScript:
    header: dict = field(default_factory=dict)
    ops: list = field(default_factory=list)  # ("F",) ("B",) ("Q", j)

    def text(self) -> str:
        lines = []
        if self.header:
            lines.append("trace " + " ".join(f"{k}={v}" for k, v in self.header.items()))
        for op in self.ops:
            lines.append(op[0] if len(op) == 1 else f"{op[0]} {op[1]}")
        return "\n".join(lines) + "\n"


HEADER_KEYS = {"n": int, "variant": str, "k": int, "epsilon": float, "seed": int}


def parse_trace(text: str) -> TraceScript:
    """Parse a trace; ``#`` starts a comment, ops may share a line."""
    script = TraceScript()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0].lower() == "trace":
            if script.ops:
                raise TraceError(f"line {lineno}: header after the first op")
            for kv in tok[1:]:
                key, sep, val = kv.partition("=")
                if not sep or key not in HEADER_KEYS:
                    raise TraceError(f"line {lineno}: bad header field {kv!r}")
                try:
                    script.header[key] = HEADER_KEYS[key](val)
                except ValueError:
                    raise TraceError(f"line {lineno}: bad value for {key}: {val!r}") from None
            continue
        i = 0
        while i < len(tok):
            op = tok[i].upper()
            if op in ("F", "B"):
                script.ops.append((op,))
                i += 1
            elif op == "Q":
                if i + 1 >= len(tok):
                    raise TraceError(f"line {lineno}: Q needs an offset")
                try:
                    j = int(tok[i + 1])
                except ValueError:
                    raise TraceError(f"line {lineno}: bad offset {tok[i + 1]!r}") from None
                if j < 0:
                    raise TraceError(f"line {lineno}: negative offset {j}")
                script.ops.append(("Q", j))
                i += 2
            else:
                raise TraceError(f"line {lineno}: unknown op {tok[i]!r}")
    return script


def random_trace(rng: random.Random, n: int, length: int,
                 q_rate: float = 0.1) -> list[tuple]:
    """Mixed F/B/Q ops in bursts, staying inside positions 1..n."""
    ops: list[tuple] = []
    c = 1
    while len(ops) < length:
        burst = 1 + int(rng.expovariate(1 / 24))
        forward = rng.random() < 0.55
        for _ in range(min(burst, length - len(ops))):
            if rng.random() < q_rate:
                # mostly short look-backs, sometimes anywhere in the prefix
                if rng.random() < 0.9:
                    j = min(c - 1, int(rng.expovariate(1 / 8)))
                else:
                    j = rng.randrange(c)
                ops.append(("Q", j))
                continue
            if forward and c < n or c == 1:
                ops.append(("F",))
                c += 1
            else:
                ops.append(("B",))
                c -= 1
    return ops


# -- running

@dataclass
class RunResult:
    variant: str
    n: int
    k: int
    final_position: int = 1
    total_list_steps: int = 0
    pebbles_max: int = 0
    per_back_step_max: int = 0
    forward_steps: int = 0
    back_steps: int = 0
    queries: int = 0
    positions: list = field(default_factory=list)
    payloads: list = field(default_factory=list)
    log: list = field(default_factory=list)
    rb_max_pointer_updates: int = 0
    violations: list = field(default_factory=list)

    def metrics(self, with_log: bool = False) -> dict:
        out = {
            "variant": self.variant,
            "n": self.n,
            "k": self.k,
            "final_position": self.final_position,
            "total_list_steps": self.total_list_steps,
            "pebbles_max": self.pebbles_max,
            "per_back_step_max": self.per_back_step_max,
            "forward_steps": self.forward_steps,
            "back_steps": self.back_steps,
            "queries": self.queries,
        }
        if with_log:
            out["per_op_log"] = self.log
        return out


def _cap_problems(syn, limits: dict) -> list[str]:
    census = syn.census()
    return [f"{key} pebbles {census[key]} exceed the cap {lim:g}"
            for key, lim in limits.items() if census[key] > lim]


def run_ops(ops: Iterable[tuple], variant: str, n: int, k: int = 2,
            epsilon: float | None = None, seed: int = 0,
            record: bool = False, log_ops: bool = False,
            check_caps: bool = True, strict: bool = True) -> RunResult:
    """Run ops on a fresh synopsis over an ``n``-node list, checking bounds.

    A move off either end of the list, a forward step costing other than one
    list-step, or a wrong position or payload raises ``BoundViolation``.
    Pebble caps and the recycling-bin invariants are checked after every
    operation; they raise too when ``strict``, and are collected in
    ``violations`` otherwise.
    """
    payloads = list_payloads(n, seed)
    provider = VectorProvider(payloads)
    syn = build(variant, provider, n, k, epsilon)
    limits = caps(variant, n, k) if check_caps and epsilon is None else {}
    ctr = provider.counters
    rb = getattr(syn, "rb", None)
    res = RunResult(variant, n, k)
    for i, op in enumerate(ops, 1):
        kind = op[0]
        c = syn.position
        before = ctr.list_steps
        if kind == "F":
            if c >= n:
                raise BoundViolation(f"op {i}: forward past the last node {n}")
            syn.step_forward()
            cost = ctr.list_steps - before
            if cost != 1:
                raise BoundViolation(f"op {i}: forward step cost {cost} list-steps, bound is 1")
            res.forward_steps += 1
            want = c + 1
            value = syn.fetch()
        elif kind == "B":
            if c == 1:
                raise BoundViolation(f"op {i}: back-step below position 1")
            syn.step_back()
            cost = ctr.list_steps - before
            res.back_steps += 1
            if cost > res.per_back_step_max:
                res.per_back_step_max = cost
            want = c - 1
            value = syn.fetch()
        else:
            j = op[1]
            if j >= c:
                raise BoundViolation(f"op {i}: back-query {j} reaches before position 1")
            value = syn.back_query(j)
            cost = ctr.list_steps - before
            res.queries += 1
            want = c - j
        if syn.position != (c if kind == "Q" else want):
            raise BoundViolation(f"op {i}: position {syn.position}, expected {want}")
        if value != payloads[want - 1]:
            raise BoundViolation(f"op {i}: wrong payload for position {want}")
        problems = _cap_problems(syn, limits) if limits else []
        if rb is not None:
            try:
                rb.check()
            except Exception as exc:
                problems.append(f"recycling bin: {exc}")
        if problems:
            if strict:
                raise BoundViolation(f"op {i}: {problems[0]}")
            res.violations.extend(f"op {i}: {p}" for p in problems)
        if record:
            res.positions.append(want)
            res.payloads.append(value)
        if log_ops:
            res.log.append([kind, syn.position, cost, ctr.pebbles_now])
    res.final_position = syn.position
    res.total_list_steps = ctr.list_steps
    res.pebbles_max = ctr.pebbles_max
    if rb is not None:
        res.rb_max_pointer_updates = rb.max_pointer_updates
    return res


def oracle_run(ops: Iterable[tuple], n: int, seed: int = 0) -> tuple[list, list]:
    """Positions and payloads visited by the restart-from-head baseline."""
    from .baselines import RestartFromHead
    syn = RestartFromHead(VectorProvider(list_payloads(n, seed)))
    positions, values = [], []
    for op in ops:
        if op[0] == "F":
            syn.step_forward()
            positions.append(syn.position)
            values.append(syn.fetch())
        elif op[0] == "B":
            syn.step_back()
            positions.append(syn.position)
            values.append(syn.fetch())
        else:
            positions.append(syn.position - op[1])
            values.append(syn.back_query(op[1]))
    return positions, values


def full_back_traversal(variant: str, n: int, k: int = 2, seed: int = 0,
                        per_step: bool = False):
    """Walk to node ``n`` then back to the head.

    Returns ``(total back list-steps, pebbles_max, worst back step, costs)``;
    ``costs[i-1]`` is the cost of the i'th back-step when ``per_step``.
    """
    provider = VectorProvider(list_payloads(n, seed))
    syn = build(variant, provider, n, k)
    for _ in range(n - 1):
        syn.step_forward()
    ctr = provider.counters
    start = ctr.list_steps
    worst = 0
    costs = []
    while syn.position > 1:
        before = ctr.list_steps
        syn.step_back()
        cost = ctr.list_steps - before
        worst = max(worst, cost)
        if per_step:
            costs.append(cost)
    return ctr.list_steps - start, ctr.pebbles_max, worst, costs


__all__ = [
    "VARIANTS", "TraceError", "BoundViolation", "TraceScript", "RunResult",
    "build", "caps", "parse_trace", "random_trace", "run_ops",
    "full_back_traversal", "oracle_run", "list_payloads", "EndOfList", "SynopsisError",
]
