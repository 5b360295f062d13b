"""Reference traversal strategies, used as oracles and cost yardsticks."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator

from .psp import EndOfList, Pebble, Provider
from .worstcase import SynopsisError


class UnsupportedOperation(SynopsisError):
    pass


class BaselineKind(enum.Enum):
    RESTART_FROM_HEAD = "restart"
    TRAILING_ALL = "trailing"
    UNIFORM_K = "uniform"
    SKELETON = "skeleton"


def oracle_back(provider: Provider, current_position: int) -> Pebble:
    """Walk from the head to the predecessor: ``current_position - 2`` steps."""
    if current_position < 2:
        raise SynopsisError("position 1 has no predecessor")
    peb = provider.head()
    provider.walk(peb, current_position - 1)
    return peb


class _Baseline:
    variant = ""

    def __init__(self, provider: Provider):
        self.provider = provider
        self.cur = provider.head()
        self.far = 1
        self.last_cost = 0

    @property
    def position(self) -> int:
        return self.cur.position

    def fetch(self):
        return self.provider.fetch(self.cur)

    def step_forward(self):
        steps0 = self.provider.counters.list_steps
        self._forward()
        self.far = max(self.far, self.position)
        self.last_cost = self.provider.counters.list_steps - steps0

    def step_back(self):
        if self.position == 1:
            raise SynopsisError("already at the head of the list")
        steps0 = self.provider.counters.list_steps
        self._back()
        self.last_cost = cost = self.provider.counters.list_steps - steps0
        ctr = self.provider.counters
        ctr.per_op_worst = max(ctr.per_op_worst, cost)

    def back_query(self, j: int):
        c = self.position
        if not 0 <= j < c:
            raise SynopsisError(f"back-query {j} out of range at position {c}")
        if j == 0:
            return self.fetch()
        peb = self._walker(c - j)
        try:
            return self.provider.fetch(peb)
        finally:
            self.provider.release(peb)

    def _walker(self, target: int) -> Pebble:
        peb = self.provider.head()
        self.provider.walk(peb, target)
        return peb


class RestartFromHead(_Baseline):
    """One pebble; every back step walks from the head."""

    variant = "restart"

    def _forward(self):
        self.provider.advance(self.cur)

    def _back(self):
        peb = oracle_back(self.provider, self.position)
        self.provider.release(self.cur)
        self.cur = peb


class TrailingAll(_Baseline):
    """A pebble on every node up to the current one: O(1) back, O(n) memory."""

    variant = "trailing"

    def __init__(self, provider: Provider):
        super().__init__(provider)
        self.stack = [self.cur]

    def _forward(self):
        self.cur = self.provider.advance(self.provider.duplicate(self.cur))
        self.stack.append(self.cur)

    def _back(self):
        self.provider.release(self.stack.pop())
        self.cur = self.stack[-1]

    def _walker(self, target):
        return self.provider.duplicate(self.stack[target - 1])


class UniformK(_Baseline):
    """Anchors every ``spacing`` nodes; back steps walk from the nearest anchor.

    Anchors are created while moving forward and dropped once the current
    position falls below them, so forward steps stay O(1).
    """

    variant = "uniform"

    def __init__(self, provider: Provider, k: int, n: int | None = None):
        if k < 1:
            raise ValueError("k must be at least 1")
        super().__init__(provider)
        n = provider.length if n is None else n
        if n is None:
            raise SynopsisError("UniformK needs the list length")
        self.k = k
        self.spacing = max(1, -(-n // k))
        self.anchors = [self.provider.duplicate(self.cur)]

    def _forward(self):
        self.provider.advance(self.cur)
        p = self.cur.position
        if (p - 1) % self.spacing == 0 and self.anchors[-1].position < p:
            self.anchors.append(self.provider.duplicate(self.cur))

    def _back(self):
        target = self.position - 1
        while self.anchors[-1].position > target:
            self.provider.release(self.anchors.pop())
        peb = self.provider.duplicate(self.anchors[-1])
        self.provider.walk(peb, target)
        self.provider.release(self.cur)
        self.cur = peb

    def _walker(self, target):
        best = max((a for a in self.anchors if a.position <= target),
                   key=lambda a: a.position)
        peb = self.provider.duplicate(best)
        self.provider.walk(peb, target)
        return peb


@dataclass
class SkeletonLog:
    positions: list = field(default_factory=list)
    payloads: list = field(default_factory=list)
    list_steps: int = 0
    pebbles_max: int = 0


class Skeleton:
    """Pointers at distance 2^i behind the current node; back traversal only.

    Going back from ``top`` to ``top - 2^i``: first recurse over the upper
    half with the pointers already there, then walk ``2^(i-1)`` steps from
    the low end to lay a fresh skeleton over the lower half, and recurse.
    """

    variant = "skeleton"

    def __init__(self, provider: Provider, n: int):
        if n < 1 or n & (n - 1):
            raise ValueError(f"skeleton size must be a power of 2, got {n}")
        self.provider = provider
        self.n = n
        self.log_n = n.bit_length() - 1
        steps0 = provider.counters.list_steps
        walker = provider.head()
        wanted = {n - (1 << i): i for i in range(self.log_n + 1)}
        ptrs: list[Pebble | None] = [None] * (self.log_n + 1)
        while True:
            i = wanted.get(walker.position)
            if i is not None:
                ptrs[i] = provider.duplicate(walker)
            if walker.position == n:
                break
            provider.advance(walker)
        self.cur = walker
        self.build_steps = provider.counters.list_steps - steps0
        # pointer i sits at n - 2^i; 0 stands for the slot before the head
        self.initial_pointers = [p.position if p is not None else 0 for p in ptrs]
        self._gen = self._run(n, self.log_n, ptrs)

    @property
    def position(self) -> int:
        return self.cur.position

    def fetch(self):
        return self.provider.fetch(self.cur)

    def step_forward(self):
        raise UnsupportedOperation("the skeleton supports back traversal only")

    def back_query(self, j: int):
        raise UnsupportedOperation("the skeleton supports back traversal only")

    def step_back(self):
        if self.position == 1:
            raise SynopsisError("already at the head of the list")
        next(self._gen)

    def _place(self, src: Pebble | None, target: int) -> Pebble:
        if src is None:
            peb = self.provider.head()
        else:
            peb = self.provider.duplicate(src)
        self.provider.walk(peb, target)
        return peb

    def _run(self, top: int, i: int, ptrs: list) -> Iterator[int]:
        """Back-traverse from ``top`` down to ``top - 2^i``.

        ``ptrs[j]`` sits at ``top - 2^j``; ``None`` stands for position 0,
        the slot before the head.
        """
        if i == 0:
            peb = ptrs[0]
            if peb is None:
                return
            self.provider.release(self.cur)
            self.cur = peb
            yield peb.position
            return
        yield from self._run(top, i - 1, ptrs[:i])
        mid = top - (1 << (i - 1))
        low = ptrs[i]
        fresh: list[Pebble | None] = [None] * i
        fresh[i - 1] = low
        prev = low
        for j in range(i - 2, -1, -1):
            pos = mid - (1 << j)
            if pos >= 1:
                prev = self._place(prev, pos)
                fresh[j] = prev
        yield from self._run(mid, i - 1, fresh)


def skeleton_build(provider: Provider, n: int) -> Skeleton:
    return Skeleton(provider, n)


def skeleton_back_all(skel: Skeleton) -> SkeletonLog:
    log = SkeletonLog()
    ctr = skel.provider.counters
    steps0 = ctr.list_steps
    while skel.position > 1:
        skel.step_back()
        log.positions.append(skel.position)
        log.payloads.append(skel.fetch())
    log.list_steps = ctr.list_steps - steps0
    log.pebbles_max = ctr.pebbles_max
    return log


def make_baseline(kind: BaselineKind, provider: Provider, **kw):
    if kind is BaselineKind.RESTART_FROM_HEAD:
        return RestartFromHead(provider)
    if kind is BaselineKind.TRAILING_ALL:
        return TrailingAll(provider)
    if kind is BaselineKind.UNIFORM_K:
        return UniformK(provider, **kw)
    if kind is BaselineKind.SKELETON:
        return Skeleton(provider, **kw)
    raise ValueError(kind)
