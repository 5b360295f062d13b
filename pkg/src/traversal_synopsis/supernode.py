"""Super-nodes: run a synopsis over blocks of consecutive list nodes.

Grouping ``block`` nodes into one super-node divides the synopsis work per
forward step by ``block``.  A back step inside a block is a short walk from
the block's first node; only crossing a block boundary costs a back step of
the inner synopsis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .psp import GeneratedProvider, Pebble, Provider
from .worstcase import SynopsisError, WorstCaseSynopsis


@dataclass(frozen=True)
class SuperNodeConfig:
    epsilon: float
    c: float
    block: int

    @property
    def eps_synopsis(self) -> float:
        return self.epsilon / 2

    @property
    def eps_walk(self) -> float:
        return self.epsilon - self.eps_synopsis

    @classmethod
    def for_epsilon(cls, epsilon: float, c: float) -> "SuperNodeConfig":
        if epsilon <= 0:
            raise ValueError("epsilon must be positive")
        block = max(1, math.ceil(c / (epsilon - epsilon / 2)))
        return cls(epsilon, c, block)


def calibrate(steps: int = 10_000) -> float:
    """Measure synopsis mutations per forward step on a fresh unbounded list."""
    syn = WorstCaseSynopsis(GeneratedProvider(0, lambda x: x + 1))
    for _ in range(steps):
        syn.step_forward()
    return syn.mutations / steps


class SuperNodeProvider(Provider):
    """Provider whose node ``b`` is block ``b`` of the wrapped list.

    A super-pebble holds an inner pebble on the first node of its block.
    Advancing a super-pebble costs ``block`` inner list-steps, unless the
    driving cursor already sits on the target block's first node, in which
    case the cursor is duplicated for free.
    """

    def __init__(self, inner: Provider, block: int):
        super().__init__()
        if block < 1:
            raise ValueError("block must be at least 1")
        self.inner = inner
        self.block = block
        self.cursor: Pebble | None = None
        n = inner.length
        self._limit = None if n is None else -(-n // block)

    def _head_state(self):
        return self.inner.head()

    def _next_state(self, pebble):
        old: Pebble = pebble.state
        start = old.position + self.block
        cur = self.cursor
        if cur is not None and cur.live and cur.position == start:
            self.inner.release(old)
            return self.inner.duplicate(cur)
        for _ in range(self.block):
            self.inner.advance(old)
        return old

    def duplicate(self, pebble):
        peb = super().duplicate(pebble)
        peb.state = self.inner.duplicate(pebble.state)
        return peb

    def release(self, pebble):
        super().release(pebble)
        self.inner.release(pebble.state)

    def _payload(self, pebble):
        return self.inner.fetch(pebble.state)


def wrap_supernodes(provider: Provider, epsilon: float,
                    c: float | None = None) -> SuperNodeProvider:
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if c is None:
        c = calibrate()
    return SuperNodeProvider(provider, SuperNodeConfig.for_epsilon(epsilon, c).block)


class SuperNodeSynopsis:
    """List traversal over ``provider`` with an inner synopsis over blocks."""

    def __init__(self, provider: Provider, epsilon: float = 0.1,
                 c: float | None = None, block: int | None = None,
                 factory: Callable[[Provider], object] = WorstCaseSynopsis):
        if block is None:
            if c is None:
                c = calibrate()
            self.config = SuperNodeConfig.for_epsilon(epsilon, c)
        else:
            self.config = SuperNodeConfig(epsilon, c or 0.0, block)
        self.provider = provider
        self.outer = SuperNodeProvider(provider, self.config.block)
        self.inner = factory(self.outer)
        self.cur = provider.head()
        self.outer.cursor = self.cur
        self.forward_steps = 0

    @property
    def block(self) -> int:
        return self.config.block

    @property
    def position(self) -> int:
        return self.cur.position

    def fetch(self):
        return self.provider.fetch(self.cur)

    @property
    def mutations(self) -> int:
        return self.inner.mutations

    def overhead(self) -> float:
        """Inner synopsis mutations per forward step so far."""
        return self.inner.mutations / max(1, self.forward_steps)

    def step_forward(self):
        self.provider.advance(self.cur)
        self.forward_steps += 1
        if (self.cur.position - 1) % self.block == 0:
            self.inner.step_forward()

    def step_back(self):
        p = self.cur.position
        if p == 1:
            raise SynopsisError("already at the head of the list")
        if (p - 1) % self.block == 0:
            self.inner.step_back()
        start = self.inner.path[-1][2]
        peb = self.provider.duplicate(start.state)
        self.provider.walk(peb, p - 1)
        self.provider.release(self.cur)
        self.cur = peb
        self.outer.cursor = peb

    def back_query(self, j: int):
        """Payload ``j`` positions back, walked from the nearest block start."""
        c = self.position
        if not 0 <= j < c:
            raise SynopsisError(f"back-query {j} out of range at position {c}")
        target = c - j
        best = self.cur if self.cur.position <= target else None
        for sp in self.inner.pebbles():
            peb = sp.state
            if peb.live and peb.position <= target and (
                    best is None or peb.position > best.position):
                best = peb
        walker = self.provider.duplicate(best)
        try:
            self.provider.walk(walker, target)
            return self.provider.fetch(walker)
        finally:
            self.provider.release(walker)

    def census(self) -> dict:
        return self.inner.census()
