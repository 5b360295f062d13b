"""Pointer service providers: the only way a synopsis touches the list.

A provider hands out pebbles (pointers into the list) and charges one
list-step for every ``advance``.  Nothing else costs a list-step.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any, Callable, Sequence


class EndOfList(Exception):
    """Raised when advancing past the last node of a finite list."""


class Color(enum.Enum):
    BLUE = "blue"
    GREEN = "green"
    RED = "red"


@dataclass
class StepCounters:
    list_steps: int = 0
    pebbles_now: int = 0
    pebbles_max: int = 0
    per_op_worst: int = 0

    def snapshot(self) -> "StepCounters":
        return StepCounters(self.list_steps, self.pebbles_now,
                            self.pebbles_max, self.per_op_worst)


class Pebble:
    """A live pointer into the list.

    ``position`` is 1-based.  ``state`` is provider-private (an index for
    vector lists, the node value for generated lists).
    """

    __slots__ = ("position", "state", "color", "delay", "live")

    def __init__(self, position: int, state: Any):
        self.position = position
        self.state = state
        self.color = Color.BLUE
        self.delay = 0
        self.live = True

    def __repr__(self):
        return f"Pebble({self.position}, {self.color.value})"


class Provider:
    """Base class holding the counters and the pebble lifecycle."""

    _limit: int | None = None  # cached list length; None = unbounded

    def __init__(self):
        self.counters = StepCounters()

    # -- subclass hooks
    def _head_state(self):
        raise NotImplementedError

    def _next_state(self, pebble: Pebble):
        raise NotImplementedError

    def _payload(self, pebble: Pebble):
        raise NotImplementedError

    @property
    def length(self) -> int | None:
        """Number of nodes, or None for an unbounded list."""
        return self._limit

    # -- instruction set: create, forward, fetch, free
    def head(self) -> Pebble:
        return self._track(Pebble(1, self._head_state()))

    def advance(self, pebble: Pebble) -> Pebble:
        assert pebble.live, "advance on a released pebble"
        n = self._limit
        if n is not None and pebble.position >= n:
            raise EndOfList(f"no node after position {pebble.position}")
        pebble.state = self._next_state(pebble)
        pebble.position += 1
        self.counters.list_steps += 1
        return pebble

    def walk(self, pebble: Pebble, target: int) -> Pebble:
        """Advance ``pebble`` to ``target``, one list-step per node."""
        while pebble.position < target:
            self.advance(pebble)
        return pebble

    def duplicate(self, pebble: Pebble) -> Pebble:
        assert pebble.live, "duplicate of a released pebble"
        return self._track(Pebble(pebble.position, pebble.state))

    def release(self, pebble: Pebble) -> None:
        assert pebble.live, "double release"
        pebble.live = False
        self.counters.pebbles_now -= 1

    def fetch(self, pebble: Pebble):
        assert pebble.live, "fetch through a released pebble"
        return self._payload(pebble)

    def _track(self, pebble: Pebble) -> Pebble:
        c = self.counters
        c.pebbles_now += 1
        if c.pebbles_now > c.pebbles_max:
            c.pebbles_max = c.pebbles_now
        return pebble


class VectorProvider(Provider):
    def __init__(self, payloads: Sequence):
        super().__init__()
        if len(payloads) == 0:
            raise ValueError("a list needs at least one node")
        self._payloads = payloads
        self._limit = len(payloads)

    def walk(self, pebble, target):
        # same accounting as repeated advance, without the per-node call
        assert pebble.live, "advance on a released pebble"
        m = target - pebble.position
        if m <= 0:
            return pebble
        if target > self._limit:
            raise EndOfList(f"no node after position {self._limit}")
        pebble.state += m
        pebble.position = target
        self.counters.list_steps += m
        return pebble

    def _head_state(self):
        return 0

    def _next_state(self, pebble):
        return pebble.state + 1

    def _payload(self, pebble):
        return self._payloads[pebble.state]


class GeneratedProvider(Provider):
    """Unbounded list: node p carries ``step_fn`` applied p-1 times to the seed."""

    def __init__(self, seed_state, step_fn: Callable[[Any], Any]):
        super().__init__()
        self._seed = seed_state
        self._step = step_fn

    def _head_state(self):
        return self._seed

    def _next_state(self, pebble):
        return self._step(pebble.state)

    def _payload(self, pebble):
        return pebble.state


def vector_provider(payloads: Sequence) -> VectorProvider:
    return VectorProvider(payloads)


def generated_provider(seed_state, step_fn) -> GeneratedProvider:
    return GeneratedProvider(seed_state, step_fn)


def counters(provider: Provider) -> StepCounters:
    return provider.counters.snapshot()
