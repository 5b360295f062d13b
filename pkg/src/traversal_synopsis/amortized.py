"""Amortized list pebbling: one list-step forward, O(log n) amortized back.

Both variants pebble the whole blue path (root to current).  Green paths are
right subpaths left behind by forward steps; stepping back onto a right
child jumps to the rightmost leaf of its left sibling through that path.

* ``BasicSynopsis`` keeps every green path that hangs off the blue path in
  full, O(log^2 n) pebbles, and rebuilds a missing one by walking the whole
  left subtree.
* ``RefinedSynopsis`` draws every pebble from a recycling bin of
  ``2 * ceil(log2 n)`` slots.  Green paths are the bin's lists; when the bag
  runs dry the bin takes the deepest pebble of the oldest least-robbed list,
  and a robbed path is finished from its deepest surviving pebble when the
  traversal comes back for it.
"""

from __future__ import annotations

import math
from typing import Callable

from .psp import Color, EndOfList, Pebble, Provider
from .recycling import ListRecord, RecyclingBin
from .vtree import TreeShape
from .worstcase import SynopsisError


def right_spine(v: int, h: int) -> list[int]:
    """Positions of ``v`` and the right children below it, down to a leaf."""
    out = [v]
    while h > 0:
        v += 1 << h
        h -= 1
        out.append(v)
    return out


def ceil_log2(n: int) -> int:
    return max(0, (max(n, 1) - 1).bit_length())


class _PathSynopsis:
    """Shared blue-path bookkeeping for the amortized variants."""

    variant = ""

    def __init__(self, provider: Provider, n: int | None = None,
                 hook: Callable | None = None):
        n = provider.length if n is None else n
        if n is None:
            raise SynopsisError("the amortized pebblers need the list length")
        if provider.length is not None and n > provider.length:
            raise SynopsisError("n exceeds the list length")
        self.provider = provider
        self.n = n
        self.height = TreeShape.binary_for(n).depth
        self.hook = hook
        self.far = 1
        self.last_cost = 0
        self.path: list[list] = []

    @property
    def position(self) -> int:
        return self.path[-1][0]

    def fetch(self):
        return self.provider.fetch(self.path[-1][2])

    def _emit(self, op: str, cost: int):
        if self.hook is not None:
            self.hook(op, self.position, cost,
                      self.provider.counters.pebbles_now)

    def _leaf_run_start(self) -> int:
        """Index of the top of the right subpath ending at the current leaf."""
        path = self.path
        idx = len(path) - 1
        while idx > 0 and path[idx][0] != path[idx - 1][0] + 1:
            idx -= 1
        if idx == 0:
            raise EndOfList(f"no node after position {self.position}")
        return idx

    def step_forward(self):
        c = self.position
        if c >= self.n:
            raise EndOfList(f"no node after position {c}")
        steps0 = self.provider.counters.list_steps
        if self.path[-1][1] > 0:
            self._forward_internal()
        else:
            self._forward_leaf()
        self.far = max(self.far, self.position)
        self.last_cost = self.provider.counters.list_steps - steps0
        self._emit("F", self.last_cost)

    def step_back(self):
        c = self.position
        if c == 1:
            raise SynopsisError("already at the head of the list")
        steps0 = self.provider.counters.list_steps
        if self.path[-2][0] + 1 == c:
            self._drop(self.path.pop()[2])
        else:
            self._back_right()
        cost = self.provider.counters.list_steps - steps0
        self.last_cost = cost
        ctr = self.provider.counters
        if cost > ctr.per_op_worst:
            ctr.per_op_worst = cost
        self._emit("B", cost)

    def back_query(self, j: int):
        """Payload ``j`` positions back without moving."""
        c = self.position
        if not 0 <= j < c:
            raise SynopsisError(f"back-query {j} out of range at position {c}")
        target = c - j
        best = None
        for peb in self.pebbles():
            if peb.position <= target and (best is None or peb.position > best.position):
                best = peb
        walker = self.provider.duplicate(best)
        try:
            self.provider.walk(walker, target)
            return self.provider.fetch(walker)
        finally:
            self.provider.release(walker)

    def census(self) -> dict:
        blue = len(self.path)
        green = sum(1 for _ in self.pebbles()) - blue
        return {"blue": blue, "green": green, "red": 0, "total": blue + green}

    # subclass hooks
    def pebbles(self):
        raise NotImplementedError

    def _drop(self, peb: Pebble):
        raise NotImplementedError


class BasicSynopsis(_PathSynopsis):
    """Full green forest, no recycling: O(log^2 n) pebbles."""

    variant = "basic"

    def __init__(self, provider: Provider, n: int | None = None,
                 hook: Callable | None = None):
        super().__init__(provider, n, hook)
        self.path = [[1, self.height, provider.head(), None]]

    def pebbles(self):
        for e in self.path:
            yield e[2]
            if e[3]:
                yield from e[3]

    def _drop(self, peb):
        self.provider.release(peb)

    def _forward_internal(self):
        e = self.path[-1]
        new = self.provider.advance(self.provider.duplicate(e[2]))
        self.path.append([e[0] + 1, e[1] - 1, new, None])

    def _forward_leaf(self):
        path = self.path
        idx = self._leaf_run_start()
        u = path[idx - 1]
        for e in path[idx:]:
            if e[3]:
                for g in e[3]:
                    self.provider.release(g)
        greens = [e[2] for e in path[idx:]]
        for g in greens:
            g.color = Color.GREEN
        new = self.provider.advance(self.provider.duplicate(greens[-1]))
        del path[idx:]
        u[3] = greens
        path.append([new.position, u[1] - 1, new, None])

    def _back_right(self):
        path = self.path
        self._drop(path.pop()[2])
        u = path[-1]
        greens = u[3]
        u[3] = None
        targets = right_spine(u[0] + 1, u[1] - 1)
        if not greens:
            greens = []
            prev = u[2]
            for t in targets:
                peb = self.provider.duplicate(prev)
                self.provider.walk(peb, t)
                greens.append(peb)
                prev = peb
        h = u[1] - 1
        for t, g in zip(targets, greens):
            g.color = Color.BLUE
            path.append([t, h, g, None])
            h -= 1


class RefinedSynopsis(_PathSynopsis):
    """Every pebble comes from a recycling bin of 2*ceil(log2 n) slots."""

    variant = "refined"

    def __init__(self, provider: Provider, n: int | None = None,
                 green_cap: bool = True, hook: Callable | None = None):
        super().__init__(provider, n, hook)
        self.lg = ceil_log2(self.n)
        self.rb = RecyclingBin(max(2, 2 * self.lg))
        self.green_cap = green_cap
        self.reconstruct_steps = 0
        self._get()
        self.path = [[1, self.height, provider.head(), None]]

    def pebbles(self):
        for e in self.path:
            yield e[2]
        for rec in self.rb.queue:
            yield from rec.items

    # -- allocation through the bin
    def _get(self):
        slot = self.rb.get_pebble()
        if isinstance(slot, Pebble) and slot.live:
            self.provider.release(slot)

    def _drop(self, peb):
        self.provider.release(peb)
        self.rb.put_pebble(peb)

    def _new_at(self, src: Pebble, target: int) -> Pebble:
        self._get()
        peb = self.provider.duplicate(src)
        self.provider.walk(peb, target)
        return peb

    def _trim_greens(self):
        """Keep at most ceil(log2 n) green pebbles by robbing lists."""
        if not self.green_cap:
            return
        extra = self.rb.pebbles_in_lists - max(1, self.lg)
        for _ in range(extra):
            peb = self.rb.take_from_lists()
            self._drop(peb)

    # -- steps
    def _forward_internal(self):
        e = self.path[-1]
        new = self._new_at(e[2], e[0] + 1)
        self.path.append([e[0] + 1, e[1] - 1, new, None])
        self._trim_greens()

    def _forward_leaf(self):
        path = self.path
        idx = self._leaf_run_start()
        u = path[idx - 1]
        greens = [e[2] for e in path[idx:]]
        for g in greens:
            g.color = Color.GREEN
        c = path[-1][0]
        del path[idx:]
        new = self._new_at(greens[-1], c + 1)
        self.rb.put_list(greens, meta=u[0])
        path.append([c + 1, u[1] - 1, new, None])
        self._trim_greens()

    def reconstruct(self, rec: ListRecord | None, M: int, u: list) -> list[Pebble]:
        """Finish the green path of ``u``'s left child.

        Walks forward from the deepest surviving pebble (or from ``u`` when
        every pebble was taken) and pebbles each missing right-spine node.
        """
        items = list(rec.items) if rec is not None else []
        targets = right_spine(u[0] + 1, u[1] - 1)
        steps0 = self.provider.counters.list_steps
        prev = items[-1] if items else u[2]
        for t in targets[len(items):]:
            prev = self._new_at(prev, t)
            items.append(prev)
        self.reconstruct_steps += self.provider.counters.list_steps - steps0
        return items

    def _back_right(self):
        path = self.path
        self._drop(path.pop()[2])
        u = path[-1]
        rec = self.rb.peek_list()
        if rec is not None and rec.meta == u[0]:
            rec, M = self.rb.get_list()
        else:
            rec, M = None, len(right_spine(u[0] + 1, u[1] - 1))
        greens = self.reconstruct(rec, M, u)
        h = u[1] - 1
        for g in greens:
            g.color = Color.BLUE
            path.append([g.position, h, g, None])
            h -= 1
        self._trim_greens()


def new(provider: Provider, variant: str = "refined", **kw):
    if variant == "basic":
        return BasicSynopsis(provider, **kw)
    if variant == "refined":
        return RefinedSynopsis(provider, **kw)
    raise ValueError(f"unknown amortized variant {variant!r}")
