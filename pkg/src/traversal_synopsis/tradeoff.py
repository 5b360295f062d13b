"""Memory/time trade-off on a depth-k tree of degree ceil(n^(1/k)).

The blue path from the root to the current node has at most k+1 nodes.
Green paths are last-child chains ("right subpaths") hanging below the
nearest left sibling of a blue node.

* Sparse: only the chains are pebbled, so rebuilding one may walk through
  up to ``degree`` sibling subtrees.  At most ``2k`` pebbles.
* Dense: every pebbled node also has all its left siblings pebbled, so a
  chain is rebuilt by walking a single subtree.  At most ``2k * degree``
  pebbles.

Pebbles are drawn from a recycling bin sized to the mode's cap.  A bin
item is a *group*: a chain node's pebble, plus its left siblings in dense
mode.  Robbing a list frees its deepest group.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

from .psp import Color, EndOfList, Pebble, Provider
from .recycling import RecyclingBin
from .vtree import TreeShape
from .worstcase import SynopsisError


class Mode(enum.Enum):
    SPARSE = "sparse"
    DENSE = "dense"


def integer_root_ceil(n: int, k: int) -> int:
    """Smallest d with d**k >= n."""
    if n <= 1:
        return 1
    d = max(1, int(round(n ** (1.0 / k))))
    while d ** k < n:
        d += 1
    while d > 1 and (d - 1) ** k >= n:
        d -= 1
    return d


@dataclass(frozen=True)
class TradeoffConfig:
    n: int
    k: int
    mode: Mode = Mode.SPARSE

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("the trade-off tree needs n >= 3")
        top = math.ceil(math.log2(self.n))
        if not 2 <= self.k <= top:
            raise ValueError(f"k must lie in [2, {top}] for n={self.n}")

    @property
    def degree(self) -> int:
        return max(2, integer_root_ceil(self.n, self.k))

    @property
    def shape(self) -> TreeShape:
        return TreeShape(self.degree, self.k)

    @property
    def pebble_cap(self) -> int:
        if self.mode is Mode.SPARSE:
            return 2 * self.k
        return 2 * self.k * self.degree


class KarySynopsis:
    """Trade-off pebbler; path entries are ``[pos, depth, pebble, sibs, j]``."""

    def __init__(self, provider: Provider, config: TradeoffConfig,
                 hook: Callable | None = None):
        if provider.length is not None and config.n > provider.length:
            raise SynopsisError("n exceeds the list length")
        self.provider = provider
        self.config = config
        self.k = config.k
        self.d = config.degree
        self.dense = config.mode is Mode.DENSE
        self.variant = config.mode.value
        # sub[l] = size of a subtree rooted at depth l
        sub = [1] * (self.k + 1)
        for lvl in range(self.k - 1, -1, -1):
            sub[lvl] = 1 + self.d * sub[lvl + 1]
        self.sub = sub
        self.rb = RecyclingBin(config.pebble_cap)
        self.hook = hook
        self.far = 1
        self.last_cost = 0
        self.reconstruct_steps = 0
        self._get()
        self.path: list[list] = [[1, 0, provider.head(), [], 0]]

    # -- inspection
    @property
    def n(self) -> int:
        return self.config.n

    @property
    def position(self) -> int:
        return self.path[-1][0]

    def fetch(self):
        return self.provider.fetch(self.path[-1][2])

    def pebbles(self):
        for e in self.path:
            yield e[2]
            yield from e[3]
        for rec in self.rb.queue:
            for g in rec.items:
                yield from g

    def census(self) -> dict:
        blue = len(self.path)
        total = sum(1 for _ in self.pebbles())
        return {"blue": blue, "green": total - blue, "red": 0, "total": total}

    # -- allocation
    def _get(self):
        slot = self.rb.get_pebble()
        if isinstance(slot, list):
            for peb in slot:
                self.provider.release(peb)
            for _ in slot[1:]:
                self.rb.put_pebble(None)

    def _drop(self, peb: Pebble):
        self.provider.release(peb)
        self.rb.put_pebble(None)

    def _place(self, src: Pebble, target: int) -> Pebble:
        self._get()
        peb = self.provider.duplicate(src)
        self.provider.walk(peb, target)
        return peb

    def _emit(self, op: str, cost: int):
        if self.hook is not None:
            self.hook(op, self.position, cost,
                      self.provider.counters.pebbles_now)

    # -- forward
    def step_forward(self):
        c = self.position
        if c >= self.n:
            raise EndOfList(f"no node after position {c}")
        steps0 = self.provider.counters.list_steps
        path = self.path
        e = path[-1]
        if e[1] < self.k:
            new = self._place(e[2], c + 1)
            path.append([c + 1, e[1] + 1, new, [], 0])
        else:
            self._forward_leaf()
        self.far = max(self.far, self.position)
        self.last_cost = self.provider.counters.list_steps - steps0
        self._emit("F", self.last_cost)

    def _forward_leaf(self):
        path = self.path
        idx = len(path) - 1
        while idx > 0 and path[idx][4] == self.d - 1:
            idx -= 1
        if idx == 0:
            raise EndOfList(f"no node after position {self.position}")
        y = path[idx]
        leaf = path[-1]
        new = self._place(leaf[2], leaf[0] + 1)
        for e in path[idx:]:
            e[2].color = Color.GREEN
        if self.dense:
            groups = [[e[2]] + e[3] for e in path[idx + 1:]]
            sibs = y[3] + [y[2]]
        else:
            groups = [[e[2]] for e in path[idx:]]
            sibs = []
        del path[idx:]
        self.rb.put_list(groups, meta=y[0])
        path.append([y[0] + self.sub[y[1]], y[1], new, sibs, y[4] + 1])

    # -- back
    def step_back(self):
        c = self.position
        if c == 1:
            raise SynopsisError("already at the head of the list")
        steps0 = self.provider.counters.list_steps
        path = self.path
        e = path.pop()
        self._drop(e[2])
        if e[4] > 0:
            self._back_to_sibling_leaf(e)
        cost = self.provider.counters.list_steps - steps0
        self.last_cost = cost
        ctr = self.provider.counters
        if cost > ctr.per_op_worst:
            ctr.per_op_worst = cost
        self._emit("B", cost)

    def _back_to_sibling_leaf(self, e: list):
        path = self.path
        lvl = e[1]
        s = e[0] - self.sub[lvl]
        rec = self.rb.peek_list()
        groups = self.rb.get_list()[0].items if rec is not None and rec.meta == s else []
        steps0 = self.provider.counters.list_steps
        if self.dense:
            path.append([s, lvl, e[3][-1], e[3][:-1], e[4] - 1])
        else:
            if groups:
                s_peb = groups.pop(0)[0]
            else:
                s_peb = self._place(path[-1][2], s)
            path.append([s, lvl, s_peb, [], e[4] - 1])
        for g in groups:
            lvl += 1
            path.append([g[0].position, lvl, g[0], g[1:], self.d - 1])
        # finish the chain below the deepest surviving node
        while path[-1][1] < self.k:
            x = path[-1]
            lvl = x[1] + 1
            step = self.sub[lvl]
            sibs = []
            prev = x[2]
            first = x[0] + 1
            if self.dense:
                for j in range(self.d - 1):
                    prev = self._place(prev, first + j * step)
                    sibs.append(prev)
            node = self._place(prev, first + (self.d - 1) * step)
            path.append([node.position, lvl, node, sibs, self.d - 1])
        for x in path:
            x[2].color = Color.BLUE
        self.reconstruct_steps += self.provider.counters.list_steps - steps0

    def back_query(self, j: int):
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


def new_tradeoff(provider: Provider, config: TradeoffConfig, **kw) -> KarySynopsis:
    return KarySynopsis(provider, config, **kw)
