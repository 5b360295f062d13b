"""Worst-case list pebbling: red pebbles build green paths ahead of need.

The blue path is held as a list of entries ``[pos, height, pebble, job]``.
Only the root, right children and the current node always carry blue
pebbles.  Interior nodes of a left run hold an optional pebble every
``run_stride`` nodes (dropped first when the pebble budget is tight); other
run nodes are reached by walking down from the nearest pebble above.
Every entry whose successor on the path is its right child owns a *job*:
the green path down the right spine of its left child, which must be
complete by the time the traversal comes back to that right child.

Jobs are scheduled as late as possible at double pace: with current
position ``c`` and job end ``e`` (the rightmost leaf of the left subtree),
the job's progress must satisfy ``e - progress <= 2 * (c - e - 1)``.  A back
step tightens that by two list-steps, a forward step relaxes it by two, and
forward steps hand the slack back by lazily dropping the deepest green (the
red pebble virtually moving back onto it).  Pebbles of jobs that a forward
step finishes are parked and released under the same per-step allowance, so
a forward step creates, moves or releases at most ``forward_mutation_cap``
pebbles unless the pebble cap forces an extra release.
"""

from __future__ import annotations

import math
from typing import Callable, Optional

from .psp import Color, EndOfList, Pebble, Provider
from .vtree import TreeShape


class SynopsisError(Exception):
    pass


class _Job:
    __slots__ = ("w", "e", "spine", "greens", "red")

    def __init__(self, w: int, h: int, greens=None):
        self.w = w
        self.spine = spine_positions(w, h)
        self.e = self.spine[-1]
        self.greens: list[Pebble] = greens if greens is not None else []
        self.red: Optional[Pebble] = None

    @property
    def complete(self) -> bool:
        return len(self.greens) == len(self.spine)


def spine_positions(w: int, h: int) -> list[int]:
    """Pebble targets for the green path of ``w``'s left child.

    These are the right children on the right spine of the left subtree, or
    the left child itself when it is a leaf.
    """
    x, hx = w + 1, h - 1
    out = []
    while hx > 0:
        x += 1 << hx
        hx -= 1
        out.append(x)
    return out or [w + 1]


def vpos(peb: Pebble) -> int:
    return peb.position + peb.delay


class WorstCaseSynopsis:
    """O(log i) worst-case back-steps, one list-step per forward step."""

    variant = "worstcase"

    def __init__(self, provider: Provider, max_evictions: int = 2,
                 run_stride: int = 4, auto_shrink: bool = True,
                 forward_mutation_cap: int = 3,
                 hook: Callable | None = None):
        self.provider = provider
        n = provider.length
        self.height = TreeShape.binary_for(n).depth if n else 0
        self.path: list[list] = [[1, self.height, provider.head(), None]]
        self.far = 1
        self.max_evictions = max_evictions
        self.forward_mutation_cap = forward_mutation_cap
        self.run_stride = run_stride
        self.auto_shrink = auto_shrink
        self.hook = hook
        self.mutations = 0  # pebbles created, moved or released
        self._m0 = 0
        # pebbles of finished jobs, released a few per forward step
        self._limbo: list[Pebble] = []
        self.readiness_misses = 0
        self.budget_violations = 0
        self.last_cost = 0

    # -- inspection
    @property
    def position(self) -> int:
        return self.path[-1][0]

    @property
    def size(self) -> int:
        return (1 << (self.height + 1)) - 1

    def fetch(self):
        return self.provider.fetch(self.path[-1][2])

    def pebbles(self):
        for entry in self.path:
            if entry[2] is not None:
                yield entry[2]
            job = entry[3]
            if job is not None:
                yield from job.greens
                if job.red is not None:
                    yield job.red
        yield from self._limbo

    def census(self) -> dict:
        blue = sum(1 for e in self.path if e[2] is not None)
        green = red = 0
        for e in self.path:
            if e[3] is not None:
                green += len(e[3].greens)
                red += e[3].red is not None
        green += len(self._limbo)
        return {"blue": blue, "green": green, "red": red,
                "total": blue + green + red}

    def bit_budget(self) -> int:
        """Bits of the pebble-tree encoding for the current pebble set."""
        lg = max(1, math.ceil(math.log2(max(2, self.size))))
        llg = max(1, math.ceil(math.log2(lg)))
        c = self.census()
        nodes = c["total"]
        # position + pointer id + three structural links per node
        per_node = lg + 4 * llg
        return nodes * per_node + c["red"] * (lg + llg) + 2 * llg

    # -- helpers
    def _materialize(self, peb: Pebble) -> Pebble:
        while peb.delay:
            self.provider.advance(peb)
            peb.delay -= 1
        return peb

    def _nearest(self, target: int, skip=()) -> Pebble:
        best = None
        bv = 0
        for peb in self.pebbles():
            v = peb.position + peb.delay
            if bv < v <= target and not (skip and peb in skip):
                best = peb
                bv = v
        if best is None:
            raise SynopsisError(f"no pebble at or before {target}")
        return best

    def _walk_to(self, target: int) -> Pebble:
        src = self._materialize(self._nearest(target))
        peb = self.provider.duplicate(src)
        self.mutations += 1
        self.provider.walk(peb, target)
        return peb

    def _release(self, peb: Pebble):
        self.provider.release(peb)
        self.mutations += 1

    def _drop_job(self, job: _Job, defer: bool = False):
        out = job.greens + ([job.red] if job.red is not None else [])
        if defer:
            self._limbo.extend(out)
        else:
            for peb in out:
                self._release(peb)
        job.greens = []
        job.red = None

    def _progress(self, job: _Job) -> int:
        if job.red is not None:
            return vpos(job.red)
        if job.greens:
            return vpos(job.greens[-1])
        return vpos(self._nearest(job.w + 1))

    def _advance_job(self, job: _Job):
        red = job.red
        if red is None:
            src = job.greens[-1] if job.greens else self._nearest(job.w + 1)
            red = self.provider.duplicate(self._materialize(src))
            red.color = Color.RED
            job.red = red
            self.mutations += 1
        self.provider.advance(red)
        if red.position == job.spine[len(job.greens)]:
            red.color = Color.GREEN
            job.greens.append(red)
            job.red = None

    def _schedule(self):
        """Bring every job up to its as-late-as-possible quota."""
        c = self.position
        for entry in reversed(self.path):
            job = entry[3]
            if job is None or job.complete:
                continue
            slack = 2 * (c - job.e - 1)
            # cheap reject: the nearest start is never above the run head
            if job.e - job.w + self.height + 2 <= slack:
                continue
            while not job.complete and job.e - self._progress(job) > slack:
                self._advance_job(job)

    def _evict(self):
        """Lazily give back pebbles that the schedule does not need yet."""
        budget = self._step_budget()
        c = self.position
        for entry in reversed(self.path):
            job = entry[3]
            if job is None:
                continue
            need = job.e - 2 * (c - job.e - 1)
            while budget:
                if job.red is not None:
                    base = (vpos(job.greens[-1]) if job.greens
                            else vpos(self._nearest(job.w + 1)))
                    if base < need:
                        break
                    self._release(job.red)
                    job.red = None
                elif job.greens:
                    base = (vpos(job.greens[-2]) if len(job.greens) > 1
                            else vpos(self._nearest(job.w + 1, job.greens)))
                    if base < need:
                        break
                    self._release(job.greens.pop())
                else:
                    break
                budget -= 1
            if not budget:
                return

    def _step_budget(self) -> int:
        """Eliminations still allowed in this forward step."""
        return max(0, min(self.max_evictions,
                          self.forward_mutation_cap - (self.mutations - self._m0)))

    def _flush_limbo(self, limit: int | None = None):
        k = len(self._limbo) if limit is None else min(limit, len(self._limbo))
        for _ in range(k):
            self._release(self._limbo.pop())

    def _trim_runs(self):
        """Drop optional left-run pebbles, shallowest first, to stay in budget."""
        n = self.provider.length
        lg = math.ceil(math.log2(max(n, 2))) if n else self.height
        cap = max(lg, self.height) + 2
        over = self.provider.counters.pebbles_now - cap
        if over > 0 and self._limbo:
            self._flush_limbo(over)
        path = self.path
        k = 1
        while self.provider.counters.pebbles_now > cap and k < len(path) - 1:
            entry = path[k]
            if entry[2] is not None and entry[0] == path[k - 1][0] + 1:
                self._release(entry[2])
                entry[2] = None
            k += 1

    def shrink_on_back(self) -> int:
        """Drop the pebbles inside the left run hanging off the root.

        Once the traversal is far behind its farthest point, walking the whole
        root run costs no more than ``log2 i`` steps, so keeping pebbles there
        buys nothing.  This keeps the pebble count logarithmic in the current
        position even after the tree grew much larger.  Returns the number of
        pebbles released.
        """
        path = self.path
        m = 1
        while m < len(path) and path[m][0] == path[m - 1][0] + 1:
            m += 1
        i = self.far - self.position + 1
        if m > math.log2(i):
            return 0
        released = 0
        for entry in path[1:min(m, len(path) - 1)]:
            if entry[2] is not None:
                self._release(entry[2])
                entry[2] = None
                released += 1
        return released

    def _emit(self, op: str, cost: int):
        if self.hook is not None:
            self.hook(op, self.position, cost,
                      self.provider.counters.pebbles_now)

    # -- operations
    def step_forward(self):
        self._m0 = self.mutations
        steps0 = self.provider.counters.list_steps
        entry = self.path[-1]
        c, h, cur = entry[0], entry[1], entry[2]
        n = self.provider.length
        if n is not None and c >= n:
            raise EndOfList(f"no node after position {c}")
        if c == self.size:
            self._grow()
        elif h > 0:
            if self._run_offset(len(self.path) - 1) % self.run_stride:
                entry[2] = None
                new = cur
            else:
                new = self.provider.duplicate(cur)
            self.provider.advance(new)
            self.path.append([c + 1, h - 1, new, None])
            self.mutations += 1
        else:
            self._forward_from_leaf()
        if self.position > self.far:
            self.far = self.position
        self._flush_limbo(self._step_budget())
        self._evict()
        self._trim_runs()
        self.last_cost = self.provider.counters.list_steps - steps0
        self._emit("F", self.last_cost)

    def _run_offset(self, idx: int) -> int:
        """Distance from path entry ``idx`` up to the head of its left run."""
        path = self.path
        k = idx
        while k > 0 and path[k][0] == path[k - 1][0] + 1:
            k -= 1
        return idx - k

    def _forward_from_leaf(self):
        path = self.path
        idx = len(path) - 1
        while path[idx][0] != path[idx - 1][0] + 1:
            idx -= 1
        u = path[idx - 1]
        for entry in path[idx:]:
            if entry[3] is not None:
                self._drop_job(entry[3], defer=True)
        if idx < len(path) - 1 and path[idx][2] is not None:
            self._release(path[idx][2])
        cur = path[-1][2]
        leaf = self.provider.duplicate(cur)
        leaf.color = Color.GREEN
        greens = [e[2] for e in path[idx + 1:-1]]
        for g in greens:
            g.color = Color.GREEN
        greens.append(leaf)
        self.provider.advance(cur)
        del path[idx:]
        path.append([cur.position, u[1] - 1, cur, None])
        u[3] = _Job(u[0], u[1], greens)
        # the old blue stays behind as a green and the blue moves on
        self.mutations += 2

    def _grow(self):
        """Forward off the last node: the tree doubles under a new root."""
        cur = self.path[-1][2]
        for peb in self.pebbles():
            if peb is not cur:
                peb.delay += 1
        self.provider.advance(cur)
        for entry in self.path:
            entry[0] += 1
            job = entry[3]
            if job is not None:
                job.w += 1
                job.e += 1
                job.spine = [x + 1 for x in job.spine]
        self.height += 1
        self.path.insert(0, [1, self.height, self.provider.head(), None])
        self.mutations += 2

    def step_back(self):
        path = self.path
        entry = path[-1]
        c = entry[0]
        if c == 1:
            raise SynopsisError("already at the head of the list")
        i = self.far - c + 1
        steps0 = self.provider.counters.list_steps
        self._flush_limbo()
        up = path[-2]
        if c == up[0] + 1:
            if up[2] is None:
                up[2] = self._walk_to(up[0])
            else:
                self._materialize(up[2])
            self._release(entry[2])
            path.pop()
        else:
            job = up[3]
            if not job.complete:
                self.readiness_misses += 1
                while not job.complete:
                    self._advance_job(job)
            self._release(entry[2])
            path.pop()
            up[3] = None
            v, hv = up[0] + 1, up[1] - 1
            greens = job.greens
            for g in greens:
                g.color = Color.BLUE
            if hv == 0:
                path.append([v, 0, greens[0], None])
            else:
                path.append([v, hv, None, _Job(v, hv)])
                x, hx = v, hv
                for g in greens:
                    x += 1 << hx
                    hx -= 1
                    path.append([x, hx, g, _Job(x, hx) if hx > 0 else None])
            self._materialize(path[-1][2])
            self.mutations += 2
        self._schedule()
        self._trim_runs()
        if self.auto_shrink:
            self.shrink_on_back()
        cost = self.provider.counters.list_steps - steps0
        self.last_cost = cost
        c_ = self.provider.counters
        if cost > c_.per_op_worst:
            c_.per_op_worst = cost
        if cost > math.log2(i) + 7:
            self.budget_violations += 1
        self._emit("B", cost)

    def back_query(self, j: int):
        """Payload ``j`` positions back; free when that node holds a pebble."""
        c = self.position
        if not 0 <= j < c:
            raise SynopsisError(f"back-query {j} out of range at position {c}")
        if j == 0:
            return self.fetch()
        peb = self._walk_to(c - j)
        try:
            return self.provider.fetch(peb)
        finally:
            self._release(peb)

    back_query_wc = back_query


def step_forward_wc(syn: WorstCaseSynopsis) -> None:
    syn.step_forward()


def step_back_wc(syn: WorstCaseSynopsis) -> None:
    syn.step_back()


def back_query_wc(syn: WorstCaseSynopsis, j: int):
    return syn.back_query(j)
