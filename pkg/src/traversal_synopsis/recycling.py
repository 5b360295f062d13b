"""Recycling bin: the pebble allocator of the refined pebbler.

Free pebbles live in a bag (a stack).  Released green paths are kept as
lists in a deque ordered by deposit rank; each list counts how many pebbles
were taken from it (``M``).  When the bag is empty a pebble is taken from
the oldest list among those with the smallest ``M``.  Because ``M`` never
increases along the deque from oldest to newest, that choice is served in
O(1) by one bucket per ``M`` value pointing at the oldest list in the
bucket's run.

A list whose pebbles have all been taken leaves the deque; the caller then
rebuilds that green path from its parent when it is needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


class RecyclingBinError(Exception):
    pass


@dataclass(eq=False)
class ListRecord:
    items: list
    rank: int
    M: int = 0
    meta: Any = None
    # deque links, oldest to newest
    older: "ListRecord | None" = field(default=None, repr=False)
    newer: "ListRecord | None" = field(default=None, repr=False)
    member: bool = field(default=False, repr=False)

    @property
    def head(self):
        return self.items[0] if self.items else None

    @property
    def tail(self):
        return self.items[-1] if self.items else None


class _Bucket:
    __slots__ = ("M", "far", "lower", "higher")

    def __init__(self, M: int, far: ListRecord):
        self.M = M
        self.far = far
        self.lower: _Bucket | None = None
        self.higher: _Bucket | None = None


class RecyclingBin:
    def __init__(self, capacity: int, fill=None):
        if capacity < 0:
            raise ValueError("capacity must be non-negative")
        self.capacity = capacity
        self.bag: list = [fill] * capacity
        self._rank = 0
        self._buckets: dict[int, _Bucket] = {}
        self._min: _Bucket | None = None
        self._newest: ListRecord | None = None
        self.pointer_updates = 0
        self.max_pointer_updates = 0

    # -- bag
    def put_pebble(self, pebble) -> None:
        if len(self.bag) >= self.capacity:
            raise RecyclingBinError("bag would exceed the bin capacity")
        self.bag.append(pebble)

    def grow(self, extra: int, fill=None) -> None:
        """Raise the capacity by ``extra`` fresh bag slots."""
        self.capacity += extra
        self.bag.extend([fill] * extra)

    def get_pebble(self):
        if self.bag:
            self.pointer_updates = 0
            return self.bag.pop()
        return self.take_from_lists()

    # -- lists
    def put_list(self, items, meta=None) -> ListRecord:
        self._rank += 1
        rec = ListRecord(list(items), self._rank, 0, meta)
        if rec.items:
            self._join_newest(rec)
        return rec

    def peek_list(self) -> ListRecord | None:
        return self._newest

    def get_list(self) -> tuple[ListRecord, int]:
        rec = self._newest
        if rec is None:
            raise RecyclingBinError("no list to return")
        self._leave_newest(rec)
        return rec, rec.M

    def take_from_lists(self):
        """Remove the last pebble of the oldest list with minimum M."""
        b = self._min
        if b is None:
            raise RecyclingBinError("recycling bin is empty")
        updates = 0
        rec = b.far
        item = rec.items.pop()
        old = rec.M
        rec.M = old + 1
        # rec moves into the next bucket, whose run is directly older
        nb = b.higher
        if nb is None or nb.M != old + 1:
            nb2 = _Bucket(old + 1, rec)
            nb2.lower, nb2.higher = b, nb
            if nb is not None:
                nb.lower = nb2
            b.higher = nb2
            self._buckets[old + 1] = nb2
            nb = nb2
            updates += 1
        # the old bucket's pointer moves one list closer
        nxt = rec.newer
        if nxt is not None and nxt.M == old:
            b.far = nxt
        else:
            self._unlink(b)
        updates += 1
        if not rec.items:
            if nb.far is rec:
                self._unlink(nb)
                updates += 1
            self._unlink_member(rec)
            updates += 1
        self.pointer_updates = updates
        if updates > self.max_pointer_updates:
            self.max_pointer_updates = updates
        return item

    # -- inspection
    @property
    def queue(self) -> list[ListRecord]:
        """Lists still holding pebbles, oldest first."""
        out = []
        r = self._newest
        while r is not None:
            out.append(r)
            r = r.older
        out.reverse()
        return out

    def __len__(self):
        return len(self.queue)

    @property
    def pebbles_in_lists(self) -> int:
        return sum(len(r.items) for r in self.queue)

    def m_sequence(self) -> list[int]:
        return [r.M for r in self.queue]

    def check(self) -> None:
        """Raise ``RecyclingBinError`` if the ordering or bucket links are off."""
        seq = self.m_sequence()
        if any(a < b for a, b in zip(seq, seq[1:])):
            raise RecyclingBinError(f"M sequence increases: {seq}")
        first: dict[int, ListRecord] = {}
        for r in self.queue:
            first.setdefault(r.M, r)
        if set(first) != set(self._buckets):
            raise RecyclingBinError(
                f"buckets {sorted(self._buckets)} but lists have M {sorted(first)}")
        for m, r in first.items():
            if self._buckets[m].far is not r:
                raise RecyclingBinError(f"bucket {m} does not point at its oldest list")
        b, prev = self._min, None
        while b is not None:
            if prev is not None and prev.M >= b.M:
                raise RecyclingBinError("bucket chain out of order")
            prev, b = b, b.higher

    # -- internals
    def _join_newest(self, rec: ListRecord):
        rec.member = True
        rec.older = self._newest
        rec.newer = None
        if self._newest is not None:
            self._newest.newer = rec
        self._newest = rec
        if rec.M in self._buckets:
            return
        b = _Bucket(rec.M, rec)
        b.higher = self._min
        if self._min is not None:
            self._min.lower = b
        self._min = b
        self._buckets[rec.M] = b

    def _leave_newest(self, rec: ListRecord):
        b = self._buckets[rec.M]
        if b.far is rec:
            self._unlink(b)
        self._unlink_member(rec)

    def _unlink_member(self, rec: ListRecord):
        if rec.older is not None:
            rec.older.newer = rec.newer
        if rec.newer is not None:
            rec.newer.older = rec.older
        if self._newest is rec:
            self._newest = rec.older
        rec.older = rec.newer = None
        rec.member = False

    def _unlink(self, b: _Bucket):
        if b.lower is not None:
            b.lower.higher = b.higher
        else:
            self._min = b.higher
        if b.higher is not None:
            b.higher.lower = b.lower
        del self._buckets[b.M]
