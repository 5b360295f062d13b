"""Walk a hash chain backwards while storing only a few chain values.

The chain is ``v_0 = seed`` and ``v_i = h(v_{i-1})``.  It is exposed as a
generated list whose node ``p`` carries ``v_{p-1}``, so every hash
evaluation is a list-step and every stored value is a pebble.
"""

from __future__ import annotations

import hashlib
from typing import Callable, Iterator

from .psp import GeneratedProvider
from .tradeoff import KarySynopsis, Mode, TradeoffConfig
from .worstcase import WorstCaseSynopsis

MASK64 = (1 << 64) - 1


def toy_hash(value: bytes) -> bytes:
    """Deterministic 64-bit mixer (splitmix64 finalizer); test fixture only."""
    x = int.from_bytes(value[-8:].rjust(8, b"\0"), "big")
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    x ^= x >> 31
    return x.to_bytes(8, "big")


def sha256(value: bytes) -> bytes:
    return hashlib.sha256(value).digest()


HASHES: dict[str, Callable[[bytes], bytes]] = {"toy": toy_hash, "sha256": sha256}


def resolve_hash(h) -> Callable[[bytes], bytes]:
    if callable(h):
        return h
    try:
        return HASHES[h]
    except KeyError:
        raise ValueError(f"unknown hash {h!r}; choose from {sorted(HASHES)}")


def verify(v_prev: bytes, v: bytes, h=toy_hash) -> bool:
    return resolve_hash(h)(v_prev) == v


def chain_values(seed: bytes, n: int, h=toy_hash) -> list[bytes]:
    """All of ``v_0 .. v_{n-1}`` by direct recomputation (the oracle)."""
    h = resolve_hash(h)
    out = [bytes(seed)]
    for _ in range(n - 1):
        out.append(h(out[-1]))
    return out[:n]


class Backstepper:
    """Iterator over ``(i, v_i)`` for ``i = n-1`` down to ``0``.

    ``mode`` is ``"sparse"``, ``"dense"`` (the k-ary trade-off) or
    ``"worstcase"``.  ``stored_max`` and ``hash_evals`` report what the walk
    cost in memory and in hash evaluations.
    """

    def __init__(self, seed: bytes, n: int, k: int = 2, mode: str = "sparse",
                 h=toy_hash):
        if n < 1:
            raise ValueError("a chain has at least one value")
        self._seed = bytearray(seed)
        self.n = n
        self.h = resolve_hash(h)
        self.provider = GeneratedProvider(bytes(seed), self.h)
        self.mode = mode
        if n < 3:
            self.syn = WorstCaseSynopsis(self.provider)
        elif mode == "worstcase":
            self.syn = WorstCaseSynopsis(self.provider)
        else:
            self.syn = KarySynopsis(self.provider, TradeoffConfig(n, k, Mode(mode)))
        self._started = False
        self._done = False

    @property
    def hash_evals(self) -> int:
        return self.provider.counters.list_steps

    @property
    def stored_now(self) -> int:
        return self.provider.counters.pebbles_now

    @property
    def stored_max(self) -> int:
        return self.provider.counters.pebbles_max

    def __iter__(self) -> Iterator[tuple[int, bytes]]:
        return self

    def __next__(self) -> tuple[int, bytes]:
        if self._done:
            raise StopIteration
        if not self._started:
            self._started = True
            for _ in range(self.n - 1):
                self.syn.step_forward()
        else:
            if self.syn.position == 1:
                self.close()
                raise StopIteration
            self.syn.step_back()
        pos = self.syn.position
        return pos - 1, self.syn.fetch()

    def close(self):
        """Forget the seed and every stored chain value."""
        seed = getattr(self, "_seed", None)  # absent if __init__ failed
        if seed is not None:
            for i in range(len(seed)):
                seed[i] = 0
        self._done = True
        self.syn = None

    def __del__(self):
        self.close()


def backstepper(seed: bytes, n: int, k: int = 2, mode: str = "sparse",
                h=toy_hash) -> Backstepper:
    return Backstepper(seed, n, k, mode, h)
