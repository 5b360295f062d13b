"""Program rollback: a deterministic mini-VM whose execution is the list.

Each VM state is a list node; a forward list-step is one executed
instruction, and a pebble is a stored snapshot.  Rolling back to the
previous state is a back step of a traversal synopsis.

Also here: reverse-delta rollback for the most recent steps, and providers
that turn a walk down a tree into a list.
"""

from __future__ import annotations

import math
import random
import struct
from collections import deque
from dataclasses import dataclass
from typing import Callable, Sequence

from .psp import GeneratedProvider, Pebble, Provider
from .worstcase import SynopsisError, WorstCaseSynopsis

NREGS = 8
TAPE = 256
MASK64 = (1 << 64) - 1
OPS = ("add", "sub", "load", "store", "jnz", "halt")


class AssemblyError(ValueError):
    pass


@dataclass(frozen=True)
class Instr:
    op: str
    a: int = 0
    b: int = 0
    c: int = 0
    imm: bool = False  # third operand of add/sub is an immediate

    def text(self) -> str:
        if self.op == "halt":
            return "halt"
        if self.op in ("add", "sub"):
            third = f"#{self.c}" if self.imm else f"r{self.c}"
            return f"{self.op} r{self.a} r{self.b} {third}"
        if self.op == "load":
            return f"load r{self.a} r{self.b}"
        if self.op == "store":
            return f"store r{self.a} r{self.b}"
        return f"jnz r{self.a} {self.b}"


def _reg(tok: str, lineno: int) -> int:
    if not (tok.startswith("r") and tok[1:].isdigit() and int(tok[1:]) < NREGS):
        raise AssemblyError(f"line {lineno}: bad register {tok!r}")
    return int(tok[1:])


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok, 0)
    except ValueError:
        raise AssemblyError(f"line {lineno}: bad number {tok!r}") from None


def assemble(text: str) -> list[Instr]:
    """One instruction per line; ``;`` starts a comment.

    ``add rd ra rb`` / ``add rd ra #imm``, same for ``sub``;
    ``load rd ra`` (rd = tape[ra]); ``store ra rb`` (tape[ra] = rb);
    ``jnz ra target``; ``halt``.
    """
    prog = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        tok = line.replace(",", " ").split()
        op = tok[0].lower()
        args = tok[1:]
        want = {"add": 3, "sub": 3, "load": 2, "store": 2, "jnz": 2, "halt": 0}
        if op not in want:
            raise AssemblyError(f"line {lineno}: unknown op {op!r}")
        if len(args) != want[op]:
            raise AssemblyError(f"line {lineno}: {op} takes {want[op]} operands")
        if op in ("add", "sub"):
            imm = args[2].startswith("#")
            c = _int(args[2][1:], lineno) & MASK64 if imm else _reg(args[2], lineno)
            prog.append(Instr(op, _reg(args[0], lineno), _reg(args[1], lineno), c, imm))
        elif op in ("load", "store"):
            prog.append(Instr(op, _reg(args[0], lineno), _reg(args[1], lineno)))
        elif op == "jnz":
            prog.append(Instr(op, _reg(args[0], lineno), _int(args[1], lineno)))
        else:
            prog.append(Instr("halt"))
    if not prog:
        raise AssemblyError("empty program")
    return prog


@dataclass(frozen=True)
class Snapshot:
    regs: tuple
    pc: int
    tape: bytes

    SIZE = NREGS * 8 + 8 + TAPE

    def to_bytes(self) -> bytes:
        return struct.pack(f">{NREGS}QQ", *self.regs, self.pc) + self.tape

    @classmethod
    def from_bytes(cls, raw: bytes) -> "Snapshot":
        if len(raw) != cls.SIZE:
            raise ValueError(f"snapshot must be {cls.SIZE} bytes")
        vals = struct.unpack_from(f">{NREGS}QQ", raw)
        return cls(tuple(vals[:NREGS]), vals[NREGS], bytes(raw[NREGS * 8 + 8:]))


class MiniVM:
    """Eight 64-bit registers, a program counter and a 256-byte tape.

    ``step`` is total: a ``halt`` or a pc past the program leaves the state
    unchanged.  Inputs are fixed at construction (initial registers).
    """

    def __init__(self, program: Sequence[Instr], inputs: Sequence[int] = ()):
        self.program = list(program)
        regs = [0] * NREGS
        for i, v in enumerate(list(inputs)[:NREGS]):
            regs[i] = v & MASK64
        self.initial = Snapshot(tuple(regs), 0, bytes(TAPE)).to_bytes()

    def step(self, raw: bytes) -> bytes:
        regs = list(struct.unpack_from(f">{NREGS}Q", raw))
        pc = struct.unpack_from(">Q", raw, NREGS * 8)[0]
        if pc >= len(self.program):
            return raw
        ins = self.program[pc]
        op = ins.op
        tape = None
        nxt = pc + 1
        if op == "add" or op == "sub":
            rhs = ins.c if ins.imm else regs[ins.c]
            if op == "add":
                regs[ins.a] = (regs[ins.b] + rhs) & MASK64
            else:
                regs[ins.a] = (regs[ins.b] - rhs) & MASK64
        elif op == "load":
            regs[ins.a] = raw[NREGS * 8 + 8 + regs[ins.b] % TAPE]
        elif op == "store":
            tape = bytearray(raw[NREGS * 8 + 8:])
            tape[regs[ins.a] % TAPE] = regs[ins.b] & 0xFF
        elif op == "jnz":
            if regs[ins.a] != 0:
                nxt = ins.b
        else:
            return raw
        head = struct.pack(f">{NREGS}QQ", *regs, nxt)
        return head + (bytes(tape) if tape is not None else raw[NREGS * 8 + 8:])


def random_program(rng: random.Random, length: int = 24) -> list[Instr]:
    """A random program that keeps running: backward jumps are conditional."""
    prog = []
    for i in range(length - 1):
        op = rng.choice(("add", "add", "sub", "load", "store", "jnz"))
        r = lambda: rng.randrange(NREGS)
        if op in ("add", "sub"):
            imm = rng.random() < 0.5
            c = rng.randrange(1, 1 << 16) if imm else r()
            prog.append(Instr(op, r(), r(), c, imm))
        elif op in ("load", "store"):
            prog.append(Instr(op, r(), r()))
        else:
            prog.append(Instr("jnz", r(), rng.randrange(length)))
    prog.append(Instr("jnz", 0, 0) if rng.random() < 0.5 else Instr("add", 0, 0, 1, True))
    return prog


def state_digest(raw: bytes) -> str:
    import hashlib
    return hashlib.sha256(raw).hexdigest()[:16]


class ReversibleVM:
    """Forward execution plus rollback to the previous state via a synopsis."""

    def __init__(self, vm: MiniVM, factory: Callable[[Provider], object] = WorstCaseSynopsis):
        self.vm = vm
        self.provider = GeneratedProvider(vm.initial, vm.step)
        self.syn = factory(self.provider)
        self.forward_steps = 0

    @property
    def index(self) -> int:
        """j for the current state s_j."""
        return self.syn.position - 1

    @property
    def state(self) -> bytes:
        return self.syn.fetch()

    @property
    def vm_steps(self) -> int:
        return self.provider.counters.list_steps

    @property
    def re_steps(self) -> int:
        return self.vm_steps - self.forward_steps

    @property
    def snapshots_stored(self) -> int:
        return self.provider.counters.pebbles_now

    def run_forward(self, steps: int = 1):
        for _ in range(steps):
            self.syn.step_forward()
            self.forward_steps += 1

    def rollback(self):
        if self.index == 0:
            raise SynopsisError("cannot roll back past the initial state")
        self.syn.step_back()


def run_forward(rvm: ReversibleVM, steps: int = 1):
    rvm.run_forward(steps)


def rollback(rvm: ReversibleVM):
    rvm.rollback()


# -- delta encoding

def reverse_delta(new: bytes, old: bytes) -> tuple:
    """Byte patches that turn ``new`` back into ``old``."""
    return tuple((i, old[i]) for i in range(len(old)) if old[i] != new[i])


def delta_size(delta: tuple) -> int:
    """Bytes to store a delta: a two-byte offset plus the old byte per patch."""
    return 3 * len(delta)


def apply_delta(state: bytes, delta: tuple) -> bytes:
    if not delta:
        return state
    buf = bytearray(state)
    for i, b in delta:
        buf[i] = b
    return bytes(buf)


class _BlockStates(Provider):
    """List of block-start states; one list-step runs ``block`` instructions.

    When the caller already holds the next block's start state it passes it
    as ``hint`` and the step costs no VM work.
    """

    def __init__(self, vm: MiniVM, block: int):
        super().__init__()
        self.vm = vm
        self.block = block
        self.hint: tuple[int, bytes] | None = None
        self.vm_steps = 0

    def _head_state(self):
        return self.vm.initial

    def _next_state(self, pebble):
        if self.hint is not None and self.hint[0] == pebble.position + 1:
            return self.hint[1]
        s = pebble.state
        for _ in range(self.block):
            s = self.vm.step(s)
        self.vm_steps += self.block
        return s

    def _payload(self, pebble):
        return pebble.state


class DeltaStore:
    """Rollback with reverse deltas for the last ``ell`` steps.

    The most recent ``ell`` rollbacks just apply stored deltas.  Further back,
    a synopsis over block-start states (blocks of ``ell`` states) finds the
    start of the needed block, and replaying that block refills the delta
    ring so the following rollbacks in the block are again free.
    """

    def __init__(self, vm: MiniVM, ell: int = 16):
        if ell < 1:
            raise ValueError("ell must be at least 1")
        self.vm = vm
        self.ell = ell
        self.blocks = _BlockStates(vm, ell)
        self.syn = WorstCaseSynopsis(self.blocks)
        self.state = vm.initial
        self.index = 0
        self.ring: deque = deque(maxlen=ell)
        self.forward_steps = 0
        self.replay_steps = 0

    @property
    def re_steps(self) -> int:
        return self.replay_steps + self.blocks.vm_steps

    @property
    def snapshots_stored(self) -> int:
        return self.blocks.counters.pebbles_now + 1

    @property
    def deltas_stored(self) -> int:
        return len(self.ring)

    @property
    def delta_bytes(self) -> int:
        return sum(delta_size(d) for d in self.ring)

    def _block_of(self, j: int) -> int:
        return j // self.ell + 1

    def run_forward(self, steps: int = 1):
        for _ in range(steps):
            new = self.vm.step(self.state)
            self.forward_steps += 1
            self.ring.append(reverse_delta(new, self.state))
            self.state = new
            self.index += 1
            b = self._block_of(self.index)
            if self.syn.position < b:
                self.blocks.hint = (b, new)
                try:
                    self.syn.step_forward()
                finally:
                    self.blocks.hint = None

    def rollback(self):
        if self.index == 0:
            raise SynopsisError("cannot roll back past the initial state")
        if self.ring:
            self.state = apply_delta(self.state, self.ring.pop())
            self.index -= 1
            return
        target = self.index - 1
        b = self._block_of(target)
        while self.syn.position > b:
            self.syn.step_back()
        s = self.syn.fetch()
        j = (b - 1) * self.ell
        while j < target:
            new = self.vm.step(s)
            self.ring.append(reverse_delta(new, s))
            s = new
            j += 1
            self.replay_steps += 1
        self.state = s
        self.index = target


def rollback_delta(store: DeltaStore):
    store.rollback()


# -- tree walks

class TreeWalkProvider(Provider):
    """The root-to-current path of a walk down a tree, as a list.

    ``children(node)`` lists a node's children.  For an explicit tree,
    ``child_toward(u, v)`` names the child of ``u`` on the way to its
    descendant ``v``, so re-walking needs no record.  For an implicit tree
    the chosen child indices are recorded; they cost ``R(v)``, the sum of
    ``ceil(log2 d(u))`` over the ancestors ``u`` of the current node.
    """

    def __init__(self, root, children: Callable, kind: str = "implicit",
                 child_toward: Callable | None = None):
        super().__init__()
        if kind not in ("explicit", "implicit"):
            raise ValueError("kind is 'explicit' or 'implicit'")
        if kind == "explicit" and child_toward is None:
            raise ValueError("an explicit tree needs child_toward")
        self.root = root
        self.children = children
        self.kind = kind
        self.child_toward = child_toward
        self.choices: list[int] = []
        self.bits: list[int] = []
        self.endpoint = root

    def _head_state(self):
        return self.root

    def _next_state(self, pebble):
        depth = pebble.position - 1
        kids = self.children(pebble.state)
        if self.kind == "explicit":
            return self.child_toward(pebble.state, self.endpoint)
        return kids[self.choices[depth]]

    def _payload(self, pebble):
        return pebble.state

    def choose(self, depth: int, node, j: int):
        """Record that the walk leaves ``node`` (at ``depth``) by child ``j``."""
        kids = self.children(node)
        if not 0 <= j < len(kids):
            raise ValueError(f"node {node!r} has no child {j}")
        del self.choices[depth:]
        del self.bits[depth:]
        self.choices.append(j)
        self.bits.append(math.ceil(math.log2(len(kids))) if len(kids) > 1 else 0)
        return kids[j]

    def record_bits(self, depth: int) -> int:
        return sum(self.bits[:depth]) if self.kind == "implicit" else 0


class TreeWalker:
    """Walk down a tree by child choices and back up through a synopsis."""

    def __init__(self, provider: TreeWalkProvider,
                 factory: Callable[[Provider], object] = WorstCaseSynopsis):
        self.provider = provider
        self.syn = factory(provider)

    @property
    def node(self):
        return self.syn.fetch()

    @property
    def depth(self) -> int:
        return self.syn.position - 1

    @property
    def record_bits(self) -> int:
        return self.provider.record_bits(self.depth)

    def descend(self, j: int):
        nxt = self.provider.choose(self.depth, self.node, j)
        self.provider.endpoint = nxt
        self.syn.step_forward()
        return self.node

    def back(self):
        self.syn.step_back()
        return self.node


def tree_walk_adapter(root, children: Callable, kind: str = "implicit",
                      child_toward: Callable | None = None) -> TreeWalkProvider:
    return TreeWalkProvider(root, children, kind, child_toward)
