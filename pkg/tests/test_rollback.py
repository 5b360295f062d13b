import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import record_all
from traversal_synopsis.rollback import (AssemblyError, DeltaStore, MiniVM, ReversibleVM,
                                         Snapshot, apply_delta, assemble, delta_size,
                                         random_program, reverse_delta, rollback,
                                         rollback_delta, run_forward, tree_walk_adapter,
                                         TreeWalker)
from traversal_synopsis.worstcase import SynopsisError

LOOP = """
add r1 r1 #1
store r1 r0
jnz r2 0
"""


def vm_for(seed, inputs=(1, 2, 3)):
    return MiniVM(random_program(random.Random(seed)), inputs)


def test_snapshot_round_trip():
    vm = vm_for(0)
    s = vm.initial
    for _ in range(50):
        s = vm.step(s)
        snap = Snapshot.from_bytes(s)
        assert snap.to_bytes() == s
        assert len(s) == Snapshot.SIZE
    with pytest.raises(ValueError):
        Snapshot.from_bytes(b"short")


def test_step_is_total_and_deterministic():
    prog = assemble("add r0 r0 #5\nhalt\n")
    vm = MiniVM(prog)
    s1 = vm.step(vm.initial)
    assert Snapshot.from_bytes(s1).regs[0] == 5
    s2 = vm.step(s1)
    assert vm.step(s2) == s2  # halt stays put
    assert vm.step(vm.initial) == s1


def test_isa_semantics():
    prog = assemble("""
        add r1 r0 #300      ; r1 = r0 + 300
        store r0 r1         ; tape[r0] = r1 & 0xff
        load r2 r0          ; r2 = tape[r0]
        sub r3 r3 #1        ; wraps to 2^64 - 1
        jnz r3 6
        halt
        add r4 r4 #9
    """)
    vm = MiniVM(prog, [4])
    s = vm.initial
    for _ in range(7):
        s = vm.step(s)
    snap = Snapshot.from_bytes(s)
    assert snap.regs[1] == 304 and snap.regs[2] == 304 & 0xFF
    assert snap.regs[3] == (1 << 64) - 1 and snap.regs[4] == 9
    assert snap.tape[4] == 304 & 0xFF


@pytest.mark.parametrize("bad", ["mul r1 r2 r3", "add r1 r2", "add r9 r0 r0",
                                 "jnz r0 x", "", "store r1"])
def test_assembler_errors(bad):
    with pytest.raises(AssemblyError):
        assemble(bad)


def test_run_ten_then_roll_back_ten():
    vm = vm_for(1)
    states = record_all(vm.initial, vm.step, 11)
    rvm = ReversibleVM(vm)
    run_forward(rvm, 10)
    seen = []
    for _ in range(10):
        rollback(rvm)
        seen.append(rvm.state)
    assert seen == states[:10][::-1]
    with pytest.raises(SynopsisError):
        rollback(rvm)


def test_rollback_right_after_forward_is_cheap():
    rvm = ReversibleVM(vm_for(2))
    rvm.run_forward(1000)
    before = rvm.re_steps
    rvm.rollback()
    assert rvm.re_steps - before <= 8


def test_snapshots_logarithmic_in_run_length():
    T = 1 << 14
    rvm = ReversibleVM(vm_for(3))
    rvm.run_forward(T)
    assert rvm.provider.counters.pebbles_max <= math.log2(T) + 3


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([0, 1, 4, 16]))
def test_random_interleavings_match_record(seed, ell):
    rng = random.Random(seed)
    vm = vm_for(seed, (seed, 7))
    states = record_all(vm.initial, vm.step, 801)
    rvm = DeltaStore(vm, ell) if ell else ReversibleVM(vm)
    j = 0
    for _ in range(1500):
        if j == 0 or (j < 800 and rng.random() < 0.55):
            rvm.run_forward()
            j += 1
        else:
            rvm.rollback()
            j -= 1
        assert rvm.index == j and rvm.state == states[j]


def test_delta_round_trip():
    vm = vm_for(4)
    s = vm.initial
    for _ in range(100):
        t = vm.step(s)
        assert apply_delta(t, reverse_delta(t, s)) == s
        s = t


def test_delta_window_is_free():
    store = DeltaStore(vm_for(5), 16)
    store.run_forward(1000)
    assert store.deltas_stored == 16
    for _ in range(16):
        rollback_delta(store)
    assert store.re_steps == 0
    rollback_delta(store)
    # frozen: the 17th replays its block from the synopsis
    assert store.re_steps == 23
    assert store.re_steps <= 2 * (16 + math.log2(17 / 16))


def test_delta_costs_beyond_the_window():
    ell = 16
    store = DeltaStore(vm_for(6), ell)
    store.run_forward(4096)
    for i in range(1, 4000):
        before = store.re_steps
        store.rollback()
        # a block-level back-step of the inner synopsis, plus one block replay
        assert store.re_steps - before <= ell * (math.log2(i / ell + 1) + 7) + ell


def test_delta_window_invariants():
    ell = 16
    vm = MiniVM(assemble(LOOP), [0, 0, 1])
    store = DeltaStore(vm, ell)
    for steps in range(1, 3000):
        store.run_forward()
        assert store.deltas_stored == min(steps, ell)
        assert store.snapshots_stored <= 2 * math.log2(max(2, steps / ell)) + 5
        # each step touches O(1) cells, so the ring is small next to a snapshot
        assert store.delta_bytes <= 2 * Snapshot.SIZE
        assert all(delta_size(d) <= 3 * 3 for d in store.ring)


def test_path_graph_walk():
    prov = tree_walk_adapter(0, lambda v: [v + 1])
    walker = TreeWalker(prov)
    for i in range(1, 50):
        assert walker.descend(0) == i
    assert walker.record_bits == 0
    for i in range(48, -1, -1):
        assert walker.back() == i


def test_binary_tree_left_spine_walk_reversed():
    kids = lambda v: [2 * v, 2 * v + 1]
    walker = TreeWalker(tree_walk_adapter(1, kids))
    seen = [1]
    for _ in range(30):
        seen.append(walker.descend(0))
    back = [walker.back() for _ in range(30)]
    assert back == seen[:-1][::-1]


def test_implicit_record_bits():
    degrees = [3, 1, 5, 2, 8, 4]

    def kids(v):
        d = degrees[len(v) % len(degrees)]
        return [v + (j,) for j in range(d)]

    walker = TreeWalker(tree_walk_adapter((), kids))
    want = 0
    for depth in range(12):
        d = degrees[depth % len(degrees)]
        want += math.ceil(math.log2(d)) if d > 1 else 0
        walker.descend(d - 1)
        assert walker.record_bits == want
    with pytest.raises(ValueError):
        walker.descend(99)


def test_explicit_tree_needs_no_record():
    kids = lambda v: [2 * v, 2 * v + 1]

    def toward(u, v):
        while v // 2 != u:
            v //= 2
        return v

    prov = tree_walk_adapter(1, kids, kind="explicit", child_toward=toward)
    walker = TreeWalker(prov)
    rng = random.Random(0)
    seen = [1]
    for _ in range(20):
        seen.append(walker.descend(rng.randrange(2)))
    assert walker.record_bits == 0
    for want in seen[-2::-1]:
        assert walker.back() == want
    with pytest.raises(ValueError):
        tree_walk_adapter(1, kids, kind="explicit")
