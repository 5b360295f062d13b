import random

import pytest
from hypothesis import given, settings, strategies as st

from traversal_synopsis.baselines import (BaselineKind, RestartFromHead, Skeleton,
                                          TrailingAll, UniformK, UnsupportedOperation,
                                          make_baseline, oracle_back, skeleton_back_all)
from traversal_synopsis.harness import random_trace
from traversal_synopsis.psp import VectorProvider
from traversal_synopsis.worstcase import SynopsisError


def vec(n):
    return VectorProvider(list(range(1, n + 1)))


def test_oracle_back():
    p = vec(20)
    peb = oracle_back(p, 2)
    assert peb.position == 1 and p.counters.list_steps == 0
    peb = oracle_back(p, 10)
    assert peb.position == 9 and p.counters.list_steps == 8
    with pytest.raises(SynopsisError):
        oracle_back(p, 1)


def test_skeleton_initial_pointers():
    skel = Skeleton(vec(8), 8)
    assert skel.initial_pointers == [7, 6, 4, 0]
    assert skel.position == 8


def test_skeleton_tiny():
    log = skeleton_back_all(Skeleton(vec(2), 2))
    assert log.positions == [1]
    assert log.list_steps <= 2


@pytest.mark.parametrize("n", [1, 2, 4, 16, 64, 256, 1024])
def test_skeleton_order_and_payloads(n):
    skel = Skeleton(vec(n), n)
    log = skeleton_back_all(skel)
    assert log.positions == list(range(n - 1, 0, -1))
    assert log.payloads == log.positions


def test_skeleton_cost_256():
    log = skeleton_back_all(Skeleton(vec(256), 256))
    # frozen from the instrumented recursion
    assert log.list_steps == 762
    assert log.list_steps <= 8 * 256


def test_skeleton_rejects():
    with pytest.raises(ValueError):
        Skeleton(vec(12), 12)
    skel = Skeleton(vec(4), 4)
    with pytest.raises(UnsupportedOperation):
        skel.step_forward()
    with pytest.raises(UnsupportedOperation):
        skel.back_query(1)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 300), st.integers(0, 10**6), st.integers(1, 20))
def test_baselines_agree(n, seed, k):
    ops = random_trace(random.Random(seed), n, 400)
    syns = [RestartFromHead(vec(n)), TrailingAll(vec(n)), UniformK(vec(n), k)]
    for op in ops:
        outs = []
        for syn in syns:
            if op[0] == "F":
                syn.step_forward()
                outs.append(syn.fetch())
            elif op[0] == "B":
                syn.step_back()
                outs.append(syn.fetch())
            else:
                outs.append(syn.back_query(op[1]))
        assert len(set(outs)) == 1
        assert len({s.position for s in syns}) == 1


def test_baseline_costs():
    n = 100
    t, u = TrailingAll(vec(n)), UniformK(vec(n), 10)
    for _ in range(n - 1):
        t.step_forward()
        u.step_forward()
    assert t.provider.counters.pebbles_max == n
    while t.position > 1:
        t.step_back()
        u.step_back()
        assert t.last_cost == 0
        assert u.last_cost < u.spacing


def test_make_baseline():
    assert isinstance(make_baseline(BaselineKind.RESTART_FROM_HEAD, vec(3)), RestartFromHead)
    assert isinstance(make_baseline(BaselineKind.UNIFORM_K, vec(3), k=2), UniformK)
    assert isinstance(make_baseline(BaselineKind.SKELETON, vec(4), n=4), Skeleton)
