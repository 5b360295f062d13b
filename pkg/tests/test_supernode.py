import math
import random

import pytest

from traversal_synopsis.harness import random_trace
from traversal_synopsis.psp import GeneratedProvider, VectorProvider
from traversal_synopsis.supernode import (SuperNodeConfig, SuperNodeProvider,
                                          SuperNodeSynopsis, calibrate, wrap_supernodes)
from traversal_synopsis.worstcase import SynopsisError, WorstCaseSynopsis


def test_config_block_size():
    cfg = SuperNodeConfig.for_epsilon(0.1, 2.0)
    assert cfg.block == 40
    assert math.isclose(cfg.eps_synopsis + cfg.eps_walk, 0.1)
    with pytest.raises(ValueError):
        SuperNodeConfig.for_epsilon(0, 2.0)


def test_calibrated_constant_is_small():
    c = calibrate(5000)
    assert 1 <= c <= 3


def test_block_one_is_identity():
    vals = list(range(300))
    ops = random_trace(random.Random(1), 300, 1500)
    a = SuperNodeSynopsis(VectorProvider(vals), block=1)
    b = WorstCaseSynopsis(VectorProvider(vals))
    for op in ops:
        if op[0] == "F":
            a.step_forward()
            b.step_forward()
        elif op[0] == "B":
            a.step_back()
            b.step_back()
        else:
            assert a.back_query(op[1]) == b.back_query(op[1])
        assert a.position == b.position == a.inner.position
        assert a.fetch() == b.fetch()


def test_back_inside_a_block_skips_the_inner_synopsis():
    syn = SuperNodeSynopsis(VectorProvider(list(range(100))), block=8)
    for _ in range(14):
        syn.step_forward()
    # position 15 lies in block 2 (nodes 9..16)
    inner_before = syn.inner.mutations
    steps = syn.provider.counters.list_steps
    syn.step_back()
    assert syn.position == 14
    assert syn.provider.counters.list_steps - steps <= 8
    assert syn.inner.mutations == inner_before


def test_forward_is_one_list_step():
    syn = SuperNodeSynopsis(GeneratedProvider(0, lambda x: x + 1), epsilon=0.1, c=2.0)
    for _ in range(5000):
        before = syn.provider.counters.list_steps
        syn.step_forward()
        assert syn.provider.counters.list_steps - before == 1


def test_overhead_below_epsilon():
    syn = SuperNodeSynopsis(GeneratedProvider(0, lambda x: x + 1), epsilon=0.1)
    for _ in range(100_000):
        syn.step_forward()
    assert syn.overhead() <= 0.1


def test_mixed_trace_payloads():
    vals = list(range(5000))
    syn = SuperNodeSynopsis(VectorProvider(vals), epsilon=0.2, c=2.0)
    for op in random_trace(random.Random(7), 5000, 20000):
        if op[0] == "F":
            syn.step_forward()
        elif op[0] == "B":
            syn.step_back()
        else:
            assert syn.back_query(op[1]) == vals[syn.position - op[1] - 1]
        assert syn.fetch() == vals[syn.position - 1]
    with pytest.raises(SynopsisError):
        syn.back_query(syn.position)


def test_wrapped_provider_length():
    p = wrap_supernodes(VectorProvider(list(range(100))), 0.5, c=2.0)
    assert isinstance(p, SuperNodeProvider)
    assert p.block == 8 and p.length == 13
