import pytest
from hypothesis import given, settings, strategies as st

from traversal_synopsis.recycling import RecyclingBin, RecyclingBinError


def drained(cap):
    rb = RecyclingBin(cap)
    for _ in range(cap):
        rb.get_pebble()
    return rb


def test_put_into_empty_bag():
    rb = drained(2)
    rb.put_pebble("x")
    assert rb.bag == ["x"]
    assert rb.get_pebble() == "x"


def test_bag_never_exceeds_capacity():
    rb = RecyclingBin(2 * 10)
    assert len(rb.bag) == 20
    with pytest.raises(RecyclingBinError):
        rb.put_pebble("extra")


def test_put_list_and_lifo_get():
    rb = drained(0)
    a = rb.put_list([1, 2], meta="a")
    assert rb.m_sequence() == [0]
    b = rb.put_list([3], meta="b")
    rec, M = rb.get_list()
    assert rec is b and M == 0
    rec, M = rb.get_list()
    assert rec is a


def test_empty_list_is_not_queued():
    rb = drained(0)
    rb.put_list([])
    assert rb.queue == []


def _rob_to_2110():
    rb = drained(0)
    lists = [rb.put_list([f"{c}{i}" for i in range(4)]) for c in "ABC"]
    for _ in range(4):
        rb.take_from_lists()
    assert rb.m_sequence() == [2, 1, 1]
    lists.append(rb.put_list(["D0", "D1", "D2"]))
    assert rb.m_sequence() == [2, 1, 1, 0]
    return rb, lists


def test_take_follows_min_m_then_oldest():
    rb, lists = _rob_to_2110()
    assert rb.take_from_lists() == "D2"
    assert rb.m_sequence() == [2, 1, 1, 1]
    # min M is now 1 and the oldest such list is B
    assert rb.take_from_lists() == "B2"
    assert rb.m_sequence() == [2, 2, 1, 1]
    rb.check()


def test_get_list_reports_removals():
    rb = drained(0)
    rb.put_list(["a0", "a1", "a2", "a3"], meta="A")
    rb.take_from_lists()
    rb.take_from_lists()
    rec, M = rb.get_list()
    assert M == 2 and rec.items == ["a0", "a1"]


def test_fully_robbed_list_leaves_the_queue():
    rb = drained(0)
    rb.put_list(["x"], meta=1)
    assert rb.take_from_lists() == "x"
    assert rb.peek_list() is None
    with pytest.raises(RecyclingBinError):
        rb.take_from_lists()


ops = st.lists(st.one_of(
    st.tuples(st.just("list"), st.integers(0, 6)),
    st.tuples(st.just("take")),
    st.tuples(st.just("get")),
), max_size=120)


@settings(max_examples=300)
@given(ops)
def test_matches_naive_model(script):
    """Against a plain-list model: min M, oldest first, LIFO get_list."""
    rb = drained(0)
    model = []  # [items, M, record], oldest first
    serial = 0
    for op in script:
        if op[0] == "list":
            items = [serial + i for i in range(op[1])]
            serial += op[1]
            rec = rb.put_list(items)
            if items:
                model.append([list(items), 0, rec])
        elif op[0] == "take":
            if not model:
                with pytest.raises(RecyclingBinError):
                    rb.take_from_lists()
                continue
            low = min(m[1] for m in model)
            entry = next(m for m in model if m[1] == low)
            want = entry[0].pop()
            entry[1] += 1
            if not entry[0]:
                model.remove(entry)
            assert rb.take_from_lists() == want
        else:
            if not model:
                assert rb.peek_list() is None
                continue
            entry = model.pop()
            rec, M = rb.get_list()
            assert rec is entry[2] and M == entry[1] and rec.items == entry[0]
        rb.check()
        assert rb.m_sequence() == [m[1] for m in model]
        assert rb.pointer_updates <= 4
    assert rb.max_pointer_updates <= 4
