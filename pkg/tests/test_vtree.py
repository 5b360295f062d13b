import pytest
from hypothesis import given, strategies as st

from oracles import explicit_tree
from traversal_synopsis import vtree
from traversal_synopsis.vtree import NodeId, TreeError, TreeShape


def at(shape, p):
    return vtree.locate(shape, p)


def test_subtree_sizes():
    s7, s15 = TreeShape(2, 2), TreeShape(2, 3)
    assert vtree.subtree_size(s7, at(s7, 1)) == 7
    assert vtree.subtree_size(s7, at(s7, 4)) == 1
    assert vtree.subtree_size(s15, at(s15, 2)) == 7


def test_children_and_parent_small():
    s7 = TreeShape(2, 2)
    kids = {vtree.child(s7, at(s7, 1), j).preorder for j in range(2)}
    assert kids == {2, 5}
    assert vtree.parent(s7, at(s7, 6)).preorder == 5


def test_child_15_frozen():
    # frozen from the brute-force pre-order enumeration
    s15 = TreeShape(2, 3)
    _, _, children, _ = explicit_tree(2, 3)
    assert children[2][1] == 6
    assert vtree.child(s15, at(s15, 2), 1).preorder == 6


def test_successor_examples():
    s7 = TreeShape(2, 2)
    assert vtree.preorder_succ(s7, at(s7, 3)).preorder == 4
    assert vtree.preorder_succ(s7, at(s7, 4)).preorder == 5
    with pytest.raises(TreeError):
        vtree.preorder_succ(s7, at(s7, 7))


def test_predecessor_examples():
    s7, s15 = TreeShape(2, 2), TreeShape(2, 3)
    assert vtree.preorder_pred(s7, at(s7, 2)).preorder == 1
    assert vtree.preorder_pred(s7, at(s7, 5)).preorder == 4
    assert vtree.preorder_pred(s15, at(s15, 9)).preorder == 8
    with pytest.raises(TreeError):
        vtree.preorder_pred(s7, at(s7, 1))


def test_blue_path_examples():
    s7, s15 = TreeShape(2, 2), TreeShape(2, 3)
    assert [x.preorder for x in vtree.blue_path(s7, at(s7, 4))] == [1, 2, 4]
    assert [x.preorder for x in vtree.blue_path(s7, at(s7, 1))] == [1]
    assert [x.preorder for x in vtree.blue_path(s15, at(s15, 11))] == [1, 9, 10, 11]


def test_mirror_info_examples():
    s7 = TreeShape(2, 2)
    left_spine = vtree.blue_path(s7, at(s7, 3))
    assert vtree.mirror_info(s7, left_spine) == {}
    # at 5 the last left child of the path is 2; its whole right subpath counts
    assert vtree.mirror_info(s7, vtree.blue_path(s7, at(s7, 5))) == {2: 2}
    # at 7 the path is 1, 5, 7: the run at 5 has length 1 and 6 is the last
    # left child, whose right subpath is just itself
    assert vtree.mirror_info(s7, vtree.blue_path(s7, at(s7, 7))) == {2: 1, 6: 1}


def test_grow_renumbers_by_one():
    s7 = TreeShape(2, 2)
    s15, shift = vtree.grow(s7)
    assert s15.size == 15
    assert shift(7) == 8 and shift(1) == 2
    # the old right spine becomes the left subtree's right spine under the new root
    old = [x.preorder for x in vtree.blue_path(s7, at(s7, 7))]
    new = [x.preorder for x in vtree.blue_path(s15, at(s15, shift(7)))]
    assert new == [1] + [shift(p) for p in old]


def test_errors():
    with pytest.raises(TreeError):
        TreeShape(1, 3)
    s7 = TreeShape(2, 2)
    with pytest.raises(TreeError):
        vtree.locate(s7, 8)
    with pytest.raises(TreeError):
        vtree.parent(s7, at(s7, 1))
    with pytest.raises(TreeError):
        vtree.child(s7, at(s7, 4), 0)
    with pytest.raises(TreeError):
        vtree.child(s7, at(s7, 1), 2)
    with pytest.raises(TreeError):
        vtree.subtree_size(s7, NodeId(9, 0))


def test_binary_for():
    assert TreeShape.binary_for(1).depth == 0
    assert TreeShape.binary_for(7).depth == 2
    assert TreeShape.binary_for(8).depth == 3
    assert TreeShape.binary_for(4095).depth == 11


@given(st.integers(2, 5), st.integers(0, 4), st.data())
def test_locate_round_trips_through_path(t, d, data):
    shape = TreeShape(t, d)
    p = data.draw(st.integers(1, shape.size))
    node = vtree.locate(shape, p)
    walk = vtree.root(shape)
    for j in node.path:
        walk = vtree.child(shape, walk, j)
    assert walk == node


@given(st.integers(2, 4), st.integers(1, 5), st.data())
def test_succ_pred_inverse(t, d, data):
    shape = TreeShape(t, d)
    p = data.draw(st.integers(1, shape.size - 1))
    node = vtree.locate(shape, p)
    nxt = vtree.preorder_succ(shape, node)
    assert nxt.preorder == p + 1
    assert vtree.preorder_pred(shape, nxt) == node


@given(st.integers(2, 4), st.integers(0, 5), st.data())
def test_right_subpath_ends_at_leaf(t, d, data):
    shape = TreeShape(t, d)
    node = vtree.locate(shape, data.draw(st.integers(1, shape.size)))
    sub = vtree.right_subpath(shape, node)
    assert sub[0] == node and sub[-1].depth == d
    # the last node of the right subpath is the last node of the subtree
    assert sub[-1].preorder == node.preorder + vtree.subtree_size(shape, node) - 1


def _mirror_brute(arity, depth, cur):
    """Mirror budgets straight from the definitions, on an explicit tree."""
    order, parent, children, depth_of = explicit_tree(arity, depth)
    path = [cur]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    path.reverse()
    on = set(path)
    out = {}
    for idx, node in enumerate(path[1:], 1):
        par = parent[node]
        if children[par][1] != node:
            continue
        v = children[par][0]
        run = 1
        while idx + run < len(path) and children[path[idx + run - 1]][0] == path[idx + run]:
            run += 1
        if idx + run == len(path):
            sub = 1
            x = v
            while children[x]:
                x = children[x][1]
                sub += 1
            out[v] = sub
        else:
            out[v] = run
    assert not (set(out) & on)
    return out


@given(st.integers(0, 5), st.data())
def test_mirror_info_matches_definition(d, data):
    shape = TreeShape(2, d)
    cur = data.draw(st.integers(1, shape.size))
    got = vtree.mirror_info(shape, vtree.blue_path(shape, vtree.locate(shape, cur)))
    assert got == _mirror_brute(2, d, cur)
