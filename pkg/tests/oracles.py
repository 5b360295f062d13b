"""Brute-force reference implementations used by the tests."""

from __future__ import annotations


def explicit_tree(arity: int, depth: int):
    """Materialize a full tree by a literal pre-order walk.

    Returns ``(order, parent, children, depth_of)`` keyed by pre-order index.
    """
    order = []
    parent = {}
    children = {}
    depth_of = {}
    counter = [0]

    def visit(par, d):
        counter[0] += 1
        me = counter[0]
        order.append(me)
        parent[me] = par
        depth_of[me] = d
        children[me] = []
        if d < depth:
            for _ in range(arity):
                children[me].append(visit(me, d + 1))
        return me

    visit(None, 0)
    return order, parent, children, depth_of


def record_all(seed, step, n):
    """Every node of a generated list, by direct recomputation."""
    out = [seed]
    for _ in range(n - 1):
        out.append(step(out[-1]))
    return out
