"""Arithmetic on the implicit, complete, pre-order numbered tree.

Pre-order index equals list position.  Nothing here is materialized: every
query is a handful of integer operations on ``(preorder, depth, path)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable


class TreeError(ValueError):
    pass


@dataclass(frozen=True)
class TreeShape:
    arity: int
    depth: int

    def __post_init__(self):
        if self.arity < 2:
            raise TreeError("arity must be at least 2")
        if self.depth < 0:
            raise TreeError("depth must be non-negative")

    @property
    def size(self) -> int:
        return full_size(self.arity, self.depth)

    @classmethod
    def binary_for(cls, n: int) -> "TreeShape":
        """Smallest full binary tree with at least ``n`` nodes."""
        d = 0
        while (1 << (d + 1)) - 1 < n:
            d += 1
        return cls(2, d)


@dataclass(frozen=True)
class NodeId:
    preorder: int
    depth: int
    path: tuple = ()

    @property
    def is_root(self) -> bool:
        return self.depth == 0


def full_size(arity: int, height: int) -> int:
    """Node count of a full ``arity``-ary tree with ``height`` levels of edges."""
    if arity == 2:
        return (1 << (height + 1)) - 1
    return (arity ** (height + 1) - 1) // (arity - 1)


def root(shape: TreeShape) -> NodeId:
    return NodeId(1, 0, ())


def _check(shape: TreeShape, node: NodeId):
    if not (1 <= node.preorder <= shape.size) or node.depth > shape.depth:
        raise TreeError(f"{node} is not a node of {shape}")


def subtree_size(shape: TreeShape, node: NodeId) -> int:
    _check(shape, node)
    return full_size(shape.arity, shape.depth - node.depth)


def child(shape: TreeShape, node: NodeId, j: int) -> NodeId:
    _check(shape, node)
    if node.depth == shape.depth:
        raise TreeError("leaves have no children")
    if not 0 <= j < shape.arity:
        raise TreeError(f"child index {j} out of range")
    s = full_size(shape.arity, shape.depth - node.depth - 1)
    return NodeId(node.preorder + 1 + j * s, node.depth + 1, node.path + (j,))


def parent(shape: TreeShape, node: NodeId) -> NodeId:
    _check(shape, node)
    if node.depth == 0:
        raise TreeError("the root has no parent")
    j = node.path[-1]
    s = full_size(shape.arity, shape.depth - node.depth)
    return NodeId(node.preorder - 1 - j * s, node.depth - 1, node.path[:-1])


def locate(shape: TreeShape, preorder: int) -> NodeId:
    """Node with the given pre-order index, found by descending from the root."""
    if not 1 <= preorder <= shape.size:
        raise TreeError(f"position {preorder} outside tree of size {shape.size}")
    node = NodeId(1, 0, ())
    while node.preorder != preorder:
        s = full_size(shape.arity, shape.depth - node.depth - 1)
        j = (preorder - node.preorder - 1) // s
        node = NodeId(node.preorder + 1 + j * s, node.depth + 1, node.path + (j,))
    return node


def _rightmost_leaf(shape: TreeShape, node: NodeId) -> NodeId:
    last = shape.arity - 1
    while node.depth < shape.depth:
        node = child(shape, node, last)
    return node


def preorder_succ(shape: TreeShape, node: NodeId) -> NodeId:
    _check(shape, node)
    if node.depth < shape.depth:
        return child(shape, node, 0)
    # leaf: climb while we are a last child, then step to the next sibling
    while node.depth > 0 and node.path[-1] == shape.arity - 1:
        node = parent(shape, node)
    if node.depth == 0:
        raise TreeError("the last node has no successor")
    up = parent(shape, node)
    return child(shape, up, node.path[-1] + 1)


def preorder_pred(shape: TreeShape, node: NodeId) -> NodeId:
    _check(shape, node)
    if node.depth == 0:
        raise TreeError("the root has no predecessor")
    j = node.path[-1]
    up = parent(shape, node)
    if j == 0:
        return up
    return _rightmost_leaf(shape, child(shape, up, j - 1))


def blue_path(shape: TreeShape, node: NodeId) -> list[NodeId]:
    _check(shape, node)
    out = [node]
    while out[-1].depth > 0:
        out.append(parent(shape, out[-1]))
    out.reverse()
    return out


def right_subpath(shape: TreeShape, node: NodeId) -> list[NodeId]:
    """``node`` followed by repeated last children down to a leaf."""
    out = [node]
    while out[-1].depth < shape.depth:
        out.append(child(shape, out[-1], shape.arity - 1))
    return out


def mirror_info(shape: TreeShape, path: list[NodeId]) -> dict[int, int]:
    """Green budget per left child of a binary blue path.

    Keys are pre-order indices of the left children of ``path`` (left
    siblings of right children on the path).  The value is how many nodes of
    that left child's right subpath may be pebbled: the length of the left
    run on the path that starts at its right sibling, or the full right
    subpath for the last such left child.
    """
    if shape.arity != 2:
        raise TreeError("mirror budgets are defined for binary trees")
    budget: dict[int, int] = {}
    last = None
    for idx in range(1, len(path)):
        node = path[idx]
        if node.path[-1] != 1:
            continue
        run = 1
        while idx + run < len(path) and path[idx + run].path[-1] == 0:
            run += 1
        sib = child(shape, parent(shape, node), 0)
        budget[sib.preorder] = run
        last = (sib, idx + run == len(path))
    if last is not None and last[1]:
        budget[last[0].preorder] = len(right_subpath(shape, last[0]))
    return budget


def grow(shape: TreeShape) -> tuple[TreeShape, Callable[[int], int]]:
    """Double a binary tree: the old tree becomes the new root's left subtree."""
    if shape.arity != 2:
        raise TreeError("only binary trees grow")
    return TreeShape(2, shape.depth + 1), lambda old: old + 1
