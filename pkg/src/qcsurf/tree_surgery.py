"""Exterior trees and their removal.

An exterior tree is an unmarked degree-3 vertex (the apex) together with two
puncture leaves hanging off it; it becomes a pair of pants with two
punctures.  :func:`normalize` trades each exterior tree away from the root
for a single leaf, replacing the largest finite subtree around it that holds
no other exterior tree, which keeps the end space unchanged whenever the
surface has infinitely many isolated ends.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core_tree import CONTINUATION, LEAF, CoreTree, Vertex, require_valid


@dataclass(frozen=True)
class ExteriorTree:
    apex: int
    leaves: tuple[int, int]


@dataclass(frozen=True)
class SurgeryStep:
    exterior: ExteriorTree
    replaced_root: int  # p_i(l): the path vertex whose hanging subtree was replaced
    removed_top: int  # top vertex of the replaced subtree
    removed: tuple[int, ...]
    new_leaf: int


@dataclass(frozen=True)
class SurgeryTrace:
    steps: tuple[SurgeryStep, ...] = ()

    def __len__(self):
        return len(self.steps)

    def to_json(self) -> list[dict]:
        return [
            {
                "exterior_tree": {"apex": s.exterior.apex, "leaves": list(s.exterior.leaves)},
                "replaced_at": s.replaced_root,
                "removed_top": s.removed_top,
                "removed": list(s.removed),
                "new_leaf": s.new_leaf,
            }
            for s in self.steps
        ]


def _apex_leaves(vid, vertex, adjacency):
    v = vertex[vid]
    if v.marked or v.kind != "interior":
        return None
    nbrs = adjacency[vid]
    if len(nbrs) != 3:
        return None
    leaves = [w for w in nbrs if vertex[w].kind == LEAF]
    if len(leaves) != 2:
        return None
    return tuple(leaves)


def find_exterior_trees(tree: CoreTree) -> list[ExteriorTree]:
    """All exterior trees, in breadth-first order of their apex."""
    require_valid(tree)
    found = []
    for vid in tree.bfs_order:
        leaves = _apex_leaves(vid, tree.vertex, tree.adjacency)
        if leaves is not None:
            found.append(ExteriorTree(vid, leaves))
    return found


def normalize(tree: CoreTree) -> tuple[CoreTree, SurgeryTrace]:
    """Remove every exterior tree whose apex is not the root.

    For an apex ``p(0)`` with path ``p(0), ..., p(m)`` to the root, ``T(p(j))``
    is the component of the tree minus ``p(j)`` containing ``p(j-1)``.  The
    largest such component that is finite and contains no other exterior
    tree is replaced by one leaf.  Components holding a continuation or a
    marked vertex never count as finite.  Trees are processed in BFS order of
    the current tree until only a root apex can remain.
    """
    require_valid(tree)
    vertex: dict[int, Vertex] = dict(tree.vertex)
    adjacency = {k: list(v) for k, v in tree.adjacency.items()}
    parent = dict(tree.parent)
    order = list(tree.bfs_order)

    children = {vid: [w for w in adjacency[vid] if w != parent[vid]] for vid in order}
    # bottom-up: does the subtree hold a continuation/marked vertex, and how many apexes
    blocked: dict[int, bool] = {}
    n_ext: dict[int, int] = {}
    for vid in reversed(order):
        v = vertex[vid]
        blocked[vid] = v.marked or v.kind == CONTINUATION or any(blocked[c] for c in children[vid])
        n_ext[vid] = (1 if _apex_leaves(vid, vertex, adjacency) else 0) + sum(
            n_ext[c] for c in children[vid]
        )

    next_id = max(vertex) + 1
    steps: list[SurgeryStep] = []
    alive = set(vertex)
    for apex in order:
        if apex not in alive or apex == tree.root:
            continue
        leaves = _apex_leaves(apex, vertex, adjacency)
        if leaves is None:
            continue
        # climb while the hanging subtree stays finite with a single exterior tree
        top = apex
        while parent[top] != tree.root:
            up = parent[top]
            if blocked[up] or n_ext[up] != 1:
                break
            top = up
        attach = parent[top]
        removed = _subtree(top, children)
        for vid in removed:
            alive.discard(vid)
        new_leaf = next_id
        next_id += 1
        vertex[new_leaf] = Vertex(new_leaf, False, LEAF)
        alive.add(new_leaf)
        adjacency[attach] = [new_leaf if w == top else w for w in adjacency[attach]]
        adjacency[new_leaf] = [attach]
        children[attach] = [new_leaf if w == top else w for w in children[attach]]
        children[new_leaf] = []
        parent[new_leaf] = attach
        blocked[new_leaf] = False
        n_ext[new_leaf] = 0
        a = attach
        while a is not None:
            n_ext[a] -= 1
            a = parent[a]
        if _apex_leaves(attach, vertex, adjacency) is not None:
            # by maximality of the replaced subtree this only happens at the root
            a = attach
            while a is not None:
                n_ext[a] += 1
                a = parent[a]
        steps.append(
            SurgeryStep(ExteriorTree(apex, leaves), attach, top, tuple(sorted(removed)), new_leaf)
        )

    if not steps:
        return tree, SurgeryTrace()
    new_vertices = [vertex[v] for v in alive]
    new_edges = set()
    for v in alive:
        for w in adjacency[v]:
            if w in alive:
                new_edges.add((min(v, w), max(v, w)))
    out = CoreTree.make(tree.root, new_vertices, new_edges, None)
    return out, SurgeryTrace(tuple(steps))


def _subtree(top, children):
    out = [top]
    i = 0
    while i < len(out):
        out.extend(children[out[i]])
        i += 1
    return out
