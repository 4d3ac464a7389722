import random

from hypothesis import given, settings
from hypothesis import strategies as st

from qcsurf.core_tree import CONTINUATION, INTERIOR, LEAF, CoreTree, Vertex, preset, truncate, validate
from qcsurf.tree_surgery import find_exterior_trees, normalize

from .oracles import random_core_tree


def _tree(root, verts, edges):
    return CoreTree.make(root, [Vertex(*v) for v in verts], edges)


def test_flute_root_apex_is_kept():
    t = truncate(preset("flute"), 6)
    ext = find_exterior_trees(t)
    assert [e.apex for e in ext] == [t.root]
    out, trace = normalize(t)
    assert out is t and len(trace) == 0


def test_single_exterior_tree_replaced_by_leaf():
    # root -- a, a carries two leaves; root also has two continuations
    t = _tree(
        0,
        [(0, False, INTERIOR), (1, False, INTERIOR), (2, False, CONTINUATION), (3, False, CONTINUATION),
         (4, False, LEAF), (5, False, LEAF)],
        [(0, 1), (0, 2), (0, 3), (1, 4), (1, 5)],
    )
    out, trace = normalize(t)
    assert len(trace) == 1
    step = trace.steps[0]
    assert step.exterior.apex == 1 and step.removed == (1, 4, 5)
    assert step.replaced_root == 0
    assert out.vertex[step.new_leaf].kind == LEAF
    assert out.degree(0) == 3
    assert validate(out).ok


def test_largest_finite_subtree_is_replaced():
    # 0 -- 1 -- 2 (apex with leaves 5, 6); 1 also has leaf 4; 0 has continuations 7, 8.
    t = _tree(
        0,
        [(0, False, INTERIOR), (1, False, INTERIOR), (2, False, INTERIOR), (4, False, LEAF),
         (5, False, LEAF), (6, False, LEAF), (7, False, CONTINUATION), (8, False, CONTINUATION)],
        [(0, 1), (0, 7), (0, 8), (1, 2), (1, 4), (2, 5), (2, 6)],
    )
    out, trace = normalize(t)
    (step,) = trace.steps
    assert step.removed_top == 1
    assert set(step.removed) == {1, 2, 4, 5, 6}
    assert not find_exterior_trees(out)


def test_climb_stops_at_continuation():
    # 1 holds an exterior tree below it and a continuation: only 2's subtree goes
    t = _tree(
        0,
        [(0, False, INTERIOR), (1, False, INTERIOR), (2, False, INTERIOR), (3, False, CONTINUATION),
         (5, False, LEAF), (6, False, LEAF), (7, False, CONTINUATION), (8, False, CONTINUATION)],
        [(0, 1), (0, 7), (0, 8), (1, 2), (1, 3), (2, 5), (2, 6)],
    )
    out, trace = normalize(t)
    (step,) = trace.steps
    assert step.removed_top == 2 and step.replaced_root == 1


def test_trace_json_shape():
    t = random_core_tree(random.Random(3), 400)
    _, trace = normalize(t)
    for row in trace.to_json():
        assert set(row) == {"exterior_tree", "replaced_at", "removed_top", "removed", "new_leaf"}


def check_normalized(t):
    out, _ = normalize(t)
    ext = find_exterior_trees(out)
    assert len(ext) <= 1
    assert all(e.apex == out.root for e in ext)
    survivors = set(out.vertex) & set(t.vertex)
    for v in survivors:
        assert out.degree(v) == t.degree(v)
        assert out.vertex[v] == t.vertex[v]
    again, trace = normalize(out)
    assert again == out and len(trace) == 0
    assert validate(out).ok
    return out


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([30, 300, 3000]))
def test_normalize_properties(seed, size):
    check_normalized(random_core_tree(random.Random(seed), size))


def test_marked_vertices_survive():
    for seed in range(30):
        t = random_core_tree(random.Random(seed), 500, marked_rate=0.3)
        out = check_normalized(t)
        assert out.marked_ids == t.marked_ids
