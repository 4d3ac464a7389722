import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcsurf.core_tree import (
    CONTINUATION,
    INTERIOR,
    LEAF,
    CoreTree,
    CoreTreeError,
    Vertex,
    classify_ends,
    preset,
    spec_from_json,
    truncate,
    validate,
)

from .oracles import random_core_tree


def tree(root, verts, edges):
    return CoreTree.make(root, [Vertex(*v) for v in verts], edges)


def test_minimal_truncation_is_valid():
    t = tree(0, [(0, False, INTERIOR)] + [(i, False, CONTINUATION) for i in (1, 2, 3)], [(0, 1), (0, 2), (0, 3)])
    assert validate(t).ok


def test_unmarked_degree_two_is_reported():
    t = tree(
        0,
        [(0, False, INTERIOR), (1, False, INTERIOR), (2, False, LEAF), (3, False, LEAF), (4, False, LEAF)],
        [(0, 1), (0, 3), (0, 4), (1, 2)],
    )
    rep = validate(t)
    assert not rep.ok
    assert any("unmarked degree 2" in m and m.startswith("vertex 1") for m in rep.messages())


def test_marked_root_of_degree_two_is_valid():
    t = tree(0, [(0, True, INTERIOR), (1, False, CONTINUATION), (2, False, CONTINUATION)], [(0, 1), (0, 2)])
    assert validate(t).ok


def test_every_violation_is_listed():
    t = tree(
        0,
        [(0, False, INTERIOR), (1, True, LEAF), (2, True, CONTINUATION)],
        [(0, 1), (0, 2)],
    )
    msgs = " | ".join(validate(t).messages())
    assert "unmarked root of degree 2" in msgs
    assert "puncture leaf is marked" in msgs
    assert "continuation vertex is marked" in msgs


def test_structural_errors_raise():
    with pytest.raises(CoreTreeError):
        tree(0, [(0, False, INTERIOR), (1, False, LEAF)], [(0, 1), (1, 0), (0, 0)])
    with pytest.raises(CoreTreeError):
        tree(0, [(0, False, INTERIOR), (1, False, LEAF), (2, False, LEAF)], [(0, 1)])


def test_cantor_depth_one():
    t = truncate(preset("cantor"), 1)
    assert len(t.vertices) == 4
    assert t.ids_of_kind(CONTINUATION) == (1, 2, 3)


@pytest.mark.parametrize("depth, n, conts", [(0, 1, 1), (1, 4, 3), (2, 10, 6), (3, 22, 12)])
def test_cantor_counts(depth, n, conts):
    t = truncate(preset("cantor"), depth)
    assert len(t.vertices) == n
    assert len(t.ids_of_kind(CONTINUATION)) == conts
    assert validate(t).ok


def test_flute_spine():
    # d spine vertices; the root carries two punctures, every later one a single one
    t = truncate(preset("flute"), 5)
    ends = classify_ends(t)
    assert ends.puncture_leaf_count == 6
    assert ends.continuation_count == 1
    assert len(t.ids_of_kind(INTERIOR)) == 5


def test_flute_with_genus():
    t = truncate(preset("flute_with_genus", g=2), 6)
    assert t.genus == 2
    marked = t.marked_ids
    assert t.root in marked
    assert all(t.depth_of[v] <= 1 for v in marked)
    unmarked_root_nbrs = [w for w in t.adjacency[t.root] if not t.vertex[w].marked]
    assert len(unmarked_root_nbrs) == 1
    assert validate(t).ok


@pytest.mark.parametrize("name, params", [("bogus", {}), ("flute_with_genus", {"g": 0}), ("cantor", {"g": 1}), ("cantor_with_genus", {})])
def test_preset_errors(name, params):
    with pytest.raises(CoreTreeError):
        preset(name, **params)


def test_custom_spec_round_trip():
    rules = {
        "root": {"marked": False, "children": ["leaf", "a", "a"]},
        "a": {"marked": False, "children": ["a", "leaf"]},
    }
    spec = preset("custom", root="root", rules=rules)
    again = spec_from_json(spec.to_json())
    assert truncate(again, 4) == truncate(spec, 4)


def test_custom_spec_degree_rules():
    with pytest.raises(CoreTreeError):
        preset("custom", root="root", rules={"root": {"marked": False, "children": ["a"]}, "a": {"marked": False, "children": ["a", "a"]}})


@pytest.mark.parametrize("name, params", [("cantor", {}), ("flute", {}), ("flute_with_genus", {"g": 1}), ("cantor_with_genus", {"g": 3})])
def test_truncation_prefix(name, params):
    spec = preset(name, **params)
    for d in range(6):
        small, big = truncate(spec, d), truncate(spec, d + 1)
        big_v = big.vertex
        for v in small.vertices:
            if v.kind == CONTINUATION:
                assert big_v[v.id].marked == spec.rules[_state_of(spec, small, v.id)].marked
            else:
                assert big_v[v.id] == v
        assert small.edges <= big.edges


def _state_of(spec, t, vid):
    # walk the grammar along the path from the root
    path = []
    while vid is not None:
        path.append(vid)
        vid = t.parent[vid]
    state = spec.root_state
    for parent, child in zip(reversed(path), list(reversed(path))[1:]):
        idx = t.children(parent).index(child)
        state = spec.rules[state].children[idx]
    return state


def test_ends_invariant_on_presets():
    for name, params in [("cantor", {}), ("flute", {}), ("flute_with_genus", {"g": 2}), ("cantor_with_genus", {"g": 1})]:
        t = truncate(preset(name, **params), 7)
        ends = classify_ends(t)
        deg1 = [
            v for v in t.vertices
            if v.id != t.root and t.degree(v.id) == 1 and not v.marked
        ]
        assert ends.puncture_leaf_count + ends.continuation_count == len(deg1)
        assert sum(p for _, p, _ in ends.per_depth) == ends.puncture_leaf_count


def test_lone_leaf_needs_non_strict():
    t = tree(0, [(0, False, LEAF)], [])
    assert not validate(t).ok
    with pytest.raises(CoreTreeError):
        classify_ends(t)
    assert classify_ends(t, strict=False).puncture_leaf_count == 1


def test_json_round_trip_keeps_spec():
    t = truncate(preset("cantor_with_genus", g=2), 4)
    back = CoreTree.from_json(t.to_json())
    assert back == t
    assert back.spec == t.spec


def test_dot_export():
    dot = truncate(preset("flute_with_genus", g=1), 2).to_dot()
    assert dot.startswith("graph core_tree {")
    assert "doublecircle" in dot and "dashed" in dot and "point" in dot


def test_type1_multiplicity():
    assert preset("flute").type1_multiplicity() == "infinite"
    assert preset("cantor").type1_multiplicity() == "finite"
    assert preset("flute_with_genus", g=2).type1_multiplicity() == "infinite"


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_trees_are_valid(seed):
    t = random_core_tree(random.Random(seed), max_vertices=300)
    assert validate(t).ok, validate(t).messages()
