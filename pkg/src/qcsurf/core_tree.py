"""Core trees: finite windows onto the rooted trees that scaffold a pants
decomposition of an infinite-type surface.

A core tree has vertices of degree 1, 2 or 3.  Marked vertices carry genus
(one handle each); unmarked vertices have degree 1 (a puncture leaf) or 3.
Infinite trees are described by a :class:`TreeSpec`, a small grammar of
expansion rules, and are only ever materialised through :func:`truncate`.
Un-expanded directions are represented by *continuation* vertices.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

INTERIOR = "interior"
LEAF = "leaf"
CONTINUATION = "continuation"
KINDS = (INTERIOR, LEAF, CONTINUATION)

LEAF_TOKEN = "leaf"


class CoreTreeError(ValueError):
    """Raised for structurally broken or invalid core trees."""


@dataclass(frozen=True)
class Vertex:
    id: int
    marked: bool = False
    kind: str = INTERIOR

    def __post_init__(self):
        if self.kind not in KINDS:
            raise CoreTreeError(f"unknown vertex kind {self.kind!r}")


# ---------------------------------------------------------------------------
# Expansion grammars


@dataclass(frozen=True)
class Rule:
    """Expansion of one continuation state: the vertex it becomes and its children.

    Children are state names or the token ``"leaf"`` (a puncture leaf).
    """

    marked: bool
    children: tuple[str, ...]


@dataclass(frozen=True)
class TreeSpec:
    name: str
    params: Mapping[str, object]
    rules: Mapping[str, Rule]
    root_state: str = "root"

    def __post_init__(self):
        _check_grammar(self.rules, self.root_state)

    def to_json(self) -> dict:
        data = {"preset": self.name, "params": dict(self.params)}
        if self.name == "custom":
            data["params"] = {
                "root": self.root_state,
                "rules": {
                    s: {"marked": r.marked, "children": list(r.children)}
                    for s, r in self.rules.items()
                },
            }
        return data

    def _successors(self, state: str) -> list[str]:
        return [c for c in self.rules[state].children if c != LEAF_TOKEN]

    def type1_multiplicity(self) -> str:
        """``"infinite"`` if the expanded tree has infinitely many type-1 pants.

        A state produces a type-1 pair of pants when it is unmarked and has
        exactly one puncture-leaf neighbour.  Infinitely many occur iff such a
        state is reachable from a state lying on a cycle of the grammar.
        """
        reach: dict[str, set[str]] = {}
        for s in self.rules:
            seen: set[str] = set()
            stack = self._successors(s)
            while stack:
                t = stack.pop()
                if t not in seen:
                    seen.add(t)
                    stack.extend(self._successors(t))
            reach[s] = seen
        cyclic = {s for s in self.rules if s in reach[s]}
        recurring = set(cyclic)
        for s in cyclic:
            recurring |= reach[s]
        for s in recurring:
            rule = self.rules[s]
            if not rule.marked and rule.children.count(LEAF_TOKEN) == 1:
                return "infinite"
        return "finite"


def _check_grammar(rules: Mapping[str, Rule], root_state: str) -> None:
    if root_state not in rules:
        raise CoreTreeError(f"root state {root_state!r} has no rule")
    for state, rule in rules.items():
        is_root = state == root_state
        for child in rule.children:
            if child == LEAF_TOKEN:
                continue
            if child not in rules:
                raise CoreTreeError(f"state {state!r} refers to unknown state {child!r}")
            if child == root_state:
                raise CoreTreeError("the root state may not be referenced as a child")
        degree = len(rule.children) + (0 if is_root else 1)
        if rule.marked:
            if not 1 <= degree <= 3:
                raise CoreTreeError(f"marked state {state!r} would have degree {degree}")
        elif degree != 3:
            raise CoreTreeError(f"unmarked state {state!r} would have degree {degree}")


def _rules(table: Mapping[str, tuple[bool, Iterable[str]]]) -> dict[str, Rule]:
    return {s: Rule(bool(m), tuple(ch)) for s, (m, ch) in table.items()}


def _genus_chain(g: int, tail: str) -> dict[str, tuple[bool, list[str]]]:
    # T*: a path of g marked vertices starting at the root; the root's only
    # unmarked neighbour is the start of the tail.
    table: dict[str, tuple[bool, list[str]]] = {}
    first = ["g2"] if g >= 2 else []
    table["root"] = (True, first + [tail])
    for i in range(2, g + 1):
        table[f"g{i}"] = (True, [f"g{i + 1}"] if i < g else [])
    return table


PRESETS = ("cantor", "flute", "flute_with_genus", "cantor_with_genus", "custom")


def preset(name: str, **params) -> TreeSpec:
    """Return the expansion grammar for a named family of core trees.

    ``cantor``: every continuation becomes an unmarked vertex with two more
    continuations (the root has three).  ``flute``: a spine of unmarked
    vertices, each carrying one puncture leaf; the root carries two.
    The ``*_with_genus`` presets put a path of ``g`` marked vertices at the
    root.  ``custom`` takes ``root`` (a state name) and ``rules``
    (``{state: {"marked": bool, "children": [...]}}``).
    """
    if name == "cantor":
        _no_params(name, params)
        table = {"root": (False, ["b", "b", "b"]), "b": (False, ["b", "b"])}
    elif name == "flute":
        _no_params(name, params)
        table = {"root": (False, [LEAF_TOKEN, LEAF_TOKEN, "s"]), "s": (False, [LEAF_TOKEN, "s"])}
    elif name in ("flute_with_genus", "cantor_with_genus"):
        g = params.get("g", params.get("genus"))
        if set(params) - {"g", "genus"}:
            raise CoreTreeError(f"unexpected parameters for {name}: {sorted(params)}")
        if not isinstance(g, int) or isinstance(g, bool) or g < 1:
            raise CoreTreeError(f"{name} needs an integer genus g >= 1, got {g!r}")
        params = {"g": g}
        if name == "flute_with_genus":
            table = _genus_chain(g, "s")
            table["s"] = (False, [LEAF_TOKEN, "s"])
        else:
            table = _genus_chain(g, "b")
            table["b"] = (False, ["b", "b"])
    elif name == "custom":
        try:
            root = params["root"]
            raw = params["rules"]
            rules = {
                s: Rule(bool(r["marked"]), tuple(r["children"])) for s, r in raw.items()
            }
        except (KeyError, TypeError, AttributeError) as exc:
            raise CoreTreeError("custom preset needs 'root' and 'rules'") from exc
        return TreeSpec("custom", {}, rules, root)
    else:
        raise CoreTreeError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}")
    return TreeSpec(name, dict(params), _rules(table))


def _no_params(name, params):
    if params:
        raise CoreTreeError(f"preset {name!r} takes no parameters")


def spec_from_json(data: Mapping) -> TreeSpec:
    params = dict(data.get("params") or {})
    return preset(data["preset"], **params)


# ---------------------------------------------------------------------------
# Trees


@dataclass(frozen=True)
class SpecRef:
    spec: TreeSpec
    depth: int


@dataclass(frozen=True)
class CoreTree:
    root: int
    vertices: tuple[Vertex, ...]
    edges: frozenset[tuple[int, int]]
    spec: SpecRef | None = field(default=None, compare=False)

    def __post_init__(self):
        ids = [v.id for v in self.vertices]
        if len(set(ids)) != len(ids):
            raise CoreTreeError("duplicate vertex ids")
        idset = set(ids)
        if self.root not in idset:
            raise CoreTreeError("root is not a vertex")
        for u, v in self.edges:
            if u not in idset or v not in idset or u == v:
                raise CoreTreeError(f"bad edge {(u, v)}")
        if len(self.edges) != len(ids) - 1:
            raise CoreTreeError("a tree on n vertices has n - 1 edges")
        if len(self.bfs_order) != len(ids):
            raise CoreTreeError("tree is not connected")

    @classmethod
    def make(cls, root, vertices, edges, spec=None) -> "CoreTree":
        vs = tuple(sorted(vertices, key=lambda v: v.id))
        es = frozenset((min(u, v), max(u, v)) for u, v in edges)
        return cls(root, vs, es, spec)

    @cached_property
    def vertex(self) -> dict[int, Vertex]:
        return {v.id: v for v in self.vertices}

    @cached_property
    def adjacency(self) -> dict[int, tuple[int, ...]]:
        adj: dict[int, list[int]] = {v.id: [] for v in self.vertices}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return {k: tuple(sorted(n)) for k, n in adj.items()}

    def degree(self, vid: int) -> int:
        return len(self.adjacency[vid])

    @cached_property
    def parent(self) -> dict[int, int | None]:
        par: dict[int, int | None] = {self.root: None}
        queue = deque([self.root])
        while queue:
            u = queue.popleft()
            for w in self.adjacency[u]:
                if w not in par:
                    par[w] = u
                    queue.append(w)
        return par

    @cached_property
    def bfs_order(self) -> tuple[int, ...]:
        order = [self.root]
        seen = {self.root}
        i = 0
        while i < len(order):
            for w in self.adjacency[order[i]]:
                if w not in seen:
                    seen.add(w)
                    order.append(w)
            i += 1
        return tuple(order)

    @cached_property
    def depth_of(self) -> dict[int, int]:
        depth = {self.root: 0}
        for vid in self.bfs_order[1:]:
            depth[vid] = depth[self.parent[vid]] + 1
        return depth

    def children(self, vid: int) -> tuple[int, ...]:
        p = self.parent[vid]
        return tuple(w for w in self.adjacency[vid] if w != p)

    @property
    def marked_ids(self) -> tuple[int, ...]:
        return tuple(v.id for v in self.vertices if v.marked)

    @property
    def genus(self) -> int:
        return len(self.marked_ids)

    def ids_of_kind(self, kind: str) -> tuple[int, ...]:
        return tuple(v.id for v in self.vertices if v.kind == kind)

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        data = {
            "root": self.root,
            "vertices": [
                {"id": v.id, "marked": v.marked, "kind": v.kind} for v in self.vertices
            ],
            "edges": [list(e) for e in sorted(self.edges)],
        }
        if self.spec is not None:
            data["spec"] = dict(self.spec.spec.to_json(), depth=self.spec.depth)
        return data

    @classmethod
    def from_json(cls, data: Mapping) -> "CoreTree":
        try:
            vertices = [
                Vertex(int(v["id"]), bool(v.get("marked", False)), v.get("kind", INTERIOR))
                for v in data["vertices"]
            ]
            edges = [(int(u), int(v)) for u, v in data["edges"]]
            root = int(data["root"])
        except (KeyError, TypeError, ValueError) as exc:
            raise CoreTreeError(f"malformed tree JSON: {exc}") from exc
        spec = None
        if data.get("spec"):
            spec = SpecRef(spec_from_json(data["spec"]), int(data["spec"]["depth"]))
        return cls.make(root, vertices, edges, spec)

    def to_dot(self, name: str = "core_tree") -> str:
        lines = [f"graph {name} {{", "  node [shape=circle, label=\"\"];"]
        for v in self.vertices:
            attrs = []
            if v.marked:
                attrs.append("shape=doublecircle")
            if v.kind == CONTINUATION:
                attrs.append("style=dashed")
            elif v.kind == LEAF:
                attrs.append("shape=point")
            if v.id == self.root:
                attrs.append("color=blue")
            attrs.append(f'xlabel="{v.id}"')
            lines.append(f"  v{v.id} [{', '.join(attrs)}];")
        for u, v in sorted(self.edges):
            lines.append(f"  v{u} -- v{v};")
        lines.append("}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Truncation


def truncate(spec: TreeSpec, depth: int) -> CoreTree:
    """Expand ``spec`` for ``depth`` rounds, breadth first.

    Round ``r`` expands every continuation created in round ``r - 1``.  Ids
    are handed out in creation order, so ``truncate(spec, d)`` is a prefix of
    ``truncate(spec, d + 1)``: the only difference is that the frontier
    continuations of the former have been expanded in the latter.
    """
    if depth < 0:
        raise CoreTreeError("depth must be >= 0")
    state = {0: spec.root_state}
    kinds: dict[int, tuple[bool, str]] = {0: (False, CONTINUATION)}
    edges: list[tuple[int, int]] = []
    frontier = [0]
    next_id = 1
    for _ in range(depth):
        new_frontier = []
        for vid in frontier:
            rule = spec.rules[state.pop(vid)]
            kinds[vid] = (rule.marked, INTERIOR)
            for child in rule.children:
                cid = next_id
                next_id += 1
                edges.append((vid, cid))
                if child == LEAF_TOKEN:
                    kinds[cid] = (False, LEAF)
                else:
                    kinds[cid] = (False, CONTINUATION)
                    state[cid] = child
                    new_frontier.append(cid)
        frontier = new_frontier
        if not frontier:
            break
    vertices = [Vertex(vid, m, k) for vid, (m, k) in kinds.items()]
    return CoreTree.make(0, vertices, edges, SpecRef(spec, depth))


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class Violation:
    vertex: int
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def messages(self) -> list[str]:
        return [f"vertex {v.vertex}: {v.message}" for v in self.violations]


def validate(tree: CoreTree) -> ValidationReport:
    """Check the degree and marking rules; every violation becomes a report entry."""
    out: list[Violation] = []
    lone = len(tree.vertices) == 1
    for v in tree.vertices:
        deg = tree.degree(v.id)
        if deg == 0 and not (lone and v.kind == CONTINUATION):
            out.append(Violation(v.id, "isolated vertex"))
            continue
        if deg > 3:
            out.append(Violation(v.id, f"degree {deg} > 3"))
        if v.kind == CONTINUATION:
            if v.marked:
                out.append(Violation(v.id, "continuation vertex is marked"))
            if deg > 1:
                out.append(Violation(v.id, f"continuation of degree {deg}"))
        elif v.kind == LEAF:
            if v.marked:
                out.append(Violation(v.id, "puncture leaf is marked"))
            if deg != 1:
                out.append(Violation(v.id, f"leaf of degree {deg}"))
        elif not v.marked:
            if deg == 2:
                out.append(Violation(v.id, "unmarked degree 2"))
            elif deg == 1:
                out.append(Violation(v.id, "unmarked degree 1 vertex must be a leaf"))
    root = tree.vertex[tree.root]
    if root.kind == INTERIOR and not root.marked and tree.degree(root.id) not in (0, 3):
        out.append(Violation(root.id, f"unmarked root of degree {tree.degree(root.id)}"))
    if root.kind == LEAF and not lone:
        out.append(Violation(root.id, "root is a leaf"))
    return ValidationReport(tuple(out))


def require_valid(tree: CoreTree) -> None:
    report = validate(tree)
    if not report.ok:
        raise CoreTreeError("invalid core tree: " + "; ".join(report.messages()))


# ---------------------------------------------------------------------------
# Ends


@dataclass(frozen=True)
class EndsSummary:
    puncture_leaf_count: int
    continuation_count: int
    per_depth: tuple[tuple[int, int, int], ...]  # (depth, punctures, continuations)

    def to_json(self) -> dict:
        return {
            "puncture_leaf_count": self.puncture_leaf_count,
            "continuation_count": self.continuation_count,
            "per_depth": [list(row) for row in self.per_depth],
        }


def classify_ends(tree: CoreTree, strict: bool = True) -> EndsSummary:
    """Count puncture leaves (isolated planar ends) and continuations per depth.

    With ``strict=False`` the degree rules are not enforced, which lets a
    lone leaf (the once-punctured plane) be summarised.
    """
    if strict:
        require_valid(tree)
    rows: dict[int, list[int]] = {}
    for v in tree.vertices:
        d = tree.depth_of[v.id]
        row = rows.setdefault(d, [0, 0])
        if v.kind == LEAF:
            row[0] += 1
        elif v.kind == CONTINUATION:
            row[1] += 1
    per_depth = tuple((d, p, c) for d, (p, c) in sorted(rows.items()) if p or c)
    return EndsSummary(
        sum(r[1] for r in per_depth), sum(r[2] for r in per_depth), per_depth
    )
