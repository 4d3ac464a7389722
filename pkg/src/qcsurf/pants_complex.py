"""Pants decompositions built from core trees, and the exhaustion R_1 ⊂ R_2 ⊂ ...

Every unmarked degree-3 vertex becomes a pair of pants; each puncture leaf
next to it turns one of its boundary slots into a puncture.  A marked vertex
of degree ``b`` becomes a one-holed, two-holed or three-holed torus,
decomposed into ``b`` pants glued along ``b`` internal cuffs:

* ``b = 1``: one pants ``(e0, x0a, x0b)`` with ``x0a`` glued to ``x0b``;
* ``b = 2``: ``(e0, x0a, x1a)`` and ``(e1, x0b, x1b)``;
* ``b = 3``: ``(e0, x0a, x2b)``, ``(e1, x0b, x1a)`` and ``(e2, x1b, x2a)``,
  a cycle of three pants.

Tree edges between non-leaf vertices become cuffs.  An edge into a
continuation vertex becomes an *open slot*: a boundary of the truncation
window, not of the surface.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .core_tree import CONTINUATION, LEAF, CoreTree, CoreTreeError, validate

PANTS = "pants"
TORUS_BLOCK = "torus_block"
PUNCTURE = "puncture"


class TruncationTooShallow(ValueError):
    """The requested object reaches past the expanded part of the tree."""


@dataclass(frozen=True)
class PantsPiece:
    id: int
    kind: str
    boundary_slots: tuple[str, ...]
    puncture_count: int
    boundaries: int = 0  # torus blocks: number of external boundaries (the vertex degree)
    internal_pants: tuple[tuple[str, str, str], ...] = ()

    @property
    def pants_count(self) -> int:
        return 1 if self.kind == PANTS else self.boundaries

    @property
    def pants_types(self) -> tuple[int, ...]:
        """Number of punctures on each pair of pants in this piece."""
        if self.kind == PANTS:
            return (self.puncture_count,)
        return tuple(p.count(PUNCTURE) for p in self.internal_pants)

    def to_json(self) -> dict:
        data = {
            "id": self.id,
            "kind": self.kind,
            "boundary_slots": list(self.boundary_slots),
            "puncture_count": self.puncture_count,
        }
        if self.kind == TORUS_BLOCK:
            data["boundaries"] = self.boundaries
            data["internal_pants"] = [list(p) for p in self.internal_pants]
        return data


@dataclass(frozen=True)
class Cuff:
    id: str
    endpoints: tuple[tuple[int, str], tuple[int, str]]
    source_edge: tuple[int, int] | None  # None for torus-internal cuffs

    @property
    def pieces(self) -> tuple[int, int]:
        return (self.endpoints[0][0], self.endpoints[1][0])

    @property
    def internal(self) -> bool:
        return self.source_edge is None

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "endpoints": [list(e) for e in self.endpoints],
            "source_edge": list(self.source_edge) if self.source_edge else None,
        }


@dataclass(frozen=True)
class OpenSlot:
    piece: int
    slot: str
    continuation: int


@dataclass(frozen=True)
class Puncture:
    piece: int
    leaf: int


def _torus_pattern(vid: int, ext: list[str | None]):
    """Internal pants and internal cuffs of a torus block; ``None`` marks a puncture."""
    b = len(ext)
    e = [s if s is not None else PUNCTURE for s in ext]
    x = lambda j, side: f"{vid}.x{j}{side}"  # noqa: E731
    if b == 1:
        pants = [(e[0], x(0, "a"), x(0, "b"))]
    elif b == 2:
        pants = [(e[0], x(0, "a"), x(1, "a")), (e[1], x(0, "b"), x(1, "b"))]
    elif b == 3:
        pants = [
            (e[0], x(0, "a"), x(2, "b")),
            (e[1], x(0, "b"), x(1, "a")),
            (e[2], x(1, "b"), x(2, "a")),
        ]
    else:
        raise CoreTreeError(f"marked vertex {vid} has degree {b}")
    cuffs = [(f"t{vid}.x{j}", x(j, "a"), x(j, "b")) for j in range(b)]
    return tuple(pants), cuffs


@dataclass(frozen=True, eq=False)
class PantsComplex:
    tree: CoreTree
    pieces: dict[int, PantsPiece]
    cuffs: dict[str, Cuff]
    punctures: tuple[Puncture, ...]
    open_slots: tuple[OpenSlot, ...]
    root_piece: int | None
    e1: str | None
    edge_cuff: dict[tuple[int, int], str]

    @property
    def has_genus(self) -> bool:
        return any(p.kind == TORUS_BLOCK for p in self.pieces.values())

    @property
    def case(self) -> int:
        """1 for planar surfaces, 2 when there is genus."""
        return 2 if self.has_genus else 1

    @cached_property
    def piece_cuffs(self) -> dict[int, tuple[str, ...]]:
        out: dict[int, list[str]] = {pid: [] for pid in self.pieces}
        for cid, cuff in self.cuffs.items():
            a, b = cuff.pieces
            out[a].append(cid)
            if b != a:
                out[b].append(cid)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def piece_open_slots(self) -> dict[int, tuple[OpenSlot, ...]]:
        out: dict[int, list[OpenSlot]] = {}
        for s in self.open_slots:
            out.setdefault(s.piece, []).append(s)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def piece_punctures(self) -> dict[int, int]:
        return {pid: p.puncture_count for pid, p in self.pieces.items()}

    def other_piece(self, cuff_id: str, piece: int) -> int:
        a, b = self.cuffs[cuff_id].pieces
        return b if a == piece else a

    @cached_property
    def t_star_pieces(self) -> frozenset[int]:
        """Pieces on the root side of E_1 when there is genus (the R_1 region)."""
        if not self.has_genus or self.e1 is None:
            return frozenset()
        a, b = self.cuffs[self.e1].pieces
        start = self.root_piece
        region = {start}
        stack = [start]
        while stack:
            pid = stack.pop()
            for cid in self.piece_cuffs[pid]:
                if cid == self.e1:
                    continue
                other = self.other_piece(cid, pid)
                if other not in region:
                    region.add(other)
                    stack.append(other)
        return frozenset(region)

    @cached_property
    def t_star_cuffs(self) -> frozenset[str]:
        region = self.t_star_pieces
        return frozenset(
            cid for cid, c in self.cuffs.items() if c.pieces[0] in region and c.pieces[1] in region
        )

    def dual_edges(self, internal: bool = False) -> list[tuple[int, int, str]]:
        return [
            (c.pieces[0], c.pieces[1], cid)
            for cid, c in self.cuffs.items()
            if internal or not c.internal
        ]

    # -- counting ------------------------------------------------------------

    @property
    def pants_count(self) -> int:
        return sum(p.pants_count for p in self.pieces.values())

    def euler_characteristic(self) -> int:
        return -self.pants_count

    def topological_euler_characteristic(self) -> int:
        """2 - 2g - b - p, summed over connected components (one, or none if empty)."""
        if not self.pieces:
            return 0
        g = sum(1 for p in self.pieces.values() if p.kind == TORUS_BLOCK)
        return 2 - 2 * g - len(self.open_slots) - len(self.punctures)

    def slot_balance(self) -> tuple[int, int]:
        """(slots offered by pieces, slots consumed by cuffs/punctures/open ends)."""
        offered = 3 * self.pants_count
        used = 2 * len(self.cuffs) + len(self.punctures) + len(self.open_slots)
        return offered, used

    def is_dual_tree(self) -> bool:
        edges = self.dual_edges()
        if len(edges) != len(self.pieces) - 1 and self.pieces:
            return False
        seen = set()
        if not self.pieces:
            return True
        adj: dict[int, list[int]] = {p: [] for p in self.pieces}
        for a, b, _ in edges:
            adj[a].append(b)
            adj[b].append(a)
        stack = [next(iter(self.pieces))]
        while stack:
            p = stack.pop()
            if p in seen:
                continue
            seen.add(p)
            stack.extend(adj[p])
        return len(seen) == len(self.pieces)

    def pants_of_type(self, t: int) -> list[int]:
        """Pieces containing at least one pair of pants with ``t`` punctures."""
        return [pid for pid, p in self.pieces.items() if t in p.pants_types]

    # -- exports -------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "tree": self.tree.to_json(),
            "pieces": [p.to_json() for p in self.pieces.values()],
            "cuffs": [c.to_json() for c in self.cuffs.values()],
            "punctures": [[p.piece, p.leaf] for p in self.punctures],
            "open_slots": [[s.piece, s.slot, s.continuation] for s in self.open_slots],
            "root_piece": self.root_piece,
            "e1": self.e1,
        }

    def to_dot(self, lengths=None, name: str = "pants_complex") -> str:
        lines = [f"graph {name} {{"]
        for pid, p in self.pieces.items():
            shape = "box" if p.kind == TORUS_BLOCK else "ellipse"
            label = f"T{p.boundaries}" if p.kind == TORUS_BLOCK else f"P{p.puncture_count}"
            lines.append(f'  p{pid} [shape={shape}, label="{label}:{pid}"];')
        for i, punct in enumerate(self.punctures):
            lines.append(f"  x{i} [shape=point];")
            lines.append(f"  p{punct.piece} -- x{i} [style=dotted];")
        for i, s in enumerate(self.open_slots):
            lines.append(f'  o{i} [shape=none, label="..."];')
            lines.append(f"  p{s.piece} -- o{i} [style=dashed];")
        for cid, c in self.cuffs.items():
            if c.internal:
                continue
            attrs = []
            if lengths is not None and cid in lengths:
                attrs.append(f'label="{lengths[cid].label()}"')
            if cid == self.e1:
                attrs.append("penwidth=2")
            extra = f" [{', '.join(attrs)}]" if attrs else ""
            lines.append(f"  p{c.pieces[0]} -- p{c.pieces[1]}{extra};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def build(tree: CoreTree) -> PantsComplex:
    """Replace vertices by pieces, glue along tree edges, turn leaves into punctures."""
    report = validate(tree)
    if not report.ok:
        raise CoreTreeError("invalid core tree: " + "; ".join(report.messages()))

    pieces: dict[int, PantsPiece] = {}
    slot_of: dict[tuple[int, int], str] = {}  # (vertex, neighbour) -> slot
    punctures: list[Puncture] = []
    open_slots: list[OpenSlot] = []
    cuffs: dict[str, Cuff] = {}

    for vid in tree.bfs_order:
        v = tree.vertex[vid]
        if v.kind != "interior":
            continue
        nbrs = tree.adjacency[vid]
        if v.marked:
            ext: list[str | None] = []
            for i, w in enumerate(nbrs):
                if tree.vertex[w].kind == LEAF:
                    ext.append(None)
                    punctures.append(Puncture(vid, w))
                else:
                    slot = f"{vid}.e{i}"
                    slot_of[(vid, w)] = slot
                    ext.append(slot)
            internal, icuffs = _torus_pattern(vid, ext)
            slots = tuple(s for s in ext if s is not None)
            slots += tuple(s for _, a, b in icuffs for s in (a, b))
            pieces[vid] = PantsPiece(
                vid, TORUS_BLOCK, slots, ext.count(None), len(nbrs), internal
            )
            for cid, a, b in icuffs:
                cuffs[cid] = Cuff(cid, ((vid, a), (vid, b)), None)
        else:
            slots = []
            npunct = 0
            for i, w in enumerate(nbrs):
                if tree.vertex[w].kind == LEAF:
                    npunct += 1
                    punctures.append(Puncture(vid, w))
                else:
                    slot = f"{vid}.s{i}"
                    slot_of[(vid, w)] = slot
                    slots.append(slot)
            pieces[vid] = PantsPiece(vid, PANTS, tuple(slots), npunct)

    edge_cuff: dict[tuple[int, int], str] = {}
    for u, w in sorted(tree.edges):
        ku, kw = tree.vertex[u].kind, tree.vertex[w].kind
        if LEAF in (ku, kw):
            continue
        if CONTINUATION in (ku, kw):
            if ku == CONTINUATION and kw == CONTINUATION:
                continue
            inner, cont = (u, w) if kw == CONTINUATION else (w, u)
            open_slots.append(OpenSlot(inner, slot_of[(inner, cont)], cont))
            continue
        cid = f"c{u}-{w}"
        cuffs[cid] = Cuff(cid, ((u, slot_of[(u, w)]), (w, slot_of[(w, u)])), (u, w))
        edge_cuff[(u, w)] = cid

    root = tree.root
    root_piece = root if root in pieces else None
    e1 = None
    if root_piece is not None:
        for w in tree.adjacency[root]:
            wv = tree.vertex[w]
            if wv.kind != "interior":
                continue
            # with genus, E_1 leaves the marked region
            if pieces[root].kind == TORUS_BLOCK and wv.marked:
                continue
            e1 = edge_cuff[(min(root, w), max(root, w))]
            break

    return PantsComplex(
        tree, pieces, cuffs, tuple(punctures), tuple(open_slots), root_piece, e1, edge_cuff
    )


# ---------------------------------------------------------------------------
# Exhaustion


@dataclass(frozen=True)
class ExhaustionSlice:
    n: int
    pieces: tuple[int, ...]
    frontier: tuple[str, ...]
    pants_count: int
    genus: int
    punctures: int

    def euler_characteristic(self) -> int:
        return -self.pants_count

    def topological_euler_characteristic(self) -> int:
        return 2 - 2 * self.genus - len(self.frontier) - self.punctures

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "pieces": list(self.pieces),
            "frontier": list(self.frontier),
            "pants_count": self.pants_count,
            "genus": self.genus,
            "punctures": self.punctures,
            "euler_characteristic": self.euler_characteristic(),
        }


def exhaustion(cx: PantsComplex, n: int) -> ExhaustionSlice:
    """The n-th subsurface R_n of the exhaustion.

    Planar case: R_1 is the two pieces glued along E_1.  With genus: R_1 is
    everything on the root side of E_1 and its boundary is the E_1 cuff.  In
    both cases R_{k+1} adds every piece glued to the frontier of R_k.
    Raises :class:`TruncationTooShallow` if R_n would touch an open slot.
    """
    return exhaustion_sequence(cx, n)[-1]


def exhaustion_sequence(cx: PantsComplex, n: int) -> list[ExhaustionSlice]:
    """Slices R_1, ..., R_n."""
    if n < 1:
        raise ValueError("exhaustion index starts at 1")
    out = []
    try:
        for sl in iter_exhaustion(cx):
            out.append(sl)
            if sl.n == n:
                return out
    except TruncationTooShallow as exc:
        raise TruncationTooShallow(f"cannot form slice {n}: {exc}") from None
    raise AssertionError("unreachable")


def iter_exhaustion(cx: PantsComplex):
    """Yield R_1, R_2, ... until the truncation boundary is reached.

    Raises :class:`TruncationTooShallow` at the first slice that cannot be
    formed, so callers stop consuming before that point.
    """
    if cx.e1 is None:
        raise TruncationTooShallow("no E_1 cuff: the truncation has no cuff at the root")
    if cx.case == 2:
        region = set(cx.t_star_pieces)
        marked_outside = [
            pid for pid, p in cx.pieces.items() if p.kind == TORUS_BLOCK and pid not in region
        ]
        if marked_outside:
            raise CoreTreeError(
                f"genus must lie on the root side of E_1; torus blocks {marked_outside} do not"
            )
        frontier = [cx.e1]
    else:
        a, b = cx.cuffs[cx.e1].pieces
        region = {a, b}
        frontier = [c for p in (a, b) for c in cx.piece_cuffs[p] if c != cx.e1]

    new = sorted(region)
    k = 1
    while True:
        for pid in new:
            if pid in cx.piece_open_slots:
                raise TruncationTooShallow(
                    f"slice {k} reaches the truncation boundary at piece {pid}"
                )
        yield _make_slice(cx, k, region, frontier)
        new = []
        for cid in frontier:
            for p in cx.cuffs[cid].pieces:
                if p not in region:
                    region.add(p)
                    new.append(p)
        if not new:
            raise TruncationTooShallow(
                f"the exhaustion stops at slice {k}: no pieces lie beyond its frontier"
            )
        new.sort()
        frontier = sorted(
            {c for p in new for c in cx.piece_cuffs[p] if cx.other_piece(c, p) not in region}
        )
        k += 1


def _make_slice(cx, k, region, frontier) -> ExhaustionSlice:
    pieces = tuple(sorted(region))
    pants = sum(cx.pieces[p].pants_count for p in pieces)
    genus = sum(1 for p in pieces if cx.pieces[p].kind == TORUS_BLOCK)
    punct = sum(cx.pieces[p].puncture_count for p in pieces)
    return ExhaustionSlice(k, pieces, tuple(sorted(frontier)), pants, genus, punct)
