"""Cuff lengths: exact odd factorials, reals, and the factorial labelling.

Lengths of the form ``(2k+1)!`` are kept symbolic as their index ``k``;
comparisons between two of them are exact.  Anything that has to touch a
float goes through ``log_value``.
"""

from __future__ import annotations

import math
import os
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from .pants_complex import PANTS, PantsComplex, TruncationTooShallow

DEFAULT_TOLERANCE = 1e-9
_MAX_EXP = 700.0


def default_tolerance() -> float:
    raw = os.environ.get("QCSURF_TOL")
    if raw:
        tol = float(raw)
        if not tol > 0:
            raise ValueError("QCSURF_TOL must be positive")
        return tol
    return DEFAULT_TOLERANCE


@lru_cache(maxsize=4096)
def odd_factorial(k: int) -> int:
    """(2k+1)! as an exact integer."""
    return math.factorial(2 * k + 1)


def log_odd_factorial(k: int) -> float:
    return math.lgamma(2 * k + 2)


FACTORIAL = "factorial"
REAL = "real"
LOG = "log"


@dataclass(frozen=True)
class Length:
    """A positive hyperbolic length.

    ``kind`` is ``"factorial"`` (``value`` is the index k, meaning (2k+1)!),
    ``"real"`` (``value`` is a float) or ``"log"`` (``value`` is the natural
    log of a length too large for a float).
    """

    kind: str
    value: float | int

    def __post_init__(self):
        if self.kind == FACTORIAL:
            if not isinstance(self.value, int) or self.value < 0:
                raise ValueError(f"factorial index must be a non-negative int, got {self.value!r}")
        elif self.kind == REAL:
            if not (self.value > 0 and math.isfinite(self.value)):
                raise ValueError(f"real length must be positive and finite, got {self.value!r}")
        elif self.kind == LOG:
            if not math.isfinite(self.value):
                raise ValueError("log length must be finite")
        else:
            raise ValueError(f"unknown length kind {self.kind!r}")

    @classmethod
    def factorial(cls, k: int) -> "Length":
        return cls(FACTORIAL, int(k))

    @classmethod
    def real(cls, x: float) -> "Length":
        return cls(REAL, float(x))

    @classmethod
    def from_log(cls, y: float) -> "Length":
        if y < _MAX_EXP:
            return cls(REAL, math.exp(y))
        return cls(LOG, float(y))

    @property
    def is_factorial(self) -> bool:
        return self.kind == FACTORIAL

    @property
    def log_value(self) -> float:
        if self.kind == FACTORIAL:
            return log_odd_factorial(self.value)
        if self.kind == REAL:
            return math.log(self.value)
        return self.value

    @property
    def exact(self) -> Fraction | None:
        """Exact rational value, when there is one."""
        if self.kind == FACTORIAL:
            return Fraction(odd_factorial(self.value))
        if self.kind == REAL:
            return Fraction(self.value)
        return None

    def __float__(self) -> float:
        if self.kind == FACTORIAL:
            try:
                return float(odd_factorial(self.value))
            except OverflowError:
                return math.inf
        if self.kind == REAL:
            return self.value
        return math.inf

    def label(self) -> str:
        if self.kind == FACTORIAL:
            return f"{2 * self.value + 1}!"
        if self.kind == REAL:
            return format(self.value, ".6g")
        return f"exp({self.value:.6g})"

    def to_json(self) -> dict:
        if self.kind == FACTORIAL:
            return {"factorial_index": self.value}
        if self.kind == REAL:
            return {"real": self.value}
        return {"log_real": self.value}

    @classmethod
    def from_json(cls, data: Mapping) -> "Length":
        if "factorial_index" in data:
            return cls.factorial(int(data["factorial_index"]))
        if "real" in data:
            return cls.real(float(data["real"]))
        if "log_real" in data:
            return cls(LOG, float(data["log_real"]))
        raise ValueError(f"not a length: {data!r}")


def compare(a: Length, b: Length, tol: float | None = None) -> int:
    """-1, 0 or 1.  Exact for two factorials; otherwise in log space within ``tol``."""
    if a.is_factorial and b.is_factorial:
        return (a.value > b.value) - (a.value < b.value)
    if tol is None:
        tol = default_tolerance()
    diff = a.log_value - b.log_value
    if abs(diff) <= tol:
        return 0
    return 1 if diff > 0 else -1


def factorial_gap(m: int) -> tuple[Length, int]:
    """(2m+3)! - (2m+1)! exactly, and as a length.

    The difference factors as (2m+1)! * ((2m+2)(2m+3) - 1).
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    factor = (2 * m + 2) * (2 * m + 3) - 1
    gap = odd_factorial(m) * factor
    return Length.from_log(log_odd_factorial(m) + math.log(factor)), gap


# ---------------------------------------------------------------------------
# Labelled complexes


class LabelingError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MetricComplex:
    complex: PantsComplex
    lengths: dict[str, Length]
    twists: dict[str, float] = field(default_factory=dict)
    t_star: frozenset[str] = frozenset()

    def label_index(self, cuff_id: str) -> int | None:
        ln = self.lengths[cuff_id]
        return ln.value if ln.is_factorial else None

    def twist(self, cuff_id: str) -> float:
        return self.twists.get(cuff_id, 0.0)

    def pants_cuffs(self, piece_id: int) -> list[Length | None]:
        """Boundary data of a plain pants piece: a length per slot, ``None`` per puncture.

        Open slots (truncation boundary) raise :class:`TruncationTooShallow`.
        """
        cx = self.complex
        piece = cx.pieces[piece_id]
        if piece.kind != PANTS:
            raise ValueError(f"piece {piece_id} is a torus block")
        if piece_id in cx.piece_open_slots:
            raise TruncationTooShallow(f"piece {piece_id} touches the truncation boundary")
        out: list[Length | None] = [self.lengths[c] for c in cx.piece_cuffs[piece_id]]
        out += [None] * piece.puncture_count
        return out

    def to_json(self) -> dict:
        return {
            "complex": self.complex.to_json(),
            "lengths": {c: ln.to_json() for c, ln in self.lengths.items()},
            "twists": {c: t for c, t in self.twists.items()},
            "t_star": sorted(self.t_star),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "MetricComplex":
        from .core_tree import CoreTree
        from .pants_complex import build

        tree = CoreTree.from_json(data["complex"]["tree"])
        cx = build(tree)
        stored = {c["id"] for c in data["complex"]["cuffs"]}
        if stored != set(cx.cuffs):
            raise ValueError("stored cuffs do not match the complex rebuilt from its tree")
        lengths = {c: Length.from_json(v) for c, v in data["lengths"].items()}
        if set(lengths) != set(cx.cuffs):
            raise ValueError("every cuff needs exactly one length")
        twists = {c: float(t) for c, t in data.get("twists", {}).items()}
        return cls(cx, lengths, twists, frozenset(data.get("t_star", [])))


def label_lengths(
    cx: PantsComplex,
    t_star_lengths: Mapping[str, float] | float | None = None,
    twists: Mapping[str, float] | None = None,
) -> MetricComplex:
    """Give E_1 the length 1! and each further ring of cuffs the next odd factorial.

    Cuffs are adjacent when they bound a common piece; a cuff at distance k
    from E_1 gets (2k+1)!.  With genus, cuffs on the root side of E_1
    (between torus blocks and inside them) take the caller's positive reals
    and are never crossed by the labelling.  Twists default to 0.
    """
    if cx.e1 is None:
        raise LabelingError("complex has no E_1 cuff")
    t_star = cx.t_star_cuffs
    t_pieces = cx.t_star_pieces
    lengths: dict[str, Length] = {}
    for cid in sorted(t_star):
        if t_star_lengths is None:
            raise LabelingError(f"missing length for T* cuff {cid}")
        if isinstance(t_star_lengths, Mapping):
            if cid not in t_star_lengths:
                raise LabelingError(f"missing length for T* cuff {cid}")
            x = t_star_lengths[cid]
        else:
            x = t_star_lengths
        if not x > 0:
            raise LabelingError(f"T* cuff {cid} needs a positive length, got {x!r}")
        lengths[cid] = Length.real(x)

    index = {cx.e1: 0}
    queue = deque([cx.e1])
    while queue:
        cid = queue.popleft()
        k = index[cid]
        for pid in cx.cuffs[cid].pieces:
            if pid in t_pieces:
                continue
            for nxt in cx.piece_cuffs[pid]:
                if nxt not in index and nxt not in t_star:
                    index[nxt] = k + 1
                    queue.append(nxt)
    for cid, k in index.items():
        lengths[cid] = Length.factorial(k)
    missing = set(cx.cuffs) - set(lengths)
    if missing:
        raise LabelingError(f"cuffs not reached by the labelling: {sorted(missing)}")
    tw = {c: float(t) for c, t in (twists or {}).items()}
    unknown = set(tw) - set(cx.cuffs)
    if unknown:
        raise LabelingError(f"twists given for unknown cuffs {sorted(unknown)}")
    ordered = {c: lengths[c] for c in cx.cuffs}
    return MetricComplex(cx, ordered, tw, frozenset(t_star))
