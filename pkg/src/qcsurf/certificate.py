"""Non-wandering certificates.

Given a labelled complex and a quasiconformal constant K, check that no
K-quasiconformal self-map can push a frontier cuff of R_n across a pair of
pants lying outside R_n.  Such a crossing would contain a returning arc
whose length is bounded below (by :func:`~qcsurf.hyp_geom.returning_arc_bound`
and by the factorial gap), while Wolpert's lemma caps the image length at
K times the cuff length.  Each row of the ledger checks both bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from .core_tree import LEAF_TOKEN
from .hyp_geom import PantsGeometry, pentagon_scan, pentagon_threshold, returning_arc_bound
from .metric import MetricComplex, log_odd_factorial, odd_factorial
from .pants_complex import PANTS, TruncationTooShallow, iter_exhaustion

INFINITE_TYPE1 = "infinite_type1"
FINITE_TYPE1 = "finite_type1"
POSITIVE_GENUS = "positive_genus"

VALID = "valid"
REFUSED = "refused"
FAILED = "failed"

CONTRADICTION = "contradiction established"
NO_CONTRADICTION = "no contradiction"

NOT_VERIFIED = (
    "Not machine-verified: the step from these length bounds to countability. "
    "Once every K-quasiconformal map is known to send each R_n (n >= K) to a "
    "surface freely homotopic to itself, a mapping class is pinned down on R_n "
    "up to its action on the finite-type piece R_n, and the remaining freedom "
    "along the frontier cuffs (Dehn twists) has to be excluded by a separate "
    "group-theoretic argument.  That argument, and the injectivity of the "
    "induced maps into the finite-type mapping class groups, are outside what "
    "this ledger checks."
)

CONDITIONAL = (
    "Each row is conditional on the existence of a crossing: if the image of a "
    "frontier cuff left R_n it would contain an arc entering and leaving a pair "
    "of pants beyond the frontier through the same boundary.  The row bounds "
    "the length of such an arc; it does not construct the arc."
)

N_AS_INDEX = (
    "N is an index, not a length: in the infinite case it is the least index "
    "whose frontier cuff length exceeds the pentagon threshold a0."
)


class CertificateError(ValueError):
    pass


@lru_cache(maxsize=1)
def default_pentagon_threshold() -> float:
    """Smallest grid value of a at which the pentagon inequality holds on the whole sweep."""
    a0 = pentagon_threshold(pentagon_scan(), tol=1e-9)
    if a0 is None:
        raise CertificateError("the pentagon inequality fails on the whole default grid")
    return a0


def _spec_type1_total(spec) -> int | None:
    """Number of type-1 pants in the full expansion, or ``None`` if infinite."""
    if spec.type1_multiplicity() == "infinite":
        return None

    memo: dict[str, int] = {}

    def count(state, stack=()):
        if state in memo:
            return memo[state]
        if state in stack:
            # a cycle that reaches no type-1 state contributes nothing
            return 0
        rule = spec.rules[state]
        own = int(not rule.marked and rule.children.count(LEAF_TOKEN) == 1)
        total = own + sum(
            count(c, stack + (state,)) for c in rule.children if c != LEAF_TOKEN
        )
        memo[state] = total
        return total

    return count(spec.root_state)


def _frontier_index(mc: MetricComplex, n: int) -> int:
    # with genus, R_1 is bounded by E_1 alone, so its frontier carries 1! = (2*0+1)!
    return n - 1 if mc.complex.case == 2 else n


@dataclass(frozen=True)
class NChoice:
    N: int
    case_tag: str
    rule: str
    type1: str
    a0: float | None = None
    type1_pants: int | None = None
    notes: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "case_tag": self.case_tag,
            "rule": self.rule,
            "type1": self.type1,
            "a0": self.a0,
            "type1_pants": self.type1_pants,
            "notes": list(self.notes),
        }


def compute_N(mc: MetricComplex, a0: float | None = None, type1: str | None = None) -> NChoice:
    """Threshold index N past which the certificate applies.

    Finitely many type-1 pants: N = (least n with all of them in R_n) + 1.
    Infinitely many: N = least n whose frontier cuff length exceeds ``a0``
    (default: the threshold found by the pentagon sweep).  ``type1`` forces
    ``"finite"`` or ``"infinite"`` when the tree has no generating spec.
    """
    cx = mc.complex
    notes: list[str] = []
    spec = cx.tree.spec.spec if cx.tree.spec is not None else None
    total = None
    if type1 is None:
        if spec is not None:
            type1 = spec.type1_multiplicity()
            if type1 == "finite":
                total = _spec_type1_total(spec)
        else:
            type1 = "finite"
            if cx.open_slots:
                notes.append(
                    "tree has no generating spec; type-1 pants assumed finite "
                    "(only those in the truncation are counted)"
                )
    elif type1 not in ("finite", "infinite"):
        raise CertificateError(f"type1 must be 'finite' or 'infinite', got {type1!r}")

    genus = cx.has_genus
    if type1 == "infinite":
        if a0 is None:
            a0 = default_pentagon_threshold()
        if not a0 > 0:
            raise CertificateError("a0 must be positive")
        n = 1
        while odd_factorial(_frontier_index(mc, n)) <= a0:
            n += 1
        notes.append(N_AS_INDEX)
        tag = POSITIVE_GENUS if genus else INFINITE_TYPE1
        return NChoice(n, tag, "pentagon", type1, a0, None, tuple(notes))

    type1_pieces = {
        pid for pid, p in cx.pieces.items() if p.kind == PANTS and p.puncture_count == 1
    }
    if total is not None and len(type1_pieces) < total:
        raise TruncationTooShallow(
            f"only {len(type1_pieces)} of the {total} type-1 pants are expanded"
        )
    tag = POSITIVE_GENUS if genus else FINITE_TYPE1
    if not type1_pieces:
        notes.append("no type-1 pants (r = 0): N = 1 is the vacuous minimum")
        return NChoice(1, tag, "finite_type1", type1, None, 0, tuple(notes))
    for sl in iter_exhaustion(cx):
        if type1_pieces <= set(sl.pieces):
            return NChoice(sl.n + 1, tag, "finite_type1", type1, None, len(type1_pieces), tuple(notes))
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# Ledger


@dataclass(frozen=True)
class LedgerRow:
    n: int
    k: int  # label index of the frontier of R_n
    m: int  # crossing level
    lhs: Fraction  # K (2k+1)!
    rhs: int  # (2m+1)! ((2m+2)(2m+3) - 1)
    exact_ok: bool
    simplified_ok: bool  # K < (2m+2)(2m+3) - 1
    monotone_ok: bool  # the exact check also holds at m+1 and m+2
    log_lhs: float
    log_bound: float  # least returning-arc length over the crossing pants, as a log
    numeric_ok: bool
    crossing_pants: int

    @property
    def verdict(self) -> str:
        ok = self.exact_ok and self.numeric_ok and self.simplified_ok and self.monotone_ok
        return CONTRADICTION if ok else NO_CONTRADICTION

    @property
    def log_margin(self) -> float:
        return self.log_bound - self.log_lhs

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "m": self.m,
            "lhs": str(self.lhs),
            "rhs": self.rhs,
            "exact_ok": self.exact_ok,
            "simplified_ok": self.simplified_ok,
            "monotone_ok": self.monotone_ok,
            "log_lhs": self.log_lhs,
            "log_bound": self.log_bound,
            "numeric_ok": self.numeric_ok,
            "crossing_pants": self.crossing_pants,
            "verdict": self.verdict,
        }

    @classmethod
    def from_json(cls, d: Mapping) -> "LedgerRow":
        return cls(
            int(d["n"]),
            int(d["k"]),
            int(d["m"]),
            Fraction(d["lhs"]),
            int(d["rhs"]),
            bool(d["exact_ok"]),
            bool(d["simplified_ok"]),
            bool(d["monotone_ok"]),
            float(d["log_lhs"]),
            float(d["log_bound"]),
            bool(d["numeric_ok"]),
            int(d["crossing_pants"]),
        )


def _gap_holds(K: Fraction, k: int, m: int) -> bool:
    return K * odd_factorial(k) < odd_factorial(m) * ((2 * m + 2) * (2 * m + 3) - 1)


@dataclass(frozen=True)
class Certificate:
    N: int
    K: float
    horizon: int
    case_tag: str
    status: str
    ledger: tuple[LedgerRow, ...] = ()
    reason: str | None = None
    choice: NChoice | None = field(default=None, compare=False)
    notes: tuple[str, ...] = ()
    summary: str = NOT_VERIFIED

    @property
    def valid(self) -> bool:
        return self.status == VALID

    @property
    def exit_code(self) -> int:
        return {VALID: 0, REFUSED: 2, FAILED: 3}[self.status]

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "K": self.K,
            "horizon": self.horizon,
            "case_tag": self.case_tag,
            "status": self.status,
            "reason": self.reason,
            "ledger": [r.to_json() for r in self.ledger],
            "N_choice": self.choice.to_json() if self.choice else None,
            "notes": list(self.notes),
            "summary": self.summary,
        }

    @classmethod
    def from_json(cls, d: Mapping) -> "Certificate":
        ch = d.get("N_choice")
        choice = None
        if ch:
            choice = NChoice(
                int(ch["N"]),
                ch["case_tag"],
                ch["rule"],
                ch["type1"],
                None if ch.get("a0") is None else float(ch["a0"]),
                ch.get("type1_pants"),
                tuple(ch.get("notes", ())),
            )
        return cls(
            int(d["N"]),
            float(d["K"]),
            int(d["horizon"]),
            d["case_tag"],
            d["status"],
            tuple(LedgerRow.from_json(r) for r in d["ledger"]),
            d.get("reason"),
            choice,
            tuple(d.get("notes", ())),
            d.get("summary", NOT_VERIFIED),
        )


def verify_non_wandering(
    mc: MetricComplex,
    K: float,
    horizon: int,
    a0: float | None = None,
    type1: str | None = None,
) -> Certificate:
    """Build the ledger for rows n = max(ceil K, N), ..., horizon.

    Row n takes the frontier of R_n (label index k) and the pants just
    beyond it.  It checks exactly that K (2k+1)! is below the factorial gap
    at m = k (and at m + 1, m + 2), and numerically that the shortest
    returning arc in each of those pants is longer than K (2k+1)!.  The
    truncation must contain R_{horizon + 1}.  A certificate with K < N is
    refused, not failed.
    """
    if not K >= 1 or not math.isfinite(K):
        raise CertificateError(f"K must be a finite real >= 1, got {K!r}")
    choice = compute_N(mc, a0=a0, type1=type1)
    notes = (CONDITIONAL,) + choice.notes
    if K < choice.N:
        return Certificate(
            choice.N,
            float(K),
            horizon,
            choice.case_tag,
            REFUSED,
            (),
            f"K = {K} is below N = {choice.N}; the non-wandering statement does not apply",
            choice,
            notes,
        )
    start = max(math.ceil(K), choice.N)
    if horizon < start:
        raise CertificateError(f"horizon {horizon} is below the first row {start}")

    Kq = Fraction(str(K))
    log_k = math.log(K)
    cx = mc.complex
    cache: dict[tuple, float] = {}
    rows = []
    prev = None
    slices = iter_exhaustion(cx)
    try:
        for sl in slices:
            if prev is not None and prev.n >= start:
                rows.append(_row(mc, prev, sl, Kq, log_k, cache))
            if sl.n > horizon:
                break
            prev = sl
    except TruncationTooShallow as exc:
        raise TruncationTooShallow(
            f"horizon {horizon} needs R_{horizon + 1} inside the truncation: {exc}"
        ) from None
    ok = all(r.verdict == CONTRADICTION for r in rows)
    return Certificate(
        choice.N,
        float(K),
        horizon,
        choice.case_tag,
        VALID if ok else FAILED,
        tuple(rows),
        None if ok else "at least one ledger row failed",
        choice,
        notes,
    )


def _row(mc, sl, nxt, Kq, log_k, cache) -> LedgerRow:
    cx = mc.complex
    k = _frontier_index(mc, sl.n)
    for cid in sl.frontier:
        if mc.label_index(cid) != k:
            raise CertificateError(f"frontier cuff {cid} of R_{sl.n} is not labelled ({2 * k + 1})!")
    m = k
    exact_ok = _gap_holds(Kq, k, m)
    simplified_ok = Kq < (2 * m + 2) * (2 * m + 3) - 1
    monotone_ok = _gap_holds(Kq, k, m + 1) and _gap_holds(Kq, k, m + 2)

    inside = set(sl.pieces)
    frontier = set(sl.frontier)
    best = math.inf
    crossing = 0
    for pid in nxt.pieces:
        if pid in inside:
            continue
        for i, cid in enumerate(cx.piece_cuffs[pid]):
            if cid not in frontier:
                continue
            crossing += 1
            cuffs = mc.pants_cuffs(pid)
            key = (i, tuple(cuffs))
            if key not in cache:
                cache[key] = returning_arc_bound(PantsGeometry(*cuffs), i).log_value
            best = min(best, cache[key])
    if crossing == 0:
        raise CertificateError(f"no pants beyond the frontier of R_{sl.n}")
    log_lhs = log_k + log_odd_factorial(k)
    return LedgerRow(
        sl.n,
        k,
        m,
        Kq * odd_factorial(k),
        odd_factorial(m) * ((2 * m + 2) * (2 * m + 3) - 1),
        exact_ok,
        simplified_ok,
        monotone_ok,
        log_lhs,
        best,
        best > log_lhs,
        crossing,
    )


# ---------------------------------------------------------------------------
# Reports


@dataclass(frozen=True)
class Report:
    data: dict
    text: str


def report(cert: Certificate) -> Report:
    """JSON-ready document plus a plain-text rendering."""
    data = cert.to_json()
    lines = [
        f"certificate: {cert.status}",
        f"K = {cert.K:g}   N = {cert.N}   horizon = {cert.horizon}   case = {cert.case_tag}",
    ]
    if cert.reason:
        lines.append(f"reason: {cert.reason}")
    if cert.ledger:
        lines.append("")
        lines.append(f"{'n':>4} {'k':>4} {'m':>4} {'log K(2k+1)!':>16} {'log bound':>16}  verdict")
        for r in cert.ledger:
            lines.append(
                f"{r.n:>4} {r.k:>4} {r.m:>4} {r.log_lhs:>16.6f} {r.log_bound:>16.6f}  {r.verdict}"
            )
    for note in cert.notes:
        lines.append("")
        lines.append(note)
    lines.append("")
    lines.append(cert.summary)
    return Report(data, "\n".join(lines) + "\n")


__all__ = [
    "CONTRADICTION",
    "Certificate",
    "CertificateError",
    "FINITE_TYPE1",
    "INFINITE_TYPE1",
    "LedgerRow",
    "NChoice",
    "POSITIVE_GENUS",
    "Report",
    "compute_N",
    "default_pentagon_threshold",
    "report",
    "verify_non_wandering",
]
