"""Hyperbolic trigonometry in the upper half-plane, robust for huge cuff lengths.

Geodesics are given by their two endpoints on the extended real line
(``math.inf`` stands for the point at infinity).  Distances between
geodesics come from the cross-ratio of the four endpoints.

Pants quantities use half-lengths of cuffs, as in the right-angled hexagons
obtained by cutting a pair of pants along its three seams.  Above half-length
40 the hyperbolic functions are replaced by their exponential asymptotics,
and the leading parts are carried as exact rationals so that differences of
enormous factorial lengths cancel exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .metric import Length

LOG2 = math.log(2.0)
_ASYMPTOTIC = 40  # exp(-80) is far below double precision
INF = math.inf


class GeometryError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Geodesics and distances


@dataclass(frozen=True)
class BoundaryGeodesic:
    endpoints: tuple[float, float]

    def __init__(self, p: float, q: float):
        if p == q:
            raise GeometryError("geodesic endpoints must be distinct")
        if math.isinf(p) and math.isinf(q):
            raise GeometryError("only one endpoint may be infinite")
        if math.isinf(p):
            p = INF
        if math.isinf(q):
            q = INF
        object.__setattr__(self, "endpoints", (float(p), float(q)))

    def __iter__(self):
        return iter(self.endpoints)


def _diff_ratio(num: Sequence[tuple[float, float]], den: Sequence[tuple[float, float]]) -> float:
    """prod(x - y for num) / prod(x - y for den), cancelling infinite factors."""
    sign = 1.0
    top = 1.0
    bottom = 1.0
    for pairs, is_num in ((num, True), (den, False)):
        for x, y in pairs:
            if math.isinf(x):
                continue
            if math.isinf(y):
                sign = -sign
                continue
            if is_num:
                top *= x - y
            else:
                bottom *= x - y
    return sign * top / bottom


def geodesic_distance(g1: BoundaryGeodesic, g2: BoundaryGeodesic) -> float:
    """Length of the common perpendicular of two disjoint geodesics.

    Asymptotic geodesics (a shared endpoint) are at distance 0.  Crossing
    geodesics raise :class:`GeometryError`.
    """
    a, b = g1.endpoints
    c, d = g2.endpoints
    if a in (c, d) or b in (c, d):
        return 0.0
    # orient so the cross-ratio lies in (0, 1); decide on 1 - x, which is exact-ish
    one_minus_x = _diff_ratio([(a, b), (d, c)], [(a, d), (b, c)])
    if one_minus_x < 0:
        c, d = d, c
        one_minus_x = _diff_ratio([(a, b), (d, c)], [(a, d), (b, c)])
    x = _diff_ratio([(a, c), (b, d)], [(a, d), (b, c)])
    if x < 0:
        raise GeometryError("geodesics cross; distance is undefined")
    t = math.sqrt(x)
    return 2.0 * math.log1p(t) - math.log(one_minus_x)


@dataclass(frozen=True)
class Mobius:
    """z -> (alpha z + beta) / (gamma z + delta) with real coefficients, det > 0."""

    alpha: float
    beta: float
    gamma: float
    delta: float

    def __post_init__(self):
        if self.alpha * self.delta - self.beta * self.gamma <= 0:
            raise GeometryError("Mobius map must have positive determinant")

    def __call__(self, x: float) -> float:
        if math.isinf(x):
            return INF if self.gamma == 0 else self.alpha / self.gamma
        den = self.gamma * x + self.delta
        if den == 0:
            return INF
        return (self.alpha * x + self.beta) / den

    def geodesic(self, g: BoundaryGeodesic) -> BoundaryGeodesic:
        return BoundaryGeodesic(self(g.endpoints[0]), self(g.endpoints[1]))


# ---------------------------------------------------------------------------
# Exact-leading-part arithmetic


@dataclass(frozen=True)
class _Split:
    """exact + approx, with the (possibly enormous) leading part kept exact."""

    exact: Fraction = Fraction(0)
    approx: float = 0.0

    def __add__(self, other):
        if isinstance(other, _Split):
            return _Split(self.exact + other.exact, self.approx + other.approx)
        return _Split(self.exact, self.approx + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, _Split):
            return _Split(self.exact - other.exact, self.approx - other.approx)
        return _Split(self.exact, self.approx - other)

    def __neg__(self):
        return _Split(-self.exact, -self.approx)

    def scale(self, k) -> "_Split":
        return _Split(self.exact * k, self.approx * k)

    def __float__(self) -> float:
        return _safe_float(self.exact) + self.approx

    def log(self) -> float:
        """Natural log of a positive split value."""
        if abs(self.exact) > 1e15:
            return _log_fraction(self.exact) + math.log1p(self.approx / _safe_float(self.exact))
        value = float(self)
        if value <= 0:
            raise GeometryError("log of a non-positive length")
        return math.log(value)


def _safe_float(x: Fraction) -> float:
    try:
        return float(x)
    except OverflowError:
        return INF if x > 0 else -INF


def _log_fraction(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


def _half(length: Length | None) -> Fraction | None:
    if length is None:
        return None
    exact = length.exact
    if exact is None:
        raise GeometryError("lengths known only through their logarithm are not supported here")
    return exact / 2


def _log_cosh(h: Fraction | None) -> _Split:
    if h is None or h == 0:
        return _Split()
    if h > _ASYMPTOTIC:
        return _Split(h, -LOG2 + math.log1p(math.exp(-2.0 * _safe_float(h))))
    return _Split(Fraction(0), math.log(math.cosh(float(h))))


def _log_sinh(h: Fraction) -> _Split:
    if h > _ASYMPTOTIC:
        return _Split(h, -LOG2 + math.log1p(-math.exp(-2.0 * _safe_float(h))))
    return _Split(Fraction(0), math.log(math.sinh(float(h))))


def _log_coth(h: Fraction) -> float:
    if h > _ASYMPTOTIC:
        return 2.0 * math.exp(-2.0 * _safe_float(h))
    return math.log1p(2.0 / math.expm1(2.0 * float(h)))


def _softplus(z: _Split) -> _Split:
    """log(1 + e^z)."""
    zf = float(z)
    if zf > _ASYMPTOTIC:
        return z + math.log1p(math.exp(-zf))
    if zf < -745:
        return _Split()
    return _Split(Fraction(0), math.log1p(math.exp(zf)))


def _logsumexp(terms: Iterable[_Split]) -> _Split:
    terms = list(terms)
    top = max(terms, key=float)
    acc = 0.0
    for t in terms:
        acc += math.exp(float(t - top))
    return top + math.log(acc)


def _acosh_of_exp(y: _Split) -> _Split:
    """arccosh(e^y) for y >= 0."""
    yf = float(y)
    if yf > _ASYMPTOTIC:
        return y + math.log1p(math.sqrt(-math.expm1(-2.0 * yf)))
    if yf <= 0:
        return _Split()
    return _Split(Fraction(0), 2.0 * math.asinh(math.sqrt(math.expm1(yf) / 2.0)))


def _asinh_of_exp(s: _Split) -> _Split:
    """arcsinh(e^s)."""
    sf = float(s)
    if sf > _ASYMPTOTIC:
        return s + math.log1p(math.sqrt(1.0 + math.exp(-2.0 * sf)))
    if sf < -_ASYMPTOTIC:
        # asinh(x) = x for tiny x; stay in log space
        return _Split(Fraction(0), math.exp(sf)) if sf > -745 else _Split()
    return _Split(Fraction(0), math.asinh(math.exp(sf)))


# ---------------------------------------------------------------------------
# Pants


def _as_length(x) -> Length | None:
    if x is None:
        return None
    if isinstance(x, Length):
        return x
    if x == 0:
        return None
    return Length.real(x)


@dataclass(frozen=True)
class PantsGeometry:
    """Three boundary lengths; a cusp is ``None`` (0 is accepted on input)."""

    cuffs: tuple[Length | None, Length | None, Length | None]

    def __init__(self, l1, l2, l3):
        cuffs = tuple(_as_length(x) for x in (l1, l2, l3))
        if sum(c is None for c in cuffs) > 2:
            raise GeometryError("a pair of pants has at most two cusps")
        object.__setattr__(self, "cuffs", cuffs)

    @property
    def cusps(self) -> int:
        return sum(c is None for c in self.cuffs)


@dataclass(frozen=True)
class Orthogeodesics:
    d12: float
    d13: float
    d23: float

    def between(self, i: int, j: int) -> float:
        key = tuple(sorted((i, j)))
        return {(0, 1): self.d12, (0, 2): self.d13, (1, 2): self.d23}[key]


def _seam(hi, hj, hk) -> _Split:
    # cosh d_ij = coth(hi) coth(hj) (1 + cosh hk / (cosh hi cosh hj))
    if hi is None or hj is None:
        return _Split(Fraction(0), INF)
    y = _Split(Fraction(0), _log_coth(hi) + _log_coth(hj))
    y = y + _softplus(_log_cosh(hk) - _log_cosh(hi) - _log_cosh(hj))
    return _acosh_of_exp(y)


def pants_orthogeodesics(p: PantsGeometry) -> Orthogeodesics:
    """Distances between the three pairs of cuffs (the seams of the pants).

    Uses cosh d_ij = (cosh(l_k/2) + cosh(l_i/2) cosh(l_j/2)) /
    (sinh(l_i/2) sinh(l_j/2)), rearranged so nothing overflows.  Seams that
    run into a cusp are infinite.
    """
    h = [_half(c) for c in p.cuffs]
    return Orthogeodesics(
        float(_seam(h[0], h[1], h[2])),
        float(_seam(h[0], h[2], h[1])),
        float(_seam(h[1], h[2], h[0])),
    )


def _returning_split(h1, h2, h3) -> _Split:
    # sinh^2(eta/2) sinh^2(h1) = cosh^2 h2 + cosh^2 h3 + 2 cosh h1 cosh h2 cosh h3
    c1, c2, c3 = _log_cosh(h1), _log_cosh(h2), _log_cosh(h3)
    s = _logsumexp([c2.scale(2), c3.scale(2), c1 + c2 + c3 + LOG2]).scale(Fraction(1, 2))
    s = s - _log_sinh(h1)
    return _asinh_of_exp(s).scale(2)


def _returning_split_route(h1, hj, hk) -> _Split:
    # cut along the arc's midpoint perpendicular: a pentagon containing cuff j with
    # cosh hj = sinh(x) sinh(eta/2), x the part of the entry half-cuff next to j
    lt = -_log_coth(h1) - float(_softplus(_log_cosh(hk) - _log_cosh(hj) - _log_cosh(h1)))
    sech2 = -math.expm1(2.0 * lt)
    if sech2 <= 0:
        raise GeometryError("pentagon route degenerates in double precision")
    log_sinh_x = lt - 0.5 * math.log(sech2)
    return _asinh_of_exp(_log_cosh(hj) - log_sinh_x).scale(2)


def _log_of_length(eta: _Split) -> float:
    if eta.exact == 0 and eta.approx > 0:
        return math.log(eta.approx)
    return eta.log()


def returning_arc_bound(p: PantsGeometry, entry_cuff: int, route: int | None = None) -> Length:
    """Length of the shortest essential arc leaving and re-entering through one cuff.

    That arc is the simple orthogeodesic from the entry cuff to itself; it
    separates the two other boundaries.  By default its length comes from
    the symmetric closed form.  ``route=j`` instead computes it from the
    right-angled pentagon on the side of boundary ``j``, which must agree.
    """
    if not 0 <= entry_cuff <= 2:
        raise GeometryError("entry_cuff is 0, 1 or 2")
    if p.cuffs[entry_cuff] is None:
        raise GeometryError("the entry boundary is a cusp")
    others = [i for i in range(3) if i != entry_cuff]
    h1 = _half(p.cuffs[entry_cuff])
    h2, h3 = (_half(p.cuffs[i]) for i in others)
    if route is None:
        eta = _returning_split(h1, h2, h3)
    else:
        if route not in others:
            raise GeometryError("route must name one of the two far boundaries")
        hj = _half(p.cuffs[route])
        hk = _half(p.cuffs[others[0] if route == others[1] else others[1]])
        eta = _returning_split_route(h1, hj, hk)
    if eta.exact == 0 and eta.approx <= 0:
        # shorter than double precision can express; only its log is meaningful
        raise GeometryError("returning arc too short to represent")
    return Length.from_log(_log_of_length(eta))


# ---------------------------------------------------------------------------
# The ideal right-angled pentagon


@dataclass(frozen=True)
class IdealPentagon:
    """Right-angled pentagon with one ideal vertex, placed with that vertex at infinity.

    Sides in order: ``v0`` (the imaginary axis, infinite), ``a``, ``b``,
    ``c``, ``v1`` (vertical, infinite).  ``d`` is the common perpendicular
    from side ``a`` to side ``v1``.  Measured lengths are recomputed from the
    placed geodesics with :func:`geodesic_distance`.
    """

    a: float
    c: float
    lines: dict
    a_measured: float
    b: float
    c_measured: float
    d: float

    @property
    def slack(self) -> float:
        return self.d - (self.c - self.a)


def ideal_pentagon(a: float, c: float) -> IdealPentagon:
    if not (a > 0 and c > 0):
        raise GeometryError("pentagon sides must be positive")
    sa, ca = math.sinh(a), math.cosh(a)
    v0 = BoundaryGeodesic(0.0, INF)
    line_a = BoundaryGeodesic(-1.0, 1.0)
    line_b = BoundaryGeodesic(math.tanh(a / 2), 1.0 / math.tanh(a / 2))
    # side c lies on the circle orthogonal to line_b whose top point is at distance c from b
    left = (ca + math.exp(-c)) / sa
    right = (ca + math.exp(c)) / sa
    foot = (ca + math.cosh(c)) / sa
    line_c = BoundaryGeodesic(left, right)
    v1 = BoundaryGeodesic(foot, INF)
    lines = {"v0": v0, "a": line_a, "b": line_b, "c": line_c, "v1": v1}
    return IdealPentagon(
        a,
        c,
        lines,
        geodesic_distance(v0, line_b),
        geodesic_distance(line_a, line_c),
        geodesic_distance(line_b, v1),
        geodesic_distance(line_a, v1),
    )


def pentagon_check(a: float, c: float, min_a: float = 1.0) -> tuple[float, bool]:
    """Build the pentagon with sides a and c and test d >= c - a.

    Requires ``a > min_a`` and ``c > a``.
    """
    if not a > min_a:
        raise GeometryError(f"precondition: a must exceed {min_a}, got {a}")
    if not c > a:
        raise GeometryError(f"precondition: c must exceed a, got a={a}, c={c}")
    pent = ideal_pentagon(a, c)
    return pent.d, pent.d >= c - a


DEFAULT_A_GRID = (1.1, 1.5, 2.0, 5.0, 10.0, 20.0)


@dataclass(frozen=True)
class ScanRow:
    a: float
    c: float
    d: float
    slack: float


def pentagon_scan(
    a_values: Iterable[float] = DEFAULT_A_GRID, c_step: float = 0.5, c_span: float = 30.0
) -> list[ScanRow]:
    """Sweep c over (a, a + c_span] in steps of c_step for each a."""
    rows = []
    steps = int(round(c_span / c_step))
    for a in a_values:
        for j in range(1, steps + 1):
            c = a + j * c_step
            d, _ = pentagon_check(a, c)
            rows.append(ScanRow(a, c, d, d - (c - a)))
    return rows


def pentagon_threshold(rows: Sequence[ScanRow], tol: float = 0.0) -> float | None:
    """Smallest grid value of a from which the inequality holds for every c."""
    by_a: dict[float, bool] = {}
    for r in rows:
        by_a[r.a] = by_a.get(r.a, True) and r.slack >= -tol
    good = None
    for a in sorted(by_a, reverse=True):
        if not by_a[a]:
            break
        good = a
    return good


# ---------------------------------------------------------------------------
# Quasiconformal distortion of lengths


@dataclass(frozen=True)
class WolpertInterval:
    K: float
    length: Length
    log_lower: float
    log_upper: float

    @property
    def lower(self) -> Length:
        return Length.from_log(self.log_lower)

    @property
    def upper(self) -> Length:
        return Length.from_log(self.log_upper)

    def contains(self, image: Length, tol: float = 0.0) -> bool:
        y = image.log_value
        return self.log_lower - tol <= y <= self.log_upper + tol


def wolpert_interval(K: float, length: Length) -> WolpertInterval:
    """Range [l/K, K l] for the geodesic length of the image of a curve of length l
    under a K-quasiconformal map.  An image length outside it rules the map out."""
    if not K >= 1:
        raise GeometryError(f"K must be >= 1, got {K}")
    y = length.log_value
    lk = math.log(K)
    return WolpertInterval(float(K), length, y - lk, y + lk)
