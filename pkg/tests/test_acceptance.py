"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

The lines are collected and printed at the end of the pytest run (see
conftest.py); running this file directly prints them as well.
"""

import io
import json
import math
import random
from fractions import Fraction

import pytest

from qcsurf.certificate import compute_N
from qcsurf.cli import run
from qcsurf.core_tree import preset, truncate, validate
from qcsurf.hyp_geom import (
    DEFAULT_A_GRID,
    BoundaryGeodesic,
    Mobius,
    PantsGeometry,
    geodesic_distance,
    pentagon_scan,
    returning_arc_bound,
    wolpert_interval,
)
from qcsurf.metric import Length, label_lengths, log_odd_factorial, odd_factorial
from qcsurf.pants_complex import build, exhaustion_sequence
from qcsurf.tree_surgery import find_exterior_trees, normalize

from .oracles import random_core_tree, sampled_distance

RESULTS: dict[int, str] = {}


def record(num, title, ok, detail):
    line = f"criterion {num} [{title}]: {'PASS' if ok else 'FAIL'} - {detail}"
    RESULTS[num] = line
    print(line)
    assert ok, line


def test_criterion_1_factorial_labels():
    bad = []
    checked = 0
    for name in ("cantor", "flute"):
        cx = build(truncate(preset(name), 12))
        mc = label_lengths(cx)
        for sl in exhaustion_sequence(cx, 10):
            for cid in sl.frontier:
                checked += 1
                ln = mc.lengths[cid]
                if not (ln.is_factorial and ln.value == sl.n and ln.exact == odd_factorial(sl.n)):
                    bad.append((name, sl.n, cid, ln))
    record(1, "factorial labelling", not bad, f"{checked} frontier cuffs, {len(bad)} mislabelled")


def test_criterion_2_surgery():
    rng = random.Random(20240601)
    failures = []
    sizes = []
    n_trees = 1000
    for i in range(n_trees):
        cap = rng.choice([16, 64, 256, 1024, 10_000])
        t = random_core_tree(rng, max_vertices=cap, marked_rate=rng.choice([0.0, 0.05, 0.3]))
        sizes.append(len(t.vertices))
        out, _ = normalize(t)
        ext = find_exterior_trees(out)
        ok = len(ext) <= 1 and all(e.apex == out.root for e in ext)
        ok = ok and all(out.degree(v) == t.degree(v) for v in set(out.vertex) & set(t.vertex))
        again, trace = normalize(out)
        ok = ok and again == out and len(trace) == 0 and validate(out).ok
        if not ok:
            failures.append(i)
    assert max(sizes) <= 10_000
    record(2, "exterior-tree surgery", not failures, f"{n_trees} random trees (max {max(sizes)} vertices), {len(failures)} failures")


def test_criterion_3_pentagon():
    rows = pentagon_scan(DEFAULT_A_GRID, c_step=0.5, c_span=30.0)
    assert len(rows) == 6 * 60
    worst = min(r.slack for r in rows)
    record(3, "pentagon bound", worst >= -1e-9, f"{len(rows)} grid points, min slack {worst:.6g}")


def test_criterion_4_returning_arcs():
    worst = math.inf
    for m in range(7):
        target = log_odd_factorial(m) + math.log(2 * m + 1)
        a, b = Length.factorial(m), Length.factorial(m + 1)
        for geom in (PantsGeometry(a, b, 0), PantsGeometry(a, b, b)):
            slack = returning_arc_bound(geom, 0).log_value - target
            worst = min(worst, slack)
    record(4, "returning-arc bound", worst >= -1e-9, f"m = 0..6, types 0 and 1, min log slack {worst:.6g}")


def test_criterion_5_certificate():
    bad = []
    rows = 0
    for K in (2, 5, 10):
        mc = label_lengths(build(truncate(preset("flute"), 24)))
        N = compute_N(mc).N
        horizon = N + 20
        out = io.StringIO()
        code = run(["certify", "--preset", "flute", "--depth", "24", "-K", str(K), "--horizon", str(horizon)], out=out)
        doc = json.loads(out.getvalue())
        ns = [r["n"] for r in doc["ledger"]]
        if code != 0 or ns != list(range(max(K, N), horizon + 1)):
            bad.append((K, "exit", code, ns))
        for r in doc["ledger"]:
            rows += 1
            n = r["n"]
            lhs = K * odd_factorial(n)
            rhs = odd_factorial(n) * ((2 * n + 2) * (2 * n + 3) - 1)
            if not (lhs < rhs and Fraction(r["lhs"]) == lhs and r["rhs"] == rhs and r["exact_ok"]):
                bad.append((K, n))
    record(5, "certificate exact arithmetic", not bad, f"{rows} ledger rows for K in (2, 5, 10), {len(bad)} failures")


def test_criterion_6_wolpert():
    rng = random.Random(7)
    worst = 0.0
    for _ in range(100):
        ln = Length.factorial(rng.randint(0, 300)) if rng.random() < 0.5 else Length.real(rng.uniform(1e-3, 1e6))
        w = wolpert_interval(1.0, ln)
        worst = max(worst, abs(w.log_lower - ln.log_value), abs(w.log_upper - ln.log_value))
        K = rng.uniform(1.0, 50.0)
        w = wolpert_interval(K, ln)
        worst = max(worst, abs(w.log_upper - ln.log_value - math.log(K)), abs(ln.log_value - w.log_lower - math.log(K)))
    record(6, "Wolpert interval", worst <= 1e-12, f"100 lengths, max log deviation {worst:.3g}")


def test_criterion_7_geometry_oracle():
    rng = random.Random(99)
    worst = 0.0
    for _ in range(500):
        pts = sorted(rng.uniform(-20, 20) for _ in range(4))
        if rng.random() < 0.15:
            pts[3] = math.inf
        g1, g2 = ((pts[0], pts[1]), (pts[2], pts[3])) if rng.random() < 0.5 else ((pts[0], pts[3]), (pts[1], pts[2]))
        d = geodesic_distance(BoundaryGeodesic(*g1), BoundaryGeodesic(*g2))
        worst = max(worst, abs(d - sampled_distance(g1, g2)))
    worst_m = 0.0
    for _ in range(200):
        pts = sorted(rng.uniform(-5, 5) for _ in range(4))
        g1, g2 = BoundaryGeodesic(pts[0], pts[1]), BoundaryGeodesic(pts[2], pts[3])
        a, b, c = rng.uniform(0.2, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)
        m = Mobius(a, b, c, (1 + b * c) / a)
        d0 = geodesic_distance(g1, g2)
        d1 = geodesic_distance(m.geodesic(g1), m.geodesic(g2))
        worst_m = max(worst_m, abs(d1 - d0))
    ok = worst <= 1e-6 and worst_m <= 1e-9
    record(7, "geometry oracle", ok, f"500 pairs max |err| {worst:.2g}; 200 Mobius maps max |err| {worst_m:.2g}")


def test_criterion_8_euler():
    bad = []
    count = 0
    specs = [("cantor", {}), ("flute", {})] + [
        (name, {"g": g}) for name in ("flute_with_genus", "cantor_with_genus") for g in (1, 2, 3)
    ]
    for name, params in specs:
        for depth in range(9):
            cx = build(truncate(preset(name, **params), depth))
            count += 1
            if cx.euler_characteristic() != cx.topological_euler_characteristic():
                bad.append((name, params, depth))
    record(8, "Euler characteristic", not bad, f"{count} preset truncations, {len(bad)} mismatches")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
