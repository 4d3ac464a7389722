import math
from fractions import Fraction

import pytest

from qcsurf import _jsonio
from qcsurf.certificate import (
    CONTRADICTION,
    FINITE_TYPE1,
    INFINITE_TYPE1,
    POSITIVE_GENUS,
    Certificate,
    CertificateError,
    compute_N,
    report,
    verify_non_wandering,
)
from qcsurf.core_tree import preset, truncate
from qcsurf.metric import label_lengths, odd_factorial
from qcsurf.pants_complex import TruncationTooShallow, build


def labelled(name, depth, **params):
    cx = build(truncate(preset(name, **params), depth))
    return label_lengths(cx, 2.0 if cx.t_star_cuffs else None)


# a torus at the root, then two type-1 pants two steps out, then a Cantor tail
HAND_RULES = {
    "root": {"marked": True, "children": ["a"]},
    "a": {"marked": False, "children": ["c", "c"]},
    "c": {"marked": False, "children": ["leaf", "b"]},
    "b": {"marked": False, "children": ["b", "b"]},
}


def hand_example(depth=6):
    cx = build(truncate(preset("custom", root="root", rules=HAND_RULES), depth))
    return label_lengths(cx, 1.0)


def test_finite_rule_hand_example():
    choice = compute_N(hand_example())
    assert choice.N == 4
    assert choice.rule == "finite_type1"
    assert choice.type1_pants == 2
    assert choice.case_tag == POSITIVE_GENUS


def test_finite_rule_needs_every_type1_pants():
    with pytest.raises(TruncationTooShallow):
        compute_N(hand_example(depth=2))


def test_cantor_vacuous():
    choice = compute_N(labelled("cantor", 5))
    assert choice.N == 1 and choice.case_tag == FINITE_TYPE1
    assert any("vacuous" in n for n in choice.notes)


def test_flute_pentagon_rule():
    mc = labelled("flute", 6)
    assert compute_N(mc, a0=2.0).N == 1
    assert compute_N(mc).N == 1  # default threshold 1.1 < 3!
    assert compute_N(mc, a0=6.0).N == 2
    assert compute_N(mc, a0=5040.0).N == 4
    assert compute_N(mc).case_tag == INFINITE_TYPE1


def test_genus_pentagon_rule_uses_frontier_index():
    # R_1 is bounded by E_1 (length 1!), R_n by cuffs of length (2n-1)!
    choice = compute_N(labelled("flute_with_genus", 6, g=1))
    assert choice.N == 2 and choice.case_tag == POSITIVE_GENUS


def test_type1_override():
    mc = labelled("cantor", 5)
    assert compute_N(mc, type1="infinite").rule == "pentagon"
    with pytest.raises(CertificateError):
        compute_N(mc, type1="maybe")


@pytest.mark.slow
def test_cantor_report_rows():
    cert = verify_non_wandering(labelled("cantor", 18), 5, 15)
    assert cert.valid and len(cert.ledger) == 11
    assert [r.n for r in cert.ledger] == list(range(5, 16))


def test_row_values_k5_n5():
    cert = verify_non_wandering(labelled("flute", 10), 5, 5)
    (row,) = cert.ledger
    assert row.lhs == 5 * odd_factorial(5)
    assert row.rhs == odd_factorial(5) * 155
    assert row.verdict == CONTRADICTION


@pytest.mark.parametrize("n", range(1, 12))
def test_k_equal_n(n):
    cert = verify_non_wandering(labelled("flute", n + 4), n, n)
    (row,) = cert.ledger
    assert row.exact_ok and row.simplified_ok and n < 2 * n + 1


def test_conformal_passes():
    cert = verify_non_wandering(labelled("flute", 12), 1.0, 8)
    assert cert.valid and all(r.verdict == CONTRADICTION for r in cert.ledger)


def test_refusal():
    mc = labelled("flute_with_genus", 8, g=1)
    cert = verify_non_wandering(mc, 1.0, 5)
    assert cert.status == "refused" and cert.exit_code == 2
    assert not cert.ledger
    rep = report(cert)
    assert "below N" in rep.data["reason"]
    assert "refused" in rep.text


def test_refusal_never_valid():
    for K in (1.0, 1.5, 1.99):
        assert not verify_non_wandering(labelled("flute_with_genus", 8, g=1), K, 5).valid


def test_horizon_guards():
    mc = labelled("flute", 8)
    with pytest.raises(TruncationTooShallow):
        verify_non_wandering(mc, 2, 8)
    with pytest.raises(CertificateError):
        verify_non_wandering(mc, 5, 3)
    with pytest.raises(CertificateError):
        verify_non_wandering(mc, 0.5, 3)


def test_exact_and_numeric_agree():
    for name, params, depth in (("flute", {}, 16), ("cantor", {}, 11), ("flute_with_genus", {"g": 2}, 14), ("cantor_with_genus", {"g": 1}, 11)):
        mc = labelled(name, depth, **params)
        for K in (2, 3.5, 7):
            N = compute_N(mc).N
            if K < N:
                continue
            cert = verify_non_wandering(mc, K, depth - 4)
            for r in cert.ledger:
                assert r.exact_ok == r.numeric_ok == r.simplified_ok == r.monotone_ok
                # simplified inequality agrees with the full factorial one
                assert r.simplified_ok == (Fraction(str(K)) * odd_factorial(r.m) < r.rhs)


def test_non_integer_k_is_exact():
    cert = verify_non_wandering(labelled("flute", 10), 2.1, 4)
    assert cert.ledger[0].n == 3
    assert cert.ledger[0].lhs == Fraction(21, 10) * odd_factorial(3)


def test_json_round_trip():
    cert = verify_non_wandering(labelled("flute_with_genus", 12, g=1), 3, 8)
    text = _jsonio.dumps(report(cert).data)
    back = Certificate.from_json(_jsonio.json.loads(text))
    assert back == cert
    assert _jsonio.dumps(report(back).data) == text


def test_report_prose():
    rep = report(verify_non_wandering(labelled("cantor", 10), 2, 5))
    assert "not machine-verified" in rep.data["summary"].lower()
    assert "Dehn twists" in rep.text
    assert any("conditional" in n for n in rep.data["notes"])
    lines = [l for l in rep.text.splitlines() if l.strip().endswith(CONTRADICTION)]
    assert len(lines) == 4


def test_log_margins_positive():
    cert = verify_non_wandering(labelled("flute", 16), 2, 12)
    for r in cert.ledger:
        assert r.log_margin > 0
        assert math.isclose(r.log_lhs, math.log(2) + math.lgamma(2 * r.k + 2), rel_tol=1e-12)
