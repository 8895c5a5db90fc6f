"""Exponent-coincidence regimes and case-aware collection."""

from fractions import Fraction

import pytest

from pmsym.exprs import (Case, Q, R, U, ZERO, add, apply_case, as_affine_qr,
                         case_for, mul, num, parse, pow_, to_expr)


@pytest.mark.parametrize("q,r,want", [
    (3, 1, Case.GENERIC),
    (2, 1, Case.Q_EQ_RPLUS1),
    (1, 1, Case.Q_EQ_1),
    (2, 0, Case.R_EQ_0),
    (1, 0, Case.Q_EQ_RPLUS1_EQ_1),
    (Fraction(3, 2), Fraction(-1, 2), Case.GENERIC),
    (Fraction(1, 2), Fraction(-1, 2), Case.Q_EQ_RPLUS1),
    (1, Fraction(1, 3), Case.Q_EQ_1),
])
def test_case_for_table(q, r, want):
    assert case_for(q, r) is want


def test_case_for_rejects_symbols():
    with pytest.raises(ValueError):
        case_for(Q, 1)


def test_labels_and_aliases():
    assert Case.GENERIC.label == "Generic"
    assert Case.from_string("qr1") is Case.Q_EQ_RPLUS1
    assert Case.from_string("QeqRplus1eq1") is Case.Q_EQ_RPLUS1_EQ_1
    assert Case.from_string("c3") is Case.Q_EQ_1
    assert Case.from_string("r0") is Case.R_EQ_0
    assert Case.from_string("Generic") is Case.GENERIC
    with pytest.raises(ValueError):
        Case.from_string("case-six")


def test_substitutions_collapse_exponents():
    # under q = r+1 the source power u^q merges with u^(r+1)
    e = add(pow_(U, Q), mul(-1, pow_(U, add(R, 1))))
    assert apply_case(e, Case.Q_EQ_RPLUS1) == ZERO
    assert apply_case(e, Case.GENERIC) == e
    # under q = 1 the source becomes linear
    assert apply_case(pow_(U, Q), Case.Q_EQ_1) == U
    assert apply_case(pow_(U, R), Case.R_EQ_0) == to_expr(1)
    both = apply_case(add(pow_(U, Q), pow_(U, R)),
                      Case.Q_EQ_RPLUS1_EQ_1)
    assert both == add(U, num(1))


def test_admits_is_consistent_with_case_for():
    table = [(3, 1), (2, 1), (1, 1), (2, 0), (1, 0)]
    for q, r in table:
        c = case_for(q, r)
        assert c.admits(q, r)
        for other in Case:
            if other is not c:
                assert not other.admits(q, r)


def test_as_affine_qr():
    assert as_affine_qr(add(num(2), mul(3, Q), mul(-1, R))) == \
        (Fraction(2), Fraction(3), Fraction(-1))
    assert as_affine_qr(Q) == (Fraction(0), Fraction(1), Fraction(0))
    assert as_affine_qr(parse("x1", n=1)) is None
    assert as_affine_qr(mul(Q, R)) is None
