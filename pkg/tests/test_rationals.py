from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oscal.errors import ExactnessError
from oscal.rationals import (
    GaussianRational,
    IntervalSum,
    Verdict,
    as_gaussian,
    format_rational,
    parse_rational,
    rat,
    rational_abs,
    require_rational_abs,
    sqrt_bracket,
    verdict_all,
)

fractions = st.fractions(
    min_value=-100, max_value=100, max_denominator=1000
)


@given(fractions)
def test_parse_format_round_trip(q):
    assert parse_rational(format_rational(q)) == q


def test_parse_accepts_plain_forms():
    assert parse_rational("7") == 7
    assert parse_rational("-7") == -7
    assert parse_rational("+3/6") == Fraction(1, 2)
    assert parse_rational("0") == 0


@pytest.mark.parametrize(
    "text",
    ["", " 1", "1 ", "1.5", "1e3", "1/0", "1/-2", "a", "1/2/3", "--1", "1 / 2"],
)
def test_parse_rejects_malformed(text):
    with pytest.raises(ValueError):
        parse_rational(text)


def test_rat_rejects_floats_and_bools():
    with pytest.raises(TypeError):
        rat(0.5)
    with pytest.raises(TypeError):
        rat(True)


def test_gaussian_arithmetic():
    a = GaussianRational(Fraction(1, 2), Fraction(3))
    b = GaussianRational(Fraction(2), Fraction(-1))
    assert a + b == GaussianRational(Fraction(5, 2), Fraction(2))
    assert a - b == GaussianRational(Fraction(-3, 2), Fraction(4))
    assert a * b == GaussianRational(Fraction(4), Fraction(11, 2))
    assert (-a).im == Fraction(-3)
    assert a.conjugate().im == Fraction(-3)
    assert as_gaussian(5) == GaussianRational(Fraction(5), Fraction(0))
    assert 1 + b == GaussianRational(Fraction(3), Fraction(-1))


def test_rational_abs():
    assert rational_abs(GaussianRational(Fraction(3), Fraction(4))) == 5
    assert rational_abs(GaussianRational(Fraction(1), Fraction(1))) is None
    assert require_rational_abs(
        GaussianRational(Fraction(-3, 5), Fraction(4, 5))
    ) == Fraction(1)
    with pytest.raises(ExactnessError):
        require_rational_abs(GaussianRational(Fraction(1), Fraction(2)))


@given(st.fractions(min_value=0, max_value=500, max_denominator=50))
def test_sqrt_bracket_contains_root(q):
    lo, hi = sqrt_bracket(q)
    assert lo * lo <= q <= hi * hi
    assert hi - lo <= Fraction(1, 2**30)
    assert lo >= 0


def test_sqrt_bracket_exact_square_collapses():
    assert sqrt_bracket(Fraction(9, 4)) == (Fraction(3, 2), Fraction(3, 2))
    with pytest.raises(ValueError):
        sqrt_bracket(Fraction(-1))


def test_verdict_is_three_valued():
    assert verdict_all([]) is Verdict.TRUE
    assert verdict_all([Verdict.TRUE, Verdict.TRUE]) is Verdict.TRUE
    assert (
        verdict_all([Verdict.TRUE, Verdict.UNDECIDED]) is Verdict.UNDECIDED
    )
    assert (
        verdict_all([Verdict.UNDECIDED, Verdict.FALSE]) is Verdict.FALSE
    )
    with pytest.raises(TypeError):
        bool(Verdict.TRUE)


def test_interval_sum_rational_terms_stay_exact():
    acc = IntervalSum()
    acc.add_rational(Fraction(1, 3))
    acc.add_rational(Fraction(1, 6))
    assert acc.lo == acc.hi == Fraction(1, 2)
    assert acc.less_than(Fraction(2, 3)) is Verdict.TRUE
    assert acc.less_than(Fraction(1, 2)) is Verdict.FALSE


def test_interval_sum_brackets_irrationals():
    acc = IntervalSum()
    acc.add_abs(GaussianRational(Fraction(1), Fraction(1)))  # sqrt 2
    assert acc.lo < acc.hi
    assert acc.less_than(Fraction(2)) is Verdict.TRUE
    assert acc.less_than(Fraction(1)) is Verdict.FALSE
    # a bound inside the bracket cannot be decided
    mid = (acc.lo + acc.hi) / 2
    assert acc.less_than(mid) is Verdict.UNDECIDED
