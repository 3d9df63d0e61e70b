from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from kepoly import linalg as la

small = st.integers(min_value=-6, max_value=6)


def square(n):
    return st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)


def test_frac_parses_strings_and_ints():
    assert la.frac("3/2") == Fraction(3, 2)
    assert la.frac(" -4 ") == -4
    assert la.frac(7) == 7


@pytest.mark.parametrize("bad", [0.5, True, None, [1]])
def test_frac_rejects_non_rationals(bad):
    with pytest.raises(TypeError):
        la.frac(bad)


@pytest.mark.parametrize("bad", ["1/0", "x", "1.5.2"])
def test_frac_rejects_bad_strings(bad):
    with pytest.raises(ValueError):
        la.frac(bad)


def test_fmt():
    assert la.fmt(Fraction(-3, 6)) == "-1/2"
    assert la.fmt(Fraction(4)) == "4"


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        la.add((1,), (1, 2))


@given(square(3))
def test_det_matches_bareiss(m):
    assert la.det(m) == la.int_det(m)


@given(square(3))
def test_inverse_roundtrip(m):
    assume(la.det(m) != 0)
    inv = la.inverse(m)
    assert la.matmul(inv, tuple(la.vec(r) for r in m)) == la.identity(3)


@given(st.lists(st.lists(small, min_size=4, max_size=4), min_size=1, max_size=4))
def test_rank_nullity(rows):
    ns = la.nullspace(rows, 4)
    assert la.rank(rows) + len(ns) == 4
    for v in ns:
        assert all(la.dot(la.vec(r), v) == 0 for r in rows)


@given(square(3), st.lists(small, min_size=3, max_size=3))
def test_solve(m, x):
    assume(la.det(m) != 0)
    b = la.matvec(tuple(la.vec(r) for r in m), la.vec(x))
    assert la.solve(m, b) == la.vec(x)


def test_solve_inconsistent_and_underdetermined():
    assert la.solve([[1, 1], [2, 2]], [1, 3]) is None
    assert la.solve([[1, 1], [2, 2]], [1, 2]) is None


def test_primitive_and_integral():
    assert la.primitive((4, -6, 0)) == (2, -3, 0)
    assert la.integral((Fraction(1, 2), Fraction(-1, 3))) == (3, -2)
