from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kepoly import linalg as la
from kepoly.lp import in_hull, in_relative_interior, linprog, max_step

SQUARE = [la.vec(v) for v in [(0, 0), (1, 0), (0, 1), (1, 1)]]


def test_linprog_optimal():
    # max x + y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
    res = linprog([1, 1, 0, 0], [[1, 2, 1, 0], [3, 1, 0, 1]], [4, 6])
    assert res.status == "optimal"
    assert res.value == Fraction(14, 5)
    assert res.x[:2] == (Fraction(8, 5), Fraction(6, 5))


def test_linprog_infeasible_and_unbounded():
    assert linprog([0, 0], [[1, 1]], [-1]).status == "infeasible"
    assert linprog([1, 0], [[1, -1]], [0]).status == "unbounded"


def test_linprog_negative_rhs_and_degenerate_rows():
    res = linprog([-1, 0], [[-1, 1], [-2, 2]], [-1, -2])
    assert res.status == "optimal" and res.value == -1


def test_in_hull_and_interior():
    assert in_hull(SQUARE, [], la.vec(("1/2", 1)))
    assert not in_hull(SQUARE, [], la.vec(("1/2", "11/10")))
    assert not in_relative_interior(SQUARE, [], la.vec(("1/2", 1)))
    assert in_relative_interior(SQUARE, [], la.vec(("1/2", "1/3")))
    # a ray makes the body unbounded upwards
    assert in_hull(SQUARE, [la.vec((0, 1))], la.vec((1, 50)))


def test_max_step():
    c = la.vec(("1/2", "1/2"))
    assert max_step(SQUARE, [], c, la.vec((1, 0))) == Fraction(1, 2)
    assert max_step(SQUARE, [la.vec((1, 0))], c, la.vec((1, 0))) is None
    with pytest.raises(ValueError):
        max_step(SQUARE, [], la.vec((2, 2)), la.vec((1, 0)))


@given(st.fractions(min_value=-1, max_value=2, max_denominator=7),
       st.fractions(min_value=-1, max_value=2, max_denominator=7))
def test_in_hull_matches_box(x, y):
    assert in_hull(SQUARE, [], (x, y)) == (0 <= x <= 1 and 0 <= y <= 1)
    assert in_relative_interior(SQUARE, [], (x, y)) == (0 < x < 1 and 0 < y < 1)
