from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kepoly import dhmeasure
from kepoly import linalg as la
from kepoly.catalog import builtin
from kepoly.dhmeasure import (DegenerateMeasureError, LinearFormProduct, dh_barycenter, dh_volume, dh_weight,
                              integrate_over_simplex)
from kepoly.geometry import GeometryError, Simplex, contains, convex_hull
from kepoly.roots import GroupSpec, build_root_system

STD = Simplex(((0, 0), (1, 0), (0, 1)))
X2_BAR = (Fraction(278037566905, 66955221696), Fraction(3043253830, 1046175339))
rat = st.fractions(min_value=-3, max_value=3, max_denominator=4)


def rs_of(*factors, torus=0, norm=None):
    return build_root_system(GroupSpec(tuple(factors), torus, norm))


@given(rat, rat)
def test_weight_examples(x, y):
    b2 = rs_of("B2")
    p = b2.from_root_coordinates((x, y))
    assert dh_weight(b2)(p) == x**2 * y**2 * (x - y) ** 2 * (-x + 2 * y) ** 2
    a2 = rs_of("A2")
    p = a2.from_root_coordinates((x, y))
    assert dh_weight(a2)(p) == (x - y / 2) ** 2 * (-x / 2 + y) ** 2 * ((x + y) / 2) ** 2
    torus = rs_of(torus=2)
    assert dh_weight(torus).factors == () and dh_weight(torus)((x, y)) == 1


def test_simplex_closed_forms():
    x2y2 = LinearFormProduct((((1, 0), 2), ((0, 1), 2)))
    assert integrate_over_simplex(x2y2, None, STD) == Fraction(1, 180)
    assert integrate_over_simplex(LinearFormProduct(()), None, STD) == Fraction(1, 2)
    assert integrate_over_simplex(LinearFormProduct((((1, 0), 2),)), None, STD) == Fraction(1, 12)
    # extra coordinate: int x dA = 1/6
    assert integrate_over_simplex(LinearFormProduct(()), 0, STD) == Fraction(1, 6)


def test_negative_multiplicity_rejected():
    with pytest.raises(ValueError):
        LinearFormProduct((((1, 0), -1),))


def test_x0_x1_x2(examples):
    rs, P = examples["X0"]
    r = dh_barycenter(rs, P)
    assert r.volume == Fraction(8, 3) and r.root_coordinates == (Fraction(3, 2),)
    rs, P = examples["X1"]
    assert dh_barycenter(rs, P).root_coordinates == (Fraction(24641, 9888),) * 2
    rs, P = examples["X2"]
    assert dh_barycenter(rs, P).root_coordinates == X2_BAR


@pytest.mark.parametrize("name", ["X1", "X2", "Bl1P2"])
def test_triangulation_independence(examples, name):
    rs, P = examples[name]
    results = {(dh_volume(rs, P, v), dh_barycenter(rs, P, v).barycenter) for v in P.vertices}
    assert len(results) == 1


@pytest.mark.parametrize("name", ["X0", "X1", "X2"])
@pytest.mark.parametrize("lam", [Fraction(2), Fraction(1, 3)])
def test_scaling_covariance(examples, name, lam):
    rs, P = examples[name]
    m = 2 * len(rs.positive_roots)
    a, b = dh_barycenter(rs, P), dh_barycenter(rs, P.scaled(lam))
    assert b.volume == lam ** (rs.rank + m) * a.volume
    assert b.barycenter == la.scale(lam, a.barycenter)


@pytest.mark.parametrize("lam", [Fraction(2), Fraction(3, 7)])
def test_normalization_invariance(lam):
    ex = builtin("X2")
    base = ex.build()
    rs2 = build_root_system(GroupSpec(("B2",), 0, (lam,)))
    P2 = convex_hull([rs2.from_root_coordinates(v) for v in ex.pplus_vertices])
    a, b = dh_barycenter(*base), dh_barycenter(rs2, P2)
    assert b.barycenter == a.barycenter
    assert b.volume == lam ** (2 * len(rs2.positive_roots)) * a.volume


def test_normalization_invariance_product():
    spec = GroupSpec(("A1", "A1"))
    scaled = GroupSpec(("A1", "A1"), 0, (Fraction(1), Fraction(5)))
    pts = [(0, 0), (2, 0), (0, 1), (1, 1)]
    a = dh_barycenter(build_root_system(spec), convex_hull(pts))
    b = dh_barycenter(build_root_system(scaled), convex_hull(pts))
    assert a.barycenter == b.barycenter and b.volume == 25 * a.volume


@pytest.mark.parametrize("name", ["X0", "X1", "X2", "P2", "P1xP1", "Bl1P2"])
def test_barycenter_in_polytope(examples, name):
    rs, P = examples[name]
    assert contains(P, dh_barycenter(rs, P).barycenter)


def test_degenerate_inputs():
    rs = rs_of("A1")
    with pytest.raises(GeometryError):
        dh_barycenter(rs, convex_hull([(1,)]))
    with pytest.raises(GeometryError, match="chamber"):
        dh_barycenter(rs, convex_hull([(-1,), (1,)]))
    a2 = rs_of("A2")
    with pytest.raises(GeometryError):
        dh_barycenter(a2, convex_hull([(0, 0), (1, 0), (0, 1)]))  # (0, 1) pairs to -1/2 with alpha1


def test_zero_mass_rejected(monkeypatch):
    # a full-dimensional P+ always has positive mass; force a vanishing weight to reach the guard
    w = LinearFormProduct((((0, 0), 2),))
    assert integrate_over_simplex(w, None, STD) == 0
    monkeypatch.setattr(dhmeasure, "dh_weight", lambda _rs: w)
    with pytest.raises(DegenerateMeasureError):
        dh_barycenter(rs_of(torus=2), convex_hull([(0, 0), (1, 0), (0, 1)]))


def _mc_case(rng, dim):
    while True:
        verts = [tuple(Fraction(int(x), 4) for x in rng.integers(-8, 9, size=dim)) for _ in range(dim + 1)]
        if la.det([la.sub(v, verts[0]) for v in verts[1:]]) != 0:
            break
    factors = tuple((tuple(int(c) for c in rng.integers(-2, 3, size=dim)), int(rng.integers(1, 3)))
                    for _ in range(int(rng.integers(1, 3))))
    extra = int(rng.integers(0, dim)) if rng.random() < 0.5 else None
    return Simplex(verts), LinearFormProduct(factors), extra


def monte_carlo(S, w, extra, rng, n):
    """Rejection sampling in the bounding box: returns (estimate, standard error)."""
    v = np.array([[float(x) for x in p] for p in S.vertices])
    lo, hi = v.min(axis=0), v.max(axis=0)
    pts = rng.uniform(lo, hi, size=(n, v.shape[1]))
    # barycentric coordinates
    t = np.linalg.solve((v[1:] - v[0]).T, (pts - v[0]).T).T
    inside = (t >= 0).all(axis=1) & (t.sum(axis=1) <= 1)
    f = np.ones(n)
    for form, m in w.factors:
        f *= (pts @ np.array([float(c) for c in form])) ** m
    if extra is not None:
        f *= pts[:, extra]
    vals = np.where(inside, f, 0.0) * float(np.prod(hi - lo))
    return vals.mean(), vals.std(ddof=1) / np.sqrt(n)


def test_monte_carlo_oracle():
    rng = np.random.default_rng(20240611)
    for k in range(20):
        S, w, extra = _mc_case(rng, 1 + k % 3)
        exact = float(integrate_over_simplex(w, extra, S))
        est, se = monte_carlo(S, w, extra, rng, 10**6)
        assert abs(est - exact) <= 3 * se + 1e-12, (k, exact, est, se)
