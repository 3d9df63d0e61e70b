"""Exact integrals of the Duistermaat-Heckman weight over rational polytopes.

The weight is prod_{alpha > 0} <alpha, p>^2.  On a simplex with vertices
v_0..v_r we substitute p = sum lam_i v_i, expand the product of linear forms
in the barycentric variables and integrate monomials with

    int_S prod lam_i^a_i dp = |det(v_i - v_0)| * prod a_i! / (r + sum a_i)!
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Sequence

from kepoly import linalg as la
from kepoly.geometry import GeometryError, RationalPolytope, Simplex, in_closed_chamber, triangulate
from kepoly.linalg import Vector
from kepoly.roots import RootSystem

Poly = dict[tuple[int, ...], Fraction]


class DegenerateMeasureError(GeometryError):
    """The DH mass of the polytope vanishes."""


@dataclass(frozen=True)
class LinearFormProduct:
    """prod_i <form_i, p>^mult_i with forms given as coordinate covectors."""

    factors: tuple[tuple[Vector, int], ...]

    def __post_init__(self):
        if any(m < 0 for _, m in self.factors):
            raise ValueError("multiplicities must be nonnegative")

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.factors)

    def __call__(self, p: Sequence) -> Fraction:
        x = la.vec(p)
        out = Fraction(1)
        for form, m in self.factors:
            out *= la.dot(form, x) ** m
        return out


@dataclass(frozen=True)
class DHResult:
    volume: Fraction
    barycenter: Vector              # realization coordinates
    root_coordinates: Vector        # (simple-root coefficients, torus coordinates)
    coordinate_basis: str = "simple_roots"

    @property
    def reported(self) -> Vector:
        return self.root_coordinates if self.coordinate_basis == "simple_roots" else self.barycenter


def dh_weight(rs: RootSystem) -> LinearFormProduct:
    return LinearFormProduct(tuple((rs.covector(a), 2) for a in rs.positive_roots))


def _times_linear(poly: Poly, coeffs: Sequence[Fraction]) -> Poly:
    out: Poly = defaultdict(Fraction)
    for exp, c in poly.items():
        for i, a in enumerate(coeffs):
            if a:
                e = list(exp)
                e[i] += 1
                out[tuple(e)] += c * a
    return {e: c for e, c in out.items() if c}


def _expand(w: LinearFormProduct, vertices: Sequence[Vector]) -> Poly:
    n = len(vertices)
    poly: Poly = {(0,) * n: Fraction(1)}
    for form, m in w.factors:
        coeffs = [la.dot(form, v) for v in vertices]
        for _ in range(m):
            poly = _times_linear(poly, coeffs)
    return poly


def _dirichlet(poly: Poly, r: int, absdet: Fraction) -> Fraction:
    total = Fraction(0)
    for exp, c in poly.items():
        num = 1
        for a in exp:
            num *= factorial(a)
        total += c * Fraction(num, factorial(r + sum(exp)))
    return absdet * total


def integrate_over_simplex(w: LinearFormProduct, extra: int | None, S: Simplex) -> Fraction:
    """int_S p_extra * w(p) dp, or int_S w(p) dp when ``extra`` is None."""
    poly = _expand(w, S.vertices)
    if extra is not None:
        poly = _times_linear(poly, [v[extra] for v in S.vertices])
    return _dirichlet(poly, S.dim, abs(S.det))


def _moments(w: LinearFormProduct, S: Simplex) -> tuple[Fraction, list[Fraction]]:
    base = _expand(w, S.vertices)
    absdet = abs(S.det)
    mass = _dirichlet(base, S.dim, absdet)
    firsts = [_dirichlet(_times_linear(base, [v[j] for v in S.vertices]), S.dim, absdet)
              for j in range(S.dim)]
    return mass, firsts


def _check_input(rs: RootSystem, Pplus: RationalPolytope) -> None:
    if Pplus.dim != rs.rank:
        raise GeometryError(f"polytope lives in dimension {Pplus.dim}, root system has rank {rs.rank}")
    Pplus.require_full_dimensional("DH integration")
    outside = [v for v in Pplus.vertices if not in_closed_chamber(rs, v)]
    if outside:
        raise GeometryError(f"vertex {[la.fmt(x) for x in outside[0]]} lies outside the closed chamber")


def dh_volume(rs: RootSystem, Pplus: RationalPolytope, base: Sequence | None = None) -> Fraction:
    _check_input(rs, Pplus)
    w = dh_weight(rs)
    return sum((integrate_over_simplex(w, None, S) for S in triangulate(Pplus, base)), Fraction(0))


def dh_barycenter(rs: RootSystem, Pplus: RationalPolytope, base: Sequence | None = None,
                  coordinate_basis: str = "simple_roots") -> DHResult:
    """DH mass and barycenter, summed exactly over a pulling triangulation."""
    _check_input(rs, Pplus)
    w = dh_weight(rs)
    mass = Fraction(0)
    firsts = [Fraction(0)] * rs.rank
    for S in triangulate(Pplus, base):
        m, f = _moments(w, S)
        mass += m
        firsts = [a + b for a, b in zip(firsts, f)]
    if mass == 0:
        raise DegenerateMeasureError("DH mass is zero: the polytope lies in a root hyperplane")
    bar = tuple(f / mass for f in firsts)
    return DHResult(mass, bar, rs.root_coordinates(bar), coordinate_basis)
