"""Kähler-Einstein verdict and greatest Ricci lower bound from (root system, P+).

Both are read off the DH barycenter ``A = bar_DH(P+)`` and ``B = 2 rho``:

* KE exists iff ``A - B`` is a strictly positive combination of simple roots
  with no torus component.
* Otherwise ``R = s / (1 + s)`` where ``s`` is how far one can walk from ``B``
  in the direction ``B - A`` while staying in ``P+ + cone(-alpha_i)``.

Every function takes a ``dilation`` lam: the data (lam P+, 2 lam rho) must give
the same answers as (P+, 2 rho), which is a useful self-check.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from kepoly import linalg as la
from kepoly.dhmeasure import DHResult, dh_barycenter
from kepoly.geometry import (UNBOUNDED, GeometryError, RationalPolyhedron, RationalPolytope, contains,
                             minkowski_with_negative_root_cone, ray_exit)
from kepoly.linalg import Vector
from kepoly.roots import RootSystem, simple_root_coordinates


class Verdict(str, enum.Enum):
    KE_EXISTS = "KE_EXISTS"
    NO_KE = "NO_KE"
    BOUNDARY = "BOUNDARY"


class InvalidFanoDataError(GeometryError):
    """2 rho is not interior to -Xi + P+, so the data cannot be Fano."""


@dataclass(frozen=True)
class KEVerdict:
    barycenter: Vector
    shifted: Vector
    cone_coeffs: Vector
    toric_residual: Vector
    verdict: Verdict
    dh: DHResult


@dataclass(frozen=True)
class RLBResult:
    R: Fraction
    s_star: Fraction | str
    point_A: Vector
    point_B: Vector
    point_C: Vector | None
    ratio_BC_AC: Fraction | None
    hypothesis_met: bool  # False when the data already admit a KE metric (or sit on the boundary)
    verdict: Verdict


def _dilate(Pplus: RationalPolytope, dilation) -> tuple[RationalPolytope, Fraction]:
    lam = la.frac(dilation)
    if lam <= 0:
        raise GeometryError("dilation must be positive")
    return (Pplus if lam == 1 else Pplus.scaled(lam)), lam


def classify(cone_coeffs: Vector, toric_residual: Vector) -> Verdict:
    if any(x != 0 for x in toric_residual) or any(c < 0 for c in cone_coeffs):
        return Verdict.NO_KE
    if all(c > 0 for c in cone_coeffs):
        return Verdict.KE_EXISTS
    return Verdict.BOUNDARY


def ke_verdict(rs: RootSystem, Pplus: RationalPolytope, dilation=1) -> KEVerdict:
    P, lam = _dilate(Pplus, dilation)
    dh = dh_barycenter(rs, P)
    shifted = la.sub(dh.barycenter, la.scale(lam, rs.two_rho))
    coeffs, residual = simple_root_coordinates(rs, shifted)
    return KEVerdict(dh.barycenter, shifted, coeffs, residual, classify(coeffs, residual), dh)


def query_point(rs: RootSystem, barycenter, t, dilation=1) -> Vector:
    """(2 rho - t bar) / (1 - t) for t < 1, with 2 rho scaled by ``dilation``."""
    t = la.frac(t)
    if t >= 1:
        raise ValueError("t must be < 1")
    b = la.scale(la.frac(dilation), rs.two_rho)
    return la.scale(1 / (1 - t), la.sub(b, la.scale(t, la.vec(barycenter))))


def negative_cone_body(rs: RootSystem, Pplus: RationalPolytope, dilation=1) -> RationalPolyhedron:
    P, _ = _dilate(Pplus, dilation)
    return minkowski_with_negative_root_cone(rs, P)


def _length_ratio(rs: RootSystem, a: Vector, b: Vector, c: Vector) -> Fraction:
    """|BC| / |AC| for collinear points, measured with the root-system pairing."""
    bc = la.sub(c, b)
    ac = la.sub(c, a)
    sq = rs.pairing(bc, bc) / rs.pairing(ac, ac)
    n, d = isqrt(sq.numerator), isqrt(sq.denominator)
    if n * n != sq.numerator or d * d != sq.denominator:  # pragma: no cover - collinearity guard
        raise ArithmeticError("ratio is not rational; points are not collinear")
    return Fraction(n, d)


def greatest_ricci_lower_bound(rs: RootSystem, Pplus: RationalPolytope, dilation=1) -> RLBResult:
    """R(X) = s*/(1+s*) with s* the exit parameter of the ray B + s(B - A)."""
    P, lam = _dilate(Pplus, dilation)
    kv = ke_verdict(rs, P)
    A = kv.barycenter
    B = la.scale(lam, rs.two_rho)
    Q = minkowski_with_negative_root_cone(rs, P)
    if not contains(Q, B, "strict"):
        raise InvalidFanoDataError(
            "2rho is not interior to -Xi + P+; a Fano compactification always has 4rho in Int(2P)")
    direction = la.sub(B, A)
    if all(x == 0 for x in direction):
        s = UNBOUNDED
    else:
        s = ray_exit(Q, B, direction)
    if s == UNBOUNDED:
        return RLBResult(Fraction(1), UNBOUNDED, A, B, None, None, False, kv.verdict)
    C = la.add(B, la.scale(s, direction))
    R = s / (1 + s)
    return RLBResult(R, s, A, B, C, _length_ratio(rs, A, B, C), kv.verdict == Verdict.NO_KE, kv.verdict)
