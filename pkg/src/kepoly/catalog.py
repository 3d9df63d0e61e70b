"""Builtin inputs: the three group compactifications X0, X1, X2 and toric checks.

Vertices are stored in simple-root coordinates (torus coordinates last), which
is how the case studies are usually written down.

* X0: wonderful compactification of PGL2 (= P^3), P = [-2, 2].
* X1: wonderful compactification of PGL3; P+ is the A2 hexagon clipped to
  the chamber.
* X2: blow-up of the wonderful compactification of Sp4 along its closed
  orbit.  In the Euclidean B2 plane (a1 = (1,0), a2 = (-1,1)) its P+ is the
  pentagon (0,0), (5/2,5/2), (2,3), (1/2,7/2), (0,7/2); the map
  (u, v) -> (u + v, v) converts to simple-root coordinates.
* P2, P1xP1, Bl1P2: anticanonical reflexive polygons of toric surfaces.
"""
from __future__ import annotations

from dataclasses import dataclass

from kepoly import linalg as la
from kepoly.geometry import RationalPolytope, convex_hull
from kepoly.linalg import Vector
from kepoly.roots import GroupSpec, RootSystem, build_root_system, weyl_orbit


class UnknownExampleError(KeyError):
    pass


@dataclass(frozen=True)
class NamedExample:
    name: str
    spec: GroupSpec
    pplus_vertices: tuple[Vector, ...]  # simple-root coordinates
    provenance: str

    def root_system(self) -> RootSystem:
        return build_root_system(self.spec)

    def build(self) -> tuple[RootSystem, RationalPolytope]:
        rs = self.root_system()
        return rs, convex_hull([rs.from_root_coordinates(v) for v in self.pplus_vertices])


def _v(*rows) -> tuple[Vector, ...]:
    return tuple(la.vec(r) for r in rows)


_EXAMPLES = {
    "X0": NamedExample(
        "X0", GroupSpec(("A1",)), _v([0], [2]),
        "wonderful compactification of PGL2; P = [-2, 2] with the positive root sent to 1"),
    "X1": NamedExample(
        "X1", GroupSpec(("A2",)), _v([0, 0], [3, "3/2"], [3, 3], ["3/2", 3]),
        "wonderful compactification of PGL3; hull of the W-orbit of 3(a1 + a2), clipped to the chamber"),
    "X2": NamedExample(
        "X2", GroupSpec(("B2",)), _v([0, 0], [5, "5/2"], [5, 3], [4, "7/2"], ["7/2", "7/2"]),
        "blow-up of the wonderful Sp4 compactification along the closed orbit; "
        "Euclidean pentagon (0,0),(5/2,5/2),(2,3),(1/2,7/2),(0,7/2)"),
    "P2": NamedExample(
        "P2", GroupSpec((), 2), _v([-1, -1], [2, -1], [-1, 2]),
        "projective plane, anticanonical triangle"),
    "P1xP1": NamedExample(
        "P1xP1", GroupSpec((), 2), _v([-1, -1], [1, -1], [1, 1], [-1, 1]),
        "product of two projective lines, anticanonical square"),
    "Bl1P2": NamedExample(
        "Bl1P2", GroupSpec((), 2), _v([-1, -1], [2, -1], [0, 1], [-1, 1]),
        "projective plane blown up at a torus-fixed point: the P2 triangle with one corner cut by y <= 1"),
}


def names() -> list[str]:
    return list(_EXAMPLES)


def builtin(name: str) -> NamedExample:
    try:
        return _EXAMPLES[name]
    except KeyError:
        raise UnknownExampleError(f"unknown builtin {name!r}; choose from {', '.join(_EXAMPLES)}") from None


def wonderful_polytope(rs: RootSystem) -> RationalPolytope:
    """Hull of the W-orbit of 2 rho + sum of simple roots."""
    top = rs.two_rho
    for a in rs.simple_roots:
        top = la.add(top, a)
    return convex_hull(weyl_orbit(rs, top))
