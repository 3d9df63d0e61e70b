"""Exact rational convex geometry.

Polytopes and polyhedra carry both a V-representation (vertices, recession
rays) and, in ambient dimension <= 3, an H-representation: halfspaces
``normal . x <= offset`` plus equations ``normal . x == offset`` for the
affine hull when the body is lower dimensional.  Normals are primitive
integer vectors, so the H-representation of a given set is unique and two
bodies compare equal iff they are the same set.

Facets are found by a brute-force double description on the homogenized
cone ``cone{(v, 1), (r, 0)}``: a facet of a k-dimensional pointed cone is
spanned by k - 1 independent generators.  All of that runs in Python
integers after clearing denominators (positive rescaling of a cone generator
does not change the cone).

In ambient dimension >= 4 no H-representation is built; membership and
ray-exit queries are answered by an exact LP over the generators instead.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import factorial
from typing import Sequence

from kepoly import linalg as la
from kepoly import lp
from kepoly.linalg import Vector
from kepoly.roots import RootSystem, weyl_orbit

HREP_MAX_DIM = 3
UNBOUNDED = "unbounded"

Halfspace = tuple[Vector, Fraction]


class GeometryError(ValueError):
    """Invalid geometric input (empty, degenerate, outside a body, ...)."""


class DegeneratePolytopeError(GeometryError):
    """A full-dimensional body was required."""


# ---------------------------------------------------------------------------
# cone facet enumeration


def _cross(vectors: Sequence[Sequence[int]], k: int) -> tuple[int, ...]:
    """Integer vector orthogonal to k-1 vectors of Z^k (zero iff dependent)."""
    if k == 1:
        return (1,)
    out = []
    for i in range(k):
        minor = [[v[j] for j in range(k) if j != i] for v in vectors]
        d = la.int_det(minor)
        out.append(d if i % 2 == 0 else -d)
    return tuple(out)


def _idot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def cone_facets(generators: Sequence[Sequence[Fraction]]):
    """Facets of the pointed cone spanned by ``generators`` (in Q^D).

    Returns ``(inequalities, equalities, k)`` where each inequality ``n`` is a
    primitive integer vector with ``n . g >= 0`` on all generators, the
    equalities span the orthogonal complement of the linear span, and ``k`` is
    the dimension of that span.
    """
    gens = [la.integral(g) for g in generators if any(x != 0 for x in g)]
    if not gens:
        raise GeometryError("cone has no nonzero generator")
    D = len(gens[0])
    reduced, pivots = la.rref(gens)
    k = len(pivots)
    equalities = la.nullspace(gens) if k < D else []
    proj = sorted({tuple(g[p] for p in pivots) for g in gens})
    facets = set()
    for combo in combinations(proj, k - 1):
        n = _cross(combo, k)
        if not any(n):
            continue
        signs = {(_idot(n, g) > 0) - (_idot(n, g) < 0) for g in proj}
        if 1 in signs and -1 in signs:
            continue
        if -1 in signs:
            n = tuple(-x for x in n)
        n = la.primitive(n)
        lifted = [0] * D
        for p, x in zip(pivots, n):
            lifted[p] = x
        facets.add(tuple(lifted))
    return sorted(facets), equalities, k


# ---------------------------------------------------------------------------
# bodies


def _sorted_unique(points) -> tuple[Vector, ...]:
    return tuple(sorted({la.vec(p) for p in points}))


@dataclass(frozen=True)
class RationalPolyhedron:
    """conv(vertices) + cone(rays), with its H-representation when dim <= 3."""

    dim: int
    vertices: tuple[Vector, ...]
    rays: tuple[Vector, ...] = ()
    halfspaces: tuple[Halfspace, ...] | None = None
    equalities: tuple[Halfspace, ...] = ()
    affine_dim: int = -1

    @property
    def is_degenerate(self) -> bool:
        return self.affine_dim < self.dim

    @property
    def has_hrep(self) -> bool:
        return self.halfspaces is not None

    def require_full_dimensional(self, what: str = "operation") -> None:
        if self.is_degenerate:
            raise DegeneratePolytopeError(
                f"{what} needs a full-dimensional body (affine dimension {self.affine_dim} < {self.dim})")


@dataclass(frozen=True)
class RationalPolytope(RationalPolyhedron):
    """Bounded polyhedron; ``rays`` is always empty."""

    def scaled(self, lam) -> RationalPolytope:
        lam = la.frac(lam)
        if lam <= 0:
            raise GeometryError("scale factor must be positive")
        return convex_hull([la.scale(lam, v) for v in self.vertices])

    def transformed(self, m) -> RationalPolytope:
        return convex_hull([la.matvec(m, v) for v in self.vertices])

    @property
    def volume(self) -> Fraction:
        return sum((s.volume for s in triangulate(self)), Fraction(0))


@dataclass(frozen=True)
class Simplex:
    vertices: tuple[Vector, ...]
    det: Fraction = field(init=False)

    def __post_init__(self):
        vs = tuple(la.vec(v) for v in self.vertices)
        object.__setattr__(self, "vertices", vs)
        d = len(vs[0])
        if len(vs) != d + 1:
            raise GeometryError(f"a {d}-simplex needs {d + 1} vertices")
        det = la.det([la.sub(v, vs[0]) for v in vs[1:]])
        if det == 0:
            raise DegeneratePolytopeError("simplex vertices are affinely dependent")
        object.__setattr__(self, "det", det)

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    @property
    def volume(self) -> Fraction:
        return abs(self.det) / factorial(self.dim)


def _build(points, rays, cls):
    points = _sorted_unique(points)
    rays_in = [la.vec(r) for r in rays if any(x != 0 for x in r)]
    if not points:
        raise GeometryError("need at least one point")
    d = len(points[0])
    if any(len(p) != d for p in points) or any(len(r) != d for r in rays_in):
        raise GeometryError("points of mixed dimension")
    gens = [p + (Fraction(1),) for p in points] + [r + (Fraction(0),) for r in rays_in]
    if d > HREP_MAX_DIM:
        return _build_without_hrep(points, rays_in, cls)
    ineqs, eqs, k = cone_facets(gens)
    D = d + 1
    # extreme generators: tight facet normals plus equalities have rank D - 1
    eq_rows = [tuple(e) for e in eqs]

    def extreme(g):
        tight = [n for n in ineqs if _idot(n, la.integral(g)) == 0]
        return la.rank([la.vec(t) for t in tight] + eq_rows) == D - 1

    vertices = tuple(p for p in points if extreme(p + (Fraction(1),)))
    ray_dirs = {}
    for r in rays_in:
        key = la.integral(r)
        if key not in ray_dirs and extreme(r + (Fraction(0),)):
            ray_dirs[key] = la.vec(key)
    halfspaces = []
    for n in ineqs:
        nx = n[:d]
        if not any(nx):
            continue  # the homogenizing coordinate's own facet
        halfspaces.append((la.vec(-x for x in nx), Fraction(n[d])))
    equalities = []
    for e in eqs:
        m = la.integral(e) if e[:d] and any(e[:d]) else None
        if m is None:
            continue
        equalities.append((la.vec(m[:d]), -Fraction(m[d])))
    kwargs = dict(dim=d, vertices=vertices,
                  halfspaces=tuple(sorted(halfspaces)),
                  equalities=tuple(sorted(equalities)), affine_dim=k - 1)
    if cls is RationalPolyhedron:
        kwargs["rays"] = tuple(sorted(ray_dirs.values()))
    return cls(**kwargs)


def _build_without_hrep(points, rays, cls):
    d = len(points[0])
    rays = sorted({la.vec(la.integral(r)) for r in rays})
    vertices = tuple(p for p in points
                     if not lp.in_hull([q for q in points if q != p], rays, p)
                     or len(points) == 1)
    rest = [la.sub(v, vertices[0]) for v in vertices[1:]] + list(rays)
    aff = la.rank(rest) if rest else 0
    kwargs = dict(dim=d, vertices=vertices, halfspaces=None, affine_dim=aff)
    if cls is RationalPolyhedron:
        kwargs["rays"] = tuple(rays)
    return cls(**kwargs)


def convex_hull(points: Sequence[Sequence]) -> RationalPolytope:
    """Exact convex hull with minimal vertex set and unique H-representation."""
    return _build(points, (), RationalPolytope)


def polyhedron(points: Sequence[Sequence], rays: Sequence[Sequence]) -> RationalPolyhedron:
    return _build(points, rays, RationalPolyhedron)


def polytope_from_halfspaces(halfspaces: Sequence[Halfspace], dim: int) -> RationalPolytope:
    """Vertex enumeration by brute force over dim-subsets of the halfspaces."""
    hs = [(la.vec(n), la.frac(b)) for n, b in halfspaces]
    found = set()
    for combo in combinations(hs, dim):
        x = la.solve([n for n, _ in combo], [b for _, b in combo])
        if x is None:
            continue
        if all(la.dot(n, x) <= b for n, b in hs):
            found.add(x)
    if not found:
        raise GeometryError("halfspaces describe an empty or unbounded set")
    return convex_hull(found)


# ---------------------------------------------------------------------------
# queries


def contains(body: RationalPolyhedron, point: Sequence, mode: str = "weak") -> bool:
    """Membership; ``strict`` means the relative interior."""
    if mode not in ("weak", "strict"):
        raise ValueError(f"mode must be 'weak' or 'strict', not {mode!r}")
    x = la.vec(point)
    if len(x) != body.dim:
        raise GeometryError(f"point has dimension {len(x)}, body has {body.dim}")
    if not body.has_hrep:
        if mode == "weak":
            return lp.in_hull(body.vertices, body.rays, x)
        return lp.in_relative_interior(body.vertices, body.rays, x)
    if any(la.dot(n, x) != b for n, b in body.equalities):
        return False
    if mode == "weak":
        return all(la.dot(n, x) <= b for n, b in body.halfspaces)
    return all(la.dot(n, x) < b for n, b in body.halfspaces)


def violated_halfspace(body: RationalPolyhedron, point: Sequence) -> Halfspace | None:
    x = la.vec(point)
    for n, b in body.equalities:
        if la.dot(n, x) != b:
            return (n, b)
    for n, b in body.halfspaces or ():
        if la.dot(n, x) > b:
            return (n, b)
    return None


def ray_exit(body: RationalPolyhedron, origin: Sequence, direction: Sequence):
    """Largest s with ``origin + s*direction`` in the body, or ``UNBOUNDED``."""
    o, d = la.vec(origin), la.vec(direction)
    if len(o) != body.dim or len(d) != body.dim:
        raise GeometryError("origin/direction dimension mismatch")
    if not body.has_hrep:
        try:
            s = lp.max_step(body.vertices, body.rays, o, d)
        except ValueError:
            raise GeometryError(f"origin {[la.fmt(x) for x in o]} lies outside the body") from None
        return UNBOUNDED if s is None else s
    bad = violated_halfspace(body, o)
    if bad is not None:
        n, b = bad
        raise GeometryError(
            f"origin {[la.fmt(x) for x in o]} violates {[la.fmt(x) for x in n]} . x <= {la.fmt(b)}")
    if any(la.dot(n, d) != 0 for n, _ in body.equalities):
        return Fraction(0)
    best = None
    for n, b in body.halfspaces:
        nd = la.dot(n, d)
        if nd > 0:
            s = (b - la.dot(n, o)) / nd
            if best is None or s < best:
                best = s
    return UNBOUNDED if best is None else best


# ---------------------------------------------------------------------------
# operations


def intersect_with_chamber(rs: RootSystem, P: RationalPolytope) -> RationalPolytope:
    """P cut by <alpha_i, x> >= 0 for every simple root."""
    P.require_full_dimensional("intersect_with_chamber")
    if not P.has_hrep:
        raise GeometryError(f"chamber clipping needs an H-representation (dimension <= {HREP_MAX_DIM})")
    if P.dim != rs.rank:
        raise GeometryError("polytope and root system dimensions differ")
    hs = list(P.halfspaces) + [(la.scale(-1, c), Fraction(0)) for c in rs.chamber_covectors()]
    try:
        out = polytope_from_halfspaces(hs, P.dim)
    except GeometryError:
        raise GeometryError("polytope does not meet the closed positive chamber") from None
    return out


def in_closed_chamber(rs: RootSystem, x: Sequence) -> bool:
    return all(la.dot(c, x) >= 0 for c in rs.chamber_covectors())


def minkowski_with_negative_root_cone(rs: RootSystem, Pplus: RationalPolyhedron) -> RationalPolyhedron:
    """P+ + cone(-alpha_i), the closure of -Xi + P+."""
    return polyhedron(Pplus.vertices, [la.scale(-1, a) for a in rs.simple_roots])


def _project_chart(points: Sequence[Vector], normal: Vector) -> tuple[int, list[Vector]]:
    """Drop the coordinate where the facet normal is nonzero: affine bijection on the facet."""
    i = next(j for j, x in enumerate(normal) if x != 0)
    return i, [p[:i] + p[i + 1:] for p in points]


def _triangulate_vertices(P: RationalPolytope, base: Vector) -> list[tuple[Vector, ...]]:
    d = P.dim
    if d == 1:
        return [tuple(P.vertices)]
    out = []
    for n, b in P.halfspaces:
        if la.dot(n, base) == b:
            continue
        face = [v for v in P.vertices if la.dot(n, v) == b]
        i, proj = _project_chart(face, n)
        back = dict(zip(proj, face))
        F = convex_hull(proj)
        fbase = min(proj, key=lambda q: back[q])
        for simp in _triangulate_vertices(F, fbase):
            out.append((base,) + tuple(back[q] for q in simp))
    return out


def triangulate(P: RationalPolytope, base: Sequence | None = None) -> list[Simplex]:
    """Pulling triangulation: fan from ``base`` (default lexicographic minimum) over facets."""
    P.require_full_dimensional("triangulate")
    if not P.has_hrep:
        raise GeometryError(f"triangulation needs an H-representation (dimension <= {HREP_MAX_DIM})")
    b = P.vertices[0] if base is None else la.vec(base)
    if b not in P.vertices:
        raise GeometryError("triangulation base must be a vertex")
    return [Simplex(s) for s in _triangulate_vertices(P, b)]


def shoelace_area(polygon: Sequence[Sequence[Fraction]]) -> Fraction:
    """Area of a simple polygon given in cyclic order."""
    n = len(polygon)
    acc = Fraction(0)
    for i in range(n):
        x0, y0 = polygon[i]
        x1, y1 = polygon[(i + 1) % n]
        acc += x0 * y1 - x1 * y0
    return abs(acc) / 2


def polygon_cycle(P: RationalPolytope) -> list[Vector]:
    """Vertices of a 2-D polytope in counter-clockwise order starting at the lex minimum."""
    if P.dim != 2:
        raise GeometryError("polygon_cycle needs a planar polytope")
    P.require_full_dimensional("polygon_cycle")
    start = P.vertices[0]
    rest = [v for v in P.vertices if v != start]

    def cmp_key(v):
        dx, dy = v[0] - start[0], v[1] - start[1]
        # start is lex-min, so all others lie in the half plane dx > 0 or dx == 0, dy > 0
        return (0, dy / dx) if dx != 0 else (1, Fraction(0))
    return [start] + sorted(rest, key=cmp_key)


def weyl_hull(rs: RootSystem, Pplus: RationalPolytope) -> RationalPolytope:
    """The W-invariant polytope P with P+ = P cut by the chamber: hull of W . vertices."""
    pts = set()
    for v in Pplus.vertices:
        pts.update(weyl_orbit(rs, v))
    return convex_hull(sorted(pts))


def is_weyl_invariant(rs: RootSystem, P: RationalPolytope) -> bool:
    verts = set(P.vertices)
    return all(set(weyl_orbit(rs, v)) <= verts for v in verts)
