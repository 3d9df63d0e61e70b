"""Root systems of reductive groups with an explicit rational realization.

A reductive group is described by its semisimple factors (Cartan labels) and
the rank of its central torus.  The Lie algebra ``a`` of the compact-free part
of a maximal torus is realized as Q^r; roots are rational vectors in it and
the scalar product is an explicit rational Gram matrix, block diagonal with
one block per simple factor and an identity block for the torus.

Default realizations:

* ``A_n``: coordinates are simple-root coordinates, ``<a_i, a_i> = 1`` and
  ``<a_i, a_{i+1}> = -1/2``.
* ``B_n``: Euclidean, ``a_1 = e_1`` (short), ``a_i = e_i - e_{i-1}``.  For
  n = 2 this is ``a_1 = (1, 0)``, ``a_2 = (-1, 1)``.
* ``C_n``: Euclidean, ``a_1 = 2 e_1`` (long), ``a_i = e_i - e_{i-1}``.
* ``D_n``: Euclidean, ``a_1 = e_1 + e_2``, ``a_i = e_i - e_{i-1}``.
* ``G2``: simple-root coordinates, short root norm^2 1, long root norm^2 3.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import factorial, prod
from typing import Sequence

from kepoly import linalg as la
from kepoly.linalg import Matrix, Vector

MAX_WEYL_ORDER = 1152


class RootSystemError(ValueError):
    """Invalid group description or root-system query."""


_LABEL = re.compile(r"^\s*([ABCDG])_?(\d+)\s*$", re.IGNORECASE)


def parse_label(label: str) -> tuple[str, int]:
    m = _LABEL.match(label)
    if not m:
        raise RootSystemError(f"unsupported Cartan label {label!r}")
    kind, n = m.group(1).upper(), int(m.group(2))
    if kind == "G":
        if n != 2:
            raise RootSystemError(f"unsupported Cartan label {label!r}: only G2 exists")
    elif kind == "A":
        if not 1 <= n <= 4:
            raise RootSystemError(f"unsupported Cartan label {label!r}: need 1 <= n <= 4")
    elif not 2 <= n <= 4:
        raise RootSystemError(f"unsupported Cartan label {label!r}: need 2 <= n <= 4")
    return kind, n


def weyl_order(kind: str, n: int) -> int:
    if kind == "A":
        return factorial(n + 1)
    if kind in "BC":
        return 2**n * factorial(n)
    if kind == "D":
        return 2 ** (n - 1) * factorial(n)
    return 12


def positive_root_count(kind: str, n: int) -> int:
    if kind == "A":
        return n * (n + 1) // 2
    if kind in "BC":
        return n * n
    if kind == "D":
        return n * (n - 1)
    return 6


@dataclass(frozen=True)
class GroupSpec:
    """Semisimple factors plus torus rank, with optional per-factor scaling."""

    factors: tuple[str, ...] = ()
    torus_rank: int = 0
    normalization: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if isinstance(self.torus_rank, bool) or not isinstance(self.torus_rank, int):
            raise RootSystemError("torus_rank must be an integer")
        if self.torus_rank < 0:
            raise RootSystemError("torus_rank must be nonnegative")
        if not self.factors and self.torus_rank == 0:
            raise RootSystemError("need at least one factor or a positive torus rank")
        for f in self.factors:
            parse_label(f)
        if self.normalization is not None:
            norm = tuple(la.frac(x) for x in self.normalization)
            if len(norm) != len(self.factors):
                raise RootSystemError("normalization needs one scale per factor")
            if any(x <= 0 for x in norm):
                raise RootSystemError("normalization scales must be positive")
            object.__setattr__(self, "normalization", norm)

    @property
    def scales(self) -> tuple[Fraction, ...]:
        return self.normalization or (Fraction(1),) * len(self.factors)

    def to_json(self) -> dict:
        out: dict = {"factors": list(self.factors), "torus_rank": self.torus_rank}
        if self.normalization is not None:
            out["normalization"] = [la.fmt(x) for x in self.normalization]
        return out

    @classmethod
    def from_json(cls, data: dict) -> GroupSpec:
        if not isinstance(data, dict):
            raise RootSystemError("group must be an object")
        factors = data.get("factors", [])
        if not isinstance(factors, list) or not all(isinstance(f, str) for f in factors):
            raise RootSystemError("group.factors must be a list of Cartan labels")
        norm = data.get("normalization")
        return cls(tuple(factors), data.get("torus_rank", 0),
                   None if norm is None else tuple(la.frac(x) for x in norm))


def _factor_realization(kind: str, n: int) -> tuple[list[Vector], list[list[Fraction]]]:
    """Simple roots and Gram block of one simple factor, in its own Q^n."""
    one, half = Fraction(1), Fraction(1, 2)
    if kind in "AG":
        simple = [la.unit(n, i) for i in range(n)]
        if kind == "A":
            gram = [[one if i == j else (-half if abs(i - j) == 1 else Fraction(0))
                     for j in range(n)] for i in range(n)]
        else:
            gram = [[one, Fraction(-3, 2)], [Fraction(-3, 2), Fraction(3)]]
        return simple, gram
    gram = [list(r) for r in la.identity(n)]
    first = {"B": la.unit(n, 0),
             "C": la.scale(2, la.unit(n, 0)),
             "D": la.add(la.unit(n, 0), la.unit(n, 1))}[kind]
    simple = [first] + [la.sub(la.unit(n, i), la.unit(n, i - 1)) for i in range(1, n)]
    return simple, gram


@dataclass(frozen=True)
class WeylGroup:
    generators: tuple[Matrix, ...]
    elements: tuple[Matrix, ...]

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True, eq=False)
class RootSystem:
    """Root datum realized in Q^rank.

    ``simple_roots`` and ``positive_roots`` are vectors of ``a``; the pairing is
    ``a^T gram b``.  ``toric_basis`` spans the central (torus) block, which is
    orthogonal to every root.
    """

    gram: Matrix
    simple_roots: tuple[Vector, ...]
    toric_basis: tuple[Vector, ...]
    spec: GroupSpec | None = None
    positive_roots: tuple[Vector, ...] = field(init=False)
    two_rho: Vector = field(init=False)

    def __post_init__(self):
        r = len(self.gram)
        if any(len(row) != r for row in self.gram):
            raise RootSystemError("gram must be square")
        if len(self.simple_roots) + len(self.toric_basis) != r:
            raise RootSystemError("simple roots and toric basis must form a basis")
        if la.rank(self.basis_columns) != r:
            raise RootSystemError("simple roots and toric basis are linearly dependent")
        object.__setattr__(self, "positive_roots", self._generate_positive_roots())
        two_rho = la.zeros(r)
        for a in self.positive_roots:
            two_rho = la.add(two_rho, a)
        object.__setattr__(self, "two_rho", two_rho)

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def semisimple_rank(self) -> int:
        return len(self.simple_roots)

    @cached_property
    def basis_columns(self) -> Matrix:
        """Rows are the basis vectors (simple roots first, then toric basis)."""
        return tuple(self.simple_roots) + tuple(self.toric_basis)

    @cached_property
    def _to_root_coords(self) -> Matrix:
        # columns of B are basis vectors; coords = B^{-1} v
        return la.inverse(la.transpose(self.basis_columns))

    def pairing(self, a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
        if len(a) != self.rank or len(b) != self.rank:
            raise RootSystemError(f"pairing expects vectors of dimension {self.rank}")
        return la.dot(a, la.matvec(self.gram, b))

    def covector(self, a: Sequence[Fraction]) -> Vector:
        """Coordinate covector of p -> <a, p>."""
        return la.matvec(self.gram, a)

    def root_coordinates(self, v: Sequence[Fraction]) -> Vector:
        """Coordinates of ``v`` in the basis (simple roots, toric basis)."""
        if len(v) != self.rank:
            raise RootSystemError(f"expected a vector of dimension {self.rank}")
        return la.matvec(self._to_root_coords, la.vec(v))

    def from_root_coordinates(self, c: Sequence[Fraction]) -> Vector:
        if len(c) != self.rank:
            raise RootSystemError(f"expected {self.rank} coordinates")
        out = la.zeros(self.rank)
        for ci, b in zip(la.vec(c), self.basis_columns):
            out = la.add(out, la.scale(ci, b))
        return out

    def reflection_matrix(self, alpha: Vector) -> Matrix:
        n2 = self.pairing(alpha, alpha)
        cov = self.covector(alpha)
        return tuple(
            tuple(Fraction(int(i == j)) - 2 * alpha[i] * cov[j] / n2 for j in range(self.rank))
            for i in range(self.rank))

    def reflect(self, alpha: Vector, v: Sequence[Fraction]) -> Vector:
        c = 2 * self.pairing(alpha, v) / self.pairing(alpha, alpha)
        return la.sub(v, la.scale(c, alpha))

    def _generate_positive_roots(self) -> tuple[Vector, ...]:
        s = self.semisimple_rank
        roots = set(self.simple_roots)
        queue = deque(self.simple_roots)
        while queue:
            v = queue.popleft()
            for a in self.simple_roots:
                w = self.reflect(a, v)
                if w not in roots:
                    roots.add(w)
                    queue.append(w)
        positive = []
        for v in roots:
            c = self.root_coordinates(v)[:s]
            if all(x >= 0 for x in c):
                positive.append((sum(c), tuple(-x for x in c), v))
        positive.sort()
        return tuple(v for _, _, v in positive)

    @cached_property
    def weyl_group(self) -> WeylGroup:
        return weyl_group(self)

    def chamber_covectors(self) -> tuple[Vector, ...]:
        """Covectors whose nonnegativity cuts out the closed positive chamber."""
        return tuple(self.covector(a) for a in self.simple_roots)


def build_root_system(spec: GroupSpec) -> RootSystem:
    """Block-diagonal realization of ``spec``; torus block last."""
    blocks = []
    for label, lam in zip(spec.factors, spec.scales):
        kind, n = parse_label(label)
        simple, gram = _factor_realization(kind, n)
        blocks.append((n, simple, [[lam * x for x in row] for row in gram]))
    r = sum(n for n, _, _ in blocks) + spec.torus_rank
    gram = [[Fraction(0)] * r for _ in range(r)]
    simple_roots: list[Vector] = []
    off = 0
    for n, simple, g in blocks:
        for i in range(n):
            for j in range(n):
                gram[off + i][off + j] = g[i][j]
        for a in simple:
            simple_roots.append(la.zeros(off) + a + la.zeros(r - off - n))
        off += n
    toric = []
    for k in range(spec.torus_rank):
        gram[off + k][off + k] = Fraction(1)
        toric.append(la.unit(r, off + k))
    rs = RootSystem(tuple(map(tuple, gram)), tuple(simple_roots), tuple(toric), spec)
    expected = sum(positive_root_count(*parse_label(f)) for f in spec.factors)
    if len(rs.positive_roots) != expected:  # pragma: no cover - realization bug
        raise RootSystemError(f"realization produced {len(rs.positive_roots)} positive roots, expected {expected}")
    return rs


def pairing(rs: RootSystem, a: Sequence, b: Sequence) -> Fraction:
    return rs.pairing(la.vec(a), la.vec(b))


def weyl_group(rs: RootSystem) -> WeylGroup:
    """Enumerate W by closure of the simple reflections."""
    if rs.spec is not None:
        order = prod(weyl_order(*parse_label(f)) for f in rs.spec.factors)
        if order > MAX_WEYL_ORDER:
            raise RootSystemError(f"|W| = {order} exceeds the supported bound {MAX_WEYL_ORDER}")
    gens = tuple(rs.reflection_matrix(a) for a in rs.simple_roots)
    ident = la.identity(rs.rank)
    seen = {ident}
    queue = deque([ident])
    while queue:
        g = queue.popleft()
        for s in gens:
            h = la.matmul(s, g)
            if h not in seen:
                if len(seen) >= MAX_WEYL_ORDER:
                    raise RootSystemError(f"|W| exceeds the supported bound {MAX_WEYL_ORDER}")
                seen.add(h)
                queue.append(h)
    return WeylGroup(gens, tuple(sorted(seen)))


def weyl_orbit(rs: RootSystem, v: Sequence) -> list[Vector]:
    """W-orbit of ``v``, lexicographically sorted."""
    start = la.vec(v)
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for a in rs.simple_roots:
            y = rs.reflect(a, x)
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return sorted(seen)


def simple_root_coordinates(rs: RootSystem, v: Sequence) -> tuple[Vector, Vector]:
    """Split ``v`` as sum c_i alpha_i + toric residual."""
    c = rs.root_coordinates(la.vec(v))
    s = rs.semisimple_rank
    residual = la.zeros(rs.rank)
    for t, b in zip(c[s:], rs.toric_basis):
        residual = la.add(residual, la.scale(t, b))
    return c[:s], residual


def transform_root_system(rs: RootSystem, m: Matrix) -> RootSystem:
    """Realization moved by an isometry ``m`` of the pairing (e.g. a Weyl element).

    The new simple roots are ``m a_i``; the chamber moves with them.
    """
    mt = la.transpose(m)
    if la.matmul(la.matmul(mt, rs.gram), m) != rs.gram:
        raise RootSystemError("transformation does not preserve the pairing")
    return RootSystem(rs.gram,
                      tuple(la.matvec(m, a) for a in rs.simple_roots),
                      tuple(la.matvec(m, t) for t in rs.toric_basis),
                      rs.spec)
