"""Exact two-phase simplex over ``Fraction``.

Solves ``max c.x  s.t.  A x = b, x >= 0`` with Bland's rule, so it always
terminates.  Dense tableau; meant for problems with a few dozen columns.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from kepoly import linalg as la
from kepoly.linalg import Vector


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Fraction | None = None
    x: Vector | None = None


def _pivot(t: list[list[Fraction]], row: int, col: int) -> None:
    inv = 1 / t[row][col]
    t[row] = [v * inv for v in t[row]]
    for i in range(len(t)):
        if i != row and t[i][col] != 0:
            f = t[i][col]
            t[i] = [a - f * b for a, b in zip(t[i], t[row])]


def _run(t: list[list[Fraction]], basis: list[int], ncols: int, allowed: int) -> bool:
    """Simplex iterations on tableau whose last row is the reduced cost row.

    Returns False if unbounded.  Columns ``>= allowed`` never enter.
    """
    m = len(basis)
    while True:
        obj = t[m]
        col = next((j for j in range(allowed) if obj[j] < 0), None)
        if col is None:
            return True
        best = None
        row = None
        for i in range(m):
            a = t[i][col]
            if a > 0:
                ratio = t[i][ncols] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[row]):
                    best, row = ratio, i
        if row is None:
            return False
        _pivot(t, row, col)
        basis[row] = col


def linprog(c: Sequence, a: Sequence[Sequence], b: Sequence) -> LPResult:
    """Maximize ``c.x`` subject to ``a x = b``, ``x >= 0``; exact."""
    c = la.vec(c)
    n = len(c)
    rows = [la.vec(r) for r in a]
    rhs = list(la.vec(b))
    if any(len(r) != n for r in rows):
        raise ValueError("constraint matrix has the wrong width")
    for i, bi in enumerate(rhs):
        if bi < 0:
            rows[i] = la.scale(-1, rows[i])
            rhs[i] = -bi
    m = len(rows)
    width = n + m
    # phase 1: artificials n..n+m-1
    t = []
    for i, (r, bi) in enumerate(zip(rows, rhs)):
        t.append(list(r) + [Fraction(int(k == i)) for k in range(m)] + [bi])
    obj = [Fraction(0)] * (width + 1)
    for i in range(m):
        obj = [o - v for o, v in zip(obj, t[i])]
    for i in range(m):
        obj[n + i] = Fraction(0)
    t.append(obj)
    basis = [n + i for i in range(m)]
    _run(t, basis, width, width)
    if t[m][width] != 0:
        return LPResult("infeasible")
    # drive remaining artificials out of the basis
    for i in range(m):
        if basis[i] >= n:
            col = next((j for j in range(n) if t[i][j] != 0), None)
            if col is not None:
                _pivot(t, i, col)
                basis[i] = col
    # phase 2
    obj = [Fraction(0)] * (width + 1)
    for j in range(n):
        obj[j] = -c[j]
    t[m] = obj
    for i in range(m):
        j = basis[i]
        if j < n and t[m][j] != 0:
            f = t[m][j]
            t[m] = [a - f * bv for a, bv in zip(t[m], t[i])]
    if not _run(t, basis, width, n):
        return LPResult("unbounded")
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = t[i][width]
    return LPResult("optimal", la.dot(c, x), tuple(x))


def _generator_system(vertices, rays, extra_cols=()):
    """Columns [vertices | rays | extra] for sum lam v + sum mu r (+ extra) = p, sum lam = 1."""
    d = len(vertices[0])
    cols = [tuple(v) + (Fraction(1),) for v in vertices]
    cols += [tuple(r) + (Fraction(0),) for r in rays]
    cols += [tuple(e) for e in extra_cols]
    return [tuple(col[i] for col in cols) for i in range(d + 1)]


def in_hull(vertices, rays, point) -> bool:
    """Exact test of ``point`` in conv(vertices) + cone(rays)."""
    a = _generator_system(vertices, rays)
    res = linprog([0] * len(a[0]), a, tuple(point) + (Fraction(1),))
    return res.status == "optimal"


def in_relative_interior(vertices, rays, point) -> bool:
    """``point`` is a combination with every weight strictly positive.

    Variables: lam = tau + lam', mu = tau + mu', tau <= 1 (slack sigma).
    Maximize tau; relative interior iff the optimum is positive.
    """
    nv, nr = len(vertices), len(rays)
    a = _generator_system(vertices, rays)
    # tau column: contributes sum of all generator columns
    tau_col = [sum(row) for row in a]
    rows = [list(row) + [tc, Fraction(0)] for row, tc in zip(a, tau_col)]
    rows.append([Fraction(0)] * (nv + nr) + [Fraction(1), Fraction(1)])
    rhs = tuple(point) + (Fraction(1), Fraction(1))
    c = [0] * (nv + nr) + [1, 0]
    res = linprog(c, rows, rhs)
    return res.status == "optimal" and res.value > 0


def max_step(vertices, rays, origin, direction) -> Fraction | None:
    """Largest s with origin + s*direction in the polyhedron; None if unbounded.

    Raises ValueError when the origin itself is outside.
    """
    neg_dir = tuple(-x for x in direction) + (Fraction(0),)
    a = _generator_system(vertices, rays, [neg_dir])
    n = len(a[0])
    res = linprog([0] * (n - 1) + [1], a, tuple(origin) + (Fraction(1),))
    if res.status == "infeasible":
        raise ValueError("origin lies outside the polyhedron")
    if res.status == "unbounded":
        return None
    return res.value
