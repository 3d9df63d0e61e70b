"""Floating-point side: J, j, complex Monge-Ampere blocks, a test potential,
and quadrature checks of the integral identities on the positive chamber.

Conventions.  Points ``x`` live in the realization coordinates of the root
system (the same coordinates as the exact modules) and ``<a, b> = a^T G b``.

* gradients are metric gradients: ``<grad f(x), xi>`` is the derivative of f
  in direction xi.
* Hessians are coordinate Hessians ``d^2 f / dx_i dx_j``.
* ``MA_R(f)`` is the determinant of the Hessian in an orthonormal basis,
  i.e. ``det(Hess) / det(G)``.

Every vectorized helper accepts one point of shape (r,) or a batch (n, r).
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from kepoly import linalg as la
from kepoly.dhmeasure import dh_barycenter, dh_volume
from kepoly.geometry import GeometryError, RationalPolytope, contains, is_weyl_invariant
from kepoly.linalg import Vector
from kepoly.roots import RootSystem

LN2 = math.log(2.0)
MAX_QUAD_RANK = 2
BUDGET_ENV = "KEPOLY_QUAD_BUDGET"


class SingularPointError(ValueError):
    """Point on (or outside) a chamber wall where j is undefined."""


@dataclass(frozen=True)
class _RootData:
    gram: np.ndarray
    roots: np.ndarray      # (p, r) positive roots
    covectors: np.ndarray  # (p, r): <alpha, x> = covectors @ x
    four_rho: np.ndarray   # covector of 4 rho
    chol: np.ndarray       # G = L L^T


@lru_cache(maxsize=64)
def _data(rs: RootSystem) -> _RootData:
    g = np.array(rs.gram, dtype=float)
    roots = np.array([[float(x) for x in a] for a in rs.positive_roots], dtype=float).reshape(-1, rs.rank)
    cov = roots @ g
    return _RootData(g, roots, cov, 2.0 * cov.sum(axis=0), np.linalg.cholesky(g))


def _points(a) -> tuple[np.ndarray, bool]:
    x = np.asarray(a, dtype=float)
    return (x[None, :], True) if x.ndim == 1 else (x, False)


def _out(v: np.ndarray, single: bool):
    return v[0] if single else v


def _log_sinh(t: np.ndarray) -> np.ndarray:
    big = t > 20.0
    safe = np.where(big, 1.0, t)
    return np.where(big, t - LN2 + np.log1p(-np.exp(-2.0 * np.where(big, t, 20.0))), np.log(np.sinh(safe)))


def _log_cosh(t: np.ndarray) -> np.ndarray:
    t = np.abs(t)
    return t - LN2 + np.log1p(np.exp(-2.0 * t))


def root_values(rs: RootSystem, a) -> np.ndarray:
    """<alpha, a> for every positive root; shape (p,) or (n, p)."""
    x, single = _points(a)
    return _out(x @ _data(rs).covectors.T, single)


def J_value(rs: RootSystem, a):
    """prod sinh^2 <alpha, a>; zero on walls, 1 when there are no roots."""
    t = root_values(rs, a)
    return np.prod(np.sinh(t) ** 2, axis=-1)


def _interior_values(rs: RootSystem, a) -> tuple[np.ndarray, bool]:
    x, single = _points(a)
    t = x @ _data(rs).covectors.T
    if np.any(t <= 0):
        raise SingularPointError("j and its derivatives need points strictly inside the positive chamber")
    return t, single


def j_value(rs: RootSystem, a):
    t, single = _interior_values(rs, a)
    return _out(-2.0 * _log_sinh(t).sum(axis=1), single)


def j_gradient(rs: RootSystem, a):
    """Metric gradient -2 sum alpha coth <alpha, a>."""
    t, single = _interior_values(rs, a)
    return _out(-2.0 * (1.0 / np.tanh(t)) @ _data(rs).roots, single)


def j_hessian(rs: RootSystem, a):
    """Coordinate Hessian 2 sum (G alpha)(G alpha)^T / sinh^2 <alpha, a>."""
    t, single = _interior_values(rs, a)
    cov = _data(rs).covectors
    w = 2.0 / np.sinh(t) ** 2
    return _out(np.einsum("np,pi,pj->nij", w, cov, cov), single)


# ---------------------------------------------------------------------------
# complex Monge-Ampere


@dataclass(frozen=True)
class SmoothFunction:
    """A function given by callables for value, metric gradient and coordinate Hessian."""

    value: Callable
    gradient: Callable
    hessian: Callable


def ma_real(rs: RootSystem, f, a) -> float:
    """det of the Hessian of f in an orthonormal basis."""
    d = _data(rs)
    return float(np.linalg.det(np.asarray(f.hessian(a), dtype=float)) / np.linalg.det(d.gram))


def complex_hessian_blocks(rs: RootSystem, f, a) -> np.ndarray:
    """Block-diagonal complex Hessian at exp(a).

    One real block (1/4) Hess f in orthonormal coordinates, then for each
    positive root (1/2) <alpha, grad f> [[coth, i], [-i, coth]].
    """
    x = np.asarray(a, dtype=float)
    t, _ = _interior_values(rs, x)
    t = t[0]
    d = _data(rs)
    r, p = rs.rank, len(t)
    linv = np.linalg.inv(d.chol)
    h = linv @ np.asarray(f.hessian(x), dtype=float) @ linv.T
    g = np.asarray(f.gradient(x), dtype=float)
    m = np.zeros((r + 2 * p, r + 2 * p), dtype=complex)
    m[:r, :r] = h / 4.0
    for k in range(p):
        c = 0.5 * float(d.covectors[k] @ g)
        coth = 1.0 / math.tanh(t[k])
        i = r + 2 * k
        m[i:i + 2, i:i + 2] = c * np.array([[coth, 1j], [-1j, coth]])
    return m


def ma_complex(rs: RootSystem, f, a, method: str = "direct") -> float:
    """Determinant of the complex Hessian, either directly or as a product of block determinants."""
    m = complex_hessian_blocks(rs, f, a)
    if method == "direct":
        return float(np.linalg.det(m).real)
    if method != "blocks":
        raise ValueError(f"unknown method {method!r}")
    r = rs.rank
    out = np.linalg.det(m[:r, :r]).real if r else 1.0
    for i in range(r, m.shape[0], 2):
        out *= np.linalg.det(m[i:i + 2, i:i + 2]).real
    return float(out)


def ma_complex_closed_form(rs: RootSystem, f, a) -> float:
    """4^-(r+p) MA_R(f) prod <alpha, grad f>^2 / J."""
    x = np.asarray(a, dtype=float)
    t, _ = _interior_values(rs, x)
    d = _data(rs)
    g = np.asarray(f.gradient(x), dtype=float)
    r, p = rs.rank, d.roots.shape[0]
    pairings = d.covectors @ g
    return float(4.0 ** -(r + p) * ma_real(rs, f, x) * np.prod(pairings ** 2) / np.prod(np.sinh(t[0]) ** 2))


# ---------------------------------------------------------------------------
# test potential


@dataclass(frozen=True)
class TestPotential:
    """u(x) = log sum_v exp <v, x> over the vertices v of 2P."""

    __test__ = False  # not a pytest class

    generators: tuple[Vector, ...]
    gram: np.ndarray = field(repr=False)
    _v: np.ndarray = field(init=False, repr=False)
    _a: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        v = np.array([[float(x) for x in g] for g in self.generators], dtype=float)
        object.__setattr__(self, "_v", v)
        object.__setattr__(self, "_a", v @ self.gram)

    @property
    def dim(self) -> int:
        return self._v.shape[1]

    def _weights(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        s = x @ self._a.T
        top = s.max(axis=1, keepdims=True)
        e = np.exp(s - top)
        tot = e.sum(axis=1, keepdims=True)
        return top[:, 0] + np.log(tot[:, 0]), e / tot

    def value(self, a):
        x, single = _points(a)
        return _out(self._weights(x)[0], single)

    def gradient(self, a):
        """Metric gradient: the weighted mean of the generators."""
        x, single = _points(a)
        return _out(self._weights(x)[1] @ self._v, single)

    def covariance(self, a):
        x, single = _points(a)
        w = self._weights(x)[1]
        dev = self._v[None, :, :] - (w @ self._v)[:, None, :]
        return _out(np.einsum("nk,nki,nkj->nij", w, dev, dev), single)

    def hessian(self, a):
        c = self.covariance(a)
        return self.gram @ c @ self.gram

    def ma_real(self, a):
        return np.linalg.det(self.covariance(a)) * np.linalg.det(self.gram)

    def support(self, a):
        """v(x) = max over 2P of <p, x>."""
        x, single = _points(a)
        return _out((x @ self._a.T).max(axis=1), single)


def build_test_potential(rs: RootSystem, P: RationalPolytope) -> TestPotential:
    """Log-sum-exp potential whose gradient image is the interior of 2P."""
    if P.dim != rs.rank:
        raise GeometryError("polytope and root system dimensions differ")
    P.require_full_dimensional("build_test_potential")
    if not is_weyl_invariant(rs, P):
        raise GeometryError("P is not W-invariant: the W-orbit of its vertices is larger than its vertex set")
    gens = tuple(la.scale(2, v) for v in P.vertices)
    return TestPotential(gens, _data(rs).gram)


# ---------------------------------------------------------------------------
# quadrature


@dataclass(frozen=True)
class QuadratureSpec:
    """Tensor midpoint rule on [wall_offset, R]^s x [-R, R]^k in chamber coordinates.

    ``radius`` None means: grow R until the integrand on the far faces is
    below ``decay`` times its peak.  ``step`` is the coarsest cell width;
    ``levels`` halvings feed a Richardson table.  ``budget`` caps the total
    number of cells (default from the environment variable KEPOLY_QUAD_BUDGET).
    """

    radius: float | None = None
    wall_offset: float = 1e-3
    step: float = 0.1
    levels: int = 3
    tolerance: float = 1e-3
    decay: float = 1e-12
    budget: int | None = None

    def __post_init__(self):
        for name in ("wall_offset", "step", "tolerance", "decay"):
            if not getattr(self, name) > 0:
                raise ValueError(f"quadrature {name} must be positive")
        if self.radius is not None and not self.radius > self.wall_offset:
            raise ValueError("quadrature radius must exceed the wall offset")
        if self.levels < 1:
            raise ValueError("quadrature levels must be positive")
        if self.budget is not None and self.budget <= 0:
            raise ValueError("quadrature budget must be positive")

    def effective_budget(self) -> int | None:
        if self.budget is not None:
            return self.budget
        env = os.environ.get(BUDGET_ENV)
        if env:
            try:
                b = int(env)
            except ValueError:
                raise ValueError(f"{BUDGET_ENV} must be an integer, got {env!r}") from None
            if b <= 0:
                raise ValueError(f"{BUDGET_ENV} must be positive")
            return b
        return None


@dataclass(frozen=True)
class ResidualReport:
    name: str
    numeric: float
    exact: float
    residual: float
    tolerance: float
    error_estimate: float
    level_residuals: tuple[float, ...]
    cells: int
    radius: float
    converged: bool

    @property
    def passed(self) -> bool:
        return self.converged and self.residual < self.tolerance

    def to_json(self) -> dict:
        return {
            "name": self.name, "numeric": self.numeric, "exact": self.exact,
            "residual": self.residual, "tolerance": self.tolerance,
            "error_estimate": self.error_estimate, "level_residuals": list(self.level_residuals),
            "cells": self.cells, "radius": self.radius, "converged": self.converged, "passed": self.passed,
        }


Integrand = Callable[[np.ndarray], np.ndarray]
_CHUNK = 1 << 16


@lru_cache(maxsize=64)
def _chamber_frame(rs: RootSystem) -> tuple[np.ndarray, float]:
    """x = F y with y_i = <alpha_i, x> for simple roots and torus coordinates after."""
    rows = [rs.covector(a) for a in rs.simple_roots] + [rs.covector(t) for t in rs.toric_basis]
    f = np.array([[float(x) for x in row] for row in la.inverse(rows)], dtype=float)
    return f, abs(float(np.linalg.det(f)))


def _axes(rs: RootSystem, radius: float, wall: float) -> list[tuple[float, float]]:
    s = rs.semisimple_rank
    return [(wall, radius)] * s + [(-radius, radius)] * (rs.rank - s)


def _midpoint(rs: RootSystem, f: Integrand, box, counts, absolute=False) -> float:
    frame, jac = _chamber_frame(rs)
    mids = []
    cell = 1.0
    for (lo, hi), n in zip(box, counts):
        h = (hi - lo) / n
        cell *= h
        mids.append(lo + h * (np.arange(n) + 0.5))
    grids = np.meshgrid(*mids, indexing="ij")
    y = np.stack([g.ravel() for g in grids], axis=1)
    total = 0.0
    for i in range(0, len(y), _CHUNK):
        vals = f(y[i:i + _CHUNK] @ frame.T)
        total += float(np.sum(np.abs(vals) if absolute else vals))
    return total * cell * jac


def _face_max(rs: RootSystem, f: Integrand, radius: float, wall: float, n: int = 48) -> tuple[float, float]:
    """(max |f| on the far faces of the box, max |f| on a coarse interior grid)."""
    frame, _ = _chamber_frame(rs)
    box = _axes(rs, radius, wall)
    grids = [np.linspace(lo, hi, n) for lo, hi in box]
    pts = np.stack([g.ravel() for g in np.meshgrid(*grids, indexing="ij")], axis=1)
    vals = np.abs(f(pts @ frame.T))
    far = np.zeros(len(pts), dtype=bool)
    for k, (lo, hi) in enumerate(box):
        far |= pts[:, k] == hi
        if lo < 0:
            far |= pts[:, k] == lo
    return float(vals[far].max()), float(vals.max())


def _choose_radius(rs: RootSystem, f: Integrand, q: QuadratureSpec) -> tuple[float, bool]:
    if q.radius is not None:
        return q.radius, True
    r = 2.0
    while r < 400.0:
        edge, peak = _face_max(rs, f, r, q.wall_offset)
        if peak == 0.0 or edge <= q.decay * peak:
            return r, True
        r *= 1.5
    return r, False


def _integrate(rs: RootSystem, f: Integrand, q: QuadratureSpec, radius: float):
    """Richardson-extrapolated midpoint estimates; returns (table diagonal, last error, cells, in_budget)."""
    box = _axes(rs, radius, q.wall_offset)
    base = [max(2, math.ceil((hi - lo) / q.step)) for lo, hi in box]
    budget = q.effective_budget()
    levels = q.levels
    in_budget = True
    if budget is not None:
        def cost(b):
            return sum(math.prod(n * 2 ** k for n in b) for k in range(levels))
        while cost(base) > budget and max(base) > 2:
            base = [max(2, n // 2) for n in base]
            in_budget = False
        while cost(base) > budget and levels > 1:
            levels -= 1
            in_budget = False
    table: list[list[float]] = []
    cells = 0
    for k in range(levels):
        counts = [n * 2 ** k for n in base]
        cells += math.prod(counts)
        row = [_midpoint(rs, f, box, counts)]
        for j in range(1, k + 1):
            row.append(row[j - 1] + (row[j - 1] - table[k - 1][j - 1]) / (4 ** j - 1))
        table.append(row)
    diag = [row[-1] for row in table]
    err = abs(table[-1][-1] - table[-1][-2]) if levels > 1 else math.inf
    return diag, err, cells, in_budget, box, [n * 2 ** (levels - 1) for n in base]


def _require_rank(rs: RootSystem) -> None:
    if rs.rank > MAX_QUAD_RANK:
        raise ValueError(f"quadrature checks support rank <= {MAX_QUAD_RANK}, got {rs.rank}")


def _report(name, diag, exact, scale, err, q, cells, radius, ok) -> ResidualReport:
    residuals = tuple(abs(d - exact) / scale for d in diag)
    return ResidualReport(name, diag[-1], exact, residuals[-1], q.tolerance, err / scale,
                          residuals, cells, radius, bool(ok and err / scale < q.tolerance))


def _dh_integrand(rs: RootSystem, u: TestPotential, extra: Callable | None = None) -> Integrand:
    d = _data(rs)
    detg = float(np.linalg.det(d.gram))

    def f(x):
        m = u.gradient(x)
        out = np.prod((m @ d.covectors.T) ** 2, axis=1) * np.linalg.det(u.covariance(x)) * detg
        return out * extra(m) if extra is not None else out
    return f


def _check_potential(rs: RootSystem, u: TestPotential) -> None:
    if u.dim != rs.rank:
        raise GeometryError("test potential and root system dimensions differ")


def check_pushforward_identity(rs: RootSystem, Pplus: RationalPolytope, u: TestPotential,
                               q: QuadratureSpec = QuadratureSpec()) -> ResidualReport:
    """int_{chamber} prod <alpha, grad u>^2 MA_R(u) dx against the exact DH volume of 2P+."""
    _require_rank(rs)
    _check_potential(rs, u)
    exact = float(dh_volume(rs, Pplus.scaled(2)))
    f = _dh_integrand(rs, u)
    radius, ok = _choose_radius(rs, f, q)
    diag, err, cells, in_budget, _, _ = _integrate(rs, f, q, radius)
    return _report("pushforward", diag, exact, abs(exact), err, q, cells, radius, ok and in_budget)


def check_barycenter_identity(rs: RootSystem, Pplus: RationalPolytope, u: TestPotential, xi: Sequence,
                              q: QuadratureSpec = QuadratureSpec()) -> ResidualReport:
    """int <grad u, xi> prod <alpha, grad u>^2 MA_R(u) dx against <xi, bar_DH(2P+)> V."""
    _require_rank(rs)
    _check_potential(rs, u)
    xi_v = np.asarray([float(x) for x in la.vec(xi)])
    dh = dh_barycenter(rs, Pplus.scaled(2))
    exact = float(rs.pairing(la.vec(xi), dh.barycenter) * dh.volume)
    if not np.any(xi_v):
        return ResidualReport("barycenter", 0.0, exact, 0.0, q.tolerance, 0.0, (0.0,), 0, 0.0, True)
    gxi = _data(rs).gram @ xi_v
    f = _dh_integrand(rs, u, lambda m: m @ gxi)
    radius, ok = _choose_radius(rs, f, q)
    diag, err, cells, in_budget, box, counts = _integrate(rs, f, q, radius)
    scale = abs(exact) if exact != 0 else _midpoint(rs, f, box, counts, absolute=True)
    return _report("barycenter", diag, exact, scale, err, q, cells, radius, ok and in_budget)


def _zero_integrand(rs: RootSystem, u: TestPotential, xi: np.ndarray) -> Integrand:
    """e^{-u} (J <grad u, xi> - d_xi J) with d_xi J in the factored cosh sinh prod sinh^2 form."""
    d = _data(rs)
    gxi = d.gram @ xi
    axi = d.covectors @ xi

    def f(x):
        val = u.value(x)
        m = u.gradient(x)
        t = x @ d.covectors.T
        if t.shape[1] == 0:
            return np.exp(-val) * (m @ gxi)
        ls = _log_sinh(t)
        log_j = 2.0 * ls.sum(axis=1)
        term = np.exp(log_j - val) * (m @ gxi)
        # d_xi J = sum 2 <alpha, xi> cosh sinh prod_{beta != alpha} sinh^2
        parts = np.exp((log_j - val)[:, None] - ls + _log_cosh(t)) * (2.0 * axi)[None, :]
        return term - parts.sum(axis=1)
    return f


def check_zero_integral(rs: RootSystem, P: RationalPolytope, u: TestPotential, xi: Sequence,
                        q: QuadratureSpec = QuadratureSpec()) -> ResidualReport:
    """int d_xi(u + j) e^{-(u + j)} dx = 0, normalized by the integral of the absolute value.

    ``P`` is only used to confirm 4 rho lies inside 2P, which makes the integrand decay.
    """
    _require_rank(rs)
    _check_potential(rs, u)
    if not contains(P, rs.two_rho, "strict"):
        raise GeometryError("2 rho must be interior to P for e^{-u} J to be integrable")
    xi_v = np.asarray([float(x) for x in la.vec(xi)])
    if not np.any(xi_v):
        return ResidualReport("zero_integral", 0.0, 0.0, 0.0, q.tolerance, 0.0, (0.0,), 0, 0.0, True)
    f = _zero_integrand(rs, u, xi_v)
    radius, ok = _choose_radius(rs, f, q)
    diag, err, cells, in_budget, box, counts = _integrate(rs, f, q, radius)
    scale = _midpoint(rs, f, box, counts, absolute=True)
    return _report("zero_integral", diag, 0.0, scale, err, q, cells, radius, ok and in_budget)


# ---------------------------------------------------------------------------
# j inequalities


@dataclass(frozen=True)
class JInequalityReport:
    samples: int
    constant: float
    lower_bound_margin: float  # min of j + <4 rho, x> - c, must be >= 0
    gradient_margin: float     # max of d_xi j + <4 rho, xi>, must be < 0
    skipped: bool              # no roots: both sides vanish

    @property
    def passed(self) -> bool:
        return self.skipped or (self.lower_bound_margin >= 0 and self.gradient_margin < 0)


def sample_chamber(rs: RootSystem, n: int, rng: np.random.Generator, low: float = 0.05,
                   high: float = 3.0) -> np.ndarray:
    """Random interior points: simple-root values uniform in [low, high], torus part in [-high, high]."""
    frame, _ = _chamber_frame(rs)
    s = rs.semisimple_rank
    y = np.concatenate([rng.uniform(low, high, size=(n, s)),
                        rng.uniform(-high, high, size=(n, rs.rank - s))], axis=1)
    return y @ frame.T


def check_j_inequalities(rs: RootSystem, samples, xi: Sequence | None = None) -> JInequalityReport:
    """j(x) >= -<4 rho, x> + 2 ln2 |Phi+| and d_xi j(x) < -<4 rho, xi> at every sample.

    ``xi`` defaults to rho.
    """
    x, _ = _points(samples)
    d = _data(rs)
    p = d.roots.shape[0]
    c = 2.0 * LN2 * p
    if p == 0:
        return JInequalityReport(len(x), 0.0, 0.0, 0.0, True)
    xi_v = d.roots.sum(axis=0) / 2.0 if xi is None else np.asarray([float(v) for v in la.vec(xi)])
    lower = j_value(rs, x) + x @ d.four_rho - c
    grad = j_gradient(rs, x) @ (d.gram @ xi_v) + d.four_rho @ xi_v
    return JInequalityReport(len(x), c, float(lower.min()), float(grad.max()), False)
