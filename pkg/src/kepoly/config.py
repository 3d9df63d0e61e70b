"""JSON input files for the command line, and their canonical echo.

A config looks like::

    {
      "name": "X2",                                  (optional)
      "group": {"factors": ["B2"], "torus_rank": 0},
      "polytope": {"pplus_vertices": [["0", "0"], ["5", "5/2"], ...]},
      "coordinates": "simple_roots",
      "options": {"dilation": "1", "seed": 0, "samples": 1000,
                  "quadrature": {"step": 0.1, "wall_offset": 0.001}}
    }

``polytope`` holds exactly one of ``pplus_vertices``, ``p_vertices`` (the
full W-invariant polytope, clipped here) or ``wonderful: true``.  Rationals
are integers or "a/b" strings.  The echo always lists P+ vertices, so echoing
a resolved config and resolving it again is a fixed point.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from kepoly import linalg as la
from kepoly.catalog import builtin, wonderful_polytope
from kepoly.geometry import RationalPolytope, convex_hull, intersect_with_chamber, weyl_hull
from kepoly.linalg import Vector
from kepoly.roots import GroupSpec, RootSystem, RootSystemError, build_root_system

COORDINATES = ("simple_roots", "realization")
POLYTOPE_KEYS = ("pplus_vertices", "p_vertices", "wonderful")
QUADRATURE_KEYS = ("radius", "wall_offset", "step", "levels", "tolerance")
TOP_KEYS = ("name", "group", "polytope", "coordinates", "options")


class ConfigError(ValueError):
    """Malformed input; the message starts with the offending field."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


@dataclass(frozen=True)
class Options:
    dilation: Fraction = Fraction(1)
    seed: int = 0
    samples: int = 1000
    quadrature: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"dilation": la.fmt(self.dilation), "seed": self.seed, "samples": self.samples,
                "quadrature": dict(self.quadrature)}


@dataclass(frozen=True)
class Problem:
    """A resolved input: root system, P+ in realization coordinates, options."""

    name: str | None
    spec: GroupSpec
    rs: RootSystem
    pplus: RationalPolytope
    coordinates: str
    options: Options

    def to_coordinates(self, v: Vector) -> Vector:
        return self.rs.root_coordinates(v) if self.coordinates == "simple_roots" else v

    def echo(self) -> dict:
        out: dict[str, Any] = {}
        if self.name is not None:
            out["name"] = self.name
        out["group"] = self.spec.to_json()
        out["polytope"] = {"pplus_vertices": [[la.fmt(x) for x in self.to_coordinates(v)]
                                              for v in self.pplus.vertices]}
        out["coordinates"] = self.coordinates
        out["options"] = self.options.to_json()
        return out


def _rational(value, where: str) -> Fraction:
    if isinstance(value, bool):
        raise ConfigError(where, "expected an integer or an 'a/b' string, got a boolean")
    try:
        return la.frac(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(where, f"cannot parse {value!r} as a rational ({exc})") from None


def _vertex_list(value, where: str, dim: int) -> list[Vector]:
    if not isinstance(value, list) or not value:
        raise ConfigError(where, "expected a nonempty list of vertices")
    out = []
    for i, v in enumerate(value):
        if not isinstance(v, list):
            raise ConfigError(f"{where}[{i}]", "expected a list of coordinates")
        if len(v) != dim:
            raise ConfigError(f"{where}[{i}]", f"expected {dim} coordinates, got {len(v)}")
        out.append(tuple(_rational(x, f"{where}[{i}][{j}]") for j, x in enumerate(v)))
    return out


def _int_option(data: dict, key: str, default: int, minimum: int) -> int:
    v = data.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise ConfigError(f"options.{key}", f"expected an integer >= {minimum}, got {v!r}")
    return v


def _options(data) -> Options:
    if data is None:
        return Options()
    if not isinstance(data, dict):
        raise ConfigError("options", "expected an object")
    unknown = set(data) - {"dilation", "seed", "samples", "quadrature"}
    if unknown:
        raise ConfigError("options", f"unknown keys {sorted(unknown)}")
    dilation = _rational(data.get("dilation", 1), "options.dilation")
    if dilation <= 0:
        raise ConfigError("options.dilation", "must be positive")
    quad = data.get("quadrature", {})
    if not isinstance(quad, dict):
        raise ConfigError("options.quadrature", "expected an object")
    for k, v in quad.items():
        if k not in QUADRATURE_KEYS:
            raise ConfigError(f"options.quadrature.{k}", f"unknown key; allowed {list(QUADRATURE_KEYS)}")
        if isinstance(v, bool) or not isinstance(v, (int, float)) or v <= 0:
            raise ConfigError(f"options.quadrature.{k}", f"expected a positive number, got {v!r}")
        if k == "levels" and not isinstance(v, int):
            raise ConfigError("options.quadrature.levels", "expected an integer")
    return Options(dilation, _int_option(data, "seed", 0, 0), _int_option(data, "samples", 1000, 1),
                   {k: quad[k] for k in QUADRATURE_KEYS if k in quad})


def _to_realization(rs: RootSystem, pts: list[Vector], coordinates: str) -> list[Vector]:
    return [rs.from_root_coordinates(p) for p in pts] if coordinates == "simple_roots" else pts


def _check_pplus(rs: RootSystem, pplus: RationalPolytope, where: str) -> None:
    if pplus.is_degenerate:
        raise ConfigError(where, f"polytope is {pplus.affine_dim}-dimensional, need {pplus.dim}")
    if pplus.has_hrep and rs.semisimple_rank:
        if intersect_with_chamber(rs, weyl_hull(rs, pplus)).vertices != pplus.vertices:
            raise ConfigError(where, "vertices are not P cut by the chamber for any W-invariant P")


def parse_config(data: Any, name: str | None = None) -> Problem:
    """Validate a decoded JSON config and resolve its polytope."""
    if not isinstance(data, dict):
        raise ConfigError("config", "expected a JSON object")
    unknown = set(data) - set(TOP_KEYS)
    if unknown:
        raise ConfigError("config", f"unknown keys {sorted(unknown)}")
    if "group" not in data:
        raise ConfigError("group", "missing")
    try:
        spec = GroupSpec.from_json(data["group"])
        rs = build_root_system(spec)
    except (RootSystemError, ValueError, TypeError) as exc:
        raise ConfigError("group", str(exc)) from None
    coordinates = data.get("coordinates", "simple_roots")
    if coordinates not in COORDINATES:
        raise ConfigError("coordinates", f"expected one of {list(COORDINATES)}, got {coordinates!r}")
    poly = data.get("polytope")
    if not isinstance(poly, dict):
        raise ConfigError("polytope", "expected an object")
    given = [k for k in POLYTOPE_KEYS if k in poly]
    extra = set(poly) - set(POLYTOPE_KEYS)
    if extra:
        raise ConfigError("polytope", f"unknown keys {sorted(extra)}")
    if len(given) != 1:
        raise ConfigError("polytope", f"give exactly one of {list(POLYTOPE_KEYS)}, got {given}")
    key = given[0]
    where = f"polytope.{key}"
    if key == "wonderful":
        if poly[key] is not True:
            raise ConfigError(where, "must be true")
        if not rs.semisimple_rank:
            raise ConfigError(where, "needs at least one semisimple factor")
        pplus = intersect_with_chamber(rs, wonderful_polytope(rs))
    else:
        pts = _to_realization(rs, _vertex_list(poly[key], where, rs.rank), coordinates)
        hull = convex_hull(pts)
        if key == "p_vertices":
            if hull.is_degenerate:
                raise ConfigError(where, f"polytope is {hull.affine_dim}-dimensional, need {hull.dim}")
            pplus = intersect_with_chamber(rs, hull) if rs.semisimple_rank else hull
        else:
            pplus = hull
    _check_pplus(rs, pplus, where)
    label = data.get("name", name)
    if label is not None and not isinstance(label, str):
        raise ConfigError("name", "expected a string")
    return Problem(label, spec, rs, pplus, coordinates, _options(data.get("options")))


def load_config(path: str | Path) -> Problem:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_config(data)


def builtin_config(name: str) -> dict:
    ex = builtin(name)
    return {"name": ex.name, "group": ex.spec.to_json(),
            "polytope": {"pplus_vertices": [[la.fmt(x) for x in v] for v in ex.pplus_vertices]},
            "coordinates": "simple_roots", "options": Options().to_json()}


def load_builtin(name: str) -> Problem:
    return parse_config(builtin_config(name))
