"""Exact Kähler-Einstein criterion and greatest Ricci lower bound for Fano group compactifications."""
from kepoly.catalog import builtin, wonderful_polytope
from kepoly.criterion import Verdict, greatest_ricci_lower_bound, ke_verdict
from kepoly.dhmeasure import dh_barycenter, dh_volume
from kepoly.geometry import convex_hull, intersect_with_chamber, weyl_hull
from kepoly.roots import GroupSpec, build_root_system

__version__ = "0.1.0"

__all__ = [
    "GroupSpec", "Verdict", "build_root_system", "builtin", "convex_hull", "dh_barycenter", "dh_volume",
    "greatest_ricci_lower_bound", "intersect_with_chamber", "ke_verdict", "weyl_hull", "wonderful_polytope",
]
