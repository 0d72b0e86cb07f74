"""Lattice polytopes attached to convex piecewise-linear data on complete
fans, brute-force lattice-point counting, and the signed subfan sums that
realize the lattice-point functional as an alternating sum over the dual
lattice."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import ceil, floor

from .errors import (
    NotCompleteError,
    NotConvexError,
    ShellLimitError,
    UnboundedPolytopeError,
)
from .fan import Fan, _phase1_feasible, is_complete
from .lattice import IntMatrix, Vector, solve_rational
from .plfun import ConvexityType, PLFunction, _vertex_functional, convexity_type


@dataclass(frozen=True)
class HPolytope:
    """Intersection of half-spaces {x : <x, normal> <= bound}, all integral."""

    inequalities: tuple[tuple[Vector, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "inequalities", tuple(
            (tuple(int(x) for x in n), int(b)) for n, b in self.inequalities
        ))

    @property
    def dim(self) -> int:
        return len(self.inequalities[0][0]) if self.inequalities else 0

    def contains(self, point, strict: bool = False) -> bool:
        for normal, bound in self.inequalities:
            v = sum(a * b for a, b in zip(point, normal))
            if v > bound or (strict and v == bound):
                return False
        return True


def polytope_from_pl(fan: Fan, f: PLFunction) -> tuple[HPolytope, list[Vector]]:
    """The polytope {m : <m, u_rho> <= f(u_rho)} of a convex function on a
    complete fan, with its vertices (one integral vertex per maximal cone,
    deduplicated)."""
    if not is_complete(fan):
        raise NotCompleteError("polytope construction needs a complete fan")
    kind = convexity_type(f)
    if kind not in (ConvexityType.CONVEX, ConvexityType.STRICTLY_CONVEX, ConvexityType.LINEAR):
        raise NotConvexError(f"function is {kind.value}; polytope needs a convex one")
    ineqs = tuple((ray, val) for ray, val in zip(fan.rays, f.values))
    verts = sorted({_vertex_functional(fan, cone, f.values) for cone in fan.grade(fan.ambient_dim)})
    return HPolytope(ineqs), verts


def _is_feasible(poly: HPolytope) -> bool:
    """Exact feasibility of the half-space system (x free, slacks >= 0)."""
    rows = []
    rhs = []
    k = len(poly.inequalities)
    for idx, (normal, bound) in enumerate(poly.inequalities):
        # normal . (p - q) + slack = bound
        row = list(normal) + [-x for x in normal] + [1 if j == idx else 0 for j in range(k)]
        rows.append(row)
        rhs.append(bound)
    return _phase1_feasible(rows, rhs) if rows else True


def _recession_nontrivial(poly: HPolytope) -> bool:
    """True iff {x : <x, normal> <= 0 for all normals} contains a nonzero
    vector; checked by pinning each coordinate to +-1 with exact feasibility."""
    n = poly.dim
    k = len(poly.inequalities)
    for j in range(n):
        for sign in (1, -1):
            rows = []
            rhs = []
            for idx, (normal, _) in enumerate(poly.inequalities):
                rows.append(list(normal) + [-x for x in normal]
                            + [1 if s == idx else 0 for s in range(k)])
                rhs.append(0)
            pin = [0] * (2 * n + k)
            pin[j] = sign
            pin[n + j] = -sign  # x_j = p_j - q_j pinned to exactly one
            rows.append(pin)
            rhs.append(1)
            if _phase1_feasible(rows, rhs):
                return True
    return False


def _vertices_from_inequalities(poly: HPolytope) -> list[tuple[Fraction, ...]]:
    n = poly.dim
    verts = set()
    for subset in combinations(range(len(poly.inequalities)), n):
        mat = IntMatrix([poly.inequalities[i][0] for i in subset])
        rhs = [poly.inequalities[i][1] for i in subset]
        if mat.det() == 0:
            continue
        point = solve_rational(mat, rhs)
        if point is not None and poly.contains(point):
            verts.add(point)
    return sorted(verts)


def count_lattice_points(poly: HPolytope, interior: bool = False) -> int:
    """Exact count over the integer bounding box of the vertex hull.

    The topological interior count uses strict inequalities, so lower
    dimensional polytopes report zero interior points.
    """
    if not poly.inequalities:
        raise UnboundedPolytopeError("empty inequality system is unbounded")
    if not _is_feasible(poly):
        return 0
    if _recession_nontrivial(poly):
        raise UnboundedPolytopeError("polytope has a nontrivial recession cone")
    verts = _vertices_from_inequalities(poly)
    if not verts:
        return 0
    n = poly.dim
    lo = [min(v[j] for v in verts) for j in range(n)]
    hi = [max(v[j] for v in verts) for j in range(n)]
    ranges = [range(ceil(l), floor(h) + 1) for l, h in zip(lo, hi)]
    count = 0
    for point in product(*ranges):
        if poly.contains(point, strict=interior):
            count += 1
    return count


def chi_c_subfan(fan: Fan, f: PLFunction, m) -> int:
    """Signed cone count of the subfan where the functional m is bounded by
    f: linearity on cones means generator checks decide membership; the
    origin cone always contributes +1."""
    m = tuple(int(x) for x in m)
    ok = [sum(a * b for a, b in zip(m, ray)) <= val for ray, val in zip(fan.rays, f.values)]
    total = 0
    for cone in fan.cones:
        if all(ok[i] for i in cone):
            total += -1 if len(cone) % 2 else 1
    return total


def chi_via_alternating_sum(fan: Fan, f: PLFunction, max_shells: int = 64) -> int:
    """Evaluate the lattice-point functional as the signed sum over dual
    lattice points of the subfan counts.

    Candidates are enumerated over the bounding box of the per-cone vertex
    functionals, expanded shell by shell until two consecutive shells
    contribute nothing; exceeding ``max_shells`` raises instead of
    truncating silently.
    """
    if not is_complete(fan):
        raise NotCompleteError("alternating sum needs a complete fan")
    n = fan.ambient_dim
    ok_cache: dict[Vector, int] = {}

    ray_vals = list(zip(fan.rays, f.values))
    cones_by_sign = [(cone, -1 if len(cone) % 2 else 1) for cone in fan.cones]

    def contribution(m: Vector) -> int:
        ok = [sum(a * b for a, b in zip(m, ray)) <= val for ray, val in ray_vals]
        total = 0
        for cone, sign in cones_by_sign:
            if all(ok[i] for i in cone):
                total += sign
        return total

    verts = {_vertex_functional(fan, cone, f.values) for cone in fan.grade(n)}
    lo = [min(v[j] for v in verts) for j in range(n)]
    hi = [max(v[j] for v in verts) for j in range(n)]
    total = 0
    for point in product(*[range(l, h + 1) for l, h in zip(lo, hi)]):
        total += contribution(point)
    zero_streak = 0
    shells = 0
    while zero_streak < 2:
        if shells >= max_shells:
            raise ShellLimitError("shell expansion exceeded the configured limit",
                                  witness={"max_shells": max_shells})
        shells += 1
        lo = [l - 1 for l in lo]
        hi = [h + 1 for h in hi]
        shell_total = 0
        for point in _box_boundary(lo, hi):
            shell_total += contribution(point)
        total += shell_total
        zero_streak = zero_streak + 1 if shell_total == 0 else 0
    return (-1) ** n * total


def _box_boundary(lo, hi):
    """Integer points on the boundary of the box [lo, hi]."""
    n = len(lo)
    seen = set()
    for j in range(n):
        for fixed in (lo[j], hi[j]):
            other = [range(lo[k], hi[k] + 1) for k in range(n)]
            other[j] = range(fixed, fixed + 1)
            for point in product(*other):
                if point not in seen:
                    seen.add(point)
                    yield point
