"""Integral piecewise-linear functions on a unimodular fan.

On a unimodular fan a function is exactly a choice of integer value at
each ray generator, so a ``PLFunction`` is a fan plus a value tuple.
Classes modulo globally linear functions get a canonical coset
representative through the Hermite normal form of the evaluation lattice.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import (
    BadRayError,
    MixedSignError,
    NotCompleteError,
    WrongFanError,
)
from .fan import Fan, StarFan, StellarSubdivision, is_complete, star_fan
from .lattice import (
    IntMatrix,
    Vector,
    complete_to_unimodular_basis,
    hermite_normal_form,
    quotient_order,
    solve_integral,
)

#: sentinel returned by :func:`class_order` when no multiple of the class is linear
INFINITE = None


@dataclass(frozen=True)
class PLFunction:
    fan: Fan
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != self.fan.n_rays:
            raise WrongFanError("one value per ray required",
                                witness={"expected": self.fan.n_rays, "got": len(self.values)})
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))

    def __add__(self, other: "PLFunction") -> "PLFunction":
        self._same_fan(other)
        return PLFunction(self.fan, tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other: "PLFunction") -> "PLFunction":
        self._same_fan(other)
        return PLFunction(self.fan, tuple(a - b for a, b in zip(self.values, other.values)))

    def __rmul__(self, k: int) -> "PLFunction":
        return PLFunction(self.fan, tuple(k * v for v in self.values))

    def __neg__(self) -> "PLFunction":
        return PLFunction(self.fan, tuple(-v for v in self.values))

    def _same_fan(self, other: "PLFunction") -> None:
        if self.fan.key() != other.fan.key():
            raise WrongFanError("functions live on different fans")


@dataclass(frozen=True)
class PLClass:
    """Canonical representative of a function modulo linear functions."""

    rep: PLFunction

    def key(self) -> tuple:
        return (self.rep.fan.key(), self.rep.values)


def courant(fan: Fan, ray_index: int) -> PLFunction:
    """The function with value 1 at one ray generator and 0 at the others."""
    if not 0 <= ray_index < fan.n_rays:
        raise BadRayError(f"no ray with index {ray_index}", witness=ray_index)
    return PLFunction(fan, tuple(1 if i == ray_index else 0 for i in range(fan.n_rays)))


def linear_values(fan: Fan, functional) -> PLFunction:
    """Restriction of an integral linear functional to the fan's rays."""
    m = tuple(int(x) for x in functional)
    return PLFunction(fan, tuple(sum(a * b for a, b in zip(m, r)) for r in fan.rays))


def is_linear(f: PLFunction) -> tuple[bool, Vector | None]:
    """Decide whether f is the restriction of an integral linear functional;
    the witness functional is returned when one exists."""
    m = solve_integral(f.fan.ray_matrix(), f.values)
    return (m is not None), m


def class_order(f: PLFunction):
    """Least k >= 1 with k*f linear on the fan, or INFINITE when the
    rational system already has no solution.  Computed in closed form from
    the Smith decomposition of the ray evaluation map, so no search bound
    is needed."""
    return quotient_order(f.fan.ray_matrix(), f.values)


def _class_hnf(fan: Fan) -> IntMatrix:
    """Row HNF of the lattice of linear functions' ray values, cached."""
    if fan._class_hnf is None:
        gens = fan.ray_matrix().transpose()  # rows: values of the coordinate functionals
        h, _ = hermite_normal_form(gens)
        fan._class_hnf = h
    return fan._class_hnf


def reduce_values(fan: Fan, values) -> tuple[int, ...]:
    """Reduce a value vector to its canonical coset representative modulo
    the ray values of integral linear functionals."""
    h = _class_hnf(fan)
    vals = list(values)
    for row in h.entries:
        pivot_col = next((j for j, x in enumerate(row) if x != 0), None)
        if pivot_col is None:
            continue
        q = vals[pivot_col] // row[pivot_col]
        if q:
            vals = [a - q * b for a, b in zip(vals, row)]
    return tuple(vals)


def canonical_class_rep(f: PLFunction) -> PLClass:
    """Unique coset representative of f modulo linear functions.

    Reduces the value vector against the HNF rows of the evaluation
    lattice; two functions share a representative exactly when their
    difference is linear on the fan.
    """
    return PLClass(PLFunction(f.fan, reduce_values(f.fan, f.values)))


def cone_dual(fan: Fan, cone) -> IntMatrix:
    """Dual rows of the deterministic basis completion of a cone, cached."""
    cone = tuple(cone)
    cached = fan._dual_cache.get(cone)
    if cached is None:
        _, cached = complete_to_unimodular_basis(fan.cone_rays(cone), fan.ambient_dim)
        fan._dual_cache[cone] = cached
    return cached


def subtract_linear_on_cone(fan: Fan, values, cone) -> tuple[int, ...]:
    """Subtract the deterministic linear functional agreeing with the values
    on the cone; the result vanishes at the cone's ray generators."""
    bdual = cone_dual(fan, cone)
    m = [0] * fan.ambient_dim
    for i, ray_idx in enumerate(cone):
        coeff = values[ray_idx]
        if coeff:
            m = [a + coeff * b for a, b in zip(m, bdual.entries[i])]
    return tuple(v - sum(a * b for a, b in zip(m, ray)) for v, ray in zip(values, fan.rays))


def restrict_values_to_star(fan: Fan, values, sigma) -> tuple[StarFan, tuple[int, ...]]:
    """Value-level star restriction; see :func:`restrict_to_star`."""
    sigma = fan.require_cone(sigma)
    star = star_fan(fan, sigma)
    shifted = subtract_linear_on_cone(fan, values, sigma)
    return star, star.push_values(shifted)


def restrict_to_star(f: PLFunction, sigma) -> PLFunction:
    """Push the class of f to the star fan at sigma.

    Subtracts the deterministic linear functional that agrees with f on
    sigma (built from the dual rows of the cone's basis completion), then
    reads off values at the originating rays.  The resulting class does not
    depend on the choice of functional.
    """
    star, values = restrict_values_to_star(f.fan, f.values, sigma)
    return PLFunction(star.fan, values)


class ConvexityType(enum.Enum):
    LINEAR = "LINEAR"
    CONVEX = "CONVEX"
    STRICTLY_CONVEX = "STRICTLY_CONVEX"
    CONCAVE = "CONCAVE"
    STRICTLY_CONCAVE = "STRICTLY_CONCAVE"
    NONE = "NONE"


def _vertex_functional(fan: Fan, cone, values) -> tuple[int, ...]:
    """The unique integral functional agreeing with the given ray values on a
    full-dimensional unimodular cone."""
    bdual = cone_dual(fan, cone)
    m = [0] * fan.ambient_dim
    for i, ray_idx in enumerate(cone):
        m = [a + values[ray_idx] * b for a, b in zip(m, bdual.entries[i])]
    return tuple(m)


def convexity_type(f: PLFunction) -> ConvexityType:
    """Classify f across the ridges of a complete simplicial fan.

    For each ridge shared by maximal cones s1, s2 the functional defining f
    on s1 is compared with f at the generator of s2 opposite the ridge; a
    support function satisfies f(u') >= m(u') there.
    """
    fan = f.fan
    if not is_complete(fan):
        raise NotCompleteError("convexity is only classified on complete fans")
    n = fan.ambient_dim
    maximal = fan.grade(n)
    ridge_sides: dict[tuple, list] = {}
    for c in maximal:
        for drop in c:
            ridge = tuple(i for i in c if i != drop)
            ridge_sides.setdefault(ridge, []).append((c, drop))
    saw_strict_up = saw_strict_down = saw_flat = False
    for ridge, sides in ridge_sides.items():
        (c1, u1), (c2, u2) = sides
        m1 = _vertex_functional(fan, c1, f.values)
        lhs = f.values[u2]
        rhs = sum(a * b for a, b in zip(m1, fan.rays[u2]))
        if lhs > rhs:
            saw_strict_up = True
        elif lhs < rhs:
            saw_strict_down = True
        else:
            saw_flat = True
    if not saw_strict_up and not saw_strict_down:
        linear, _ = is_linear(f)
        assert linear, "flat across every ridge must mean globally linear"
        return ConvexityType.LINEAR
    if not saw_strict_down:
        return ConvexityType.CONVEX if saw_flat else ConvexityType.STRICTLY_CONVEX
    if not saw_strict_up:
        return ConvexityType.CONCAVE if saw_flat else ConvexityType.STRICTLY_CONCAVE
    return ConvexityType.NONE


def pointwise_max_min(f: PLFunction, g: PLFunction) -> tuple[PLFunction, PLFunction]:
    """Pointwise max and min when both stay piecewise-linear on the fan.

    Since f - g is linear on every cone, the max is piecewise-linear on the
    fan exactly when f - g has a uniform sign at each cone's generators;
    a mixed cone is reported as the witness of the required refinement.
    """
    f._same_fan(g)
    diff = [a - b for a, b in zip(f.values, g.values)]
    for cone in f.fan.maximal_cones:
        signs = {1 if diff[i] > 0 else (-1 if diff[i] < 0 else 0) for i in cone}
        if 1 in signs and -1 in signs:
            raise MixedSignError(
                f"f-g changes sign on cone {cone}; max/min need a refinement",
                witness={"cone": list(cone), "difference": [diff[i] for i in cone]},
            )
    hi = PLFunction(f.fan, tuple(max(a, b) for a, b in zip(f.values, g.values)))
    lo = PLFunction(f.fan, tuple(min(a, b) for a, b in zip(f.values, g.values)))
    return hi, lo


def transfer_to_subdivision(f: PLFunction, subdivision: StellarSubdivision) -> PLFunction:
    """Reinterpret f on the stellar subdivision of its fan: same function,
    finer fan.  The new ray's value is the sum of f over the subdivided
    cone's generators (linearity across that cone)."""
    if f.fan.key() != subdivision.parent.key():
        raise WrongFanError("function does not live on the subdivided fan's parent")
    if subdivision.fan is subdivision.parent:  # subdivision at a ray is a no-op
        return PLFunction(subdivision.fan, f.values)
    new_value = sum(f.values[i] for i in subdivision.tau)
    return PLFunction(subdivision.fan, f.values + (new_value,))


def decompose_on_subdivision(ftilde: PLFunction, subdivision: StellarSubdivision) -> tuple[PLFunction, int]:
    """Inverse of the transfer: split a function on the subdivision as
    (function on the coarse fan) + a * (new-ray Courant function)."""
    if ftilde.fan.key() != subdivision.fan.key():
        raise WrongFanError("function does not live on the subdivision")
    if subdivision.fan is subdivision.parent:
        return PLFunction(subdivision.parent, ftilde.values), 0
    idx = subdivision.new_ray_index
    coarse_value = sum(ftilde.values[i] for i in subdivision.tau)
    a = ftilde.values[idx] - coarse_value
    return PLFunction(subdivision.parent, ftilde.values[:idx]), a
