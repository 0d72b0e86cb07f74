"""Pointed rational simplicial fans: validation, faces, star fans,
completeness, balancing, stellar subdivision, products.

A fan is stored as a list of primitive ray generators plus the maximal
cones as sorted tuples of ray indices.  The face closure is computed
eagerly (subsets of a simplicial cone's rays are exactly its faces) and
fans are immutable after construction; derived combinatorics and the
caches used by the Ehrhart engine live on the instance.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import (
    ConeNotInFanError,
    FanValidationError,
    NotPureError,
)
from .errors import DependentVectorsError
from .lattice import (
    IntMatrix,
    Vector,
    complete_to_unimodular_basis,
    is_unimodular_set,
    primitive_vector,
    quotient_projection,
    solve_rational,
)

Cone = tuple[int, ...]  # sorted ray indices; () is the origin cone

_PROBE_SEED = 20240411


class Fan:
    """Validated simplicial fan; immutable value with internal caches."""

    __slots__ = (
        "ambient_dim", "rays", "maximal_cones", "cones", "cones_by_dim",
        "dim", "is_unimodular", "_key", "_star_cache", "_chi_memo",
        "_volume_memo", "_class_hnf", "_certificate", "_balanced",
        "_dual_cache", "_complete",
    )

    def __init__(self, ambient_dim: int, rays, maximal_cones, is_unimodular: bool):
        self.ambient_dim = ambient_dim
        self.rays: tuple[Vector, ...] = tuple(tuple(r) for r in rays)
        self.maximal_cones: tuple[Cone, ...] = tuple(
            tuple(sorted(c)) for c in maximal_cones if len(c) > 0
        )
        cones: set[Cone] = {()}
        for c in self.maximal_cones:
            for k in range(len(c) + 1):
                cones.update(combinations(c, k))
        self.cones: frozenset[Cone] = frozenset(cones)
        self.dim = max((len(c) for c in cones), default=0)
        by_dim: dict[int, list[Cone]] = {}
        for c in cones:
            by_dim.setdefault(len(c), []).append(c)
        self.cones_by_dim = {k: tuple(sorted(v)) for k, v in by_dim.items()}
        self.is_unimodular = is_unimodular
        self._key = (ambient_dim, tuple(sorted(self.rays)),
                     tuple(sorted(tuple(sorted(self.rays[i] for i in c)) for c in self.maximal_cones)))
        self._star_cache: dict[Cone, "StarFan"] = {}
        self._chi_memo: dict = {}
        self._volume_memo: dict = {}
        self._class_hnf = None
        self._certificate = None
        self._balanced = None
        self._dual_cache: dict[Cone, IntMatrix] = {}
        self._complete = None

    def key(self):
        """Structural identity: rays and cones in sorted presentation."""
        return self._key

    @property
    def n_rays(self) -> int:
        return len(self.rays)

    def grade(self, k: int) -> tuple[Cone, ...]:
        return self.cones_by_dim.get(k, ())

    def ray_matrix(self) -> IntMatrix:
        return IntMatrix(self.rays)

    def cone_rays(self, cone: Cone) -> list[Vector]:
        return [self.rays[i] for i in cone]

    def require_cone(self, cone) -> Cone:
        c = tuple(sorted(int(i) for i in cone))
        if c not in self.cones:
            raise ConeNotInFanError(f"cone {c} is not in the fan", witness=list(c))
        return c

    def __repr__(self) -> str:
        return f"Fan(dim={self.dim}, ambient={self.ambient_dim}, rays={self.n_rays}, maximal={len(self.maximal_cones)})"


def _point_in_cone(fan: Fan, cone: Cone, point) -> bool:
    """Exact membership of a rational point in a simplicial cone."""
    if not cone:
        return all(x == 0 for x in point)
    mat = IntMatrix(tuple(zip(*fan.cone_rays(cone))))  # columns are the rays
    coeffs = solve_rational(mat, point)
    return coeffs is not None and all(c >= 0 for c in coeffs)


def _phase1_feasible(eq_rows: list[list[int]], rhs: list[int]) -> bool:
    """Exact feasibility of {x >= 0 : A x = b} by phase-1 simplex over
    Fractions with Bland's rule."""
    m = len(eq_rows)
    n = len(eq_rows[0]) if m else 0
    a = [[Fraction(x) for x in row] for row in eq_rows]
    b = [Fraction(x) for x in rhs]
    for i in range(m):
        if b[i] < 0:
            a[i] = [-x for x in a[i]]
            b[i] = -b[i]
    # tableau with artificial variables; objective = sum of artificials
    tab = [a[i] + [Fraction(1 if j == i else 0) for j in range(m)] + [b[i]] for i in range(m)]
    basis = list(range(n, n + m))
    cost = [Fraction(0)] * (n + m) + [Fraction(0)]
    for i in range(m):
        cost = [c - t for c, t in zip(cost, tab[i])]
    for k in range(n, n + m):
        cost[k] = Fraction(0)  # basic artificials carry zero reduced cost
    total = n + m
    while True:
        enter = next((j for j in range(total) if cost[j] < 0), None)
        if enter is None:
            break
        ratios = [(tab[i][total] / tab[i][enter], basis[i], i)
                  for i in range(m) if tab[i][enter] > 0]
        if not ratios:
            break  # unbounded phase-1 cannot happen; defensive
        _, _, leave = min(ratios)
        piv = tab[leave][enter]
        tab[leave] = [x / piv for x in tab[leave]]
        for i in range(m):
            if i != leave and tab[i][enter]:
                f = tab[i][enter]
                tab[i] = [x - f * y for x, y in zip(tab[i], tab[leave])]
        if cost[enter]:
            f = cost[enter]
            cost = [x - f * y for x, y in zip(cost, tab[leave])]
        basis[leave] = enter
    return -cost[total] == 0


def _cones_intersect_badly(fan_rays, cone_a: Cone, cone_b: Cone) -> bool:
    """True iff the intersection of the two simplicial cones is strictly
    larger than the cone on their shared rays.

    Encoded as exact LP feasibility: a point of the intersection whose
    representation uses a non-shared generator of either cone exists iff
    sum_a a_s u_s - sum_b b_t u_t = 0 has a solution with a, b >= 0 and the
    non-shared coordinates summing to 1.
    """
    shared = set(cone_a) & set(cone_b)
    extra = [i for i in cone_a if i not in shared] + [i for i in cone_b if i not in shared]
    if not extra:
        return False
    n = len(fan_rays[0]) if fan_rays else 0
    cols = [list(fan_rays[i]) for i in cone_a] + [[-x for x in fan_rays[i]] for i in cone_b]
    rows = [[col[d] for col in cols] for d in range(n)]
    marker = [1 if (k < len(cone_a) and cone_a[k] not in shared)
              or (k >= len(cone_a) and cone_b[k - len(cone_a)] not in shared) else 0
              for k in range(len(cols))]
    rows.append(marker)
    rhs = [0] * n + [1]
    return _phase1_feasible(rows, rhs)


def build_fan(ambient_dim: int, rays, maximal_cones, require_unimodular: bool = True) -> Fan:
    """Validate and build a fan.

    Checks: rays primitive and distinct, listed cones simplicial (and
    unimodular when requested), and every pair of maximal cones meets in the
    common face on their shared rays (exact rational feasibility test).
    """
    rays = [tuple(int(x) for x in r) for r in rays]
    for i, r in enumerate(rays):
        if len(r) != ambient_dim:
            raise FanValidationError(f"ray {i} has wrong length", code="NON_PRIMITIVE_RAY", witness=list(r))
        if all(x == 0 for x in r) or primitive_vector(r) != r:
            raise FanValidationError(f"ray {i} is not primitive", code="NON_PRIMITIVE_RAY", witness=list(r))
    seen: dict[Vector, int] = {}
    for i, r in enumerate(rays):
        if r in seen:
            raise FanValidationError(f"rays {seen[r]} and {i} coincide", code="DUPLICATE_RAY", witness=list(r))
        seen[r] = i

    cones = []
    for c in maximal_cones:
        c = tuple(sorted(int(i) for i in c))
        if len(set(c)) != len(c) or any(i < 0 or i >= len(rays) for i in c):
            raise FanValidationError(f"bad ray indices in cone {c}", code="NOT_SIMPLICIAL", witness=list(c))
        cones.append(c)

    unimodular = True
    for c in cones:
        if not c:
            continue
        try:
            uni = is_unimodular_set([rays[i] for i in c])
        except DependentVectorsError:
            raise FanValidationError(f"cone {c} is not simplicial", code="NOT_SIMPLICIAL", witness=list(c))
        if not uni:
            unimodular = False
            if require_unimodular:
                raise FanValidationError(f"cone {c} is not unimodular", code="NOT_UNIMODULAR", witness=list(c))

    for a, b in combinations(cones, 2):
        if _cones_intersect_badly(rays, a, b):
            raise FanValidationError(
                f"cones {a} and {b} do not meet in a common face",
                code="BAD_INTERSECTION", witness=[list(a), list(b)],
            )

    # drop cones that are faces of other listed cones so maximal_cones is tight
    maximal = [c for c in cones if not any(set(c) < set(d) for d in cones)]
    # dedupe while preserving order
    maximal = list(dict.fromkeys(maximal))
    return Fan(ambient_dim, rays, maximal, unimodular)


@dataclass(frozen=True)
class StarFan:
    """Star of a fan at a cone, living in the quotient lattice."""

    parent: Fan
    cone: Cone
    fan: Fan
    ray_lift: tuple[int, ...]    # star ray index -> parent ray index
    projection: IntMatrix        # quotient map, (n-k) x n
    section_basis: IntMatrix     # the basis completion used

    def push_values(self, values) -> tuple[int, ...]:
        return tuple(values[p] for p in self.ray_lift)


def star_fan(fan: Fan, cone) -> StarFan:
    """Star fan at a cone of a unimodular fan.

    Rays are the primitive images of the rays that span a cone together
    with ``cone``, ordered by originating parent index; cones are the images
    of the cones containing ``cone``.
    """
    cone = fan.require_cone(cone)
    cached = fan._star_cache.get(cone)
    if cached is not None:
        return cached
    sigma = set(cone)
    rays = fan.cone_rays(cone)
    b, bdual = complete_to_unimodular_basis(rays, fan.ambient_dim)
    proj = IntMatrix(bdual.entries[len(cone):])
    lift = sorted({i for c in fan.cones if sigma <= set(c) for i in c if i not in sigma})
    star_rays = []
    for i in lift:
        img = proj.mat_vec(fan.rays[i])
        assert primitive_vector(img) == img, "image of a unimodular ray must be primitive"
        star_rays.append(img)
    index_of = {p: s for s, p in enumerate(lift)}
    # sorted iteration keeps the star's cone order independent of set hashing
    containing = [c for c in sorted(fan.cones) if sigma <= set(c)]
    maximal = [c for c in containing if not any(set(c) < set(d) for d in containing)]
    star_cones = [tuple(sorted(index_of[i] for i in c if i not in sigma)) for c in maximal]
    sf = build_fan(fan.ambient_dim - len(cone), star_rays, star_cones,
                   require_unimodular=fan.is_unimodular)
    assert sf.is_unimodular or not fan.is_unimodular
    result = StarFan(fan, cone, sf, tuple(lift), proj, b)
    fan._star_cache[cone] = result
    return result


def is_complete(fan: Fan) -> bool:
    """Completeness test for pure simplicial fans of full dimension.

    Ridge pairing (every (n-1)-cone in exactly two maximal cones) plus
    connectivity of the dual graph, cross-checked by exact membership of
    deterministic probe points.  Acceptance-grade fans are complete by
    construction; see module docs for the limitation.
    """
    if fan._complete is None:
        fan._complete = _is_complete_uncached(fan)
    return fan._complete


def _is_complete_uncached(fan: Fan) -> bool:
    n = fan.ambient_dim
    if fan.dim != n or n == 0:
        return n == 0
    maximal = fan.maximal_cones
    if any(len(c) != n for c in maximal):
        return False
    ridge_count: dict[Cone, list[int]] = {}
    for idx, c in enumerate(maximal):
        for ridge in combinations(c, n - 1):
            ridge_count.setdefault(ridge, []).append(idx)
    if any(len(v) != 2 for v in ridge_count.values()):
        return False
    adj: dict[int, set[int]] = {i: set() for i in range(len(maximal))}
    for pair in ridge_count.values():
        adj[pair[0]].add(pair[1])
        adj[pair[1]].add(pair[0])
    seen = {0}
    stack = [0]
    while stack:
        for j in adj[stack.pop()]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    if len(seen) != len(maximal):
        return False
    rng = random.Random(_PROBE_SEED)
    probes: list[tuple] = []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        probes.append(tuple(e))
        probes.append(tuple(-x for x in e))
    for _ in range(n + 1):
        probes.append(tuple(Fraction(rng.randint(-97, 97), rng.randint(1, 13)) for _ in range(n)))
    for pt in probes:
        if not any(_point_in_cone(fan, c, pt) for c in maximal):
            return False
    return True


def is_balanced(fan: Fan, with_witness: bool = False):
    """Balancing test for a pure unimodular fan of dimension d: for every
    (d-1)-cone, the sum of the opposite generators over the maximal cones
    containing it lies in the rational span of the cone.

    Returns bool, or (bool, witness) with the offending ridge and the
    residual of the sum in the quotient lattice.
    """
    if fan._balanced is not None and not with_witness:
        return fan._balanced
    d = fan.dim
    if d == 0:
        fan._balanced = True
        return (True, None) if with_witness else True
    maximal = fan.grade(d)
    if set(fan.maximal_cones) != set(maximal):
        raise NotPureError("fan is not pure", witness={"dim": d})
    result: bool | None = None
    witness = None
    for tau in fan.grade(d - 1) if d >= 1 else ():
        total = [0] * fan.ambient_dim
        for sigma in maximal:
            if set(tau) <= set(sigma):
                (extra,) = set(sigma) - set(tau)
                total = [a + b for a, b in zip(total, fan.rays[extra])]
        proj = quotient_projection(fan.cone_rays(tau), fan.ambient_dim)
        residual = proj.mat_vec(total)
        if any(x != 0 for x in residual):
            result = False
            witness = {"ridge": list(tau), "residual": list(residual), "sum": list(total)}
            break
    if result is None:
        result = True
    fan._balanced = result
    return (result, witness) if with_witness else result


@dataclass(frozen=True)
class StellarSubdivision:
    """Result of a stellar subdivision; iterates as (fan, new_ray_index)."""

    parent: Fan
    tau: Cone
    fan: Fan
    new_ray_index: int

    def __iter__(self):
        return iter((self.fan, self.new_ray_index))


def stellar_subdivision(fan: Fan, tau) -> StellarSubdivision:
    """Subdivide at a cone: insert the ray through the sum of the cone's
    generators and replace every cone containing tau accordingly.  Support
    and unimodularity are preserved (checked by probe points below).
    """
    tau = fan.require_cone(tau)
    if not tau:
        raise ConeNotInFanError("cannot subdivide at the origin cone", witness=[])
    u_tau = tuple(sum(c) for c in zip(*fan.cone_rays(tau)))
    if len(tau) == 1:
        return StellarSubdivision(fan, tau, fan, tau[0])
    rays = list(fan.rays) + [u_tau]
    new_idx = len(fan.rays)
    new_maximal: list[Cone] = []
    for sigma in fan.maximal_cones:
        if set(tau) <= set(sigma):
            for rho in tau:
                new_maximal.append(tuple(sorted((set(sigma) - {rho}) | {new_idx})))
        else:
            new_maximal.append(sigma)
    child = build_fan(fan.ambient_dim, rays, new_maximal, require_unimodular=fan.is_unimodular)
    _assert_support_preserved(fan, tau, child, new_idx)
    return StellarSubdivision(fan, tau, child, new_idx)


def _assert_support_preserved(fan: Fan, tau: Cone, child: Fan, new_idx: int) -> None:
    """Probe each subdivided maximal cone: deterministic interior rational
    points must be covered by its replacement cones."""
    rng = random.Random(_PROBE_SEED + 1)
    for sigma in fan.maximal_cones:
        if not set(tau) <= set(sigma):
            continue
        replacements = [tuple(sorted((set(sigma) - {rho}) | {new_idx})) for rho in tau]
        for _ in range(4):
            coeffs = [Fraction(rng.randint(0, 23), rng.randint(1, 7)) for _ in sigma]
            pt = [sum(c * r[d] for c, r in zip(coeffs, fan.cone_rays(sigma)))
                  for d in range(fan.ambient_dim)]
            assert any(_point_in_cone(child, rep, pt) for rep in replacements), \
                "stellar subdivision failed to cover the subdivided cone"


def product_fan(fan1: Fan, fan2: Fan) -> Fan:
    """Product fan: embedded rays of both factors, cones are sums."""
    n1, n2 = fan1.ambient_dim, fan2.ambient_dim
    rays = [tuple(r) + (0,) * n2 for r in fan1.rays]
    rays += [(0,) * n1 + tuple(r) for r in fan2.rays]
    offset = len(fan1.rays)
    maximal = [tuple(sorted(c1 + tuple(i + offset for i in c2)))
               for c1 in fan1.maximal_cones for c2 in fan2.maximal_cones]
    if not fan1.maximal_cones:
        maximal = [tuple(i + offset for i in c2) for c2 in fan2.maximal_cones]
    if not fan2.maximal_cones:
        maximal = list(fan1.maximal_cones)
    return build_fan(n1 + n2, rays, maximal,
                     require_unimodular=fan1.is_unimodular and fan2.is_unimodular)


def projective_fan(k: int) -> Fan:
    """Complete unimodular fan on k+1 rays: the standard basis vectors and
    their negated sum, with every k-subset spanning a maximal cone."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return build_fan(0, [], [])
    rays = [tuple(1 if j == i else 0 for j in range(k)) for i in range(k)]
    rays.append(tuple(-1 for _ in range(k)))
    maximal = [tuple(sorted(c)) for c in combinations(range(k + 1), k)]
    return build_fan(k, rays, maximal)
