"""Matroids with exact rank oracles, flat enumeration, minors, Bergman
fans, and the Euler characteristic evaluated on the Bergman fan.

Ground sets are {0, ..., n}; ambient coordinates for Bergman fans drop the
last coordinate of Z^E modulo the all-ones vector, so the image of the
last basis vector is minus the sum of the others.  Ray order is proper
flats sorted by (cardinality, sorted elements); downstream value files
depend on this order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import MatroidError, NotEhrhartError, WrongFanError
from .ehrhart import EhrhartFailure, _chi_values, is_ehrhart
from .fan import Fan, build_fan, product_fan, star_fan
from .lattice import (
    IntMatrix,
    complete_to_unimodular_basis,
    invert_unimodular,
    primitive_vector,
    smith_normal_form,
    solve_rational,
)
from .plfun import PLFunction, reduce_values, restrict_values_to_star, subtract_linear_on_cone


class Matroid:
    """Matroid given by a rank oracle; constructors cover explicit bases,
    graphic matroids, and uniform matroids."""

    def __init__(self, ground_size: int, rank_fn, label: str = "matroid"):
        if ground_size < 1:
            raise MatroidError("ground set must be nonempty", code="INVALID_BASES")
        self.ground_size = ground_size
        self._rank_fn = rank_fn
        self.label = label
        self._flats: tuple[frozenset, ...] | None = None
        self._closure_cache: dict[frozenset, frozenset] = {}

    # -- constructors -------------------------------------------------

    @classmethod
    def uniform(cls, rank: int, ground_size: int) -> "Matroid":
        if not 0 <= rank <= ground_size:
            raise MatroidError("uniform rank out of range", code="INVALID_BASES")
        return cls(ground_size, lambda s: min(len(s), rank), f"U({rank},{ground_size})")

    @classmethod
    def from_bases(cls, ground_size: int, bases) -> "Matroid":
        base_sets = [frozenset(int(e) for e in b) for b in bases]
        if not base_sets:
            raise MatroidError("empty basis list", code="INVALID_BASES")
        size = len(base_sets[0])
        if any(len(b) != size for b in base_sets):
            raise MatroidError("bases differ in cardinality", code="INVALID_BASES",
                               witness=[sorted(b) for b in base_sets])
        if any(e < 0 or e >= ground_size for b in base_sets for e in b):
            raise MatroidError("basis element outside ground set", code="INVALID_BASES")
        base_set = set(base_sets)
        for b1 in base_set:
            for b2 in base_set:
                for x in b1 - b2:
                    if not any((b1 - {x}) | {y} in base_set for y in b2 - b1):
                        raise MatroidError(
                            "basis exchange fails", code="INVALID_BASES",
                            witness={"b1": sorted(b1), "b2": sorted(b2), "x": x},
                        )

        def rank(s: frozenset) -> int:
            return max(len(s & b) for b in base_set)

        return cls(ground_size, rank, "bases")

    @classmethod
    def from_graph(cls, vertices: int, edges) -> "Matroid":
        edges = [tuple(int(v) for v in e) for e in edges]
        if any(len(e) != 2 or not all(0 <= v < vertices for v in e) for e in edges):
            raise MatroidError("bad edge list", code="INVALID_BASES", witness=edges)

        def rank(s: frozenset) -> int:
            parent = list(range(vertices))

            def find(x):
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            comp = vertices
            for i in s:
                a, b = find(edges[i][0]), find(edges[i][1])
                if a != b:
                    parent[a] = b
                    comp -= 1
            return vertices - comp

        return cls(len(edges), rank, f"graphic({vertices})")

    # -- rank machinery -----------------------------------------------

    def rank(self, subset) -> int:
        return self._rank_fn(frozenset(subset))

    @property
    def full_rank(self) -> int:
        return self.rank(range(self.ground_size))

    def closure(self, subset) -> frozenset:
        s = frozenset(subset)
        cached = self._closure_cache.get(s)
        if cached is None:
            r = self.rank(s)
            cached = frozenset(e for e in range(self.ground_size) if self.rank(s | {e}) == r)
            self._closure_cache[s] = cached
        return cached

    def is_flat(self, subset) -> bool:
        s = frozenset(subset)
        return self.closure(s) == s

    def loops(self) -> frozenset:
        return self.closure(())

    def is_loopless(self) -> bool:
        return not self.loops()

    def flats(self) -> tuple[frozenset, ...]:
        """All flats, as closures of subsets; fine for desk-sized grounds."""
        if self._flats is None:
            found = {self.closure(())}
            frontier = list(found)
            while frontier:
                f = frontier.pop()
                for e in range(self.ground_size):
                    if e not in f:
                        g = self.closure(f | {e})
                        if g not in found:
                            found.add(g)
                            frontier.append(g)
            self._flats = tuple(sorted(found, key=lambda s: (len(s), sorted(s))))
        return self._flats

    def proper_flats(self) -> tuple[frozenset, ...]:
        full = frozenset(range(self.ground_size))
        return tuple(f for f in self.flats() if f and f != full)

    def spot_check_rank_axioms(self, samples: int = 40, seed: int = 7) -> None:
        """Randomized sanity check of monotonicity and submodularity."""
        import random
        rng = random.Random(seed)
        universe = list(range(self.ground_size))
        for _ in range(samples):
            a = frozenset(e for e in universe if rng.random() < 0.5)
            b = frozenset(e for e in universe if rng.random() < 0.5)
            ra, rb = self.rank(a), self.rank(b)
            assert self.rank(a | b) >= max(ra, rb)
            assert self.rank(a | b) + self.rank(a & b) <= ra + rb, "rank is not submodular"
        assert self.rank(()) == 0

    def __repr__(self) -> str:
        return f"Matroid({self.label}, ground={self.ground_size}, rank={self.full_rank})"


def _require_proper_flat(m: Matroid, subset) -> frozenset:
    f = frozenset(subset)
    if not m.is_flat(f) or not f or len(f) == m.ground_size:
        raise MatroidError(f"{sorted(f)} is not a proper flat", code="NOT_A_FLAT",
                           witness=sorted(f))
    return f


def restriction(m: Matroid, flat) -> tuple[Matroid, tuple[int, ...]]:
    """Restriction to a proper flat, relabeled to 0..|F|-1; also returns the
    label map (new index -> parent element)."""
    f = _require_proper_flat(m, flat)
    labels = tuple(sorted(f))

    def rank(s: frozenset) -> int:
        return m.rank(frozenset(labels[i] for i in s))

    return Matroid(len(labels), rank, f"{m.label}|{sorted(f)}"), labels


def contraction(m: Matroid, flat) -> tuple[Matroid, tuple[int, ...]]:
    """Contraction of a proper flat, on the complement relabeled to
    0..|E\\F|-1; also returns the label map."""
    f = _require_proper_flat(m, flat)
    labels = tuple(sorted(set(range(m.ground_size)) - f))
    base = m.rank(f)

    def rank(s: frozenset) -> int:
        return m.rank(frozenset(labels[i] for i in s) | f) - base

    return Matroid(len(labels), rank, f"{m.label}/{sorted(f)}"), labels


@dataclass(frozen=True)
class BergmanFan:
    matroid: Matroid
    fan: Fan
    ray_flats: tuple[frozenset, ...]  # ray index -> proper flat

    def flat_index(self, flat) -> int:
        return self.ray_flats.index(frozenset(flat))


def _bar_e(ground_size: int, subset) -> tuple[int, ...]:
    """Image of the indicator vector in Z^E modulo the all-ones vector,
    realized by dropping the last coordinate."""
    n = ground_size - 1
    v = [0] * n
    for e in subset:
        if e < n:
            v[e] += 1
        else:
            v = [x - 1 for x in v]
    return tuple(v)


def bergman_fan(m: Matroid) -> BergmanFan:
    """Fan on the chains of proper flats, one ray per proper flat with
    generator the reduced indicator vector; unimodular of dimension
    rank - 1."""
    if not m.is_loopless():
        raise MatroidError("matroid has loops", code="LOOPS_PRESENT",
                           witness=sorted(m.loops()))
    flats = m.proper_flats()
    n = m.ground_size - 1
    rays = []
    for f in flats:
        v = _bar_e(m.ground_size, f)
        assert primitive_vector(v) == v
        rays.append(v)
    index = {f: i for i, f in enumerate(flats)}
    rank = m.full_rank

    chains: list[tuple[int, ...]] = []

    def extend(chain: list[frozenset]):
        top_rank = m.rank(chain[-1]) if chain else 0
        if top_rank == rank - 1:
            chains.append(tuple(index[f] for f in chain))
            return
        for f in flats:
            if m.rank(f) == top_rank + 1 and (not chain or chain[-1] < f):
                extend(chain + [f])

    if rank >= 2:
        extend([])
    fan = build_fan(n, rays, chains, require_unimodular=True)
    result = BergmanFan(m, fan, flats)
    assert fan.dim == rank - 1
    return result


@dataclass(frozen=True)
class StarProductMatch:
    """Certified identification of a Bergman star fan with the product of
    the restriction and contraction Bergman fans."""

    restriction: BergmanFan
    contraction: BergmanFan
    product: Fan
    star_to_product: tuple[int, ...]  # star ray index -> product ray index
    change_of_basis: IntMatrix       # unimodular, maps star rays to product rays


def star_product_decomposition(bergman: BergmanFan, flat) -> StarProductMatch:
    """Match the star fan at a flat's ray with the product of the minors'
    Bergman fans, flat by flat, and certify a unimodular change of basis
    whenever the star rays span the quotient; reports failure rather than
    guessing if the matching breaks."""
    m = bergman.matroid
    f = frozenset(flat)
    rho = bergman.flat_index(f)
    star = star_fan(bergman.fan, (rho,))
    rest, rest_labels = restriction(m, f)
    contr, contr_labels = contraction(m, f)
    berg_rest = bergman_fan(rest)
    berg_contr = bergman_fan(contr)
    prod = product_fan(berg_rest.fan, berg_contr.fan)
    offset = berg_rest.fan.n_rays
    rest_pos = {g: i for i, g in enumerate(berg_rest.ray_flats)}
    contr_pos = {g: i for i, g in enumerate(berg_contr.ray_flats)}
    rest_inv = {e: i for i, e in enumerate(rest_labels)}
    contr_inv = {e: i for i, e in enumerate(contr_labels)}
    matching = []
    for parent_ray in star.ray_lift:
        g = bergman.ray_flats[parent_ray]
        if g < f:
            key = frozenset(rest_inv[e] for e in g)
            if key not in rest_pos:
                raise WrongFanError("star ray does not match a restriction flat",
                                    witness=sorted(g))
            matching.append(rest_pos[key])
        elif f < g:
            key = frozenset(contr_inv[e] for e in g - f)
            if key not in contr_pos:
                raise WrongFanError("star ray does not match a contraction flat",
                                    witness=sorted(g))
            matching.append(offset + contr_pos[key])
        else:
            raise WrongFanError("star ray flat is incomparable with the center",
                                witness=sorted(g))
    if sorted(matching) != list(range(prod.n_rays)):
        raise WrongFanError("star rays and product rays do not biject")
    star_cones = {frozenset(matching[i] for i in c) for c in star.fan.cones}
    prod_cones = {frozenset(c) for c in prod.cones}
    if star_cones != prod_cones:
        raise WrongFanError("star and product cone sets differ under the flat matching")

    change = _spanning_change_of_basis(star.fan, prod, matching)
    return StarProductMatch(berg_rest, berg_contr, prod, tuple(matching), change)


def _saturation_basis(vectors, ambient: int) -> list:
    """Basis of the saturated sublattice spanned rationally by the vectors:
    the leading rows of the inverse right transform of the Smith
    decomposition."""
    if not vectors:
        return []
    a = IntMatrix(vectors)
    d, _, q = smith_normal_form(a)
    r = sum(1 for i in range(min(a.rows, a.cols)) if d.entries[i][i] != 0)
    q_inv = invert_unimodular(q)
    return [q_inv.entries[i] for i in range(r)]


def _spanning_change_of_basis(star_fan_obj: Fan, prod: Fan, matching) -> IntMatrix:
    """Unimodular T with T * star_ray = matched product ray for all rays.

    The rays only determine T on the saturation of their span; the induced
    map between the two saturations must be integral and unimodular (else
    the matching is reported as failed), and it is extended to the full
    ambient lattice by the deterministic basis completion.
    """
    dim = star_fan_obj.ambient_dim
    if dim == 0:
        return IntMatrix(())
    basis_v = _saturation_basis(list(star_fan_obj.rays), dim)
    basis_w = _saturation_basis([prod.rays[matching[i]] for i in range(len(matching))], dim)
    r = len(basis_v)
    if len(basis_w) != r:
        raise WrongFanError("saturations of the matched ray spans differ in rank")
    p_v, p_v_dual = complete_to_unimodular_basis(basis_v, dim)
    p_w, w_dual = complete_to_unimodular_basis(basis_w, dim)

    def coords(dual: IntMatrix, vec) -> list[int]:
        full = dual.mat_vec(vec)
        if any(x != 0 for x in full[r:]):
            raise WrongFanError("ray leaves the saturation span")
        return list(full[:r])

    c_cols = [coords(p_v_dual, ray) for ray in star_fan_obj.rays]
    e_cols = [coords(w_dual, prod.rays[matching[i]]) for i in range(len(matching))]
    if r:
        chosen: list[int] = []
        rows: list[list] = []
        for i, c in enumerate(c_cols):
            trial = rows + [c]
            if _rational_rank(trial) == len(trial):
                rows = trial
                chosen.append(i)
            if len(chosen) == r:
                break
        if len(chosen) < r:
            raise WrongFanError("star rays do not span their saturation")
        c_sel = IntMatrix([c_cols[i] for i in chosen]).transpose()
        s_rows = []
        for row_idx in range(r):
            rhs = [e_cols[i][row_idx] for i in chosen]
            sol = solve_rational(c_sel.transpose(), rhs)
            if sol is None or any(x.denominator != 1 for x in sol):
                raise WrongFanError("induced saturation map is not integral")
            s_rows.append([int(x) for x in sol])
        s = IntMatrix(s_rows)
        if abs(s.det()) != 1:
            raise WrongFanError("induced saturation map is not unimodular",
                                witness={"det": s.det()})
    else:
        s = IntMatrix(())
    block = [[s.entries[i][j] if i < r and j < r else (1 if i == j else 0)
              for j in range(dim)] for i in range(dim)]
    t = p_w.mul(IntMatrix(block)).mul(p_v_dual)
    if abs(t.det()) != 1:
        raise WrongFanError("change of basis is not unimodular", witness={"det": t.det()})
    for i, ray in enumerate(star_fan_obj.rays):
        if t.mat_vec(ray) != prod.rays[matching[i]]:
            raise WrongFanError("change of basis fails on a ray", witness={"ray": i})
    return t


def _rational_rank(rows) -> int:
    work = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    cols = len(rows[0]) if rows else 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(work)) if work[i][c] != 0), None)
        if piv is None:
            continue
        work[rank], work[piv] = work[piv], work[rank]
        inv = 1 / work[rank][c]
        work[rank] = [x * inv for x in work[rank]]
        for i in range(len(work)):
            if i != rank and work[i][c]:
                fct = work[i][c]
                work[i] = [x - fct * y for x, y in zip(work[i], work[rank])]
        rank += 1
    return rank


def chi_matroid(m: Matroid, f: PLFunction, method: str = "generic",
                bergman: BergmanFan | None = None) -> int:
    """Euler characteristic of the matroid at a piecewise-linear class on
    its Bergman fan.

    method="generic" runs the certified recursion on the Bergman fan;
    method="product" evaluates star contributions through the
    restriction/contraction product decomposition instead, giving an
    independent code path.
    """
    if bergman is None:
        bergman = bergman_fan(m)
    if f.fan.key() != bergman.fan.key():
        raise WrongFanError("function does not live on the Bergman fan")
    if method == "generic":
        cert = is_ehrhart(bergman.fan)
        if isinstance(cert, EhrhartFailure):
            raise NotEhrhartError("Bergman fan failed certification", witness=cert.payload())
        return _chi_values(bergman.fan, f.values)
    if method == "product":
        return _chi_product_path(bergman, f.values, {})
    raise ValueError(f"unknown method {method!r}")


def _chi_product_path(bergman: BergmanFan, values, memo: dict) -> int:
    """Recursion with star values computed via the product decomposition;
    memoized separately from the generic path so the two stay independent."""
    fan = bergman.fan
    if fan.dim == 0:
        return 1
    decomps: dict[int, StarProductMatch] = memo.setdefault(("decomp", fan.key()), {})
    local = memo.setdefault(("chi", fan.key()), {})
    sigma0 = fan.grade(fan.dim)[0]
    chain = []
    cur = tuple(values)
    while True:
        key = reduce_values(fan, cur)
        base = local.get(key)
        if base is not None:
            break
        g = subtract_linear_on_cone(fan, cur, sigma0)
        rho = next((i for i, v in enumerate(g) if v != 0 and i not in sigma0), None)
        if rho is None:
            base = 1
            local[key] = 1
            break
        probe = g if g[rho] > 0 else tuple(v + 1 if i == rho else v for i, v in enumerate(g))
        sign = 1 if g[rho] > 0 else -1
        if rho not in decomps:
            decomps[rho] = star_product_decomposition(bergman, bergman.ray_flats[rho])
        match = decomps[rho]
        _, star_vals = restrict_values_to_star(fan, probe, (rho,))
        prod_vals = [0] * match.product.n_rays
        for s, target in enumerate(match.star_to_product):
            prod_vals[target] = star_vals[s]
        offset = match.restriction.fan.n_rays
        left = tuple(prod_vals[:offset])
        right = tuple(prod_vals[offset:])
        contrib = sign * (_chi_product_path(match.restriction, left, memo)
                          * _chi_product_path(match.contraction, right, memo))
        if sign > 0:
            cur = tuple(v - 1 if i == rho else v for i, v in enumerate(g))
        else:
            cur = probe
        chain.append((key, contrib))
    for key, contrib in reversed(chain):
        base += contrib
        local[key] = base
    return base
