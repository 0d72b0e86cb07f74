"""The Ehrhart engine.

Contains the recursive evaluator for the lattice-point functional on a
certified fan, the synthesis of its polynomial in the binomial basis via
finite differences, the full decision procedure for whether a unimodular
fan admits such a functional, closed forms in dimensions one and two, and
the volume recursion.

The decision procedure works per ray: the restriction of the sought
polynomial across a ray is forced by the star fan's (recursively
certified) polynomial composed with a linear substitution; expanding that
composite in the shifted binomial basis yields coefficients that must
agree across rays, and the assembled candidate must additionally be
invariant under adding the ray values of any integral linear functional.
Both checks are exact coefficient computations, so a passing fan comes
with a certificate and a failing fan with a reproducible witness.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from math import factorial

from .errors import (
    DegreeBoundError,
    NotBalancedError,
    NotEhrhartError,
    NotUnimodularError,
    WrongFanError,
    _jsonable,
)
from .fan import Fan, is_balanced, star_fan
from .plfun import (
    PLFunction,
    cone_dual,
    reduce_values,
    restrict_values_to_star,
    subtract_linear_on_cone,
)

_PROBE_SEED = 977


def binom_int(x: int, k: int) -> int:
    """Binomial coefficient as an integer-valued polynomial in x; defined
    for any integer x (negative included) and k >= 0."""
    if k < 0:
        return 0
    if k == 0:
        return 1
    if k == 1:
        return x
    if k == 2:
        return x * (x - 1) // 2
    num = 1
    for i in range(k):
        num *= x - i
    return num // factorial(k)


def _multinomial(total: int, parts) -> int:
    out = factorial(total)
    for p in parts:
        out //= factorial(p)
    return out


@dataclass(frozen=True)
class IVPoly:
    """Integer-valued polynomial in ray-indexed variables, stored by its
    coefficients in the basis of products of binomial coefficients."""

    variables: tuple[int, ...]
    coeffs: dict[tuple[int, ...], int] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {tuple(a): int(c) for a, c in self.coeffs.items() if c != 0}
        object.__setattr__(self, "coeffs", cleaned)
        object.__setattr__(self, "variables", tuple(self.variables))

    @classmethod
    def constant(cls, value: int) -> "IVPoly":
        return cls((), {(): value} if value else {})

    def degree(self) -> int:
        return max((sum(a) for a in self.coeffs), default=0)

    def _sparse_terms(self):
        # exponent tuples are dense; cache the nonzero slots per term
        cached = getattr(self, "_sparse", None)
        if cached is None:
            cached = tuple(
                (c, tuple((v, e) for v, e in zip(self.variables, alpha) if e))
                for alpha, c in self.coeffs.items()
            )
            object.__setattr__(self, "_sparse", cached)
        return cached

    def evaluate(self, values_by_ray) -> int:
        """Evaluate at integer ray values (indexable by ray index)."""
        total = 0
        for c, exps in self._sparse_terms():
            term = c
            for var, e in exps:
                term *= binom_int(values_by_ray[var], e)
                if term == 0:
                    break
            total += term
        return total

    def leading_times_dfactorial(self, values_by_ray, d: int) -> int:
        """d! times the degree-d homogeneous part, evaluated exactly.

        The top monomial of a degree-e binomial basis element is x^e / e!,
        so the contribution of a top-degree term is the multinomial
        coefficient times the plain monomial.
        """
        total = 0
        for alpha, c in self.coeffs.items():
            if sum(alpha) != d:
                continue
            term = c * _multinomial(d, alpha)
            for var, e in zip(self.variables, alpha):
                term *= values_by_ray[var] ** e
            total += term
        return total

    def terms(self):
        """Deterministic iteration: exponent dicts keyed by ray index."""
        for alpha in sorted(self.coeffs):
            yield {v: e for v, e in zip(self.variables, alpha) if e}, self.coeffs[alpha]


def binomial_expand(oracle, variables, degree_bound: int, verify_bound: bool = True) -> IVPoly:
    """Expand an integer-valued polynomial oracle in the binomial basis.

    Coefficients are iterated finite differences at the origin,
    c_alpha = (Delta^alpha oracle)(0); with ``verify_bound`` the layer just
    above the stated degree bound is probed and must vanish, otherwise the
    bound was wrong.  Callers may skip the probe only when the bound is
    structural (for example, the shift difference of a polynomial that was
    itself assembled with bounded support).  The oracle is called with a
    dict mapping variable -> integer.
    """
    variables = tuple(variables)
    cache: dict[tuple[int, ...], int] = {}
    zero = (0,) * len(variables)

    def value(point: tuple[int, ...]) -> int:
        v = cache.get(point)
        if v is None:
            v = oracle({var: x for var, x in zip(variables, point)})
            cache[point] = v
        return v

    def coefficient(alpha: tuple[int, ...]) -> int:
        # iterate gamma <= alpha over the nonzero slots of alpha only
        support = [(pos, a) for pos, a in enumerate(alpha) if a]
        total = 0
        choices = [[(g, binom_int(a, g) if (a - g) % 2 == 0 else -binom_int(a, g))
                    for g in range(a + 1)] for _, a in support]
        for picks in product(*choices):
            weight = 1
            point = list(zero)
            for (pos, _), (g, w) in zip(support, picks):
                point[pos] = g
                weight *= w
            total += weight * value(tuple(point))
        return total

    def layer(k: int):
        if not variables:
            if k == 0:
                yield ()
            return
        def rec(prefix, remaining, slots):
            if slots == 1:
                yield prefix + (remaining,)
                return
            for v in range(remaining + 1):
                yield from rec(prefix + (v,), remaining - v, slots - 1)
        yield from rec((), k, len(variables))

    coeffs: dict[tuple[int, ...], int] = {}
    for k in range(degree_bound + 1):
        for alpha in layer(k):
            c = coefficient(alpha)
            if c:
                coeffs[alpha] = c
    if variables and verify_bound:
        for alpha in layer(degree_bound + 1):
            if coefficient(alpha) != 0:
                raise DegreeBoundError(
                    "oracle exceeds the stated degree bound",
                    witness={"alpha": list(alpha), "bound": degree_bound},
                )
    return IVPoly(variables, coeffs)


@dataclass(frozen=True)
class EhrhartCertificate:
    fan_key: tuple
    polynomial: IVPoly
    star_certificates: dict[int, "EhrhartCertificate"]


@dataclass(frozen=True)
class EhrhartFailure:
    """Reproducible witness that a fan admits no Ehrhart functional."""

    reason: str  # STAR_NOT_EHRHART | COEFF_MISMATCH | LINEAR_INVARIANCE
    witness: dict

    def payload(self) -> dict:
        return {"reason": self.reason, **_jsonable(self.witness)}


def _sigma_zero(fan: Fan):
    return fan.grade(fan.dim)[0]


def _chi_values(fan: Fan, values) -> int:
    """Evaluate the recursion on raw value tuples, memoized per fan on the
    canonical class representative.

    The chain along one fan is unrolled iteratively (each Courant step
    lowers the normalized absolute sum by one); star evaluations recurse,
    dropping dimension each time.
    """
    if fan.dim == 0:
        return 1
    memo = fan._chi_memo
    sigma0 = _sigma_zero(fan)
    chain: list[tuple[tuple[int, ...], int]] = []
    cur = tuple(values)
    while True:
        key = reduce_values(fan, cur)
        base = memo.get(key)
        if base is not None:
            break
        g = subtract_linear_on_cone(fan, cur, sigma0)
        rho = next((i for i, v in enumerate(g) if v != 0 and i not in sigma0), None)
        if rho is None:
            base = 1
            memo[key] = 1
            break
        if g[rho] > 0:
            star, star_vals = restrict_values_to_star(fan, g, (rho,))
            contrib = _chi_values(star.fan, star_vals)
            cur = tuple(v - 1 if i == rho else v for i, v in enumerate(g))
        else:
            bumped = tuple(v + 1 if i == rho else v for i, v in enumerate(g))
            star, star_vals = restrict_values_to_star(fan, bumped, (rho,))
            contrib = -_chi_values(star.fan, star_vals)
            cur = bumped
        chain.append((key, contrib))
    for key, contrib in reversed(chain):
        base += contrib
        memo[key] = base
    return base


def _dim1_residual(fan: Fan):
    return tuple(sum(c) for c in zip(*fan.rays)) if fan.rays else (0,) * fan.ambient_dim


def _dim2_a_values(fan: Fan):
    """Solve each ray's star-sum equation: the sum of the opposite
    generators over the two-cones through the ray must be an integer
    multiple of the ray.  Returns (a_values, None) or (None, witness)."""
    a_values = []
    for rho in range(fan.n_rays):
        total = [0] * fan.ambient_dim
        for sigma in fan.grade(2):
            if rho in sigma:
                (other,) = set(sigma) - {rho}
                total = [x + y for x, y in zip(total, fan.rays[other])]
        u = fan.rays[rho]
        pivot = next(i for i, x in enumerate(u) if x != 0)
        if total[pivot] % u[pivot]:
            return None, {"ray": rho, "sum": total}
        a = total[pivot] // u[pivot]
        if tuple(a * x for x in u) != tuple(total):
            return None, {"ray": rho, "sum": total}
        a_values.append(a)
    return tuple(a_values), None


def _canonical_residual(fan: Fan):
    """Closed-form linear-invariance residual for dimensions one and two:
    the sum of the rays, resp. the sum of (2 - a_rho) u_rho."""
    if fan.dim == 1:
        return _dim1_residual(fan)
    if fan.dim == 2 and set(fan.maximal_cones) == set(fan.grade(2)):
        a_values, bad = _dim2_a_values(fan)
        if bad is None:
            return tuple(sum((2 - a) * u[j] for a, u in zip(a_values, fan.rays))
                         for j in range(fan.ambient_dim))
    return None


def is_ehrhart(fan: Fan):
    """Decision procedure; returns an EhrhartCertificate or an
    EhrhartFailure (never raises for a non-Ehrhart fan).

    Recursively certifies all star fans, forces the per-ray coefficients
    of the candidate polynomial by finite differences, checks their
    cross-ray consistency, assembles the polynomial, and verifies exact
    invariance under the ray values of every basis linear functional.
    """
    if not fan.is_unimodular:
        raise NotUnimodularError("the decision procedure needs a unimodular fan")
    if fan._certificate is not None:
        return fan._certificate
    result = _decide_ehrhart(fan)
    fan._certificate = result
    return result


def _decide_ehrhart(fan: Fan):
    if fan.dim == 0:
        return EhrhartCertificate(fan.key(), IVPoly.constant(1), {})

    star_certs: dict[int, EhrhartCertificate] = {}
    stars = {}
    for rho in range(fan.n_rays):
        star = star_fan(fan, (rho,))
        stars[rho] = star
        sub = is_ehrhart(star.fan)
        if isinstance(sub, EhrhartFailure):
            return EhrhartFailure("STAR_NOT_EHRHART", {"ray": rho, "child": sub.payload()})
        star_certs[rho] = sub

    # per-ray coefficients forced by the star polynomial
    per_ray: dict[int, dict[tuple[tuple[int, int], ...], int]] = {}
    for rho in range(fan.n_rays):
        star = stars[rho]
        poly = star_certs[rho].polynomial
        dual = cone_dual(fan, (rho,)).entries[0]
        lift = star.ray_lift
        c_sub = {tau: sum(a * b for a, b in zip(dual, fan.rays[tau])) for tau in lift}
        variables = tuple(sorted({rho, *lift}))
        bound = star.fan.dim

        def oracle(point, _star=star, _poly=poly, _c=c_sub, _rho=rho, _lift=lift):
            xr = point[_rho] + 1  # shifted basis in the ray's own variable
            star_values = [point[tau] - _c[tau] * xr for tau in _lift]
            return _poly.evaluate(star_values)

        expansion = binomial_expand(oracle, variables, bound)
        coeffs: dict[tuple[tuple[int, int], ...], int] = {}
        for beta, c in expansion.coeffs.items():
            alpha = {v: e for v, e in zip(variables, beta) if e}
            alpha[rho] = alpha.get(rho, 0) + 1
            coeffs[tuple(sorted(alpha.items()))] = c
        per_ray[rho] = coeffs

    assembled: dict[tuple[tuple[int, int], ...], int] = {}
    for rho in range(fan.n_rays):
        for alpha, c in per_ray[rho].items():
            exps = dict(alpha)
            for tau in exps:
                if tau == rho:
                    continue
                other = per_ray[tau].get(alpha, 0)
                if other != c:
                    return EhrhartFailure("COEFF_MISMATCH", {
                        "alpha": {str(k): v for k, v in exps.items()},
                        "rays": [rho, tau], "values": [c, other],
                    })
            assembled.setdefault(alpha, c)
    variables = tuple(range(fan.n_rays))
    coeffs = {(0,) * len(variables): 1}
    for alpha, c in assembled.items():
        exps = dict(alpha)
        coeffs[tuple(exps.get(v, 0) for v in variables)] = c
    candidate = IVPoly(variables, coeffs)

    d = fan.dim
    eval_cache: dict[tuple[int, ...], int] = {}

    def cached_eval(vals: tuple[int, ...]) -> int:
        got = eval_cache.get(vals)
        if got is None:
            got = candidate.evaluate(vals)
            eval_cache[vals] = got
        return got

    for j in range(fan.ambient_dim):
        t = tuple(r[j] for r in fan.rays)

        def shift_defect(point, _t=t):
            vals = tuple(point[v] for v in range(fan.n_rays))
            shifted = tuple(a + b for a, b in zip(vals, _t))
            return cached_eval(shifted) - cached_eval(vals)

        # degree bound is structural here: the candidate has bounded support
        # by construction, so its shift difference cannot exceed degree d
        defect = binomial_expand(shift_defect, variables, d, verify_bound=False)
        if defect.coeffs:
            witness = {
                "functional": j,
                "defect_terms": [[dict(a), c] for a, c in defect.terms()],
            }
            residual = _canonical_residual(fan)
            if residual is not None:
                witness["residual"] = list(residual)
            return EhrhartFailure("LINEAR_INVARIANCE", witness)

    assert candidate.evaluate((0,) * fan.n_rays) == 1
    _verify_on_probes(fan, candidate)
    return EhrhartCertificate(fan.key(), candidate, star_certs)


def _verify_on_probes(fan: Fan, poly: IVPoly) -> None:
    rng = random.Random(_PROBE_SEED)
    probes = [(0,) * fan.n_rays, (1,) * fan.n_rays, (-1,) * fan.n_rays]
    for i in range(fan.n_rays):
        probes.append(tuple(1 if k == i else 0 for k in range(fan.n_rays)))
    for _ in range(2):
        probes.append(tuple(rng.randint(-3, 3) for _ in range(fan.n_rays)))
    for p in probes:
        assert poly.evaluate(p) == _chi_values(fan, p), \
            "assembled polynomial disagrees with the recursion"


def ehrhart_polynomial(fan: Fan) -> IVPoly:
    """The unique polynomial realizing the lattice-point functional; raises
    with the failure witness when the fan is not Ehrhart."""
    result = is_ehrhart(fan)
    if isinstance(result, EhrhartFailure):
        raise NotEhrhartError("fan is not Ehrhart", witness=result.payload())
    return result.polynomial


def eval_chi(fan: Fan, f: PLFunction, acknowledge_choice_dependence: bool = False) -> int:
    """Evaluate the lattice-point functional by the defining recursion.

    Refuses to run on an uncertified fan unless the caller explicitly
    acknowledges that the recursion's value would then depend on the
    deterministic but arbitrary choice order.
    """
    if f.fan.key() != fan.key():
        raise WrongFanError("function does not live on this fan")
    if not acknowledge_choice_dependence:
        result = is_ehrhart(fan)
        if isinstance(result, EhrhartFailure):
            raise NotEhrhartError("fan is not Ehrhart", witness=result.payload())
    return _chi_values(fan, f.values)


def chi_closed_form_dim1(fan: Fan, f: PLFunction) -> int:
    """One-dimensional closed form: one plus the sum of the ray values;
    valid exactly when the ray generators sum to zero."""
    if fan.dim != 1:
        raise WrongFanError("closed form needs a one-dimensional fan")
    residual = _dim1_residual(fan)
    if any(x != 0 for x in residual):
        raise NotEhrhartError("ray generators do not sum to zero",
                              witness={"residual": list(residual)})
    return 1 + sum(f.values)


@dataclass(frozen=True)
class Dim2Report:
    ehrhart: bool
    a_values: tuple[int, ...] | None
    failed_equation: int | None
    witness: dict | None


def dim2_is_ehrhart(fan: Fan) -> Dim2Report:
    """Two-dimensional criterion: every ray's star sum must be an integer
    multiple a_rho of the ray, and sum (2 - a_rho) u_rho must vanish."""
    if fan.dim != 2 or set(fan.maximal_cones) != set(fan.grade(2)):
        raise WrongFanError("criterion needs a pure two-dimensional fan")
    if not fan.is_unimodular:
        raise NotUnimodularError("criterion needs a unimodular fan")
    a_values, bad = _dim2_a_values(fan)
    if a_values is None:
        return Dim2Report(False, None, 1, bad)
    residual = tuple(sum((2 - a) * u[j] for a, u in zip(a_values, fan.rays))
                     for j in range(fan.ambient_dim))
    if any(x != 0 for x in residual):
        return Dim2Report(False, a_values, 2, {"residual": list(residual)})
    return Dim2Report(True, a_values, None, None)


def chi_closed_form_dim2(fan: Fan, f: PLFunction) -> int:
    """Two-dimensional closed form: quadratic polynomial in the ray values
    built from the a_rho integers and the two-cone pair products."""
    report = dim2_is_ehrhart(fan)
    if not report.ehrhart:
        raise NotEhrhartError("fan fails the two-dimensional criterion", witness={
            "failed_equation": report.failed_equation, **(report.witness or {}),
        })
    v = f.values
    # the half-integer terms pair up; compute 2*chi and halve exactly
    total2 = 2 + sum((2 - a) * x for a, x in zip(report.a_values, v))
    total2 += 2 * sum(v[c[0]] * v[c[1]] for c in fan.grade(2))
    total2 -= sum(a * x * x for a, x in zip(report.a_values, v))
    assert total2 % 2 == 0
    return total2 // 2


def volume_eval(fan: Fan, f: PLFunction) -> int:
    """Normalized volume by the degree recursion: the sum over rays of the
    ray value times the star volume of the restricted class; equals d!
    times the top homogeneous part of the Ehrhart polynomial on Ehrhart
    fans."""
    if f.fan.key() != fan.key():
        raise WrongFanError("function does not live on this fan")
    if not fan.is_unimodular:
        raise NotUnimodularError("volume recursion needs a unimodular fan")
    if not is_balanced(fan):
        raise NotBalancedError("volume recursion needs a balanced fan",
                               witness=is_balanced(fan, with_witness=True)[1])
    return _volume_values(fan, f.values)


def _volume_values(fan: Fan, values) -> int:
    if fan.dim == 0:
        return 1
    key = reduce_values(fan, values)
    memo = fan._volume_memo
    got = memo.get(key)
    if got is None:
        got = 0
        for rho in range(fan.n_rays):
            if values[rho] == 0:
                continue
            star, star_vals = restrict_values_to_star(fan, values, (rho,))
            got += values[rho] * _volume_values(star.fan, star_vals)
        memo[key] = got
    return got
