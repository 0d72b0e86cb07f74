"""Formal piecewise-exponential elements over a fixed unimodular fan.

An element is an integer combination of exponentials of piecewise-linear
functions.  Within the comparable fragment (every pair of involved
functions has a uniform sign difference on each maximal cone) equality is
decidable by sorting the positive and negative parts into pointwise
chains: repeated min/max swaps turn a multiset of functions into its
pointwise order statistics, and two formal sums agree exactly when the
combined chains match entry by entry.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .ehrhart import EhrhartFailure, _chi_values, is_ehrhart
from .errors import NotEhrhartError, RefinementRequiredError, WrongFanError
from .fan import Fan
from .plfun import PLFunction, pointwise_max_min

Values = tuple[int, ...]


@dataclass(frozen=True)
class PEElement:
    """Integer combination of exponentials e^f, stored as (coefficient,
    ray-value tuple) terms with zero coefficients pruned."""

    fan: Fan
    terms: tuple[tuple[int, Values], ...]

    def __post_init__(self):
        merged: dict[Values, int] = {}
        for c, values in self.terms:
            values = tuple(int(v) for v in values)
            if len(values) != self.fan.n_rays:
                raise WrongFanError("term has wrong number of ray values")
            merged[values] = merged.get(values, 0) + int(c)
        cleaned = tuple(sorted((vals, c) for vals, c in merged.items() if c != 0))
        object.__setattr__(self, "terms", tuple((c, vals) for vals, c in cleaned))

    @classmethod
    def exponential(cls, f: PLFunction) -> "PEElement":
        return cls(f.fan, ((1, f.values),))

    @classmethod
    def unit(cls, fan: Fan) -> "PEElement":
        return cls(fan, ((1, (0,) * fan.n_rays),))

    def __add__(self, other: "PEElement") -> "PEElement":
        self._same_fan(other)
        return PEElement(self.fan, self.terms + other.terms)

    def __sub__(self, other: "PEElement") -> "PEElement":
        self._same_fan(other)
        return PEElement(self.fan, self.terms + tuple((-c, v) for c, v in other.terms))

    def __mul__(self, other: "PEElement") -> "PEElement":
        """Product of exponentials adds exponents."""
        self._same_fan(other)
        terms = []
        for c1, v1 in self.terms:
            for c2, v2 in other.terms:
                terms.append((c1 * c2, tuple(a + b for a, b in zip(v1, v2))))
        return PEElement(self.fan, tuple(terms))

    def is_zero(self) -> bool:
        return not self.terms

    def parts(self) -> tuple[list[Values], list[Values]]:
        """Positive and negative supports as multisets (with multiplicity)."""
        pos: list[Values] = []
        neg: list[Values] = []
        for c, values in self.terms:
            (pos if c > 0 else neg).extend([values] * abs(c))
        return pos, neg

    def _same_fan(self, other: "PEElement") -> None:
        if self.fan.key() != other.fan.key():
            raise WrongFanError("elements live on different fans")


def _check_comparable(fan: Fan, functions: list[Values]) -> None:
    for i in range(len(functions)):
        for j in range(i + 1, len(functions)):
            diff = [a - b for a, b in zip(functions[i], functions[j])]
            for cone in fan.maximal_cones:
                signs = {1 if diff[k] > 0 else (-1 if diff[k] < 0 else 0) for k in cone}
                if 1 in signs and -1 in signs:
                    raise RefinementRequiredError(
                        "terms are incomparable on a cone; a refinement would be required",
                        witness={"pair": [list(functions[i]), list(functions[j])],
                                 "cone": list(cone)},
                    )


def _sort_chain(functions: list[Values]) -> list[Values]:
    """Pointwise order statistics of a comparable multiset, produced by
    repeated adjacent min/max swaps (each pass floats the pointwise
    maximum to the end, so the sweep terminates after one pass per entry)."""
    chain = [list(v) for v in functions]
    n = len(chain)
    for last in range(n - 1, 0, -1):
        for i in range(last):
            a, b = chain[i], chain[i + 1]
            if any(x > y for x, y in zip(a, b)):
                chain[i] = [min(x, y) for x, y in zip(a, b)]
                chain[i + 1] = [max(x, y) for x, y in zip(a, b)]
    return [tuple(v) for v in chain]


def pe_normal_form(element: PEElement) -> PEElement:
    """Canonical form: each part sorted into a pointwise chain, common
    entries of the positive and negative chains cancelled."""
    pos, neg = element.parts()
    _check_comparable(element.fan, pos + neg)
    pos = _sort_chain(pos)
    neg = _sort_chain(neg)
    pc, nc = Counter(pos), Counter(neg)
    common = pc & nc
    pc -= common
    nc -= common
    terms = [(c, v) for v, c in sorted(pc.items())]
    terms += [(-c, v) for v, c in sorted(nc.items())]
    return PEElement(element.fan, tuple(terms))


def pe_equal(a: PEElement, b: PEElement) -> bool:
    """Equality as functions: the combined positive chains of a - b must
    match entry by entry (multiset equality of exponents at every point of
    the support, by the comparable-chain normal form)."""
    a._same_fan(b)
    return pe_normal_form(a - b).is_zero()


def chi_tilde(element: PEElement) -> int:
    """Linear extension of the lattice-point functional to exponential
    combinations: the coefficient-weighted sum of the values on the
    exponents.  Requires the fan to be certified."""
    cert = is_ehrhart(element.fan)
    if isinstance(cert, EhrhartFailure):
        raise NotEhrhartError("fan is not Ehrhart", witness=cert.payload())
    return sum(c * _chi_values(element.fan, values) for c, values in element.terms)


def verify_maxmin_relation(fan: Fan, f: PLFunction, g: PLFunction) -> bool:
    """Check chi(f) + chi(g) = chi(max) + chi(min) exactly for a pair whose
    max and min stay piecewise-linear on the fan."""
    cert = is_ehrhart(fan)
    if isinstance(cert, EhrhartFailure):
        raise NotEhrhartError("fan is not Ehrhart", witness=cert.payload())
    hi, lo = pointwise_max_min(f, g)
    lhs = _chi_values(fan, f.values) + _chi_values(fan, g.values)
    rhs = _chi_values(fan, hi.values) + _chi_values(fan, lo.values)
    return lhs == rhs
