"""Shared fan builders and samplers for the test suite."""

from __future__ import annotations

import random

from ehrfan import PLFunction, build_fan, stellar_subdivision
from ehrfan.fan import Fan
from ehrfan.plfun import ConvexityType, convexity_type


def fig1_fan() -> Fan:
    """Pentagon fan: square fan subdivided at the first quadrant."""
    return build_fan(2, [(1, 0), (1, 1), (0, 1), (-1, 0), (0, -1)],
                     [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])


def square_fan() -> Fan:
    return build_fan(2, [(1, 0), (0, 1), (-1, 0), (0, -1)],
                     [(0, 1), (1, 2), (2, 3), (3, 0)])


def hirzebruch_fan() -> Fan:
    return build_fan(2, [(1, 0), (0, 1), (-1, 1), (0, -1)],
                     [(0, 1), (1, 2), (2, 3), (3, 0)])


def torsion_fan() -> Fan:
    """One-dimensional fan with rays (1,0) and (1,2); its class group has
    2-torsion and it is not balanced."""
    return build_fan(2, [(1, 0), (1, 2)], [(0,), (1,)])


BABAEE_HUH_RAYS = [
    (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1),
    (0, -1, 0, 0), (0, 0, -1, 0), (0, 0, 0, -1),
    (0, 1, 1, 1), (1, 0, -1, 1), (1, 1, 0, -1), (1, -1, 1, 0),
    (-1, 0, 1, -1), (-1, -1, 0, 1), (-1, 1, -1, 0),
]

BABAEE_HUH_CONES = [
    (0, 8), (0, 9), (0, 10),
    (1, 7), (1, 9), (1, 13),
    (2, 7), (2, 10), (2, 11),
    (3, 7), (3, 8), (3, 12),
    (8, 5), (9, 6), (10, 4),
    (4, 13), (5, 11), (6, 12),
]


def babaee_huh_fan() -> Fan:
    return build_fan(4, BABAEE_HUH_RAYS, BABAEE_HUH_CONES)


def random_subdivided_square(rng: random.Random, steps: int) -> Fan:
    """Complete unimodular 2-dim fan from repeated stellar subdivision."""
    fan = square_fan()
    for _ in range(steps):
        cone = rng.choice(fan.grade(2))
        fan = stellar_subdivision(fan, cone).fan
    return fan


def random_convex(fan: Fan, rng: random.Random, base: int = 4, spread: int = 2) -> PLFunction:
    """Rejection-sample a convex function: a strictly convex constant base
    plus a bounded perturbation, retried until the ridge test passes."""
    while True:
        values = tuple(base + rng.randint(-spread, spread) for _ in range(fan.n_rays))
        f = PLFunction(fan, values)
        if convexity_type(f) in (ConvexityType.CONVEX, ConvexityType.STRICTLY_CONVEX,
                                 ConvexityType.LINEAR):
            return f


def random_comparable_pair(fan: Fan, rng: random.Random, spread: int = 4):
    """A pair whose difference has uniform sign on every maximal cone."""
    f = PLFunction(fan, tuple(rng.randint(-spread, spread) for _ in range(fan.n_rays)))
    for _ in range(50):
        g = PLFunction(fan, tuple(rng.randint(-spread, spread) for _ in range(fan.n_rays)))
        diff = [a - b for a, b in zip(f.values, g.values)]
        ok = True
        for cone in fan.maximal_cones:
            signs = {1 if diff[i] > 0 else (-1 if diff[i] < 0 else 0) for i in cone}
            if 1 in signs and -1 in signs:
                ok = False
                break
        if ok:
            return f, g
    bump = tuple(rng.randint(0, spread) for _ in range(fan.n_rays))
    return f, PLFunction(fan, tuple(a + b for a, b in zip(f.values, bump)))


def random_primitive_vector(rng: random.Random, dim: int):
    from ehrfan import primitive_vector
    while True:
        v = tuple(rng.randint(-9, 9) for _ in range(dim))
        if any(v):
            return primitive_vector(v)


def chi_reference(fan: Fan, values, rng: random.Random) -> int:
    """Independent evaluator: same recursion, but the normalization cone
    and the processed ray are chosen at random, with no memoization.
    Exercises the choice-independence guarantee of certified fans."""
    from ehrfan.plfun import restrict_values_to_star, subtract_linear_on_cone

    if fan.dim == 0:
        return 1
    sigma0 = rng.choice(fan.grade(fan.dim))
    g = subtract_linear_on_cone(fan, values, sigma0)
    support = [i for i, v in enumerate(g) if v != 0 and i not in sigma0]
    if not support:
        return 1
    rho = rng.choice(support)
    if g[rho] > 0:
        star, star_vals = restrict_values_to_star(fan, g, (rho,))
        return chi_reference(fan, tuple(v - 1 if i == rho else v for i, v in enumerate(g)), rng) \
            + chi_reference(star.fan, star_vals, rng)
    bumped = tuple(v + 1 if i == rho else v for i, v in enumerate(g))
    star, star_vals = restrict_values_to_star(fan, bumped, (rho,))
    return chi_reference(fan, bumped, rng) - chi_reference(star.fan, star_vals, rng)
