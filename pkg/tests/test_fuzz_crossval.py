"""Cross-validation fuzzing: the general decision procedure must agree
with the closed-form criteria wherever those apply, on random fans that
include plenty of failures."""

import random

from ehrfan import (
    PLFunction,
    build_fan,
    chi_closed_form_dim2,
    dim2_is_ehrhart,
    eval_chi,
    is_ehrhart,
    primitive_vector,
    stellar_subdivision,
    transfer_to_subdivision,
    volume_eval,
)
from ehrfan.ehrhart import EhrhartCertificate, EhrhartFailure
from helpers import random_subdivided_square, square_fan


def random_pure_surface_subfan(rng):
    """A random pure two-dimensional fan: a subset of the maximal cones of
    a randomly subdivided complete surface (usually incomplete, usually
    not Ehrhart)."""
    base = random_subdivided_square(rng, rng.randint(0, 3))
    k = rng.randint(1, len(base.maximal_cones))
    chosen = rng.sample(list(base.maximal_cones), k)
    used = sorted({i for c in chosen for i in c})
    remap = {old: new for new, old in enumerate(used)}
    return build_fan(2, [base.rays[i] for i in used],
                     [[remap[i] for i in c] for c in chosen])


def test_dim2_criterion_agrees_with_decision_procedure():
    rng = random.Random(123)
    verdicts = {True: 0, False: 0}
    for _ in range(60):
        fan = random_pure_surface_subfan(rng)
        report = dim2_is_ehrhart(fan)
        result = is_ehrhart(fan)
        general = isinstance(result, EhrhartCertificate)
        assert general == report.ehrhart
        verdicts[general] += 1
        if general:
            for _ in range(5):
                f = PLFunction(fan, tuple(rng.randint(-4, 4) for _ in range(fan.n_rays)))
                assert chi_closed_form_dim2(fan, f) == eval_chi(fan, f)
    assert verdicts[True] >= 3 and verdicts[False] >= 10  # both branches exercised


def test_single_cone_fails_through_its_stars():
    quadrant = build_fan(2, [(1, 0), (0, 1)], [(0, 1)])
    result = is_ehrhart(quadrant)
    assert isinstance(result, EhrhartFailure)
    assert result.reason == "STAR_NOT_EHRHART"


def test_dim1_criterion_agrees_with_decision_procedure():
    rng = random.Random(321)
    for _ in range(80):
        dim = rng.randint(1, 3)
        nrays = rng.randint(1, 2 if dim == 1 else 4)
        rays = set()
        while len(rays) < nrays:
            v = tuple(rng.randint(-4, 4) for _ in range(dim))
            if any(v):
                rays.add(primitive_vector(v))
        rays = sorted(rays)
        fan = build_fan(dim, rays, [(i,) for i in range(len(rays))])
        expect = all(x == 0 for x in (sum(c) for c in zip(*rays)))
        got = isinstance(is_ehrhart(fan), EhrhartCertificate)
        assert got == expect, (rays, expect, got)


def test_volume_invariant_under_subdivision():
    rng = random.Random(99)
    for _ in range(15):
        fan = random_subdivided_square(rng, rng.randint(0, 2))
        tau = rng.choice(sorted(c for c in fan.cones if len(c) >= 1))
        sub = stellar_subdivision(fan, tau)
        f = PLFunction(fan, tuple(rng.randint(-4, 4) for _ in range(fan.n_rays)))
        assert volume_eval(sub.fan, transfer_to_subdivision(f, sub)) == volume_eval(fan, f)


def test_chain_sort_matches_order_statistics():
    from ehrfan.pering import _sort_chain
    rng = random.Random(4)
    for _ in range(50):
        m, width = rng.randint(1, 6), rng.randint(1, 5)
        funcs = [tuple(rng.randint(-5, 5) for _ in range(width)) for _ in range(m)]
        chain = _sort_chain(funcs)
        for j in range(width):
            assert sorted(v[j] for v in funcs) == [v[j] for v in chain]
        for a, b in zip(chain, chain[1:]):
            assert all(x <= y for x, y in zip(a, b))
