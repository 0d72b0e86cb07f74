import random

import pytest

from ehrfan import PLFunction, courant, is_balanced, is_ehrhart
from ehrfan.ehrhart import EhrhartCertificate
from ehrfan.errors import MatroidError
from ehrfan.matroid import (
    Matroid,
    bergman_fan,
    chi_matroid,
    contraction,
    restriction,
    star_product_decomposition,
)


def test_uniform_flats():
    m = Matroid.uniform(2, 3)
    assert [sorted(f) for f in m.proper_flats()] == [[0], [1], [2]]
    assert m.is_loopless()
    m.spot_check_rank_axioms()


def test_graphic_triangle_matches_uniform():
    tri = Matroid.from_graph(3, [(0, 1), (1, 2), (0, 2)])
    uni = Matroid.uniform(2, 3)
    assert tri.proper_flats() == uni.proper_flats()
    assert tri.full_rank == 2


def test_loops_detected():
    m = Matroid.from_bases(3, [(0, 1)])
    assert not m.is_loopless()
    assert sorted(m.loops()) == [2]
    with pytest.raises(MatroidError) as err:
        bergman_fan(m)
    assert err.value.code == "LOOPS_PRESENT"


def test_invalid_bases_rejected():
    with pytest.raises(MatroidError):
        Matroid.from_bases(3, [])
    with pytest.raises(MatroidError):
        Matroid.from_bases(3, [(0,), (0, 1)])
    with pytest.raises(MatroidError) as err:
        Matroid.from_bases(4, [(0, 1), (2, 3)])  # exchange fails
    assert err.value.code == "INVALID_BASES"


def test_restriction_contraction():
    m = Matroid.uniform(2, 3)
    r, labels = restriction(m, {0})
    assert r.ground_size == 1 and r.full_rank == 1 and labels == (0,)
    c, labels = contraction(m, {0})
    assert c.ground_size == 2 and c.full_rank == 1 and labels == (1, 2)
    assert r.is_loopless() and c.is_loopless()
    with pytest.raises(MatroidError):
        restriction(m, {0, 1, 2})
    with pytest.raises(MatroidError):
        contraction(m, {0, 1})  # not a flat of U(2,3)


def test_bergman_u23():
    b = bergman_fan(Matroid.uniform(2, 3))
    assert b.fan.ambient_dim == 2 and b.fan.dim == 1
    assert b.fan.rays == ((1, 0), (0, 1), (-1, -1))
    assert len(b.fan.maximal_cones) == 3


def test_bergman_rank_one_is_a_point():
    b = bergman_fan(Matroid.uniform(1, 5))
    assert b.fan.n_rays == 0 and b.fan.dim == 0


def test_bergman_u34():
    b = bergman_fan(Matroid.uniform(3, 4))
    assert b.fan.n_rays == 10
    assert len(b.fan.maximal_cones) == 12
    assert b.fan.dim == 2
    assert b.fan.is_unimodular


def test_bergman_fans_certify():
    for m in (Matroid.uniform(2, 3), Matroid.uniform(2, 4), Matroid.uniform(3, 4),
              Matroid.from_graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])):
        b = bergman_fan(m)
        assert is_balanced(b.fan)
        cert = is_ehrhart(b.fan)
        assert isinstance(cert, EhrhartCertificate)
        assert cert.polynomial.degree() == m.full_rank - 1


def test_chi_examples():
    m = Matroid.uniform(2, 3)
    b = bergman_fan(m)
    assert chi_matroid(m, PLFunction(b.fan, (0, 0, 0)), bergman=b) == 1
    assert chi_matroid(m, courant(b.fan, b.flat_index({0})), bergman=b) == 2


def test_star_product_decomposition_certified():
    m = Matroid.uniform(3, 4)
    b = bergman_fan(m)
    for flat in b.ray_flats:
        match = star_product_decomposition(b, flat)
        assert match.change_of_basis is not None
        rank = m.full_rank
        rest_rank = match.restriction.matroid.full_rank
        contr_rank = match.contraction.matroid.full_rank
        assert rest_rank + contr_rank == rank


def test_generic_and_product_paths_agree():
    rng = random.Random(61)
    for m in (Matroid.uniform(2, 3), Matroid.uniform(3, 4)):
        b = bergman_fan(m)
        for _ in range(10):
            f = PLFunction(b.fan, tuple(rng.randint(-3, 3) for _ in range(b.fan.n_rays)))
            assert chi_matroid(m, f, bergman=b) == chi_matroid(m, f, method="product", bergman=b)


def test_flats_form_a_lattice():
    rng = random.Random(62)
    m = Matroid.uniform(3, 5)
    flats = m.flats()
    for _ in range(30):
        a, b = rng.choice(flats), rng.choice(flats)
        assert m.is_flat(frozenset(m.closure(a | b)))
        assert m.is_flat(a & b)  # intersections of flats are flats
