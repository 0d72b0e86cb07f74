import random

import pytest

from ehrfan import PLFunction, eval_chi, linear_values, pointwise_max_min, projective_fan
from ehrfan.errors import NotEhrhartError, RefinementRequiredError
from ehrfan.pering import PEElement, chi_tilde, pe_equal, pe_normal_form, verify_maxmin_relation
from helpers import fig1_fan, random_comparable_pair, torsion_fan


def exp(fan, values):
    return PEElement.exponential(PLFunction(fan, values))


def test_projective_line_identity():
    p1 = projective_fan(1)
    assert pe_equal(exp(p1, (1, 0)) + exp(p1, (0, 1)), exp(p1, (1, 1)) + exp(p1, (0, 0)))


def test_equal_to_itself_and_distinct():
    p1 = projective_fan(1)
    assert pe_equal(exp(p1, (1, 0)), exp(p1, (1, 0)))
    assert not pe_equal(exp(p1, (1, 0)), exp(p1, (0, 1)))


def test_maxmin_pair_normalizes_to_chain():
    fan = fig1_fan()
    f = PLFunction(fan, (2, 1, 0, 1, 2))
    g = PLFunction(fan, (0, 1, 2, 1, 0))
    hi, lo = pointwise_max_min(f, g)
    lhs = PEElement.exponential(f) + PEElement.exponential(g)
    rhs = PEElement.exponential(hi) + PEElement.exponential(lo)
    assert pe_equal(lhs, rhs)
    nf = pe_normal_form(lhs)
    assert [v for _, v in nf.terms] == sorted([lo.values, hi.values])


def test_normal_form_idempotent_and_cancelling():
    p1 = projective_fan(1)
    elem = exp(p1, (1, 0)) - exp(p1, (1, 0)) + exp(p1, (2, 2))
    nf = pe_normal_form(elem)
    assert nf.terms == ((1, (2, 2)),)
    assert pe_normal_form(nf).terms == nf.terms


def test_equality_is_equivalence_on_samples():
    rng = random.Random(15)
    fan = fig1_fan()
    # a pointwise chain keeps every pair of terms comparable
    chain = [tuple(rng.randint(-2, 2) for _ in range(fan.n_rays))]
    for _ in range(5):
        bump = tuple(rng.randint(0, 2) for _ in range(fan.n_rays))
        chain.append(tuple(a + b for a, b in zip(chain[-1], bump)))
    elems = [exp(fan, chain[i]) + exp(fan, chain[j])
             for i in range(len(chain)) for j in range(i, len(chain))]
    for a in elems:
        assert pe_equal(a, a)
        for b in elems:
            assert pe_equal(a, b) == pe_equal(b, a)
    # transitivity on a triple that includes a rewritten equal element
    f, g = chain[1], chain[2]
    rewritten = exp(fan, tuple(map(min, f, g))) + exp(fan, tuple(map(max, f, g)))
    direct = exp(fan, f) + exp(fan, g)
    assert pe_equal(direct, rewritten) and pe_equal(rewritten, direct)


def test_refinement_required():
    fan = fig1_fan()
    a = exp(fan, (1, 1, 1, 1, 1))
    b = exp(fan, (2, 0, 2, 0, 0))
    with pytest.raises(RefinementRequiredError) as err:
        pe_equal(a, b)
    assert "pair" in err.value.witness


def test_chi_tilde_values():
    fan = fig1_fan()
    assert chi_tilde(exp(fan, (1, 1, 1, 1, 1))) == 8
    assert chi_tilde(PEElement.unit(fan)) == 1
    f = PLFunction(fan, (1, 1, 1, 1, 1))
    g = 2 * f
    hi, lo = pointwise_max_min(f, g)
    rearranged = PEElement.exponential(f) + PEElement.exponential(g) - PEElement.exponential(hi)
    assert chi_tilde(rearranged) == eval_chi(fan, lo)


def test_chi_tilde_requires_certificate():
    fan = torsion_fan()
    with pytest.raises(NotEhrhartError):
        chi_tilde(PEElement.unit(fan))


def test_chi_tilde_respects_relations():
    rng = random.Random(16)
    fan = fig1_fan()
    for _ in range(10):
        f, g = random_comparable_pair(fan, rng, spread=3)
        hi, lo = pointwise_max_min(f, g)
        lhs = PEElement.exponential(f) + PEElement.exponential(g)
        rhs = PEElement.exponential(hi) + PEElement.exponential(lo)
        assert chi_tilde(lhs) == chi_tilde(rhs)
        shifted = PEElement.exponential(f + linear_values(fan, (1, -1)))
        assert chi_tilde(shifted) == chi_tilde(PEElement.exponential(f))


def test_multiplicativity_of_exponentials():
    fan = projective_fan(1)
    f = PLFunction(fan, (1, 0))
    g = PLFunction(fan, (0, 3))
    prod = PEElement.exponential(f) * PEElement.exponential(g)
    assert pe_equal(prod, PEElement.exponential(f + g))
    assert chi_tilde(prod) == chi_tilde(PEElement.exponential(f + g))


def test_verify_maxmin_relation():
    fan = fig1_fan()
    ones = PLFunction(fan, (1, 1, 1, 1, 1))
    assert verify_maxmin_relation(fan, ones, 2 * ones)
    p1 = projective_fan(1)
    assert verify_maxmin_relation(p1, PLFunction(p1, (1, 0)), PLFunction(p1, (0, 1)))
    rng = random.Random(17)
    for _ in range(20):
        f, g = random_comparable_pair(fan, rng)
        assert verify_maxmin_relation(fan, f, g)
