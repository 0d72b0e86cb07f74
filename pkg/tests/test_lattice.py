import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ehrfan.errors import DependentVectorsError, NotUnimodularError, ZeroVectorError
from ehrfan.lattice import (
    IntMatrix,
    complete_to_unimodular_basis,
    hermite_normal_form,
    is_unimodular_set,
    primitive_vector,
    quotient_order,
    quotient_projection,
    smith_normal_form,
    solve_integral,
    solve_rational,
)


def test_hnf_identity():
    h, u = hermite_normal_form(IntMatrix.identity(2))
    assert h == IntMatrix.identity(2)
    assert u == IntMatrix.identity(2)


def test_hnf_row_reduction():
    mat = IntMatrix([[1, 0], [1, 2]])
    h, u = hermite_normal_form(mat)
    assert h.entries == ((1, 0), (0, 2))
    assert u.mul(mat) == h
    assert abs(u.det()) == 1


def test_hnf_full_rank_unimodular_rows():
    mat = IntMatrix([[2, 1], [1, 1]])
    h, _ = hermite_normal_form(mat)
    assert h == IntMatrix.identity(2)


small_matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(
            st.lists(st.integers(-9, 9), min_size=c, max_size=c),
            min_size=r, max_size=r,
        )
    )
)


@settings(max_examples=60, deadline=None)
@given(small_matrices)
def test_hnf_transform_properties(rows):
    mat = IntMatrix(rows)
    h, u = hermite_normal_form(mat)
    assert u.mul(mat) == h
    assert abs(u.det()) == 1
    # echelon: pivot columns strictly increase, pivots positive
    last = -1
    for row in h.entries:
        piv = next((j for j, x in enumerate(row) if x != 0), None)
        if piv is not None:
            assert piv > last
            assert row[piv] > 0
            last = piv


@settings(max_examples=60, deadline=None)
@given(small_matrices)
def test_snf_transform_properties(rows):
    mat = IntMatrix(rows)
    d, p, q = smith_normal_form(mat)
    assert p.mul(mat).mul(q) == d
    assert abs(p.det()) == 1 and abs(q.det()) == 1
    diag = [d.entries[i][i] for i in range(min(mat.rows, mat.cols))]
    for i in range(len(diag) - 1):
        if diag[i + 1]:
            assert diag[i] != 0 and diag[i + 1] % diag[i] == 0
    for i, row in enumerate(d.entries):
        for j, x in enumerate(row):
            assert x == 0 or i == j


def test_is_unimodular_examples():
    assert is_unimodular_set([(1, 0), (0, 1)])
    assert not is_unimodular_set([(1, 0), (1, 2)])
    assert is_unimodular_set([(1, 1)])  # gcd of coordinates is 1


def test_is_unimodular_rejects_dependent():
    with pytest.raises(DependentVectorsError):
        is_unimodular_set([(1, 0), (2, 0)])
    with pytest.raises(DependentVectorsError):
        is_unimodular_set([(0, 0)])


def test_completion_standard_basis():
    b, bd = complete_to_unimodular_basis([(1, 0), (0, 1)])
    assert b == IntMatrix.identity(2)
    assert bd == IntMatrix.identity(2)


def test_completion_diagonal():
    b, bd = complete_to_unimodular_basis([(1, 1)])
    assert b.col(0) == (1, 1)
    assert bd.mul(b) == IntMatrix.identity(2)
    assert b.mul(bd) == IntMatrix.identity(2)
    # frozen deterministic output
    assert [b.col(j) for j in range(2)] == [(1, 1), (0, 1)]
    assert list(bd.entries) == [(1, 0), (-1, 1)]


def test_completion_rejects_non_unimodular():
    with pytest.raises(NotUnimodularError) as err:
        complete_to_unimodular_basis([(1, 0), (1, 2)])
    assert err.value.witness["snf_diagonal"] == (1, 2)


def test_completion_agrees_with_unimodularity():
    vectors = [(2, 3), (1, 2)]
    assert is_unimodular_set(vectors)
    b, bd = complete_to_unimodular_basis(vectors)
    assert b.col(0) == (2, 3) and b.col(1) == (1, 2)
    assert bd.mul(b) == IntMatrix.identity(2)


def test_quotient_projection_examples():
    assert quotient_projection([(1, 1)], 2).entries == ((-1, 1),)
    assert quotient_projection([(1, 0), (0, 1)], 2).entries == ()
    assert quotient_projection([], 2) == IntMatrix.identity(2)


def test_quotient_projection_kernel_and_surjectivity():
    rays = [(1, 1, 0), (0, 1, 1)]
    proj = quotient_projection(rays, 3)
    for r in rays:
        assert proj.mat_vec(r) == (0,)
    # surjective onto Z: the projection of the basis generates Z^{n-k}
    images = [proj.mat_vec((1, 0, 0)), proj.mat_vec((0, 1, 0)), proj.mat_vec((0, 0, 1))]
    from math import gcd
    assert gcd(gcd(images[0][0], images[1][0]), images[2][0]) == 1


def test_primitive_vector():
    assert primitive_vector((2, 2)) == (1, 1)
    assert primitive_vector((3, -6)) == (1, -2)
    assert primitive_vector((0, 5)) == (0, 1)
    with pytest.raises(ZeroVectorError):
        primitive_vector((0, 0))


def test_solvers():
    a = IntMatrix([[1, 0], [1, 2]])
    assert solve_integral(a, (1, 3)) == (1, 1)
    assert solve_integral(a, (0, 1)) is None  # parity obstruction
    assert solve_rational(a, (0, 1)) == (0, type(solve_rational(a, (0, 1))[1])(1, 2))
    assert solve_rational(IntMatrix([[1, 1], [1, 1]]), (0, 1)) is None


def test_quotient_order():
    a = IntMatrix([[1, 0], [1, 2]])  # image: first coord free, parity locked
    assert quotient_order(a, (0, 1)) == 2
    assert quotient_order(a, (1, 1)) == 1
    tall = IntMatrix([[1], [0]])
    assert quotient_order(tall, (0, 1)) is None


def test_unimodularity_iff_completion_succeeds():
    import random
    rng = random.Random(77)
    trials = 0
    while trials < 60:
        n = rng.randint(1, 4)
        k = rng.randint(1, n)
        vectors = [tuple(rng.randint(-5, 5) for _ in range(n)) for _ in range(k)]
        try:
            uni = is_unimodular_set(vectors)
        except DependentVectorsError:
            continue
        trials += 1
        if uni:
            b, bd = complete_to_unimodular_basis(vectors)
            for j, v in enumerate(vectors):
                assert b.col(j) == v
            assert bd.mul(b) == IntMatrix.identity(n)
        else:
            with pytest.raises(NotUnimodularError):
                complete_to_unimodular_basis(vectors)
