"""Exact linear algebra: rref canonicity, kernels, subspace algebra, enumeration."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgl.errors import ValidationError
from qgl.linalg import (
    GF,
    QQ,
    Field,
    Matrix,
    Subspace,
    enumerate_subspaces,
    gaussian_binomial,
    hstack,
    kernel_basis,
    lagrange_coeffs,
    next_prime,
    quotient_project,
    rref_rank,
    subspace_algebra,
)

F2 = GF(2)
F3 = GF(3)
F5 = GF(5)

fields = st.sampled_from([F2, F3, F5, QQ])


def random_matrix(draw, field, max_dim=4):
    nrows = draw(st.integers(0, max_dim))
    ncols = draw(st.integers(0, max_dim))
    ent = st.integers(-6, 6)
    rows = [[field.normalize(draw(ent)) for _ in range(ncols)] for _ in range(nrows)]
    return Matrix(field, nrows, ncols, tuple(tuple(r) for r in rows))


matrices = st.builds(lambda: None)  # placeholder, real strategy below


@st.composite
def matrices(draw):  # noqa: F811
    return random_matrix(draw, draw(fields))


def test_field_arithmetic():
    assert F5.add(3, 4) == 2
    assert F5.inv(2) == 3
    assert F5.normalize(-1) == 4
    assert F5.normalize(Fraction(1, 2)) == 3
    assert QQ.normalize(2) == Fraction(2)
    assert QQ.div(Fraction(1), Fraction(3)) == Fraction(1, 3)
    with pytest.raises(ValidationError):
        Field(4)
    with pytest.raises(ZeroDivisionError):
        F3.inv(0)


def test_field_elements_and_parse():
    assert sorted(F3.elements()) == [0, 1, 2]
    assert F5.parse_element("7") == 2
    assert QQ.parse_element("-3/6") == Fraction(-1, 2)
    assert QQ.format_element(Fraction(1, 2)) == "1/2"


def test_next_prime():
    assert next_prime(1) == 2
    assert next_prime(7) == 11
    assert next_prime(10) == 11


def test_rref_rank_examples():
    # identity already reduced
    r, rank = rref_rank(Matrix.identity(F3, 2))
    assert rank == 2 and r == Matrix.identity(F3, 2)
    # both rows equal over F2; shape is kept, zero rows sink to the bottom
    r, rank = rref_rank(Matrix.of(F2, [[1, 1], [1, 1]]))
    assert rank == 1
    assert r.entries == ((1, 1), (0, 0))
    r, rank = rref_rank(Matrix.zero(F5, 3, 2))
    assert rank == 0 and r == Matrix.zero(F5, 3, 2)
    # rational pivot scaling
    r, rank = rref_rank(Matrix.of(QQ, [[2, 4], [1, 2]]))
    assert rank == 1 and r.row(0) == (Fraction(1), Fraction(2))


def test_kernel_basis_examples():
    assert kernel_basis(Matrix.identity(F2, 2)).dim == 0
    k = kernel_basis(Matrix.of(F2, [[1, 1]]))
    assert k.dim == 1 and k.contains_vector((1, 1))
    assert kernel_basis(Matrix.zero(F5, 2, 2)) == Subspace.full(F5, 2)


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rref_idempotent(m):
    r, pivots = m.rref()
    r2, pivots2 = r.rref()
    assert r2 == r and pivots2 == pivots


@settings(max_examples=150, deadline=None)
@given(matrices(), st.randoms(use_true_random=False))
def test_rref_canonical(m, rng):
    # same row space after shuffling, scaling, and adding rows
    rows = [list(r) for r in m.entries]
    rng.shuffle(rows)
    f = m.field
    units = [x for x in ([1, 2, -1] if not f.is_finite else range(1, f.p)) if f.normalize(x)]
    for i in range(len(rows)):
        c = f.normalize(rng.choice(units))
        rows[i] = [f.mul(c, x) for x in rows[i]]
        j = rng.randrange(len(rows))
        if j != i:
            rows[i] = [f.add(x, y) for x, y in zip(rows[i], rows[j])]
    m2 = Matrix(f, m.nrows, m.ncols, tuple(tuple(r) for r in rows))
    assert m2.rref()[0] == m.rref()[0]


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_plus_kernel(m):
    assert m.rank() + kernel_basis(m).dim == m.ncols
    # kernel vectors are actual solutions
    for row in kernel_basis(m).basis.entries:
        assert all(x == m.field.zero() for x in m.apply(row))


def test_subspace_algebra_examples():
    e1 = Subspace.from_rows(F3, 2, [[1, 0]])
    e2 = Subspace.from_rows(F3, 2, [[0, 1]])
    alg = subspace_algebra(e1, e2)
    assert alg.sum == Subspace.full(F3, 2)
    assert alg.intersection == Subspace.zero(F3, 2)
    l1 = Subspace.from_rows(F2, 2, [[1, 1]])
    l2 = Subspace.from_rows(F2, 2, [[0, 1]])
    alg = subspace_algebra(l1, l2)
    assert alg.sum.dim == 2 and alg.intersection.dim == 0
    with pytest.raises(ValidationError):
        subspace_algebra(e1, Subspace.zero(F3, 3))


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_subspace_algebra_modular(data):
    f = data.draw(fields)
    n = data.draw(st.integers(1, 4))
    ent = st.integers(-3, 3)

    def sub():
        k = data.draw(st.integers(0, n))
        rows = [[f.normalize(data.draw(ent)) for _ in range(n)] for _ in range(k)]
        return Subspace.from_rows(f, n, rows)

    a, b = sub(), sub()
    alg = subspace_algebra(a, b)
    assert alg.sum.dim + alg.intersection.dim == a.dim + b.dim
    assert alg.sum.contains(a) and alg.sum.contains(b)
    assert a.contains(alg.intersection) and b.contains(alg.intersection)


def test_quotient_project_example():
    a = Subspace.from_rows(F3, 2, [[1, 0]])
    assert quotient_project(a, (1, 1)) == (1,)
    assert quotient_project(a, (1, 0)) == (0,)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_quotient_project_linear_with_kernel_a(data):
    f = data.draw(fields)
    n = data.draw(st.integers(1, 4))
    k = data.draw(st.integers(0, n))
    ent = st.integers(-3, 3)
    rows = [[f.normalize(data.draw(ent)) for _ in range(n)] for _ in range(k)]
    a = Subspace.from_rows(f, n, rows)
    u = tuple(f.normalize(data.draw(ent)) for _ in range(n))
    v = tuple(f.normalize(data.draw(ent)) for _ in range(n))
    pu, pv = quotient_project(a, u), quotient_project(a, v)
    s = tuple(f.add(x, y) for x, y in zip(u, v))
    assert quotient_project(a, s) == tuple(f.add(x, y) for x, y in zip(pu, pv))
    # kernel is exactly a
    zero = all(x == f.zero() for x in pu)
    assert zero == a.contains_vector(u)


def gauss_recurrence(n, k, q):
    if k in (0, n):
        return 1
    if k < 0 or k > n:
        return 0
    return gauss_recurrence(n - 1, k - 1, q) + q**k * gauss_recurrence(n - 1, k, q)


def test_enumeration_matches_gaussian_binomial():
    for q in (2, 3, 5):
        f = GF(q)
        for n in range(0, 6):
            for k in range(0, n + 1):
                subs = list(enumerate_subspaces(f, n, k))
                expected = gaussian_binomial(n, k, q)
                assert expected == gauss_recurrence(n, k, q)
                assert len(subs) == expected
                assert len(set(subs)) == expected
                assert all(s.dim == k for s in subs)


def test_enumeration_examples_and_order():
    lines = list(enumerate_subspaces(F2, 2, 1))
    assert [s.basis.entries for s in lines] == [((1, 0),), ((1, 1),), ((0, 1),)]
    assert list(enumerate_subspaces(F5, 3, 0)) == [Subspace.zero(F5, 3)]
    assert list(enumerate_subspaces(F5, 3, 3)) == [Subspace.full(F5, 3)]
    with pytest.raises(ValidationError):
        list(enumerate_subspaces(F2, 2, 3))
    with pytest.raises(ValidationError):
        list(enumerate_subspaces(QQ, 2, 1))


def test_subspace_equality_is_canonical():
    a = Subspace.from_rows(F5, 3, [[1, 2, 0], [0, 0, 1]])
    b = Subspace.from_rows(F5, 3, [[1, 2, 1], [0, 0, 2], [1, 2, 3]])
    assert a == b and hash(a) == hash(b)
    assert a.basis.entries == b.basis.entries


def test_subspace_image_preimage_perp():
    m = Matrix.of(F3, [[1, 0], [0, 0]])
    line = Subspace.from_rows(F3, 2, [[1, 1]])
    assert line.image(m) == Subspace.from_rows(F3, 2, [[1, 0]])
    assert Subspace.zero(F3, 2).preimage(m) == kernel_basis(m)
    assert line.perp() == Subspace.from_rows(F3, 2, [[1, 2]])


def test_exact_rational_arithmetic():
    m = Matrix.of(QQ, [[Fraction(1, 3), 1], [1, 3]])
    assert m.rank() == 1
    k = kernel_basis(m)
    assert k.basis.entries == ((Fraction(1), Fraction(-1, 3)),)


def test_lagrange_coeffs():
    # counting polynomial q + 1 through three sample primes
    assert lagrange_coeffs((2, 3, 5), (3, 4, 6)) == (1, 1)
    assert lagrange_coeffs((2, 3), (4, 9)) == pytest.approx((0, 0, 1)) or lagrange_coeffs(
        (2, 3, 5), (4, 9, 25)
    ) == (0, 0, 1)


def test_hstack_shape_mismatch():
    with pytest.raises(ValidationError):
        hstack([Matrix.identity(F2, 2), Matrix.zero(F2, 3, 1)])
