import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hodgekt.exterior import (BigradedForm, HermitianCoeff, basis, conjugate, dimension,
                              from_hermitian, hermitian_power, kahler_form, kernel_basis,
                              pairing_operator, power, to_hermitian, top_coefficient,
                              volume_normalization, wedge, wedge_all)
from oracles import brute_wedge, diagonal_top, mixed_discriminant


def rand_herm(n, rng):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (g + g.conj().T) / 2


def rand_form(n, p, q, rng, density=0.6):
    keys = basis(n, p, q)
    mask = rng.random(len(keys)) < density
    vals = rng.normal(size=len(keys)) + 1j * rng.normal(size=len(keys))
    return BigradedForm(n, p, q, {k: v for k, v, m in zip(keys, vals, mask) if m})


forms = st.tuples(st.integers(1, 4), st.integers(0, 2**32 - 1)).map(
    lambda t: (t[0], np.random.default_rng(t[1])))


# -- from_hermitian and reality

def test_from_hermitian_identity():
    f = from_hermitian(np.eye(2))
    assert f.coeffs == {((0,), (0,)): 1j, ((1,), (1,)): 1j}


def test_from_hermitian_zero():
    assert from_hermitian(np.zeros((3, 3))).is_zero()


def test_from_hermitian_offdiagonal():
    A = np.array([[1, 2 - 1j], [2 + 1j, 3]])
    f = from_hermitian(A)
    assert f.coeff((0,), (1,)) == pytest.approx(1j * (2 - 1j))
    assert f.coeff((1,), (0,)) == pytest.approx(1j * (2 + 1j))
    assert f.coeff((1,), (1,)) == pytest.approx(3j)
    assert f.is_real()
    assert np.allclose(to_hermitian(f), A)


def test_non_hermitian_rejected():
    with pytest.raises(ValueError):
        HermitianCoeff(np.array([[1, 2], [0, 1]]))


# -- wedge

def test_kahler_square_n2():
    w = kahler_form(2)
    assert top_coefficient(wedge(w, w)) == pytest.approx(2)


def test_diag_wedge_n2():
    f = wedge(from_hermitian(np.diag([1.0, 2.0])), from_hermitian(np.eye(2)))
    assert top_coefficient(f) == pytest.approx(3)


def test_wedge_mismatched_n():
    with pytest.raises(ValueError):
        wedge(kahler_form(2), kahler_form(3))


def test_degree_overflow_is_zero():
    w = kahler_form(2)
    f = wedge(wedge(w, w), w)
    assert f.is_zero()


@given(forms)
def test_wedge_matches_bubble_sort(data):
    n, rng = data
    p1, q1 = rng.integers(0, n + 1, size=2)
    p2, q2 = rng.integers(0, n - p1 + 1), rng.integers(0, n - q1 + 1)
    f, g = rand_form(n, p1, q1, rng), rand_form(n, p2, q2, rng)
    got = wedge(f, g)
    ref = BigradedForm(n, p1 + p2, q1 + q2, brute_wedge(f, g))
    assert got.allclose(ref, atol=1e-12 * max(1, ref.max_abs()))


@given(forms)
def test_graded_commutativity(data):
    n, rng = data
    p1, q1 = rng.integers(0, n + 1, size=2)
    p2, q2 = rng.integers(0, n - p1 + 1), rng.integers(0, n - q1 + 1)
    f, g = rand_form(n, p1, q1, rng), rand_form(n, p2, q2, rng)
    sign = (-1) ** ((p1 + q1) * (p2 + q2))
    assert wedge(f, g).allclose(sign * wedge(g, f), atol=1e-10)


@given(forms)
def test_conjugate_is_multiplicative_involution(data):
    n, rng = data
    p1, q1 = rng.integers(0, n + 1, size=2)
    p2, q2 = rng.integers(0, n - p1 + 1), rng.integers(0, n - q1 + 1)
    f, g = rand_form(n, p1, q1, rng), rand_form(n, p2, q2, rng)
    assert conjugate(conjugate(f)) == f
    assert conjugate(wedge(f, g)).allclose(wedge(conjugate(f), conjugate(g)), atol=1e-10)


def test_conjugate_single_monomial_sign():
    f = BigradedForm(2, 1, 1, {((0,), (1,)): 2 + 3j})
    assert conjugate(f).coeffs == {((1,), (0,)): -(2 - 3j)}


def test_hermitian_forms_commute(rng):
    a, b = from_hermitian(rand_herm(3, rng)), from_hermitian(rand_herm(3, rng))
    assert wedge(a, b).allclose(wedge(b, a), atol=1e-12)


# -- top coefficient and powers

@pytest.mark.parametrize("n", range(1, 7))
def test_volume_normalization(n):
    assert volume_normalization(n) == pytest.approx(1j ** (n * n))
    assert top_coefficient(power(kahler_form(n), n)) == pytest.approx(math.factorial(n))


def test_power_diag_n3():
    assert top_coefficient(power(from_hermitian(np.diag([1.0, 2, 3])), 3)) == pytest.approx(36)


def test_power_edge_cases(rng):
    f = from_hermitian(rand_herm(3, rng))
    assert power(f, 1) == f
    assert power(f, 0) == BigradedForm.unit(3)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_top_of_power_is_factorial_det(n, rng):
    A = rand_herm(n, rng)
    assert top_coefficient(power(from_hermitian(A), n)) == pytest.approx(
        math.factorial(n) * np.linalg.det(A).real, rel=1e-10)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_minor_power_matches_repeated_wedge(k, rng):
    A = rand_herm(4, rng)
    assert hermitian_power(A, k).allclose(power(from_hermitian(A), k), atol=1e-10)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_diagonal_oracle(n, rng):
    diags = [rng.normal(size=n) for _ in range(n)]
    got = top_coefficient(wedge_all([from_hermitian(np.diag(d)) for d in diags]))
    assert got.real == pytest.approx(diagonal_top(diags), rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_mixed_discriminant_oracle(n, rng):
    mats = [rand_herm(n, rng) for _ in range(n)]
    got = top_coefficient(wedge_all([from_hermitian(A) for A in mats]))
    ref = mixed_discriminant(mats)
    assert abs(got.imag) <= 1e-9 * max(1, abs(ref))
    assert got.real == pytest.approx(ref, rel=1e-9, abs=1e-9)


def test_permutation_invariance(rng):
    mats = [from_hermitian(rand_herm(4, rng)) for _ in range(4)]
    ref = top_coefficient(wedge_all(mats))
    for perm in ([1, 0, 3, 2], [3, 2, 1, 0], [2, 0, 1, 3]):
        assert top_coefficient(wedge_all([mats[i] for i in perm])) == pytest.approx(ref, rel=1e-12)


def test_unitary_invariance(rng):
    from hodgekt.generators import random_unitary
    mats = [rand_herm(4, rng) for _ in range(4)]
    U = random_unitary(4, rng)
    ref = top_coefficient(wedge_all([from_hermitian(A) for A in mats]))
    moved = top_coefficient(wedge_all([from_hermitian(U.conj().T @ A @ U) for A in mats]))
    assert moved == pytest.approx(ref, rel=1e-9)


def test_real_top_is_real(rng):
    f = wedge_all([from_hermitian(rand_herm(3, rng)) for _ in range(3)])
    assert f.is_real(1e-10)
    assert abs(top_coefficient(f).imag) < 1e-10


def test_top_of_wrong_bidegree_is_zero():
    assert top_coefficient(kahler_form(3)) == 0


# -- pairing operators and kernels

def test_pairing_unit_is_identity():
    op = pairing_operator(BigradedForm.unit(3), 1, 1)
    assert np.allclose(op.matrix, np.eye(9))


def test_pairing_kahler_n2():
    op = pairing_operator(kahler_form(2), 1, 1)
    assert op.matrix.shape == (1, 4)
    assert np.linalg.matrix_rank(op.matrix) == 1
    ker = kernel_basis(op)
    assert len(ker) == 3
    for g in ker:
        assert wedge(kahler_form(2), g).max_abs() < 1e-12


def test_pairing_kahler_n4():
    op = pairing_operator(kahler_form(4), 2, 2)
    assert op.matrix.shape == (dimension(4, 3, 3), dimension(4, 2, 2))
    assert np.linalg.matrix_rank(op.matrix) == 16
    assert len(kernel_basis(op)) == 20


def test_kernel_of_identity_and_zero():
    assert kernel_basis(pairing_operator(BigradedForm.unit(2), 1, 1)) == []
    assert len(kernel_basis(pairing_operator(BigradedForm.zero(2, 1, 1), 1, 1))) == 4


def test_pairing_matches_wedge(rng):
    theta = rand_form(4, 1, 2, rng)
    op = pairing_operator(theta, 2, 1)
    g = rand_form(4, 2, 1, rng)
    direct = wedge(theta, g)
    assert np.allclose(op.matrix @ g.to_vector(), direct.to_vector())


# -- serialization

@given(forms)
def test_json_roundtrip(data):
    n, rng = data
    p, q = rng.integers(0, n + 1, size=2)
    f = rand_form(n, p, q, rng)
    assert BigradedForm.from_json(f.to_json()) == f


def test_json_is_one_based():
    obj = BigradedForm(2, 1, 1, {((0,), (1,)): 1.5}).to_json()
    assert obj["terms"] == [{"I": [1], "J": [2], "re": 1.5, "im": 0.0}]


def test_bad_index_rejected():
    with pytest.raises(ValueError):
        BigradedForm(2, 1, 1, {((2,), (0,)): 1.0})
    with pytest.raises(ValueError):
        BigradedForm(3, 2, 0, {((1, 0), ()): 1.0})


def test_drop_threshold():
    f = BigradedForm(2, 1, 0, {((0,), ()): 1.0, ((1,), ()): 1e-16})
    assert len(f) == 1
