import numpy as np
import pytest
from hypothesis import given, strategies as st

from hodgekt.errors import HypothesisError, StageSolveError
from hodgekt.exterior import (BigradedForm, dimension, from_hermitian, kahler_form, kernel_basis,
                              pairing_operator, power, top_coefficient, wedge, wedge_all)
from hodgekt.generators import (random_positive_definite, random_semipositive,
                                random_semipositive_levels, random_tower, random_two_positive,
                                random_unitary)
from hodgekt.hodge import (HRSetting, gram_matrix, hard_lefschetz_verify, hodge_index_signature,
                           hodge_index_verify, hodge_riemann_verify, homotopy_sweep, hr_sign,
                           lefschetz_decompose, primitive_basis, primitive_matrix, q_form,
                           signature_report)
from hodgekt.hyperbolicity import TowerSpec, build_tower

seeds = st.integers(0, 2**32 - 1)


def rand_pp(n, p, rng):
    dim = dimension(n, p, p)
    return BigradedForm.from_vector(n, p, p, rng.normal(size=dim) + 1j * rng.normal(size=dim))


def test_hr_sign_values():
    assert hr_sign(1, 1) == -1
    assert hr_sign(0, 0) == 1
    assert hr_sign(2, 2) == 1
    assert hr_sign(2, 1) == pytest.approx(-1j)


def test_q_form_examples():
    s = HRSetting(BigradedForm.unit(2), kahler_form(2), 1, 1)
    b = from_hermitian(np.diag([1.0, -1]))
    assert top_coefficient(b ^ b.conjugate()) == pytest.approx(-2)
    assert q_form(s, b, b) == pytest.approx(2)
    assert q_form(s, b, BigradedForm.zero(2, 1, 1)) == 0
    with pytest.raises(ValueError):
        q_form(s, kahler_form(2) ^ kahler_form(2), b)


def test_q_form_hermitian_symmetric(rng):
    s = HRSetting(from_hermitian(random_positive_definite(4, rng)), kahler_form(4), 2, 1)
    b = BigradedForm.from_vector(4, 2, 1, rng.normal(size=24) + 1j * rng.normal(size=24))
    c = BigradedForm.from_vector(4, 2, 1, rng.normal(size=24) + 1j * rng.normal(size=24))
    assert q_form(s, b, c) == pytest.approx(np.conj(q_form(s, c, b)))


def test_gram_matches_q_form(rng):
    omega = wedge_all([from_hermitian(random_positive_definite(4, rng)) for _ in range(2)])
    s = HRSetting(omega, kahler_form(4), 1, 1)
    K = primitive_matrix(s)
    Q = gram_matrix(s.omega, K, 1, 1, s.sign)
    basis = primitive_basis(s)
    assert Q[0, 1] == pytest.approx(q_form(s, basis[0], basis[1]), abs=1e-10)
    assert Q[2, 2] == pytest.approx(q_form(s, basis[2], basis[2]).real, abs=1e-10)


def test_primitive_dimensions(rng):
    assert len(primitive_basis(HRSetting(BigradedForm.unit(2), kahler_form(2), 1, 1))) == 3
    eta = from_hermitian(random_positive_definite(4, rng))
    assert len(primitive_basis(HRSetting(BigradedForm.unit(4), eta, 2, 2))) == 20
    # scalars are never primitive once Ω ^ η != 0
    assert kernel_basis(pairing_operator(power(kahler_form(3), 2), 0, 0)) == []


def test_primitive_elements_are_killed(rng):
    s = HRSetting(from_hermitian(random_positive_definite(5, rng)), kahler_form(5), 2, 2)
    for g in primitive_basis(s)[:5]:
        assert wedge(s.lefschetz_form, g).max_abs() < 1e-9


def test_signature_report_verdicts():
    assert signature_report(np.diag([1.0, 2])).verdict == "positive-definite"
    assert signature_report(np.diag([-1.0, -2])).verdict == "negative-definite"
    assert signature_report(np.diag([1.0, -2])).verdict == "indefinite"
    assert signature_report(np.diag([1.0, 0])).verdict == "degenerate"
    assert signature_report(np.zeros((0, 0))).verdict == "degenerate"
    rep = signature_report(np.diag([1.0, -2, 0]))
    assert rep.n_pos + rep.n_neg + rep.n_zero == rep.dim_space
    assert set(rep.to_json()) == {"dim", "pos", "neg", "zero", "verdict", "eigs"}


# -- Hodge index

def test_hodge_index_surface():
    rep = hodge_index_verify(TowerSpec(2, (), ()), np.eye(2))
    assert rep.verdict == "negative-definite" and rep.dim_space == 3


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_hodge_index_kahler(n):
    w = np.eye(n)
    tower = TowerSpec(n, (tuple([w] * (n - 2)),), (w,))
    rep = hodge_index_verify(tower, w)
    assert rep.verdict == "negative-definite" and rep.n_zero == 0


@given(seeds, st.integers(3, 5), st.booleans(), st.booleans())
def test_hodge_index_random(seed, n, deg_eta, deg_levels):
    rng = np.random.default_rng(seed)
    from hodgekt.generators import random_composition
    tower = random_tower(n, random_composition(n - 2, rng), rng, degenerate=deg_levels)
    built = build_tower(tower)
    pivot = tower.pivots[-1] if tower.pivots else np.eye(n)
    eta = random_two_positive(built.omega, pivot, rng, degenerate=deg_eta)
    rep = hodge_index_verify(tower, eta)
    assert rep.verdict == "negative-definite"


def test_hodge_index_rejects_bad_eta(rng):
    tower = random_tower(4, [2], rng)
    with pytest.raises(HypothesisError):
        hodge_index_verify(tower, -np.eye(4))


def test_hodge_index_strict_on_primitive(rng):
    omega = from_hermitian(random_positive_definite(3, rng))
    eta = from_hermitian(random_positive_definite(3, rng))
    s = HRSetting(omega, eta, 1, 1)
    for g in primitive_basis(s):
        assert top_coefficient(omega ^ g ^ g.conjugate()).real < 0


def test_signature_invariances(rng):
    n = 4
    mats = [random_positive_definite(n, rng) for _ in range(2)]
    eta = random_positive_definite(n, rng)
    ref = hodge_index_signature(wedge_all([from_hermitian(m) for m in mats]), eta)
    scaled = hodge_index_signature(3.5 * wedge_all([from_hermitian(m) for m in mats]), eta)
    swapped = hodge_index_signature(wedge_all([from_hermitian(m) for m in mats[::-1]]), eta)
    U = random_unitary(n, rng)
    moved = hodge_index_signature(wedge_all([from_hermitian(U.conj().T @ m @ U) for m in mats]),
                                  U.conj().T @ eta @ U)
    for rep in (scaled, swapped, moved):
        assert (rep.n_pos, rep.n_neg, rep.n_zero) == (ref.n_pos, ref.n_neg, ref.n_zero)


# -- Hodge-Riemann

@pytest.mark.parametrize("n,p,q,d,dim", [(4, 2, 2, 0, 20), (4, 2, 1, 0, 20), (5, 2, 2, 0, 75),
                                         (6, 2, 2, 1, 35), (5, 2, 1, 0, 45), (4, 1, 1, 0, 15)])
def test_hodge_riemann_positive(n, p, q, d, dim, rng):
    levels = random_semipositive_levels(n, [n - p - q], rng)
    etas = [random_positive_definite(n, rng) for _ in range(2 * d + 1)]
    rep = hodge_riemann_verify(levels, etas, d, p, q)
    assert rep.verdict == "positive-definite"
    assert rep.dim_space == dim == rep.expected_dim


def test_hodge_riemann_degenerate_factors(rng):
    n = 6
    levels = random_semipositive_levels(n, [1, 1], rng, degenerate=True)
    etas = [random_semipositive(n, 5, rng) for _ in range(3)]
    rep = hodge_riemann_verify(levels, etas, 1, 2, 2)
    assert rep.verdict == "positive-definite" and rep.dim_matches


def test_hodge_riemann_boundary_d(rng):
    n = 6
    etas = [random_positive_definite(n, rng) for _ in range(3)]
    rep = hodge_riemann_verify([[random_positive_definite(n, rng)]], etas, 1, 3, 2)
    assert rep.verdict == "positive-definite"


def test_hodge_riemann_consistent_with_index(rng):
    n = 4
    levels = random_semipositive_levels(n, [2], rng)
    eta = random_positive_definite(n, rng)
    hr = hodge_riemann_verify(levels, [eta], 0, 1, 1)
    hi = hodge_index_signature(wedge_all([from_hermitian(x) for x in levels[0]]), eta)
    assert hr.verdict == "positive-definite" and hi.verdict == "negative-definite"
    assert np.allclose(sorted(hr.eigs), sorted(-e for e in hi.eigs))


def test_hodge_riemann_hypotheses(rng):
    n = 4
    with pytest.raises(HypothesisError):
        hodge_riemann_verify([[random_semipositive(n, 1, rng)]], [np.eye(n)], 0, 2, 1)
    with pytest.raises(HypothesisError):
        hodge_riemann_verify([[np.eye(n)]], [np.eye(n)], 0, 2, 2)
    with pytest.raises(HypothesisError):
        hodge_riemann_verify([], [np.eye(n)], 1, 2, 2)


def test_homotopy_constant(rng):
    n = 6
    levels = random_semipositive_levels(n, [2], rng)
    etas = [random_positive_definite(n, rng) for _ in range(3)]
    assert set(homotopy_sweep(levels, etas, 1, 2, 2, steps=4)) == {"positive-definite"}


# -- Hard Lefschetz

@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_hard_lefschetz_kahler(n):
    assert hard_lefschetz_verify(power(kahler_form(n), n - 2), 1, 1).injective


def test_hard_lefschetz_zero():
    assert not hard_lefschetz_verify(BigradedForm.zero(4, 2, 2), 1, 1).injective


def test_hard_lefschetz_hr_setting(rng):
    n = 6
    theta = wedge_all([from_hermitian(random_positive_definite(n, rng)) for _ in range(4)])
    assert hard_lefschetz_verify(theta, 1, 1).injective


# -- Lefschetz decomposition

def _kt_data(n, p, rng):
    omega = wedge_all([from_hermitian(random_positive_definite(n, rng)) for _ in range(n - 2 * p)], n)
    eta = from_hermitian(random_positive_definite(n, rng))
    alpha = from_hermitian(random_positive_definite(n, rng))
    return omega, eta, alpha


def test_decompose_of_T_is_mu_one(rng):
    omega, eta, alpha = _kt_data(4, 2, rng)
    dec = lefschetz_decompose(eta ^ alpha, omega, eta, alpha)
    assert dec.mu == pytest.approx(1)
    assert all(g.max_abs() < 1e-9 for g in dec.components.values())


def test_decompose_primitive(rng):
    omega, eta, alpha = _kt_data(4, 2, rng)
    g = primitive_basis(HRSetting(omega, eta, 2, 2))[3]
    dec = lefschetz_decompose(g, omega, eta, alpha)
    assert abs(dec.mu) < 1e-9
    assert dec.components[2].allclose(g, atol=1e-9)
    assert dec.components[1].max_abs() < 1e-9


@pytest.mark.parametrize("n,p", [(4, 2), (5, 2), (6, 2), (6, 3)])
def test_decompose_random(n, p, rng):
    omega, eta, alpha = _kt_data(n, p, rng)
    gamma = rand_pp(n, p, rng)
    dec = lefschetz_decompose(gamma, omega, eta, alpha)
    assert dec.relative_residual < 1e-9
    T = power(eta, p - 1) ^ alpha
    mu = top_coefficient(omega ^ T ^ gamma) / top_coefficient(omega ^ T ^ T)
    assert dec.mu == pytest.approx(mu, rel=1e-9)
    for s, g in dec.components.items():
        killer = eta if s > 1 else alpha
        assert (omega ^ power(eta, 2 * (p - s)) ^ killer ^ g).max_abs() < 1e-8 * gamma.max_abs()


def test_decompose_kahler_example(rng):
    n, p = 4, 2
    w = kahler_form(n)
    gamma = rand_pp(n, p, rng)
    dec = lefschetz_decompose(gamma, BigradedForm.unit(n), w, w)
    assert dec.relative_residual < 1e-9
    assert dec.mu == pytest.approx(top_coefficient(w ^ w ^ gamma) / top_coefficient(power(w, 4)))


def test_decomposition_is_q_orthogonal(rng):
    n, p = 4, 2
    omega, eta, alpha = _kt_data(n, p, rng)
    dec = lefschetz_decompose(rand_pp(n, p, rng), omega, eta, alpha)
    parts = [dec.components[2], eta ^ dec.components[1], dec.mu * (eta ^ alpha)]
    for i in range(3):
        for j in range(i + 1, 3):
            val = top_coefficient(omega ^ parts[i] ^ parts[j].conjugate())
            assert abs(val) < 1e-9 * max(1, max(x.max_abs() for x in parts) ** 2)


def test_decompose_singular_stage():
    n, p = 4, 2
    eta = from_hermitian(np.diag([1.0, 0, 0, 0]))
    with pytest.raises(StageSolveError) as err:
        lefschetz_decompose(rand_pp(n, p, np.random.default_rng(0)), BigradedForm.unit(n), eta,
                            kahler_form(n))
    assert err.value.stage in (1, 2)
