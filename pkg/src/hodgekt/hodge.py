"""Primitive spaces, Hodge index and Hodge-Riemann signatures, Lefschetz decomposition."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .config import DEFAULT
from .errors import HypothesisError, StageSolveError
from .exterior import (BigradedForm, as_form, as_hermitian, conjugate, dimension,
                       hermitian_pairing_matrix, kernel_matrix, pairing_operator, power, top_coefficient,
                       top_functional, wedge, wedge_all)
from .hyperbolicity import TowerSpec, build_tower, eigen_signature, is_m_positive


def hr_sign(p: int, q: int) -> complex:
    """σ_{p,q} = i^(q-p) (-1)^((p+q)(p+q+1)/2)."""
    k = p + q
    return (1j ** ((q - p) % 4)) * (-1) ** (k * (k + 1) // 2)


@dataclass(frozen=True)
class HRSetting:
    """Pairing (β, γ) ↦ σ_{p,q} top(Ω ^ β ^ conj γ) on Λ^{p,q}, primitive w.r.t. (Ω, η)."""

    omega: BigradedForm
    eta: BigradedForm
    p: int
    q: int

    def __post_init__(self):
        n = self.omega.n
        k = self.p + self.q
        if self.omega.bidegree != (n - k, n - k):
            raise ValueError(f"Ω must have bidegree ({n - k}, {n - k}) for (p, q)=({self.p}, {self.q})")
        if self.eta.bidegree != (1, 1) or self.eta.n != n:
            raise ValueError("η must be a (1,1)-form on the same C^n")

    @property
    def n(self) -> int:
        return self.omega.n

    @property
    def sign(self) -> complex:
        return hr_sign(self.p, self.q)

    @property
    def lefschetz_form(self) -> BigradedForm:
        return _wedge_cached(self.omega, self.eta)


@lru_cache(maxsize=256)
def _wedge_cached(f: BigradedForm, g: BigradedForm) -> BigradedForm:
    return wedge(f, g)


@lru_cache(maxsize=256)
def _power_cached(f: BigradedForm, k: int) -> BigradedForm:
    return power(f, k)


def q_form(setting: HRSetting, beta: BigradedForm, gamma: BigradedForm) -> complex:
    for name, f in (("β", beta), ("γ", gamma)):
        if f.bidegree != (setting.p, setting.q):
            raise ValueError(f"{name} has bidegree {f.bidegree}, expected ({setting.p}, {setting.q})")
    return setting.sign * top_coefficient(wedge(wedge(setting.omega, beta), conjugate(gamma)))


def primitive_matrix(setting: HRSetting, tol: float = DEFAULT.rank) -> np.ndarray:
    """Orthonormal columns spanning P^{p,q} = ker(γ ↦ Ω ^ η ^ γ)."""
    op = pairing_operator(setting.lefschetz_form, setting.p, setting.q)
    return kernel_matrix(op.matrix, tol)


def primitive_basis(setting: HRSetting, tol: float = DEFAULT.rank) -> list[BigradedForm]:
    K = primitive_matrix(setting, tol)
    return [BigradedForm.from_vector(setting.n, setting.p, setting.q, K[:, i])
            for i in range(K.shape[1])]


def gram_matrix(omega: BigradedForm, K: np.ndarray, p: int, q: int, sign: complex = 1.0) -> np.ndarray:
    """Q[i, j] = sign * top(Ω ^ k_i ^ conj k_j) for the columns k_i of K."""
    G = hermitian_pairing_matrix(omega, p, q)
    Q = sign * (K.T @ G @ K.conj())
    return (Q + Q.conj().T) / 2


@dataclass
class SignatureReport:
    dim_space: int
    n_pos: int
    n_neg: int
    n_zero: int
    min_abs_eigen: float
    tol: float
    verdict: str
    eigs: list[float] = field(default_factory=list)
    expected_dim: int | None = None
    asymmetry: float = 0.0

    @property
    def dim_matches(self) -> bool:
        return self.expected_dim is None or self.expected_dim == self.dim_space

    def to_json(self) -> dict:
        out = {"dim": self.dim_space, "pos": self.n_pos, "neg": self.n_neg,
               "zero": self.n_zero, "verdict": self.verdict,
               "eigs": [float(e) for e in self.eigs]}
        if self.expected_dim is not None:
            out["expected_dim"] = self.expected_dim
        return out


def signature_report(Q: np.ndarray, tol: float = DEFAULT.definite,
                     expected_dim: int | None = None) -> SignatureReport:
    """Classify a Hermitian matrix; definite verdicts require no near-zero eigenvalues."""
    Q = np.asarray(Q)
    asym = float(np.abs(Q - Q.conj().T).max(initial=0.0))
    eigs = np.linalg.eigvalsh((Q + Q.conj().T) / 2) if Q.size else np.zeros(0)
    radius = np.abs(eigs).max(initial=0.0)
    cut = tol * radius if radius > 0 else tol
    pos = int(np.sum(eigs > cut))
    neg = int(np.sum(eigs < -cut))
    zero = len(eigs) - pos - neg
    if zero or not len(eigs):
        verdict = "degenerate"
    elif neg == 0:
        verdict = "positive-definite"
    elif pos == 0:
        verdict = "negative-definite"
    else:
        verdict = "indefinite"
    return SignatureReport(len(eigs), pos, neg, zero, float(np.abs(eigs).min(initial=np.inf)),
                           tol, verdict, [float(e) for e in eigs], expected_dim, asym)


def hodge_index_signature(omega: BigradedForm, eta, tol: float = DEFAULT.definite,
                          rank_tol: float = DEFAULT.rank) -> SignatureReport:
    """Signature of Q(β, γ) = top(Ω ^ β ^ conj γ) on P^{1,1} w.r.t. (Ω, η); no sign twist."""
    setting = HRSetting(omega, as_form(eta), 1, 1)
    K = primitive_matrix(setting, rank_tol)
    n = omega.n
    return signature_report(gram_matrix(omega, K, 1, 1), tol, expected_dim=n * n - 1)


def hodge_index_verify(tower: TowerSpec, eta, tol: float = DEFAULT.definite) -> SignatureReport:
    """Check the tower and the 2-positivity of η, then the Hodge index signature on P^{1,1}.

    A negative-definite verdict means (Ω, η) satisfies the Hodge index theorem.
    """
    built = build_tower(tower)
    n = tower.n
    if sum(tower.lambdas) != n - 2:
        raise HypothesisError(f"Σλ = {sum(tower.lambdas)} but must equal n - 2 = {n - 2}")
    res = is_m_positive(eta, built.pivot, built.omega, 2)
    if not res.ok:
        raise HypothesisError("η is not 2-positive w.r.t. (final pivot, Ω)",
                              where=("eta", res.first_violation), margin=res.margin)
    return hodge_index_signature(built.omega, eta, tol)


def _check_hr_hypotheses(levels, etas, d: int, p: int, q: int, n: int):
    if p < 1 or q < 1:
        raise HypothesisError("p and q must be at least 1")
    lambdas = [len(lvl) for lvl in levels]
    if sum(lambdas) != n - (p + q):
        raise HypothesisError(f"Σλ = {sum(lambdas)} but must equal n - (p+q) = {n - p - q}")
    if not 0 <= d <= (p + q) // 2 - 1:
        raise HypothesisError(f"d={d} outside 0..{(p + q) // 2 - 1}")
    if len(etas) < 2 * d + 1:
        raise HypothesisError(f"need at least {2 * d + 1} η forms, got {len(etas)}")
    used = 0
    for i, lvl in enumerate(levels, start=1):
        need = n - used
        for j, f in enumerate(lvl, start=1):
            pos, neg, _ = eigen_signature(f)
            if neg or pos < need:
                raise HypothesisError(
                    f"α_{i},{j} must be semi-positive with >= {need} positive eigenvalues "
                    f"(has {pos} positive, {neg} negative)", where=(i, j))
        used += len(lvl)
    need = n - used
    for j, f in enumerate(etas, start=1):
        pos, neg, _ = eigen_signature(f)
        if neg or pos < need:
            raise HypothesisError(
                f"η_{j} must be semi-positive with >= {need} positive eigenvalues "
                f"(has {pos} positive, {neg} negative)", where=("eta", j))


def hodge_riemann_verify(levels: Sequence[Sequence], etas: Sequence, d: int, p: int, q: int,
                         tol: float = DEFAULT.definite, check: bool = True) -> SignatureReport:
    """σ-twisted pairing on P^{p-d,q-d} w.r.t. (Ω ^ η_1..η_2d, η_{2d+1}).

    ``levels`` are the semi-positive factors grouped by level; the verdict
    positive-definite is the mixed Hodge-Riemann relation.
    """
    etas = list(etas)
    n = as_hermitian(etas[0]).shape[0]
    if check:
        _check_hr_hypotheses(levels, etas, d, p, q, n)
    factors = [as_form(f) for lvl in levels for f in lvl]
    theta = wedge_all(factors + [as_form(e) for e in etas[:2 * d]], n)
    pp, qq = p - d, q - d
    setting = HRSetting(theta, as_form(etas[2 * d]), pp, qq)
    K = primitive_matrix(setting)
    expected = dimension(n, pp, qq) - dimension(n, pp - 1, qq - 1)
    Q = gram_matrix(theta, K, pp, qq, setting.sign)
    return signature_report(Q, tol, expected_dim=expected)


def homotopy_sweep(levels, etas, d: int, p: int, q: int, steps: int = 5) -> list[str]:
    """Verdicts along η_j ↦ (1-t) η_j + t ω₀ for the first 2d forms, t in [0, 1]."""
    etas = [as_hermitian(e) for e in etas]
    n = etas[0].shape[0]
    out = []
    for t in np.linspace(0.0, 1.0, steps):
        moved = [(1 - t) * e + t * np.eye(n) for e in etas[:2 * d]] + etas[2 * d:]
        out.append(hodge_riemann_verify(levels, moved, d, p, q, check=False).verdict)
    return out


@dataclass(frozen=True)
class LefschetzResult:
    injective: bool
    condition_number: float
    smallest_singular_value: float


def hard_lefschetz_verify(theta: BigradedForm, p: int, q: int,
                          tol: float = DEFAULT.rank) -> LefschetzResult:
    """Is γ ↦ Θ ^ γ from Λ^{p,q} to Λ^{n-q,n-p} an isomorphism?"""
    n = theta.n
    if theta.bidegree != (n - p - q, n - p - q):
        raise ValueError(f"Θ must have bidegree ({n - p - q}, {n - p - q}) to map Λ^{p},{q} "
                         f"onto Λ^{n - q},{n - p}")
    s = np.linalg.svd(pairing_operator(theta, p, q).matrix, compute_uv=False)
    smax = s.max(initial=0.0)
    smin = s.min() if s.size else 0.0
    if smax == 0:
        return LefschetzResult(False, math.inf, 0.0)
    return LefschetzResult(bool(smin > tol * smax), float(smax / smin) if smin > 0 else math.inf,
                           float(smin))


# ---------------------------------------------------------------------------
# Lefschetz decomposition of (p,p)-forms


@dataclass
class LefschetzDecomposition:
    """γ = Σ_s η^(p-s) ^ γ_s + μ η^(p-1) ^ α."""

    components: dict[int, BigradedForm]
    mu: complex
    residual: float
    relative_residual: float
    conditions: dict[int, float]

    def reconstruct(self, eta: BigradedForm, alpha: BigradedForm) -> BigradedForm:
        p = max(self.components)
        n = eta.n
        out = BigradedForm.zero(n, p, p)
        for s, g in self.components.items():
            out = out + wedge(_power_cached(eta, p - s), g)
        return out + self.mu * wedge(_power_cached(eta, p - 1), alpha)


@lru_cache(maxsize=64)
def _decomposition_operators(omega: BigradedForm, eta: BigradedForm, alpha: BigradedForm, p: int):
    ops = {}
    for s in range(p, 1, -1):
        L = pairing_operator(wedge(omega, _power_cached(eta, 2 * (p - s) + 1)), s, s).matrix
        H = pairing_operator(wedge(omega, _power_cached(eta, 2 * (p - s) + 2)), s - 1, s - 1).matrix
        E = pairing_operator(eta, s - 1, s - 1).matrix
        u, sv, vh = np.linalg.svd(H)
        cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
        ops[s] = (L, (u, sv, vh), E, cond)
    base = wedge(omega, _power_cached(eta, 2 * (p - 1)))
    v = top_functional(wedge(base, alpha))
    t2 = top_coefficient(wedge(wedge(base, alpha), alpha))
    return ops, v, t2


def lefschetz_decompose(gamma: BigradedForm, omega: BigradedForm, eta, alpha,
                        tol: float = 1e-9, max_condition: float = 1e12) -> LefschetzDecomposition:
    """Stage-wise decomposition into primitive pieces plus a multiple of η^(p-1) ^ α.

    Stage s splits the current (s,s)-form as γ_s + η ^ γ̃_{s-1} with γ_s
    primitive w.r.t. (Ω ^ η^(2(p-s)), η); the Hard Lefschetz operator
    Ω ^ η^(2(p-s)+2) on Λ^{s-1,s-1} is inverted by SVD.  The last stage
    splits γ̃_1 = γ_1 + μ α with γ_1 primitive w.r.t. (Ω ^ η^(2(p-1)), α).
    """
    eta, alpha = as_form(eta), as_form(alpha)
    p = gamma.p
    n = gamma.n
    if gamma.q != p:
        raise ValueError("γ must have bidegree (p, p)")
    if omega.bidegree != (n - 2 * p, n - 2 * p):
        raise ValueError(f"Ω must have bidegree ({n - 2 * p}, {n - 2 * p})")
    ops, v, t2 = _decomposition_operators(omega, eta, alpha, p)
    if abs(t2) == 0:
        raise StageSolveError(1, math.inf)
    g = gamma.to_vector()
    comps, conds = {}, {}
    for s in range(p, 1, -1):
        L, (u, sv, vh), E, cond = ops[s]
        conds[s] = cond
        if cond > max_condition:
            raise StageSolveError(s, cond)
        y = vh.conj().T @ ((u.conj().T @ (L @ g)) / sv)
        comps[s] = BigradedForm.from_vector(n, s, s, g - E @ y)
        g = y
    mu = complex(v @ g / t2)
    comps[1] = BigradedForm.from_vector(n, 1, 1, g - mu * alpha.to_vector())
    dec = LefschetzDecomposition(comps, mu, 0.0, 0.0, conds)
    diff = gamma - dec.reconstruct(eta, alpha)
    dec.residual = diff.max_abs()
    dec.relative_residual = dec.residual / max(gamma.max_abs(), 1e-300)
    return dec
