"""Khovanskii-Teissier type inequalities: rank one, log-concavity, higher rank."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import HypothesisError, NoWitnessError
from .exterior import (BigradedForm, as_form, conjugate, hermitian_pairing_matrix,
                       kahler_form, power, top_coefficient, top_functional, wedge,
                       wedge_all)
from .hodge import (HRSetting, LefschetzDecomposition, _power_cached, hodge_index_signature,
                    lefschetz_decompose, primitive_matrix, signature_report, SignatureReport)
from .hyperbolicity import eigen_signature, is_m_positive, proportional


@dataclass
class KTReport:
    lhs: float
    rhs: float
    difference: float           # lhs - rhs
    holds: bool
    equality: bool
    scale: float
    proportional: bool | None = None
    proportionality_witness: complex | None = None
    violating_class: BigradedForm | None = None

    def to_json(self) -> dict:
        w = self.proportionality_witness
        return {
            "lhs": self.lhs, "rhs": self.rhs, "difference": self.difference,
            "holds": self.holds, "equality": self.equality, "scale": self.scale,
            "proportional": self.proportional,
            "witness": None if w is None else {"re": float(np.real(w)), "im": float(np.imag(w))},
            "violating_class": None if self.violating_class is None else self.violating_class.to_json(),
        }


def _report(lhs: float, rhs: float, tols: Tolerances) -> KTReport:
    diff = lhs - rhs
    scale = max(abs(lhs), abs(rhs), 1.0)
    return KTReport(lhs, rhs, diff, bool(diff >= -tols.definite * scale),
                    bool(abs(diff) <= tols.equality * scale), scale)


def _ratio(target: BigradedForm, base: BigradedForm) -> complex:
    """c minimising |target - c base|."""
    b, t = base.to_vector(), target.to_vector()
    return complex(np.vdot(b, t) / np.vdot(b, b))


def kt_rank1(omega: BigradedForm, eta, alpha, tols: Tolerances = DEFAULT) -> KTReport:
    """(top Ω^η^α)² against top(Ω^η²) top(Ω^α²)."""
    eta, alpha = as_form(eta), as_form(alpha)
    oe = wedge(omega, eta)
    a = float(np.real(top_coefficient(wedge(oe, alpha))))
    ee = float(np.real(top_coefficient(wedge(oe, eta))))
    aa = float(np.real(top_coefficient(wedge(wedge(omega, alpha), alpha))))
    rep = _report(a * a, ee * aa, tols)
    rep.proportional = proportional(eta, alpha, tols.proportional)
    if rep.proportional:
        rep.proportionality_witness = _ratio(alpha, eta)
    return rep


@dataclass
class LogConcavityReport:
    a: list[float]
    holds_per_k: list[bool]
    equality_per_k: list[bool]
    proportional: bool

    @property
    def holds(self) -> bool:
        return all(self.holds_per_k)

    @property
    def any_equality(self) -> bool:
        return any(self.equality_per_k)

    def to_json(self) -> dict:
        return {"a": self.a, "holds_per_k": self.holds_per_k,
                "equality_per_k": self.equality_per_k, "proportional": self.proportional}


def log_concavity(omega_t: BigradedForm, alpha, beta, d: int | None = None, pivot=None,
                  check: bool = True, tols: Tolerances = DEFAULT) -> LogConcavityReport:
    """a_k = top(Ω̃ ^ α^k ^ β^(d-k)); checks a_k² >= a_{k-1} a_{k+1} for 1 <= k <= d-1.

    With ``check`` both α and β must be d-positive w.r.t. (pivot, Ω̃); the
    pivot defaults to ω₀.
    """
    n = omega_t.n
    expected = n - omega_t.p
    d = expected if d is None else d
    if d != expected:
        raise ValueError(f"d={d} does not match Ω̃ of bidegree {omega_t.bidegree}")
    alpha, beta = as_form(alpha), as_form(beta)
    if check:
        pivot = kahler_form(n) if pivot is None else pivot
        for name, f in (("α", alpha), ("β", beta)):
            res = is_m_positive(f, pivot, omega_t, d, tol=tols.strict)
            if not res.ok:
                raise HypothesisError(f"{name} is not {d}-positive w.r.t. (pivot, Ω̃)",
                                      where=(name, res.first_violation), margin=res.margin)
    a = [float(np.real(top_coefficient(wedge_all([omega_t, power(alpha, k), power(beta, d - k)]))))
         for k in range(d + 1)]
    holds, eq = [], []
    for k in range(1, d):
        lhs, rhs = a[k] ** 2, a[k - 1] * a[k + 1]
        scale = max(abs(lhs), abs(rhs), 1e-300)
        holds.append(bool(lhs - rhs >= -tols.definite * scale))
        eq.append(bool(abs(lhs - rhs) <= tols.equality * scale))
    return LogConcavityReport(a, holds, eq, proportional(alpha, beta, tols.proportional))


# ---------------------------------------------------------------------------
# higher rank


@dataclass(frozen=True, eq=False)
class KTSetting:
    """Data (Ω, η, α, p) of the higher-rank inequality; Ω has bidegree (n-2p, n-2p).

    ``levels`` optionally records the semi-positive factors of Ω, grouped by
    level, so their eigenvalue hypotheses can be checked.
    """

    omega: BigradedForm
    eta: BigradedForm
    alpha: BigradedForm
    p: int
    levels: tuple[tuple[BigradedForm, ...], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "eta", as_form(self.eta))
        object.__setattr__(self, "alpha", as_form(self.alpha))
        n = self.eta.n
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if self.omega.bidegree != (n - 2 * self.p, n - 2 * self.p):
            raise ValueError(f"Ω must have bidegree ({n - 2 * self.p}, {n - 2 * self.p})")

    @classmethod
    def from_levels(cls, levels: Sequence[Sequence], eta, alpha, p: int) -> "KTSetting":
        lv = tuple(tuple(as_form(f) for f in lvl) for lvl in levels)
        n = as_form(eta).n
        omega = wedge_all([f for lvl in lv for f in lvl], n)
        return cls(omega, eta, alpha, p, lv)

    @property
    def n(self) -> int:
        return self.eta.n

    @cached_property
    def T(self) -> BigradedForm:
        """η^(p-1) ^ α."""
        return wedge(_power_cached(self.eta, self.p - 1), self.alpha)

    @cached_property
    def omega_T(self) -> BigradedForm:
        return wedge(self.omega, self.T)

    @cached_property
    def T2(self) -> float:
        return float(np.real(top_coefficient(wedge(self.omega_T, self.T))))

    def check(self, tols: Tolerances = DEFAULT) -> None:
        """Raise HypothesisError unless the eigenvalue and 2-positivity hypotheses hold."""
        n, p = self.n, self.p
        used = 0
        if self.levels is not None:
            if sum(len(l) for l in self.levels) != n - 2 * p:
                raise HypothesisError(f"Σλ must equal n - 2p = {n - 2 * p}")
            for i, lvl in enumerate(self.levels, start=1):
                need = n - used
                for j, f in enumerate(lvl, start=1):
                    pos, neg, _ = eigen_signature(f)
                    if neg or pos < need:
                        raise HypothesisError(
                            f"α_{i},{j} must be semi-positive with >= {need} positive eigenvalues",
                            where=(i, j))
                used += len(lvl)
        else:
            used = n - 2 * p
        pos, neg, _ = eigen_signature(self.eta)
        if neg or pos < n - used:
            raise HypothesisError(f"η must be semi-positive with >= {n - used} positive eigenvalues",
                                  where=("eta",))
        phi = wedge(self.omega, _power_cached(self.eta, 2 * p - 2))
        res = is_m_positive(self.alpha, self.eta, phi, 2, tol=tols.strict)
        if not res.ok:
            raise HypothesisError("α is not 2-positive w.r.t. (η, Ω ^ η^(2p-2))",
                                  where=("alpha", res.first_violation), margin=res.margin)
        if not self.T2 > 0:
            raise HypothesisError("top(Ω ^ (η^(p-1) ^ α)²) must be positive")


def higher_rank_kt(setting: KTSetting, gamma: BigradedForm, check: bool = False,
                   tols: Tolerances = DEFAULT) -> KTReport:
    """top(ΩTγ) top(ΩTγ̄) against top(ΩT²) top(Ωγγ̄), T = η^(p-1) ^ α, by direct wedges."""
    if check:
        setting.check(tols)
    p = setting.p
    if gamma.bidegree != (p, p):
        raise ValueError(f"γ must have bidegree ({p}, {p})")
    gbar = conjugate(gamma)
    v1 = top_coefficient(wedge(setting.omega_T, gamma))
    v2 = top_coefficient(wedge(setting.omega_T, gbar))
    gg = top_coefficient(wedge(wedge(setting.omega, gamma), gbar))
    rep = _report(float(np.real(v1 * v2)), setting.T2 * float(np.real(gg)), tols)
    rep.proportional = proportional(gamma, setting.T, tols.proportional)
    if rep.proportional:
        rep.proportionality_witness = _ratio(gamma, setting.T)
    if not rep.holds:
        rep.violating_class = gamma
    return rep


@dataclass
class DifferenceForm:
    """D with rhs(γ) - lhs(γ) = vec(γ)^* D vec(γ) on Λ^{p,p}."""

    gram: np.ndarray
    signature: SignatureReport

    def evaluate(self, gamma: BigradedForm) -> float:
        g = gamma.to_vector()
        return float(np.real(np.vdot(g, self.gram @ g)))

    @property
    def condition_i_holds(self) -> bool:
        return self.signature.n_pos == 0


def kt_difference_form(setting: KTSetting, tols: Tolerances = DEFAULT) -> DifferenceForm:
    """Assemble T2 · (pairing of Ω on Λ^{p,p}) minus the rank-one term from ΩT."""
    p = setting.p
    G = hermitian_pairing_matrix(setting.omega, p, p)
    v = top_functional(setting.omega_T)
    D = setting.T2 * G.T - np.outer(v.conj(), v)
    D = (D + D.conj().T) / 2
    return DifferenceForm(D, signature_report(D, tols.definite))


def stage_values(setting: KTSetting, dec: LefschetzDecomposition) -> dict[int, float]:
    """S_s = top(Ω ^ η^(2(p-s)) ^ γ_s ^ conj γ_s) for each component of a decomposition."""
    p = setting.p
    out = {}
    for s, g in dec.components.items():
        theta = wedge(setting.omega, _power_cached(setting.eta, 2 * (p - s)))
        G = hermitian_pairing_matrix(theta, s, s)
        v = g.to_vector()
        out[s] = float(np.real(v @ G @ v.conj()))
    return out


def decomposition_difference(setting: KTSetting, gamma: BigradedForm):
    """lhs - rhs predicted by the decomposition: -T2 Σ_s S_s."""
    dec = lefschetz_decompose(gamma, setting.omega, setting.eta, setting.alpha)
    S = stage_values(setting, dec)
    return -setting.T2 * sum(S.values()), S, dec


@dataclass
class LemEqReport:
    lhs1: complex
    rhs1: complex
    lhs2: float
    rhs2: float
    err1: float     # relative errors
    err2: float
    ok1: bool
    ok2: bool
    decomposition: LefschetzDecomposition = field(repr=False)

    @property
    def ok(self) -> bool:
        return self.ok1 and self.ok2


def lem_eq_verify(setting: KTSetting, gamma: BigradedForm, rtol: float = 1e-9) -> LemEqReport:
    """Check top(ΩTγ) = μ T2 and top(Ωγγ̄) = |μ|² T2 + Σ_s S_s.

    Relative errors are measured against the sum of the magnitudes of the
    terms on each side.
    """
    p = setting.p
    dec = lefschetz_decompose(gamma, setting.omega, setting.eta, setting.alpha)
    g = gamma.to_vector()
    lhs1 = complex(top_functional(setting.omega_T) @ g)
    rhs1 = dec.mu * setting.T2
    lhs2 = float(np.real(g @ hermitian_pairing_matrix(setting.omega, p, p) @ g.conj()))
    S = stage_values(setting, dec)
    mu_term = abs(dec.mu) ** 2 * setting.T2
    rhs2 = mu_term + sum(S.values())
    err1 = abs(lhs1 - rhs1) / max(abs(lhs1) + abs(rhs1), 1e-300)
    err2 = abs(lhs2 - rhs2) / max(abs(lhs2) + abs(mu_term) + sum(abs(x) for x in S.values()), 1e-300)
    if abs(lhs1) + abs(rhs1) == 0:
        err1 = 0.0
    return LemEqReport(lhs1, rhs1, lhs2, rhs2, err1, err2, err1 <= rtol, err2 <= rtol, dec)


def witness_construct(setting: KTSetting, d_prime: int, tols: Tolerances = DEFAULT) -> BigradedForm:
    """γ' = T + η^(p-2d') ^ β with β primitive in Λ^{2d',2d'} w.r.t. (Ω ^ η^(2(p-2d')), η).

    β is the first primitive basis vector, rescaled so that η^(p-2d') ^ β
    and T have equal coefficient norms.  The returned class violates the
    inequality strictly; this is asserted before returning.
    """
    p = setting.p
    if not 1 <= d_prime <= p // 2:
        raise ValueError(f"d' must lie in 1..{p // 2}")
    s = 2 * d_prime
    theta = wedge(setting.omega, _power_cached(setting.eta, 2 * (p - s)))
    K = primitive_matrix(HRSetting(theta, setting.eta, s, s))
    if K.shape[1] == 0:
        raise NoWitnessError("condition (ii) holds at this stage; no witness exists here")
    beta = BigradedForm.from_vector(setting.n, s, s, K[:, 0])
    lifted = wedge(_power_cached(setting.eta, p - s), beta)
    lifted = lifted * (np.linalg.norm(setting.T.to_vector()) / np.linalg.norm(lifted.to_vector()))
    gamma = setting.T + lifted
    rep = higher_rank_kt(setting, gamma, tols=tols)
    if rep.holds or -rep.difference <= tols.definite * rep.scale:
        raise RuntimeError(f"witness at d'={d_prime} does not violate the inequality "
                           f"(difference {rep.difference:.3e})")
    return gamma


def find_witness(setting: KTSetting, tols: Tolerances = DEFAULT) -> tuple[int, BigradedForm]:
    """Smallest d' admitting a witness."""
    for d_prime in range(1, setting.p // 2 + 1):
        try:
            return d_prime, witness_construct(setting, d_prime, tols)
        except NoWitnessError:
            continue
    raise NoWitnessError("condition (ii) holds at every stage; no witness exists")


@dataclass(frozen=True)
class TorusModel:
    """Complex torus of dimension n: cohomology = constant forms, h^{p,q} = C(n,p) C(n,q)."""

    n: int

    def hodge_number(self, p: int, q: int) -> int:
        if not (0 <= p <= self.n and 0 <= q <= self.n):
            return 0
        return math.comb(self.n, p) * math.comb(self.n, q)


def hodge_condition(model: TorusModel, p: int) -> bool:
    """h^{2l-1,2l-1} = h^{2l,2l} for all 1 <= l <= [p/2]."""
    if p < 2:
        raise ValueError("p must be >= 2")
    return all(model.hodge_number(2 * l - 1, 2 * l - 1) == model.hodge_number(2 * l, 2 * l)
               for l in range(1, p // 2 + 1))


# ---------------------------------------------------------------------------
# null classes


@dataclass
class NullClassReport:
    left: bool      # c_1..c_{n-1} ^ c = 0 and top(c_1..c_{n-2} ^ c²) = 0
    right: bool     # c_1..c_{n-2} ^ c = 0
    forward: bool   # left => right
    backward: bool  # right => left

    @property
    def equivalent(self) -> bool:
        return self.forward and self.backward

    def to_json(self) -> dict:
        return {"left": self.left, "right": self.right,
                "forward": self.forward, "backward": self.backward}


def null_class_equivalence(c_list: Sequence, c, tol: float = 1e-9,
                           tols: Tolerances = DEFAULT) -> NullClassReport:
    """Check [Ω ^ c_{n-1} ^ c = 0 and top(Ω ^ c²) = 0] <=> Ω ^ c = 0, Ω = c_1 ^ ... ^ c_{n-2}.

    Requires c_{n-1} to be 2-positive w.r.t. (ω₀, Ω) and (Ω, c_{n-1}) to
    satisfy the Hodge index theorem; c must be a real (1,1)-form.
    """
    forms = [as_form(f) for f in c_list]
    c = as_form(c)
    n = c.n
    if len(forms) != n - 1:
        raise ValueError(f"need n - 1 = {n - 1} forms, got {len(forms)}")
    if not c.is_real(1e-9):
        raise ValueError("c must be a real (1,1)-form")
    omega = wedge_all(forms[:-1], n)
    last = forms[-1]
    res = is_m_positive(last, kahler_form(n), omega, 2, tol=tols.strict)
    if not res.ok:
        raise HypothesisError("c_(n-1) is not 2-positive w.r.t. (ω₀, Ω)",
                              where=("c_last", res.first_violation), margin=res.margin)
    sig = hodge_index_signature(omega, last, tols.definite)
    if sig.verdict != "negative-definite":
        raise HypothesisError(f"(Ω, c_(n-1)) fails the Hodge index theorem ({sig.verdict})")
    size = omega.max_abs() * max(c.max_abs(), 1e-300) * math.factorial(n)
    oc = wedge(omega, c)
    left = (abs(top_coefficient(wedge(oc, last))) <= tol * size * last.max_abs()
            and abs(top_coefficient(wedge(oc, c))) <= tol * size * c.max_abs())
    right = oc.max_abs() <= tol * size
    if c.is_zero():
        left = right = True
    return NullClassReport(bool(left), bool(right), bool(right or not left), bool(left or not right))
