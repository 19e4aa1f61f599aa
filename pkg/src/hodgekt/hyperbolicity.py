"""Gårding cones of the polynomials x ↦ top(Φ ^ x^d) on real (1,1)-forms.

For a real (n-d, n-d)-form Φ the map ``P_Φ(x) = top(Φ ^ x^d)`` is a
homogeneous degree-d polynomial on Hermitian matrices.  The routines here
restrict it to lines ``s ↦ P_Φ(s a + x)``, test real-rootedness there, and
decide cone membership either from the signs of the line coefficients or
from the location of the roots.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import HypothesisError
from .exterior import (BigradedForm, _power_vector, as_form, as_hermitian,
                       kahler_form, top_coefficient, top_functional, wedge,
                       wedge_all)


def eigen_signature(A, tol: float = 1e-9) -> tuple[int, int, int]:
    """(n_pos, n_neg, n_zero) of a Hermitian matrix, zero meaning |λ| <= tol * spectral radius."""
    w = np.linalg.eigvalsh(as_hermitian(A))
    radius = np.abs(w).max(initial=0.0)
    cut = tol * (radius if radius > 0 else 1.0)
    return int(np.sum(w > cut)), int(np.sum(w < -cut)), int(np.sum(np.abs(w) <= cut))


def _degree(phi: BigradedForm, d: int | None) -> int:
    if phi.p != phi.q:
        raise ValueError(f"Φ must have bidegree (k, k), got {phi.bidegree}")
    expected = phi.n - phi.p
    if d is None:
        return expected
    if d != expected:
        raise ValueError(f"degree d={d} does not match Φ of bidegree {phi.bidegree} on C^{phi.n}")
    return d


class WedgePolynomial:
    """P(x) = top(Φ ^ x^d), evaluated through d x d minors of the Hermitian matrix of x."""

    def __init__(self, phi: BigradedForm):
        self.phi = phi
        self.n = phi.n
        self.d = _degree(phi, None)
        self.weights = top_functional(phi)

    def __call__(self, x) -> float:
        return float(np.real(self.weights @ _power_vector(as_hermitian(x), self.d)))

    def evaluate_many(self, mats: np.ndarray) -> np.ndarray:
        return _power_vector(mats, self.d) @ self.weights

    def line(self, a, x) -> "LinePolynomial":
        A, X = as_hermitian(a), as_hermitian(x)
        d = self.d
        if d == 0:
            return LinePolynomial(np.array([float(np.real(self.weights[0]))]))
        na, nx = np.linalg.norm(A), np.linalg.norm(X)
        sigma = nx / na if na > 0 and nx > 0 else 1.0
        t = np.cos(np.pi * (np.arange(d + 1) + 0.5) / (d + 1))
        mats = (sigma * t)[:, None, None] * A[None] + X[None]
        vals = self.evaluate_many(mats)
        V = np.vander(t, d + 1)
        c = np.linalg.solve(V, vals)
        mu = c / sigma ** np.arange(d, -1, -1)
        scale = max(np.abs(vals).max(), 1e-300)
        return LinePolynomial(np.real(mu), imag_residual=float(np.abs(vals.imag).max() / scale))


@lru_cache(maxsize=512)
def wedge_polynomial(phi: BigradedForm) -> WedgePolynomial:
    return WedgePolynomial(phi)


@dataclass(frozen=True)
class LinePolynomial:
    """h(s) = Σ_k μ_k s^(d-k); ``coeffs`` holds μ_0..μ_d."""

    coeffs: np.ndarray
    imag_residual: float = 0.0

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, s):
        return np.polyval(self.coeffs, s)

    def roots(self) -> np.ndarray:
        if self.degree == 0:
            return np.zeros(0, dtype=complex)
        return np.roots(self.coeffs).astype(complex)

    def real_rooted(self, tol: float = DEFAULT.root_imag) -> bool:
        r = self.roots()
        return bool(np.all(np.abs(r.imag) <= tol * (1 + np.abs(r))))


def line_coefficients(phi: BigradedForm, a, x, d: int | None = None) -> LinePolynomial:
    """μ_k = C(d,k) top(Φ ^ a^(d-k) ^ x^k) for the line s ↦ top(Φ ^ (s a + x)^d)."""
    _degree(phi, d)
    for name, f in (("a", a), ("x", x)):
        if isinstance(f, BigradedForm) and f.bidegree != (1, 1):
            raise ValueError(f"{name} must be a (1,1)-form, got bidegree {f.bidegree}")
    return wedge_polynomial(phi).line(a, x)


@dataclass(frozen=True)
class PositivityResult:
    ok: bool
    margin: float
    values: tuple[float, ...]       # top(Φ ^ φ^(m-k) ^ x^k), k = 1..m
    normalized: tuple[float, ...] = ()
    tol: float = DEFAULT.strict

    def __bool__(self):
        return self.ok

    @property
    def first_violation(self) -> int | None:
        """1-based k of the first value that is not strictly positive."""
        for k, v in enumerate(self.normalized, start=1):
            if not v > self.tol:
                return k
        return None


def is_m_positive(x, phi, Phi: BigradedForm, m: int | None = None,
                  tol: float = DEFAULT.strict) -> PositivityResult:
    """Check top(Φ ^ φ^(m-k) ^ x^k) > 0 for 1 <= k <= m, with m = n - deg Φ.

    The margin is the smallest of these values divided by top(Φ ^ φ^m).
    """
    m = _degree(Phi, m)
    line = wedge_polynomial(Phi).line(phi, x)
    scale = line.coeffs[0]
    if not scale > 0:
        raise ValueError("Φ ^ φ^m is not positive; φ cannot serve as reference form")
    if m == 0:
        return PositivityResult(True, math.inf, ())
    values = tuple(float(line.coeffs[k] / math.comb(m, k)) for k in range(1, m + 1))
    normalized = tuple(v / scale for v in values)
    margin = float(min(normalized))
    return PositivityResult(bool(margin > tol), margin, values, normalized, tol)


@dataclass(frozen=True)
class HyperbolicityCertificate:
    ok: bool
    trials: int
    witness: BigradedForm | None = None
    max_imag: float = 0.0

    def __bool__(self):
        return self.ok


def random_hermitian(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (g + g.conj().T) / 2


def is_hyperbolic_at(phi: BigradedForm, a, d: int | None = None, trials: int = 200,
                     seed=0, directions: Sequence | None = None,
                     tol: float = DEFAULT.root_imag) -> HyperbolicityCertificate:
    """Monte-Carlo certificate that every line s ↦ P(s a + x) has only real roots.

    ``directions`` are tested first; then ``trials`` random Hermitian x.
    """
    d = _degree(phi, d)
    poly = wedge_polynomial(phi)
    A = as_hermitian(a)
    if abs(poly(A)) == 0.0:
        raise ValueError("P(a) = 0: polynomial cannot be hyperbolic at a")
    if d <= 1:
        return HyperbolicityCertificate(True, 0)
    rng = np.random.default_rng(seed)
    candidates = [as_hermitian(x) for x in (directions or ())]
    candidates += [random_hermitian(phi.n, rng) for _ in range(trials)]
    worst = 0.0
    for X in candidates:
        r = poly.line(A, X).roots()
        rel = np.abs(r.imag) / (1 + np.abs(r))
        worst = max(worst, float(rel.max(initial=0.0)))
        if np.any(rel > tol):
            return HyperbolicityCertificate(False, len(candidates), as_form(X), worst)
    return HyperbolicityCertificate(True, len(candidates), None, worst)


def cone_member(phi: BigradedForm, a, x, d: int | None = None,
                tol: float = DEFAULT.strict) -> bool:
    """Membership of x in C(P_Φ, a) via positivity of all line coefficients μ_k, k >= 1."""
    d = _degree(phi, d)
    line = wedge_polynomial(phi).line(a, x)
    mu0 = line.coeffs[0]
    if not mu0 > 0:
        raise ValueError("a is not in the cone: top(Φ ^ a^d) <= 0")
    return bool(all(line.coeffs[k] / math.comb(d, k) > tol * mu0 for k in range(1, d + 1)))


def cone_member_by_roots(phi: BigradedForm, a, x, d: int | None = None,
                         tol: float = DEFAULT.root_imag) -> bool:
    """Membership of x in C(P_Φ, a) as: P(s a + x) has no root with s >= 0."""
    d = _degree(phi, d)
    line = wedge_polynomial(phi).line(a, x)
    if not line.coeffs[0] > 0:
        raise ValueError("a is not in the cone: top(Φ ^ a^d) <= 0")
    r = line.roots()
    real = np.abs(r.imag) <= tol * (1 + np.abs(r))
    return not bool(np.any(real & (r.real >= -1e-10 * (1 + np.abs(r)))))


def polarized(phi: BigradedForm, xs: Sequence) -> float:
    """top(Φ ^ x_1 ^ ... ^ x_d)."""
    d = _degree(phi, None)
    if len(xs) != d:
        raise ValueError(f"need {d} arguments, got {len(xs)}")
    out = phi
    for x in xs:
        out = wedge(out, as_form(x))
    return float(np.real(top_coefficient(out)))


def proportional(u, v, tol: float = DEFAULT.proportional) -> bool:
    """All 2x2 minors of the coefficient vectors are below tol * |u| |v|."""
    u = _vec(u)
    v = _vec(v)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return True
    minors = np.outer(u, v) - np.outer(v, u)
    return bool(np.abs(minors).max() <= tol * nu * nv)


def _vec(x) -> np.ndarray:
    if isinstance(x, BigradedForm):
        return x.to_vector()
    return np.asarray(as_hermitian(x)).ravel()


@dataclass(frozen=True)
class GardingReport:
    lhs: float
    rhs: float
    holds: bool
    equality: bool
    proportional: bool

    @property
    def consistent(self) -> bool:
        """Equality is flagged exactly when the arguments are pairwise proportional."""
        return self.equality == self.proportional


def garding_inequality_check(phi: BigradedForm, xs: Sequence, pivot=None,
                             tols: Tolerances = DEFAULT) -> GardingReport:
    """Compare the polarized value with Π P(x_i)^(1/d).

    Cone membership is tested against ``pivot`` (default ω₀, which lies in
    every cone built from Kähler and cone factors).
    """
    d = _degree(phi, None)
    if len(xs) != d:
        raise ValueError(f"need {d} arguments, got {len(xs)}")
    pivot = kahler_form(phi.n) if pivot is None else pivot
    for i, x in enumerate(xs):
        if not cone_member(phi, pivot, x, tol=tols.strict):
            raise HypothesisError(f"xs[{i}] is not in the Gårding cone", where=(i,))
    poly = wedge_polynomial(phi)
    lhs = polarized(phi, xs)
    rhs = float(np.prod([poly(x) ** (1.0 / d) for x in xs]))
    gap = lhs - rhs
    equality = abs(gap) <= tols.equality * abs(rhs)
    prop = all(proportional(xs[0], x, tols.proportional) for x in xs[1:])
    return GardingReport(lhs, rhs, bool(gap >= -tols.equality * abs(rhs)), bool(equality), prop)


def concavity_check(phi: BigradedForm, a, x, y, grid: int = 10, d: int | None = None,
                    tol: float = 1e-9) -> bool:
    """Midpoint concavity of t ↦ (P((1-t)x + t y) / P(a))^(1/d) on a uniform grid."""
    d = _degree(phi, d)
    poly = wedge_polynomial(phi)
    X, Y = as_hermitian(x), as_hermitian(y)
    ts = np.linspace(0.0, 1.0, grid + 1)
    vals = np.real(poly.evaluate_many((1 - ts)[:, None, None] * X + ts[:, None, None] * Y))
    pa = poly(a)
    if pa <= 0 or np.any(vals <= 0):
        return False
    g = (vals / pa) ** (1.0 / d)
    mid = (g[:-2] + g[2:]) / 2
    return bool(np.all(g[1:-1] >= mid - tol * np.abs(g).max()))


# ---------------------------------------------------------------------------
# positivity classes and towers


@dataclass(frozen=True)
class PositivityClass:
    """A positivity requirement on a real (1,1)-form.

    kind: "positive-definite", "semi-positive" (with at least ``rank``
    positive eigenvalues), or "m-positive" (w.r.t. ``phi``, ``Phi``).
    """

    kind: str
    rank: int | None = None
    phi: BigradedForm | None = field(default=None, compare=False)
    Phi: BigradedForm | None = field(default=None, compare=False)

    def check(self, x, tol: float = 1e-9) -> bool:
        if self.kind == "positive-definite":
            pos, _, _ = eigen_signature(x, tol)
            return pos == as_hermitian(x).shape[0]
        if self.kind == "semi-positive":
            pos, neg, _ = eigen_signature(x, tol)
            return neg == 0 and pos >= (self.rank or 0)
        if self.kind == "m-positive":
            return bool(is_m_positive(x, self.phi, self.Phi))
        raise ValueError(f"unknown positivity kind {self.kind!r}")


@dataclass(frozen=True)
class TowerSpec:
    """Factors α_ij (j <= λ_i) and pivots α_{i,λ_i+1} of an iterated polarization tower."""

    n: int
    levels: tuple[tuple[BigradedForm, ...], ...]
    pivots: tuple[BigradedForm, ...]

    def __post_init__(self):
        levels = tuple(tuple(as_form(f) for f in lvl) for lvl in self.levels)
        pivots = tuple(as_form(f) for f in self.pivots)
        if len(levels) != len(pivots):
            raise ValueError("one pivot per level required")
        for f in [g for lvl in levels for g in lvl] + list(pivots):
            if f.n != self.n or f.bidegree != (1, 1):
                raise ValueError("tower factors must be (1,1)-forms on C^n")
        if sum(len(lvl) for lvl in levels) > self.n - 2:
            raise ValueError("Σλ exceeds n - 2")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "pivots", pivots)

    @property
    def lambdas(self) -> tuple[int, ...]:
        return tuple(len(lvl) for lvl in self.levels)

    def factors(self) -> list[BigradedForm]:
        return [f for lvl in self.levels for f in lvl]


@dataclass(frozen=True)
class Tower:
    spec: TowerSpec
    omega: BigradedForm
    pivot: BigradedForm
    partials: tuple[BigradedForm, ...]   # Φ_i = product of levels 1..i
    margins: tuple[tuple[float, ...], ...]


def build_tower(spec: TowerSpec, tol: float = DEFAULT.strict) -> Tower:
    """Validate the level-by-level positivity hypotheses and return Ω = ∧ α_ij.

    Level 1 factors and pivot must be positive definite; a level-i entry
    (i >= 2) must be (n - Σ_{s<i} λ_s)-positive with respect to the previous
    pivot and the product of all earlier factors.
    """
    n = spec.n
    if not spec.levels:
        unit = BigradedForm.unit(n)
        return Tower(spec, unit, kahler_form(n), (), ())
    partial = BigradedForm.unit(n)
    partials, margins = [], []
    used = 0
    for i, (lvl, piv) in enumerate(zip(spec.levels, spec.pivots), start=1):
        entries = list(lvl) + [piv]
        level_margins = []
        for j, f in enumerate(entries, start=1):
            if i == 1:
                A = as_hermitian(f)
                w = np.linalg.eigvalsh(A)
                margin = float(w.min() / max(np.abs(w).max(), 1e-300))
                if not margin > tol:
                    raise HypothesisError(f"level-1 entry α_{i},{j} is not positive definite",
                                          where=(i, j, None), margin=margin)
            else:
                res = is_m_positive(f, spec.pivots[i - 2], partial, n - used, tol=tol)
                margin = res.margin
                if not res.ok:
                    k = res.first_violation
                    raise HypothesisError(
                        f"α_{i},{j} is not {n - used}-positive w.r.t. the level-{i - 1} pivot "
                        f"(fails at k={k})", where=(i, j, k), margin=margin)
            level_margins.append(margin)
        partial = wedge_all([partial] + list(lvl))
        used += len(lvl)
        partials.append(partial)
        margins.append(tuple(level_margins))
    return Tower(spec, partial, spec.pivots[-1], tuple(partials), tuple(margins))
