"""Constant-coefficient bigraded forms on C^n.

A (p, q)-form is stored sparsely as a map ``(I, J) -> coefficient`` of the
monomial ``dz^I ^ dzbar^J``.  Multi-indices are 0-based sorted tuples; the
JSON serialization uses 1-based indices.  No factor of ``i`` is implicit in
the storage: it only enters through :func:`from_hermitian`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from typing import Iterable, Mapping

import numpy as np

MultiIndex = tuple[int, ...]
Key = tuple[MultiIndex, MultiIndex]

DROP_TOL = 1e-14
HERMITIAN_TOL = 1e-10
RANK_TOL = 1e-9


# ---------------------------------------------------------------------------
# basis bookkeeping


@lru_cache(maxsize=None)
def multi_indices(n: int, k: int) -> tuple[MultiIndex, ...]:
    if k < 0 or k > n:
        return ()
    return tuple(combinations(range(n), k))


@lru_cache(maxsize=None)
def basis(n: int, p: int, q: int) -> tuple[Key, ...]:
    """Monomials of bidegree (p, q), ordered lexicographically by (I, J)."""
    return tuple(product(multi_indices(n, p), multi_indices(n, q)))


@lru_cache(maxsize=None)
def basis_index(n: int, p: int, q: int) -> dict[Key, int]:
    return {key: i for i, key in enumerate(basis(n, p, q))}


def dimension(n: int, p: int, q: int) -> int:
    if not (0 <= p <= n and 0 <= q <= n):
        return 0
    return math.comb(n, p) * math.comb(n, q)


@lru_cache(maxsize=1 << 18)
def _merge(a: MultiIndex, b: MultiIndex):
    """Sorted union of ``a`` and ``b`` with the sign of the sorting
    permutation of ``a + b``; None if they share an index."""
    inversions = 0
    for x in a:
        for y in b:
            if x == y:
                return None
            if x > y:
                inversions += 1
    return tuple(sorted(a + b)), (-1 if inversions & 1 else 1)


def _wedge_monomials(k1: Key, k2: Key):
    """dz^I dzbar^J ^ dz^I' dzbar^J' = sign * dz^(I+I') dzbar^(J+J')."""
    (I, J), (I2, J2) = k1, k2
    m1 = _merge(I, I2)
    if m1 is None:
        return None
    m2 = _merge(J, J2)
    if m2 is None:
        return None
    sign = m1[1] * m2[1]
    if (len(J) * len(I2)) & 1:
        sign = -sign
    return (m1[0], m2[0]), sign


def _check_index(idx, n: int, length: int) -> MultiIndex:
    idx = tuple(int(i) for i in idx)
    if len(idx) != length:
        raise ValueError(f"multi-index {idx} has length {len(idx)}, expected {length}")
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise ValueError(f"multi-index {idx} is not strictly increasing")
    if idx and (idx[0] < 0 or idx[-1] >= n):
        raise ValueError(f"multi-index {idx} out of range for n={n}")
    return idx


# ---------------------------------------------------------------------------
# forms


class BigradedForm:
    """Immutable sparse constant-coefficient (p, q)-form on C^n."""

    __slots__ = ("n", "p", "q", "_coeffs", "_hash")

    def __init__(self, n: int, p: int, q: int,
                 coeffs: Mapping[Key, complex] | None = None,
                 *, drop: float = DROP_TOL, validate: bool = True):
        if n < 0 or not (0 <= p <= n and 0 <= q <= n):
            raise ValueError(f"invalid bidegree ({p}, {q}) for n={n}")
        self.n, self.p, self.q = n, p, q
        clean: dict[Key, complex] = {}
        for key, c in (coeffs or {}).items():
            c = complex(c)
            if c == 0:
                continue
            if validate:
                key = (_check_index(key[0], n, p), _check_index(key[1], n, q))
            clean[key] = clean.get(key, 0) + c
        if clean:
            cut = drop * max(abs(c) for c in clean.values())
            clean = {k: c for k, c in clean.items() if abs(c) > cut}
        self._coeffs = clean
        self._hash = None

    # -- construction helpers
    @classmethod
    def zero(cls, n: int, p: int, q: int) -> "BigradedForm":
        return cls(n, p, q)

    @classmethod
    def unit(cls, n: int) -> "BigradedForm":
        return cls(n, 0, 0, {((), ()): 1.0})

    @classmethod
    def from_vector(cls, n: int, p: int, q: int, vec) -> "BigradedForm":
        vec = np.asarray(vec, dtype=complex).ravel()
        keys = basis(n, p, q)
        if vec.shape[0] != len(keys):
            raise ValueError(f"vector length {vec.shape[0]} != dim Λ^{p},{q} = {len(keys)}")
        return cls(n, p, q, {k: c for k, c in zip(keys, vec) if c != 0}, validate=False)

    # -- access
    @property
    def coeffs(self) -> Mapping[Key, complex]:
        return dict(self._coeffs)

    @property
    def bidegree(self) -> tuple[int, int]:
        return self.p, self.q

    def terms(self):
        return self._coeffs.items()

    def coeff(self, I, J) -> complex:
        return self._coeffs.get((tuple(I), tuple(J)), 0j)

    def __len__(self):
        return len(self._coeffs)

    def is_zero(self) -> bool:
        return not self._coeffs

    def max_abs(self) -> float:
        return max((abs(c) for c in self._coeffs.values()), default=0.0)

    def to_vector(self) -> np.ndarray:
        idx = basis_index(self.n, self.p, self.q)
        vec = np.zeros(len(idx), dtype=complex)
        for key, c in self._coeffs.items():
            vec[idx[key]] = c
        return vec

    # -- algebra
    def _same_space(self, other: "BigradedForm"):
        if not isinstance(other, BigradedForm):
            return NotImplemented
        if (self.n, self.p, self.q) != (other.n, other.p, other.q):
            raise ValueError(f"cannot add forms of shapes {(self.n, self.p, self.q)} "
                             f"and {(other.n, other.p, other.q)}")
        return True

    def __add__(self, other):
        if self._same_space(other) is NotImplemented:
            return NotImplemented
        out = dict(self._coeffs)
        for k, c in other._coeffs.items():
            out[k] = out.get(k, 0) + c
        return BigradedForm(self.n, self.p, self.q, out, validate=False)

    def __neg__(self):
        return BigradedForm(self.n, self.p, self.q,
                            {k: -c for k, c in self._coeffs.items()}, validate=False)

    def __sub__(self, other):
        if not isinstance(other, BigradedForm):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, BigradedForm):
            return NotImplemented
        s = complex(scalar)
        return BigradedForm(self.n, self.p, self.q,
                            {k: s * c for k, c in self._coeffs.items()}, validate=False)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / complex(scalar))

    def __xor__(self, other):
        return wedge(self, other)

    def conjugate(self) -> "BigradedForm":
        return conjugate(self)

    def top(self) -> complex:
        return top_coefficient(self)

    def is_real(self, tol: float = 1e-12) -> bool:
        return self.allclose(conjugate(self), atol=tol * max(1.0, self.max_abs()))

    def allclose(self, other: "BigradedForm", atol: float = 1e-12) -> bool:
        if (self.n, self.p, self.q) != (other.n, other.p, other.q):
            return False
        keys = set(self._coeffs) | set(other._coeffs)
        return all(abs(self._coeffs.get(k, 0) - other._coeffs.get(k, 0)) <= atol for k in keys)

    def __eq__(self, other):
        if not isinstance(other, BigradedForm):
            return NotImplemented
        return ((self.n, self.p, self.q) == (other.n, other.p, other.q)
                and self._coeffs == other._coeffs)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self.p, self.q,
                               frozenset(self._coeffs.items())))
        return self._hash

    def __repr__(self):
        return f"BigradedForm(n={self.n}, bidegree=({self.p},{self.q}), terms={len(self)})"

    # -- serialization
    def to_json(self) -> dict:
        terms = [{"I": [i + 1 for i in I], "J": [j + 1 for j in J],
                  "re": float(c.real), "im": float(c.imag)}
                 for (I, J), c in sorted(self._coeffs.items())]
        return {"n": self.n, "p": self.p, "q": self.q, "terms": terms}

    @classmethod
    def from_json(cls, obj: dict) -> "BigradedForm":
        coeffs = {}
        for t in obj["terms"]:
            key = (tuple(i - 1 for i in t["I"]), tuple(j - 1 for j in t["J"]))
            coeffs[key] = complex(t["re"], t["im"])
        return cls(obj["n"], obj["p"], obj["q"], coeffs)


# ---------------------------------------------------------------------------
# Hermitian coefficients and (1,1)-forms


@dataclass(frozen=True, eq=False)
class HermitianCoeff:
    """n x n Hermitian matrix A, standing for the real (1,1)-form i Σ A_jk dz_j ^ dzbar_k."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        scale = max(1.0, float(np.abs(a).max(initial=0.0)))
        if np.abs(a - a.conj().T).max(initial=0.0) > HERMITIAN_TOL * scale:
            raise ValueError("matrix is not Hermitian")
        a = (a + a.conj().T) / 2
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def as_hermitian(x) -> np.ndarray:
    """Hermitian matrix of a (1,1)-form, a HermitianCoeff or a raw array."""
    if isinstance(x, BigradedForm):
        return to_hermitian(x)
    if isinstance(x, HermitianCoeff):
        return x.entries
    return HermitianCoeff(np.asarray(x)).entries


def as_form(x) -> BigradedForm:
    if isinstance(x, BigradedForm):
        return x
    return from_hermitian(x)


def from_hermitian(A) -> BigradedForm:
    """The real (1,1)-form i Σ A_jk dz_j ^ dzbar_k."""
    a = A.entries if isinstance(A, HermitianCoeff) else HermitianCoeff(np.asarray(A)).entries
    n = a.shape[0]
    coeffs = {((j,), (k,)): 1j * a[j, k] for j in range(n) for k in range(n) if a[j, k] != 0}
    return BigradedForm(n, 1, 1, coeffs, validate=False)


def to_hermitian(f: BigradedForm, check: bool = True) -> np.ndarray:
    if f.bidegree != (1, 1):
        raise ValueError(f"expected a (1,1)-form, got bidegree {f.bidegree}")
    a = np.zeros((f.n, f.n), dtype=complex)
    for ((j,), (k,)), c in f.terms():
        a[j, k] = c / 1j
    if check:
        a = HermitianCoeff(a).entries
    return a


def kahler_form(n: int) -> BigradedForm:
    """The standard Kähler form ω₀ = i Σ dz_j ^ dzbar_j."""
    return from_hermitian(np.eye(n))


# ---------------------------------------------------------------------------
# operations


def wedge(f: BigradedForm, g: BigradedForm) -> BigradedForm:
    if f.n != g.n:
        raise ValueError(f"dimension mismatch: n={f.n} vs n={g.n}")
    n, p, q = f.n, f.p + g.p, f.q + g.q
    if p > n or q > n:
        return BigradedForm(n, min(p, n), min(q, n))
    out: dict[Key, complex] = {}
    for k1, c1 in f.terms():
        for k2, c2 in g.terms():
            m = _wedge_monomials(k1, k2)
            if m is None:
                continue
            key, sign = m
            out[key] = out.get(key, 0) + sign * c1 * c2
    return BigradedForm(n, p, q, out, validate=False)


def wedge_all(forms: Iterable[BigradedForm], n: int | None = None) -> BigradedForm:
    forms = list(forms)
    if not forms:
        if n is None:
            raise ValueError("empty product needs n")
        return BigradedForm.unit(n)
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def conjugate(f: BigradedForm) -> BigradedForm:
    sign = -1 if (f.p * f.q) & 1 else 1
    return BigradedForm(f.n, f.q, f.p,
                        {(J, I): sign * c.conjugate() for (I, J), c in f.terms()},
                        validate=False)


def power(f: BigradedForm, k: int) -> BigradedForm:
    if k < 0:
        raise ValueError("negative power")
    out = BigradedForm.unit(f.n)
    base = f
    while k:
        if k & 1:
            out = wedge(out, base)
        k >>= 1
        if k:
            base = wedge(base, base)
    return out


@lru_cache(maxsize=None)
def volume_normalization(n: int) -> complex:
    """N_n with top_coefficient(ω₀^n) = n!, read off from ω₀^n itself."""
    full = tuple(range(n))
    vol = power(kahler_form(n), n).coeff(full, full)
    return vol / math.factorial(n)


def top_coefficient(f: BigradedForm) -> complex:
    if f.bidegree != (f.n, f.n):
        return 0j
    full = tuple(range(f.n))
    return f.coeff(full, full) / volume_normalization(f.n)


def hermitian_power(A, k: int) -> BigradedForm:
    """(i Σ A_jk dz_j ^ dzbar_k)^k computed from k x k minors of A.

    The coefficient of dz^I ^ dzbar^J is i^k k! (-1)^(k(k-1)/2) det A[I, J].
    """
    a = as_hermitian(A)
    n = a.shape[0]
    return BigradedForm.from_vector(n, k, k, _power_vector(a, k))


def _power_vector(a: np.ndarray, k: int) -> np.ndarray:
    n = a.shape[-1]
    if k == 0:
        return np.ones(a.shape[:-2] + (1,), dtype=complex)
    idx = np.array(multi_indices(n, k))
    m = len(idx)
    sub = a[..., idx[:, None, :, None], idx[None, :, None, :]]
    dets = np.linalg.det(sub).reshape(a.shape[:-2] + (m * m,))
    const = (1j ** k) * math.factorial(k) * (-1) ** (k * (k - 1) // 2)
    return const * dets


# ---------------------------------------------------------------------------
# linear maps between bidegree slices


@dataclass(frozen=True, eq=False)
class PairingOperator:
    """Matrix of γ ↦ Θ ^ γ from Λ^{p,q} to Λ^{p',q'} in lexicographic bases."""

    n: int
    source: tuple[int, int]
    target: tuple[int, int]
    matrix: np.ndarray


@lru_cache(maxsize=256)
def _pairing_matrix(theta: BigradedForm, p: int, q: int) -> np.ndarray:
    n = theta.n
    tp, tq = theta.p + p, theta.q + q
    src = basis(n, p, q)
    mat = np.zeros((dimension(n, tp, tq), len(src)), dtype=complex)
    if tp > n or tq > n:
        mat.setflags(write=False)
        return mat
    tidx = basis_index(n, tp, tq)
    terms = list(theta.terms())
    for col, key in enumerate(src):
        for tkey, c in terms:
            m = _wedge_monomials(tkey, key)
            if m is None:
                continue
            mat[tidx[m[0]], col] += m[1] * c
    mat.setflags(write=False)
    return mat


def pairing_operator(theta: BigradedForm, p: int, q: int) -> PairingOperator:
    n = theta.n
    if not (0 <= p <= n and 0 <= q <= n):
        raise ValueError(f"invalid source bidegree ({p}, {q}) for n={n}")
    tp, tq = theta.p + p, theta.q + q
    return PairingOperator(n, (p, q), (min(tp, n), min(tq, n)), _pairing_matrix(theta, p, q))


def kernel_matrix(matrix: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal columns spanning the numerical nullspace (SVD-based)."""
    matrix = np.asarray(matrix)
    ncols = matrix.shape[1]
    if ncols == 0:
        return np.zeros((0, 0), dtype=complex)
    if matrix.shape[0] == 0:
        return np.eye(ncols, dtype=complex)
    _, s, vh = np.linalg.svd(matrix)
    smax = s[0] if s.size and s[0] > 0 else 1.0
    rank = int(np.sum(s > tol * smax))
    return vh[rank:].conj().T


def kernel_basis(op: PairingOperator, tol: float = RANK_TOL) -> list[BigradedForm]:
    p, q = op.source
    K = kernel_matrix(op.matrix, tol)
    return [BigradedForm.from_vector(op.n, p, q, K[:, i]) for i in range(K.shape[1])]


def top_functional(theta: BigradedForm) -> np.ndarray:
    """Vector w on Λ^{n-p_Θ, n-q_Θ} with top(Θ ^ e_c) = w[c]."""
    n = theta.n
    cp, cq = n - theta.p, n - theta.q
    idx = basis_index(n, cp, cq)
    w = np.zeros(len(idx), dtype=complex)
    full = tuple(range(n))
    vol = volume_normalization(n)
    for key, c in theta.terms():
        comp = (tuple(i for i in full if i not in key[0]),
                tuple(j for j in full if j not in key[1]))
        _, sign = _wedge_monomials(key, comp)
        w[idx[comp]] += sign * c / vol
    return w


@lru_cache(maxsize=None)
def _top_pairing_signs(n: int, p: int, q: int) -> np.ndarray:
    """W[t, c] = top(e_t ^ e_c) for e_t in Λ^{p,q}, e_c in Λ^{n-p,n-q}."""
    src = basis(n, p, q)
    cidx = basis_index(n, n - p, n - q)
    full = tuple(range(n))
    vol = volume_normalization(n)
    W = np.zeros((len(src), len(cidx)), dtype=complex)
    for t, key in enumerate(src):
        comp = (tuple(i for i in full if i not in key[0]),
                tuple(j for j in full if j not in key[1]))
        _, sign = _wedge_monomials(key, comp)
        W[t, cidx[comp]] = sign / vol
    W.setflags(write=False)
    return W


@lru_cache(maxsize=None)
def conjugation_matrix(n: int, p: int, q: int) -> np.ndarray:
    """C with vec(conjugate(γ)) = C @ conj(vec(γ)) for γ in Λ^{p,q}."""
    src = basis(n, p, q)
    tidx = basis_index(n, q, p)
    C = np.zeros((len(tidx), len(src)))
    sign = -1.0 if (p * q) & 1 else 1.0
    for col, (I, J) in enumerate(src):
        C[tidx[(J, I)], col] = sign
    C.setflags(write=False)
    return C


@lru_cache(maxsize=128)
def hermitian_pairing_matrix(theta: BigradedForm, p: int, q: int) -> np.ndarray:
    """G with top(Θ ^ β ^ conj(γ)) = vec(β)^T G conj(vec(γ)) on Λ^{p,q}.

    Requires Θ of bidegree (n-p-q, n-p-q).
    """
    n = theta.n
    if theta.bidegree != (n - p - q, n - p - q):
        raise ValueError(f"Θ has bidegree {theta.bidegree}, need ({n - p - q}, {n - p - q})")
    M = _pairing_matrix(theta, p, q)              # Λ^{p,q} -> Λ^{n-q,n-p}
    W = _top_pairing_signs(n, n - q, n - p)       # Λ^{n-q,n-p} x Λ^{q,p} -> top
    B = M.T @ W                                   # B[a, c] = top(Θ ^ e_a ^ e_c)
    G = B @ conjugation_matrix(n, p, q)
    G.setflags(write=False)
    return G
