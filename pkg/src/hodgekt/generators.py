"""Random instances satisfying the positivity hypotheses of the verifiers."""
from __future__ import annotations

import numpy as np

from .errors import GenerationError
from .exterior import BigradedForm, as_hermitian, from_hermitian, wedge_all
from .hyperbolicity import (TowerSpec, build_tower, cone_member, is_m_positive,
                            random_hermitian)


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_positive_definite(n: int, rng: np.random.Generator, delta: float = 0.1) -> np.ndarray:
    b = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2 * n)
    return b @ b.conj().T + delta * np.eye(n)


def random_semipositive(n: int, rank: int, rng: np.random.Generator,
                        delta: float = 0.1) -> np.ndarray:
    """U diag(λ_1..λ_rank, 0, ..., 0) U* with λ_i in [delta, 1 + delta]."""
    if not 0 <= rank <= n:
        raise GenerationError(f"rank {rank} impossible for n={n}")
    u = random_unitary(n, rng)
    lam = np.zeros(n)
    lam[:rank] = delta + rng.random(rank)
    out = (u * lam) @ u.conj().T
    return (out + out.conj().T) / 2


def random_cone_member(Phi: BigradedForm, pivot, rng: np.random.Generator,
                       shrink: tuple[float, float] = (0.3, 0.9), t_cap: float = 64.0,
                       iters: int = 50) -> np.ndarray:
    """Pivot-anchored sample of C(P_Φ, pivot): a + t H with t bisected inside the cone."""
    A = as_hermitian(pivot)
    H = random_hermitian(A.shape[0], rng)
    H *= np.linalg.norm(A) / np.linalg.norm(H)
    if cone_member(Phi, A, A + t_cap * H):
        t_star = t_cap
    else:
        lo, hi = 0.0, t_cap
        for _ in range(iters):
            mid = (lo + hi) / 2
            if cone_member(Phi, A, A + mid * H):
                lo = mid
            else:
                hi = mid
        t_star = lo
    u = rng.uniform(*shrink)
    X = A + u * t_star * H
    return (X + X.conj().T) / 2


def random_composition(total: int, rng: np.random.Generator, max_parts: int = 3) -> list[int]:
    """Random λ with Σλ = total and between 1 and max_parts parts (parts may be 0)."""
    parts = int(rng.integers(1, max_parts + 1))
    cuts = np.sort(rng.integers(0, total + 1, size=parts - 1))
    bounds = np.concatenate([[0], cuts, [total]])
    return [int(b - a) for a, b in zip(bounds[:-1], bounds[1:])]


def random_tower(n: int, lambdas, rng: np.random.Generator, degenerate: bool = False,
                 max_tries: int = 50) -> TowerSpec:
    """Tower whose upper levels are either cone samples or, when ``degenerate``,
    semi-positive forms of the minimal admissible rank n - Σ_{s<i} λ_s."""
    lambdas = list(lambdas)
    levels, pivots = [], []
    partial = BigradedForm.unit(n)
    used = 0
    for i, lam in enumerate(lambdas, start=1):
        entries = []
        for _ in range(lam + 1):
            if i == 1:
                entries.append(random_positive_definite(n, rng))
                continue
            m = n - used
            for _ in range(max_tries):
                if degenerate:
                    X = random_semipositive(n, m, rng)
                else:
                    X = random_cone_member(partial, pivots[-1], rng)
                if is_m_positive(X, pivots[-1], partial, m):
                    entries.append(X)
                    break
            else:
                raise GenerationError(f"could not sample a {m}-positive entry at level {i}")
        levels.append(tuple(entries[:-1]))
        pivots.append(entries[-1])
        partial = wedge_all([partial] + [from_hermitian(x) for x in entries[:-1]])
        used += lam
    return TowerSpec(n, tuple(levels), tuple(pivots))


def random_two_positive(omega: BigradedForm, pivot, rng: np.random.Generator,
                        degenerate: bool = False, max_tries: int = 50) -> np.ndarray:
    """η with top(Ω ^ pivot ^ η) > 0 and top(Ω ^ η²) > 0; rank 2 semi-positive if ``degenerate``."""
    n = omega.n
    for _ in range(max_tries):
        if degenerate:
            X = random_semipositive(n, 2, rng)
        else:
            X = random_cone_member(omega, pivot, rng)
        if is_m_positive(X, pivot, omega, 2):
            return X
    raise GenerationError("could not sample a 2-positive form")


def random_semipositive_levels(n: int, lambdas, rng: np.random.Generator,
                               degenerate: bool = False) -> list[list[np.ndarray]]:
    """Level-i factors with at least n - Σ_{s<i} λ_s positive eigenvalues (exactly, if degenerate)."""
    levels, used = [], 0
    for i, lam in enumerate(lambdas, start=1):
        rank = n if (i == 1 or not degenerate) else n - used
        levels.append([random_semipositive(n, rank, rng) if rank < n
                       else random_positive_definite(n, rng) for _ in range(lam)])
        used += lam
    return levels


def checked_tower(n: int, lambdas, rng: np.random.Generator, degenerate: bool = False):
    spec = random_tower(n, lambdas, rng, degenerate)
    return spec, build_tower(spec)
