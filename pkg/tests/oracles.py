"""Independent reference computations used only by the tests."""
from __future__ import annotations

import itertools
import math

import numpy as np


def mixed_discriminant(mats) -> float:
    """top(A_1 ^ ... ^ A_n) via inclusion-exclusion over subsets of determinants."""
    n = len(mats)
    total = 0.0
    for r in range(1, n + 1):
        for S in itertools.combinations(range(n), r):
            total += (-1) ** (n - r) * np.linalg.det(sum(mats[i] for i in S)).real
    return total


def elementary_symmetric(vals, k: int) -> float:
    return float(sum(math.prod(c) for c in itertools.combinations(vals, k)))


def diagonal_top(diags) -> float:
    """top of a wedge of diagonal (1,1)-forms: sum over assignments of distinct coordinates."""
    n = len(diags[0])
    return float(sum(math.prod(d[j] for d, j in zip(diags, perm))
                     for perm in itertools.permutations(range(n))))


def line_by_wedges(phi, a, x, d: int) -> np.ndarray:
    """μ_k = C(d,k) top(Φ ^ a^(d-k) ^ x^k) by repeated wedges."""
    from hodgekt.exterior import as_form, power, top_coefficient, wedge_all
    a, x = as_form(a), as_form(x)
    return np.array([math.comb(d, k) * top_coefficient(wedge_all([phi, power(a, d - k), power(x, k)])).real
                     for k in range(d + 1)])


def brute_wedge(f, g) -> dict:
    """Wedge by sorting the concatenated index list with an explicit bubble sort."""
    out: dict = {}
    for (I, J), c in f.coeffs.items():
        for (K, L), e in g.coeffs.items():
            if set(I) & set(K) or set(J) & set(L):
                continue
            # monomial dz^I dz̄^J dz^K dz̄^L; tag holomorphic slots first
            word = [(0, i) for i in I] + [(1, j) for j in J] + [(0, k) for k in K] + [(1, l) for l in L]
            sign = 1
            w = list(word)
            for i in range(len(w)):
                for j in range(len(w) - 1 - i):
                    if w[j] > w[j + 1]:
                        w[j], w[j + 1] = w[j + 1], w[j]
                        sign = -sign
            key = (tuple(i for t, i in w if t == 0), tuple(i for t, i in w if t == 1))
            out[key] = out.get(key, 0) + sign * c * e
    return {k: v for k, v in out.items() if abs(v) > 0}
