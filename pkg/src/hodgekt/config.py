"""Numerical tolerances shared by the verification modules."""
from __future__ import annotations

import os
from dataclasses import dataclass, replace

TOL_ENV_VAR = "HODGEKT_TOL"


@dataclass(frozen=True)
class Tolerances:
    rank: float = 1e-9          # relative singular-value cut for kernels
    definite: float = 1e-9      # relative eigenvalue cut for signatures
    strict: float = 1e-10       # margin for "> 0" on normalized wedge values
    equality: float = 1e-8      # relative gap counted as equality
    proportional: float = 1e-8  # 2x2 minors vs product of norms
    root_imag: float = 1e-6     # |Im root| <= root_imag * (1 + |root|)

    def with_overrides(self, **kw) -> "Tolerances":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


DEFAULT = Tolerances()


def from_env(base: Tolerances = DEFAULT) -> Tolerances:
    """Apply HODGEKT_TOL, if set, to the rank and definiteness cuts."""
    raw = os.environ.get(TOL_ENV_VAR)
    if not raw:
        return base
    tol = float(raw)
    return base.with_overrides(rank=tol, definite=tol)
