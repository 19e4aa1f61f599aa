"""Instance generation and verification suites driven by the command line."""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import (GenerationError, HypothesisError, NoWitnessError, StageSolveError,
                     UnsatisfiableSpec)
from .exterior import BigradedForm, as_hermitian, dimension, from_hermitian, kahler_form, wedge_all
from .generators import (random_composition, random_cone_member, random_positive_definite,
                         random_semipositive, random_semipositive_levels, random_tower,
                         random_two_positive)
from .hodge import (HRSetting, _power_cached, hodge_index_verify, hodge_riemann_verify,
                    primitive_basis)
from .hyperbolicity import (TowerSpec, build_tower, concavity_check, cone_member,
                            garding_inequality_check, is_hyperbolic_at, is_m_positive)
from .kt import (KTSetting, TorusModel, decomposition_difference, find_witness, higher_rank_kt,
                 hodge_condition, kt_rank1, lem_eq_verify, log_concavity, null_class_equivalence)

SUITES = ("hodge-index", "hodge-riemann", "kt", "higher-kt", "log-concavity", "garding",
          "null-class")
MODES = {"higher-kt": ("witness", "equality", "identity"), "kt": ("inequality", "equality")}
DEGENERATE = ("none", "eta", "levels", "both", "mixed")
SCHEMA_VERSION = 1
RETRY_CAP = 20


@dataclass(frozen=True)
class InstanceSpec:
    """What to generate: sizes, level structure, degeneracy pattern, seed and tolerances.

    ``lambdas`` = None draws a random level structure per instance.
    ``eta_rank`` requests a specific number of positive eigenvalues for η.
    """

    suite: str
    n: int
    p: int = 2
    q: int = 2
    d: int | None = None
    lambdas: tuple[int, ...] | None = None
    degenerate: str = "mixed"
    eta_rank: int | None = None
    mode: str | None = None
    seed: int = 0
    instances: int = 1
    tol: float | None = None

    def __post_init__(self):
        if self.lambdas is not None:
            object.__setattr__(self, "lambdas", tuple(int(x) for x in self.lambdas))
        self.validate()

    def validate(self) -> None:
        n, p, q = self.n, self.p, self.q
        if self.suite not in SUITES:
            raise ValueError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        if self.degenerate not in DEGENERATE:
            raise ValueError(f"degenerate must be one of {DEGENERATE}")
        if self.mode is not None and self.mode not in MODES.get(self.suite, ()):
            raise ValueError(f"mode {self.mode!r} not available for suite {self.suite}")
        if self.instances < 0:
            raise ValueError("instances must be non-negative")
        lam = None if self.lambdas is None else sum(self.lambdas)
        if self.lambdas is not None and any(x < 0 for x in self.lambdas):
            raise ValueError("λ entries must be non-negative")
        if self.suite in ("hodge-index", "kt", "null-class"):
            if n < 2 or (self.suite == "null-class" and n < 3):
                raise ValueError("n too small for this suite")
            if lam is not None and lam != n - 2:
                raise ValueError(f"Σλ must equal n - 2 = {n - 2}")
        elif self.suite == "hodge-riemann":
            if not (1 <= p and 1 <= q and p + q <= n):
                raise ValueError("need 1 <= p, q and p + q <= n")
            if not 0 <= (self.d or 0) <= (p + q) // 2 - 1:
                raise ValueError(f"d must lie in 0..{(p + q) // 2 - 1}")
            if lam is not None and lam != n - p - q:
                raise ValueError(f"Σλ must equal n - (p+q) = {n - p - q}")
        elif self.suite == "higher-kt":
            if not (1 <= p and 2 * p <= n):
                raise ValueError("need 1 <= p and 2p <= n")
            if lam is not None and lam != n - 2 * p:
                raise ValueError(f"Σλ must equal n - 2p = {n - 2 * p}")
        elif self.suite in ("log-concavity", "garding"):
            if lam is not None and lam > n - 2:
                raise ValueError(f"Σλ must be at most n - 2 = {n - 2}")
            if self.d is not None:
                if not 2 <= self.d <= n:
                    raise ValueError("d must lie in 2..n")
                if lam is not None and lam != n - self.d:
                    raise ValueError("Σλ must equal n - d")

    @property
    def tolerances(self) -> Tolerances:
        return DEFAULT.with_overrides(rank=self.tol, definite=self.tol)

    def to_json(self) -> dict:
        out = asdict(self)
        out["lambdas"] = None if self.lambdas is None else list(self.lambdas)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "InstanceSpec":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown spec fields: {sorted(extra)}")
        return cls(**data)


# ---------------------------------------------------------------------------
# serialization of matrices


def enc(A) -> dict:
    A = np.asarray(as_hermitian(A))
    return {"re": A.real.tolist(), "im": A.imag.tolist()}


def dec(obj) -> np.ndarray:
    return np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)


def _enc_levels(levels) -> list:
    return [[enc(x) for x in lvl] for lvl in levels]


def _dec_levels(levels) -> list:
    return [[dec(x) for x in lvl] for lvl in levels]


def _clean(x):
    """JSON-safe plain values: numpy scalars unwrapped, non-finite floats to None."""
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x) if math.isfinite(x) else None
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": _clean(float(x.real)), "im": _clean(float(x.imag))}
    return x


# ---------------------------------------------------------------------------
# generation


def instance_seed(master: int, index: int, attempt: int = 0) -> np.random.SeedSequence:
    return np.random.SeedSequence([master, index, attempt])


def _degenerate_flags(spec: InstanceSpec, index: int) -> tuple[bool, bool]:
    """(degenerate η, degenerate upper levels); 'mixed' cycles through all four."""
    mode = spec.degenerate
    if mode == "mixed":
        mode = ("none", "eta", "levels", "both")[index % 4]
    return mode in ("eta", "both"), mode in ("levels", "both")


def _lambdas(spec: InstanceSpec, total: int, rng) -> list[int]:
    return list(spec.lambdas) if spec.lambdas is not None else random_composition(total, rng)


def _tower_json(tower: TowerSpec) -> dict:
    return {"levels": _enc_levels([[as_hermitian(f) for f in lvl] for lvl in tower.levels]),
            "pivots": [enc(as_hermitian(f)) for f in tower.pivots]}


def _tower_from(inst: dict) -> TowerSpec:
    n = inst["n"]
    return TowerSpec(n, tuple(tuple(from_hermitian(x) for x in lvl) for lvl in _dec_levels(inst["levels"])),
                     tuple(from_hermitian(dec(x)) for x in inst["pivots"]))


def _eta_rank(spec: InstanceSpec, need: int, full: int, degenerate: bool) -> int:
    if spec.eta_rank is not None:
        if spec.eta_rank < need:
            raise UnsatisfiableSpec(f"η needs at least {need} positive eigenvalues, "
                                  f"eta_rank={spec.eta_rank} requested")
        return spec.eta_rank
    return need if degenerate else full


def _gen_hodge_index(spec, index, rng) -> dict:
    n = spec.n
    deg_eta, deg_levels = _degenerate_flags(spec, index)
    lam = _lambdas(spec, n - 2, rng)
    tower = random_tower(n, lam, rng, degenerate=deg_levels)
    built = build_tower(tower)
    rank = _eta_rank(spec, 2, n, deg_eta)
    if rank == n:
        eta = random_two_positive(built.omega, tower.pivots[-1] if tower.pivots else kahler_form(n), rng)
    else:
        eta = random_semipositive(n, rank, rng)
    return {**_tower_json(tower), "eta": enc(eta)}


def _gen_hodge_riemann(spec, index, rng) -> dict:
    n, p, q, d = spec.n, spec.p, spec.q, spec.d or 0
    deg_eta, deg_levels = _degenerate_flags(spec, index)
    lam = _lambdas(spec, n - p - q, rng)
    levels = random_semipositive_levels(n, lam, rng, degenerate=deg_levels)
    need = n - sum(lam)
    rank = _eta_rank(spec, need, n, deg_eta)
    etas = [random_semipositive(n, rank, rng) if rank < n else random_positive_definite(n, rng)
            for _ in range(2 * d + 1)]
    return {"levels": _enc_levels(levels), "etas": [enc(e) for e in etas]}


def _gen_kt(spec, index, rng) -> dict:
    n = spec.n
    deg_eta, deg_levels = _degenerate_flags(spec, index)
    tower = random_tower(n, _lambdas(spec, n - 2, rng), rng, degenerate=deg_levels)
    omega = build_tower(tower).omega
    pivot = kahler_form(n)
    eta = random_two_positive(omega, pivot, rng, degenerate=deg_eta)
    if (spec.mode or "inequality") == "equality":
        alpha = float(rng.uniform(0.2, 5.0)) * eta
    else:
        alpha = random_two_positive(omega, pivot, rng)
    return {**_tower_json(tower), "eta": enc(eta), "alpha": enc(alpha)}


def _gen_higher_kt(spec, index, rng) -> dict:
    n, p = spec.n, spec.p
    deg_eta, deg_levels = _degenerate_flags(spec, index)
    lam = _lambdas(spec, n - 2 * p, rng)
    levels = random_semipositive_levels(n, lam, rng, degenerate=deg_levels)
    need = n - sum(lam)
    rank = _eta_rank(spec, need, n, deg_eta)
    eta = random_semipositive(n, rank, rng) if rank < n else random_positive_definite(n, rng)
    omega = wedge_all([from_hermitian(x) for lvl in levels for x in lvl], n)
    phi = wedge_all([omega, _power_cached(from_hermitian(eta), 2 * p - 2)], n)
    alpha = random_two_positive(phi, eta, rng)
    out = {"levels": _enc_levels(levels), "eta": enc(eta), "alpha": enc(alpha)}
    mode = spec.mode or "witness"
    if mode == "equality":
        c = rng.normal(size=2)
        out["c"] = {"re": float(c[0]), "im": float(c[1])}
    elif mode == "identity":
        dim = dimension(n, p, p)
        g = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        out["gamma"] = {"re": g.real.tolist(), "im": g.imag.tolist()}
    return out


def _gen_log_concavity(spec, index, rng) -> dict:
    n = spec.n
    _, deg_levels = _degenerate_flags(spec, index)
    if spec.lambdas is not None:
        lam = list(spec.lambdas)
    else:
        total = n - spec.d if spec.d is not None else int(rng.integers(0, n - 1))
        lam = random_composition(total, rng)
    tower = random_tower(n, lam, rng, degenerate=deg_levels)
    omega = build_tower(tower).omega
    pivot = kahler_form(n)
    alpha = random_cone_member(omega, pivot, rng)
    beta = random_cone_member(omega, pivot, rng)
    return {**_tower_json(tower), "alpha": enc(alpha), "beta": enc(beta)}


def _gen_garding(spec, index, rng) -> dict:
    n = spec.n
    _, deg_levels = _degenerate_flags(spec, index)
    if spec.lambdas is not None:
        lam = list(spec.lambdas)
    else:
        total = n - spec.d if spec.d is not None else int(rng.integers(0, n - 1))
        lam = random_composition(total, rng)
    tower = random_tower(n, lam, rng, degenerate=deg_levels)
    omega = build_tower(tower).omega
    d = n - sum(lam)
    pivot = kahler_form(n)
    xs = [random_cone_member(omega, pivot, rng) for _ in range(d)]
    scales = rng.uniform(0.2, 5.0, size=d)
    return {**_tower_json(tower), "xs": [enc(x) for x in xs], "scales": scales.tolist(),
            "hyperbolicity_seed": int(rng.integers(0, 2**31))}


def _gen_null_class(spec, index, rng) -> dict:
    n = spec.n
    deg_eta, deg_levels = _degenerate_flags(spec, index)
    tower = random_tower(n, _lambdas(spec, n - 2, rng), rng, degenerate=deg_levels)
    omega = build_tower(tower).omega
    last = random_two_positive(omega, kahler_form(n), rng, degenerate=deg_eta)
    case = ("zero", "last", "primitive", "generic")[index % 4]
    if case == "zero":
        c = np.zeros((n, n), dtype=complex)
    elif case == "last":
        c = float(rng.uniform(0.2, 5.0)) * last
    elif case == "primitive":
        prim = primitive_basis(HRSetting(omega, from_hermitian(last), 1, 1))
        if not prim:
            raise GenerationError("empty primitive space")
        w = rng.normal(size=len(prim)) + 1j * rng.normal(size=len(prim))
        g = BigradedForm.from_vector(n, 1, 1, sum(wi * f.to_vector() for wi, f in zip(w, prim)))
        c = as_hermitian(g + g.conjugate()) / 2
    else:
        c = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        c = (c + c.conj().T) / 2
    return {**_tower_json(tower), "last": enc(last), "c": enc(c), "case": case}


GENERATORS = {
    "hodge-index": _gen_hodge_index, "hodge-riemann": _gen_hodge_riemann, "kt": _gen_kt,
    "higher-kt": _gen_higher_kt, "log-concavity": _gen_log_concavity, "garding": _gen_garding,
    "null-class": _gen_null_class,
}


def _check_instance(spec: InstanceSpec, inst: dict) -> None:
    """Re-verify the positivity hypotheses of a freshly generated instance."""
    tols = spec.tolerances
    n = spec.n
    if spec.suite == "hodge-index":
        hodge_index_verify(_tower_from(inst), dec(inst["eta"]), tols.definite)
    elif spec.suite == "hodge-riemann":
        from .hodge import _check_hr_hypotheses
        _check_hr_hypotheses(_dec_levels(inst["levels"]), [dec(e) for e in inst["etas"]],
                             spec.d or 0, spec.p, spec.q, n)
    elif spec.suite == "kt":
        omega = build_tower(_tower_from(inst)).omega
        for name in ("eta", "alpha"):
            res = is_m_positive(dec(inst[name]), kahler_form(n), omega, 2, tol=tols.strict)
            if not res.ok:
                raise HypothesisError(f"{name} is not 2-positive", where=(name,))
    elif spec.suite == "higher-kt":
        _kt_setting(inst).check(tols)
    elif spec.suite in ("log-concavity", "garding"):
        omega = build_tower(_tower_from(inst)).omega
        names = ["alpha", "beta"] if spec.suite == "log-concavity" else range(len(inst["xs"]))
        for name in names:
            x = dec(inst[name]) if isinstance(name, str) else dec(inst["xs"][name])
            if not cone_member(omega, kahler_form(n), x, tol=tols.strict):
                raise HypothesisError(f"{name} is not in the cone", where=(name,))
    elif spec.suite == "null-class":
        null_class_equivalence(_null_list(inst), np.zeros((n, n)), tols=tols)


def generate(spec: InstanceSpec, index: int = 0, retry_cap: int = RETRY_CAP) -> dict:
    """Deterministic instance ``index`` of ``spec``; hypotheses are re-checked after generation
    and the sub-seed bumped on failure."""
    last_err = None
    for attempt in range(retry_cap):
        ss = instance_seed(spec.seed, index, attempt)
        rng = np.random.default_rng(ss)
        try:
            inst = GENERATORS[spec.suite](spec, index, rng)
            inst = {"suite": spec.suite, "n": spec.n, "index": index, "attempt": attempt, **inst}
            _check_instance(spec, inst)
            return inst
        except UnsatisfiableSpec:
            raise
        except (GenerationError, HypothesisError) as err:
            last_err = err
    raise GenerationError(f"retry cap {retry_cap} exceeded for instance {index}: {last_err}")


# ---------------------------------------------------------------------------
# verification


def _kt_setting(inst: dict) -> KTSetting:
    p = inst.get("p")
    levels = _dec_levels(inst["levels"])
    n = inst["n"]
    if p is None:
        p = (n - sum(len(l) for l in levels)) // 2
    return KTSetting.from_levels(levels, dec(inst["eta"]), dec(inst["alpha"]), p)


def _null_list(inst: dict) -> list:
    return [x for lvl in _dec_levels(inst["levels"]) for x in lvl] + [dec(inst["last"])]


def _sig_status(rep, want: str) -> str:
    if rep.verdict == want and rep.dim_matches:
        return "pass"
    return "degenerate" if rep.verdict == "degenerate" else "fail"


def _verify_hodge_index(spec, inst, tols):
    rep = hodge_index_verify(_tower_from(inst), dec(inst["eta"]), tols.definite)
    return _sig_status(rep, "negative-definite"), rep.to_json()


def _verify_hodge_riemann(spec, inst, tols):
    rep = hodge_riemann_verify(_dec_levels(inst["levels"]), [dec(e) for e in inst["etas"]],
                               spec.d or 0, spec.p, spec.q, tols.definite)
    detail = rep.to_json()
    detail["expected_dim"] = rep.expected_dim
    return _sig_status(rep, "positive-definite"), detail


def _verify_kt(spec, inst, tols):
    omega = build_tower(_tower_from(inst)).omega
    rep = kt_rank1(omega, dec(inst["eta"]), dec(inst["alpha"]), tols)
    if (spec.mode or "inequality") == "equality":
        ok = rep.equality and rep.proportional
    else:
        ok = rep.holds and rep.equality == rep.proportional
    return ("pass" if ok else "fail"), rep.to_json()


def _verify_higher_kt(spec, inst, tols):
    inst = {**inst, "p": spec.p}
    setting = _kt_setting(inst)
    setting.check(tols)
    mode = spec.mode or "witness"
    if mode == "witness":
        cond = hodge_condition(TorusModel(spec.n), spec.p) if spec.p >= 2 else True
        try:
            d_prime, gamma = find_witness(setting, tols)
        except NoWitnessError:
            return ("pass" if cond else "fail"), {"hodge_condition": cond, "witness": None}
        rep = higher_rank_kt(setting, gamma, tols=tols)
        ok = (not rep.holds) and (-rep.difference > 1e-6 * rep.scale) and not cond
        detail = {"hodge_condition": cond, "d_prime": d_prime, "lhs": rep.lhs, "rhs": rep.rhs,
                  "difference": rep.difference, "scale": rep.scale}
        return ("pass" if ok else "fail"), detail
    if mode == "equality":
        c = complex(inst["c"]["re"], inst["c"]["im"])
        rep = higher_rank_kt(setting, c * setting.T, tols=tols)
        return ("pass" if rep.equality and rep.proportional else "fail"), \
            {"lhs": rep.lhs, "rhs": rep.rhs, "difference": rep.difference, "scale": rep.scale}
    g = np.asarray(inst["gamma"]["re"]) + 1j * np.asarray(inst["gamma"]["im"])
    gamma = BigradedForm.from_vector(spec.n, spec.p, spec.p, g)
    rep = higher_rank_kt(setting, gamma, tols=tols)
    try:
        predicted, stages, _ = decomposition_difference(setting, gamma)
        lem = lem_eq_verify(setting, gamma)
    except StageSolveError as err:
        return "degenerate", {"error": str(err)}
    gap = abs(rep.difference - predicted) / max(abs(rep.lhs) + abs(rep.rhs), 1e-300)
    parity = all((-1) ** s * v >= -1e-9 * max(abs(x) for x in stages.values())
                 for s, v in stages.items())
    ok = gap <= 1e-8 and lem.err1 <= 1e-9 and lem.err2 <= 1e-8 and parity
    detail = {"difference": rep.difference, "predicted": predicted, "relative_gap": gap,
              "lem_err1": lem.err1, "lem_err2": lem.err2, "parity": parity,
              "stages": {str(s): v for s, v in sorted(stages.items())}}
    return ("pass" if ok else "fail"), detail


def _verify_log_concavity(spec, inst, tols):
    omega = build_tower(_tower_from(inst)).omega
    rep = log_concavity(omega, dec(inst["alpha"]), dec(inst["beta"]), tols=tols)
    ok = rep.holds and (rep.proportional or not rep.any_equality)
    return ("pass" if ok else "fail"), rep.to_json()


def _verify_garding(spec, inst, tols):
    n = spec.n
    omega = build_tower(_tower_from(inst)).omega
    xs = [dec(x) for x in inst["xs"]]
    pivot = kahler_form(n)
    # convexity: a random convex combination of cone points stays in the cone
    w = np.asarray(inst["scales"]) / np.sum(inst["scales"])
    combo = sum(wi * x for wi, x in zip(w, xs))
    convex = cone_member(omega, pivot, combo, tol=tols.strict)
    seed = inst["hyperbolicity_seed"]
    hyper = [bool(is_hyperbolic_at(omega, x, trials=200, seed=seed + i))
             for i, x in enumerate(xs[:2])]
    gen = garding_inequality_check(omega, xs, pivot, tols)
    prop = garding_inequality_check(omega, [s * xs[0] for s in inst["scales"]], pivot, tols)
    concave = concavity_check(omega, pivot, xs[0], xs[-1], grid=10)
    ok = (convex and all(hyper) and gen.holds and gen.consistent and prop.equality
          and prop.consistent and concave)
    detail = {"convex": convex, "hyperbolic": hyper, "polarized": gen.lhs, "product": gen.rhs,
              "holds": gen.holds, "equality": gen.equality,
              "proportional_equality": prop.equality, "concave": concave}
    return ("pass" if ok else "fail"), detail


def _verify_null_class(spec, inst, tols):
    rep = null_class_equivalence(_null_list(inst), dec(inst["c"]), tols=tols)
    detail = {"case": inst["case"], **rep.to_json()}
    return ("pass" if rep.equivalent else "fail"), detail


VERIFIERS = {
    "hodge-index": _verify_hodge_index, "hodge-riemann": _verify_hodge_riemann, "kt": _verify_kt,
    "higher-kt": _verify_higher_kt, "log-concavity": _verify_log_concavity,
    "garding": _verify_garding, "null-class": _verify_null_class,
}


def verify_instance(spec: InstanceSpec, inst: dict) -> dict:
    tols = spec.tolerances
    try:
        status, detail = VERIFIERS[spec.suite](spec, inst, tols)
    except HypothesisError as err:
        status, detail = "fail", {"error": str(err)}
    return _clean({"index": inst["index"], "attempt": inst["attempt"], "status": status,
                   "detail": detail})


def _run_one(args) -> dict:
    spec, index = args
    return verify_instance(spec, generate(spec, index))


@dataclass
class RunReport:
    suite: str
    config: dict
    tolerances: dict
    instance_count: int
    passed: int
    failed: int
    degenerate: int
    instances: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.degenerate == 0

    def to_json(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "suite": self.suite, "config": self.config,
                "tolerances": self.tolerances, "instance_count": self.instance_count,
                "pass": self.passed, "fail": self.failed, "degenerate": self.degenerate,
                "instances": self.instances}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, data: dict) -> "RunReport":
        return cls(data["suite"], data["config"], data["tolerances"], data["instance_count"],
                   data["pass"], data["fail"], data["degenerate"], data["instances"])


def run_suite(spec: InstanceSpec, jobs: int = 1) -> RunReport:
    """Generate and verify ``spec.instances`` instances; results are ordered by index."""
    work = [(spec, i) for i in range(spec.instances)]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, work))
    else:
        results = [_run_one(w) for w in work]
    counts = {s: sum(r["status"] == s for r in results) for s in ("pass", "fail", "degenerate")}
    return RunReport(spec.suite, spec.to_json(), asdict(spec.tolerances), spec.instances,
                     counts["pass"], counts["fail"], counts["degenerate"], results)
