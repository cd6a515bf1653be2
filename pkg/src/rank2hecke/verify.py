"""Per-group verification pipeline and its building blocks.

``tau`` reads the coordinate of 1.  The remaining checks are the vanishing
criterion on ``y^-1 z^(m-k)``, the bijection of basis words onto the group
(the lifting route to the second trace condition) and random trace sampling.
``run_group`` strings every stage together and records a ``Verdict``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__, fastgram
from .catalog import GroupSpec, spec as get_spec
from .gram import (base_blocks, determinant_exact, determinant_modular, exact_allowed, first_asymmetry,
                   gram_blocks, modular_gram, specialization_commutes, specialized_block_check, z_matrix)
from .hecke import (HeckeModel, StallError, build_model, check_basis_identity, check_relations,
                    model_digest)
from .laurent import DEFAULT_PRIME, FieldPoint, LaurentPoly
from .structure import Realization, realize
from .words import Word, inverse_word

Vector = dict[int, LaurentPoly]

CHECKS = ("factorization", "table", "relations", "gram", "det-exact", "det-modular",
          "cond3", "lifting", "specialized-block")


def tau(vec: Vector, ring=None) -> LaurentPoly:
    """Coefficient of the basis element 1 (index 0)."""
    if 0 in vec:
        return vec[0]
    if ring is None:
        ring = next(iter(vec.values())).ring if vec else None
    if ring is None:
        raise ValueError("cannot infer the ring of an empty vector")
    return ring.zero()


def _dot(u: Vector, v: Vector, zero: LaurentPoly) -> LaurentPoly:
    if len(v) < len(u):
        u, v = v, u
    acc = zero
    for k, c in u.items():
        d = v.get(k)
        if d is not None:
            acc = acc + c * d
    return acc


def trace_of_product(model: HeckeModel, w1: Word, w2: Word) -> LaurentPoly:
    """``tau(T_w1 T_w2)`` as a row-column pairing."""
    return _dot(model.express(w1), model.column(w2), model.ring.zero())


# ---------------------------------------------------------------- gram symmetry
@dataclass
class SymmetryReport:
    """``method`` is ``full`` (every block computed exactly) or ``base``.

    For ``base`` only ``A^0 .. A^{m-1}`` are compared exactly; symmetry of the
    recursed blocks follows by induction, since expanding ``z^m y_i`` on
    either side of the trace gives the same ``Z``-combination of transposed
    lower blocks.  Spot points re-check every block of the full matrix mod p.
    """

    ok: bool
    method: str
    backend: str
    exact_blocks: int
    asymmetric: list[int]
    spot_points: int = 0
    spot_failures: int = 0
    seconds: float = 0.0


def gram_symmetry(model: HeckeModel, full_limit: int = 288, spot_points: int = 2, seed: int = 0,
                  prime: int = DEFAULT_PRIME) -> SymmetryReport:
    t0 = time.perf_counter()
    m = model.m
    if model.dim <= full_limit:
        if fastgram.available():
            fg = fastgram.flint_gram_blocks(model)
            bad, backend, n = fg.asymmetric_blocks(), "flint", len(fg.blocks)
        else:
            gb = gram_blocks(model)
            bad = [k for k, b in enumerate(gb.blocks) if first_asymmetry(b) is not None]
            backend, n = "python", len(gb.blocks)
        return SymmetryReport(not bad, "full", backend, n, bad, seconds=time.perf_counter() - t0)
    base = base_blocks(model)
    bad = [k for k, b in enumerate(base) if first_asymmetry(b) is not None]
    Z = z_matrix(model)
    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(spot_points):
        vals = FieldPoint.random(model.ring, rng, prime).values_for(model.ring)
        G = modular_gram(base, Z, vals, prime)
        failures += not np.array_equal(G, G.T)
    return SymmetryReport(not bad and not failures, "base", "python", m, bad, spot_points, failures,
                          time.perf_counter() - t0)


# ---------------------------------------------------------------- condition 3
@dataclass
class Condition3Report:
    ok: bool
    checked: int
    tau_pi: LaurentPoly
    nonzero: list[tuple[int, int]]


def condition3_check(model: HeckeModel, y_words: Sequence[Word] | None = None) -> Condition3Report:
    """``tau(y_i^-1 z^(m-k)) = 0`` for every ``(k, i) != (0, 1)``, and ``tau(z^m) != 0``.

    The row of ``y_i^-1`` is pushed through ``M(z)`` one power at a time, so
    every step stays close to a sparse shift instead of densifying.
    """
    l, m = model.l, model.m
    zero = model.ring.zero()
    words = [model.y_word(i) for i in range(l)] if y_words is None else list(y_words)
    Mz = model.matrix("z")
    nonzero = []
    tau_pi = zero
    checked = 0
    for i, w in enumerate(words):
        vec = model.express(inverse_word(w))
        for j in range(1, m + 1):
            vec = Mz.vecmat(vec)
            k, val = m - j, vec.get(0, zero)
            if k == 0 and i == 0:
                tau_pi = val
                continue
            checked += 1
            if val:
                nonzero.append((k, i))
    return Condition3Report(not nonzero and bool(tau_pi), checked, tau_pi, sorted(nonzero))


# ---------------------------------------------------------------- lifting
def lifting_check(real: Realization, words: Sequence[Word]) -> bool:
    """Basis words hit every group element exactly once and the empty word is among them."""
    if () not in {tuple(w) for w in words}:
        return False
    images = [real.eval(tuple(w)) for w in words]
    return len(images) == len(real.elements) and set(images) == set(real.elements)


def basis_words(model: HeckeModel) -> list[Word]:
    return [model.basis_word(i) for i in range(model.dim)]


# ---------------------------------------------------------------- trace sampling
def random_word(rng: np.random.Generator, letters: Sequence[str], max_len: int) -> Word:
    n = int(rng.integers(0, max_len + 1))
    return tuple(letters[int(i)] for i in rng.integers(0, len(letters), size=n))


@dataclass
class TraceSample:
    ok: bool
    pairs: int
    failure: tuple[str, str] | None = None


def trace_sampling(model: HeckeModel, pairs: int = 200, max_len: int = 12, seed: int = 0) -> TraceSample:
    """``tau(w1 w2) == tau(w2 w1)`` on random words in the generators and their inverses."""
    gens = list(model.spec.generators)
    letters = gens + [g.upper() for g in gens]
    rng = np.random.default_rng(seed)
    for _ in range(pairs):
        w1 = random_word(rng, letters, max_len)
        w2 = random_word(rng, letters, max_len)
        if trace_of_product(model, w1, w2) != trace_of_product(model, w2, w1):
            return TraceSample(False, pairs, ("".join(w1), "".join(w2)))
    return TraceSample(True, pairs)


# ---------------------------------------------------------------- pipeline
@dataclass
class RunConfig:
    checks: tuple[str, ...] = CHECKS
    trials: int | None = None  # None: enough for a 2^-100 false-accept bound
    seed: int = 0
    prime: int = DEFAULT_PRIME
    cache_dir: str | None = None
    force_exact: bool = False
    trace_pairs: int = 200
    trace_max_len: int = 12
    exact_seconds: float = 600.0

    def __post_init__(self):
        bad = [c for c in self.checks if c not in CHECKS]
        if bad:
            raise ValueError(f"unknown checks: {', '.join(bad)}")
        if self.trials is not None and self.trials < 1:
            raise ValueError("trials must be at least 1")


@dataclass
class Stage:
    name: str
    passed: bool
    details: dict[str, Any]
    duration_ms: float
    skipped: bool = False

    def to_json(self) -> dict:
        d = {"name": self.name, "pass": self.passed, "details": self.details,
             "duration_ms": round(self.duration_ms, 1)}
        if self.skipped:
            d["skipped"] = True
        return d


@dataclass
class Verdict:
    group: str
    stages: list[Stage] = field(default_factory=list)
    seed: int = 0
    prime: int = DEFAULT_PRIME
    cache_hash: str | None = None
    cache: str = "off"
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(s.passed for s in self.stages)

    def stage(self, name: str) -> Stage | None:
        return next((s for s in self.stages if s.name == name), None)

    def to_json(self) -> dict:
        out = {"group": self.group, "pass": self.passed,
               "stages": [s.to_json() for s in self.stages],
               "seed": self.seed, "prime": self.prime,
               "cache_hash": self.cache_hash, "version": __version__}
        if self.error:
            out["error"] = self.error
        return out


class _Runner:
    def __init__(self, verdict: Verdict):
        self.v = verdict
        self.halted = False

    def run(self, name: str, fn: Callable[[], tuple[bool, dict]]) -> bool:
        if self.halted:
            return False
        t0 = time.perf_counter()
        try:
            ok, details = fn()
        except Exception as exc:  # a failing stage is recorded, later stages are skipped
            ok, details = False, {"error": f"{type(exc).__name__}: {exc}"}
        self.v.stages.append(Stage(name, bool(ok), details, 1000 * (time.perf_counter() - t0)))
        if not ok:
            self.halted = True
        return ok

    def skip(self, name: str, reason: str) -> None:
        if not self.halted:
            self.v.stages.append(Stage(name, True, {"skipped": reason}, 0.0, skipped=True))


def _poly(c: LaurentPoly) -> str:
    return str(c)


def run_group(group: str | GroupSpec, config: RunConfig | None = None,
              maximal_model: HeckeModel | None = None) -> Verdict:
    """Full pipeline for one group; a failing stage stops the later ones."""
    cfg = config or RunConfig()
    s = group if isinstance(group, GroupSpec) else get_spec(group)
    v = Verdict(s.id, seed=cfg.seed, prime=cfg.prime)
    run = _Runner(v)
    want = set(cfg.checks)
    ctx: dict[str, Any] = {}

    def enumerate_stage():
        r = realize(s)
        ctx["real"] = r
        details = {"order": len(r.elements), "center_order": s.center_order}
        fails = [f"{n}: {m}" for n, ok, m in r.audit
                 if not ok and n in ("order", "center", "center order")]
        details["failures"] = fails
        return not fails, details

    def factorization_stage():
        r = ctx["real"]
        fails = r.failures()
        return not fails, {"m": s.m, "parabolic_order": s.parabolic_order, "num_x": s.num_x,
                           "failures": fails}

    def table_stage():
        try:
            model, info = build_model(s, cfg.cache_dir)
        except StallError as exc:
            return False, {"stalled": exc.missing[:20], "missing": len(exc.missing)}
        ctx["model"] = model
        v.cache = info["cache"]
        v.cache_hash = model_digest(model)
        details = {"dim": model.dim, "nonzeros": sum(M.nnz() for M in model.mats.values())}
        if "filled" in info:
            details["filled"] = dict(sorted(info["filled"].items()))
        return True, details

    def relations_stage():
        model = ctx["model"]
        rep = check_relations(model)
        basis = check_basis_identity(model)
        return rep.ok and basis, {"relations": len(rep.checked), "failure": rep.failure,
                                  "basis_identity": basis}

    def gram_stage():
        model = ctx["model"]
        sym = gram_symmetry(model, seed=cfg.seed, prime=cfg.prime)
        sample = trace_sampling(model, cfg.trace_pairs, cfg.trace_max_len, cfg.seed)
        details = {"blocks": 2 * model.m - 1, "block_size": model.l, "method": sym.method,
                   "backend": sym.backend, "exact_blocks": sym.exact_blocks, "symmetric": sym.ok,
                   "asymmetric_blocks": sym.asymmetric, "trace_pairs": sample.pairs, "trace_ok": sample.ok}
        if sym.spot_points:
            details["spot_points"] = sym.spot_points
            details["spot_failures"] = sym.spot_failures
        if sample.failure:
            details["trace_failure"] = list(sample.failure)
        return sym.ok and sample.ok, details

    def det_exact_stage():
        gb = gram_blocks(ctx["model"])
        expected = s.expected_determinant()
        det = determinant_exact(gb.assemble(), seconds=cfg.exact_seconds)
        return det == expected and det.is_unit(), {"determinant": _poly(det), "expected": _poly(expected),
                                                   "unit": det.is_unit()}

    def det_modular_stage():
        model = ctx["model"]
        expected = s.expected_determinant()
        res = determinant_modular(base_blocks(model), z_matrix(model), expected,
                                  trials=cfg.trials, seed=cfg.seed, prime=cfg.prime)
        return res.ok and expected.is_unit(), {
            "expected": _poly(expected), "trials": res.trials, "degree_bound": res.degree_bound,
            "false_accept_log2": round(res.error_bound_log2, 2), "failure": res.failure}

    def cond3_stage():
        rep = condition3_check(ctx["model"])
        return rep.ok, {"checked": rep.checked, "tau_pi": _poly(rep.tau_pi),
                        "nonzero": [list(x) for x in rep.nonzero]}

    def lifting_stage():
        model = ctx["model"]
        ok = lifting_check(ctx["real"], basis_words(model))
        return ok, {"basis_words": model.dim, "group_order": len(ctx["real"].elements)}

    def specialized_stage():
        own = ctx["model"]
        maximal = maximal_model
        if maximal is None:
            maximal, _ = build_model(s.maximal, cfg.cache_dir)
        rep = specialized_block_check(s, maximal, own)
        central = specialization_commutes(s, maximal, own)
        return rep.ok and central, {"ell": rep.ell, "mixed_nonzero": rep.mixed_nonzero,
                                    "leading_block_matches": rep.leading_matches,
                                    "central_power_matches": central, "detail": rep.detail}

    run.run("enumerate", enumerate_stage)
    if "factorization" in want:
        run.run("factorization", factorization_stage)
    run.run("table", table_stage)
    if "relations" in want:
        run.run("relations", relations_stage)
    if "gram" in want:
        run.run("gram", gram_stage)
    use_exact = "det-exact" in want and (cfg.force_exact or exact_allowed(s))
    if "det-exact" in want and not use_exact:
        run.skip("det-exact", "group exceeds the exact-elimination size limit")
    if use_exact:
        run.run("det-exact", det_exact_stage)
    if "det-modular" in want:
        explicit = set(cfg.checks) != set(CHECKS)
        if use_exact and not explicit:
            run.skip("det-modular", "determinant verified exactly")
        else:
            run.run("det-modular", det_modular_stage)
    if "cond3" in want:
        run.run("cond3", cond3_stage)
    if "lifting" in want:
        run.run("lifting", lifting_stage)
    if "specialized-block" in want:
        if s.is_maximal:
            run.skip("specialized-block", "maximal group: single class")
        elif s.theta is None:
            run.skip("specialized-block", "no specialization row recorded")
        else:
            run.run("specialized-block", specialized_stage)
    return v


def write_report(verdicts: Sequence[Verdict], path: str | Path) -> Path:
    import json
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = {"version": __version__, "groups": [v.to_json() for v in verdicts]}
    path.write_text(json.dumps(data, indent=2) + "\n")
    return path
