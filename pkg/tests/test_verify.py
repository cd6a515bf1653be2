import pytest

from rank2hecke.catalog import UnknownGroup
from rank2hecke.laurent import VarSpec
from rank2hecke.structure import realize
from rank2hecke.verify import (CHECKS, RunConfig, Verdict, _Runner, basis_words, condition3_check, gram_symmetry,
                               lifting_check, run_group, tau, trace_of_product, trace_sampling)


def test_tau_examples():
    R = VarSpec.of(("a0",), ("a0",))
    a0 = R.var("a0")
    assert tau({0: a0, 3: R.one()}) == a0
    assert tau({2: a0}) == 0
    assert tau({}, R) == R.zero()
    with pytest.raises(ValueError):
        tau({})


def test_tau_of_quadratic(g6):
    ring = g6.ring
    assert tau(g6.express("ss")) == ring.var("a0")
    assert tau(g6.express("s")) == 0
    assert trace_of_product(g6, ("u",), ("U",)) == 1
    assert trace_of_product(g6, ("s",), ("s",)) == ring.var("a0")


def test_condition3_g6(g6):
    rep = condition3_check(g6)
    assert rep.ok and not rep.nonzero
    assert rep.checked == g6.l * g6.m - 1
    assert rep.tau_pi.is_unit()


def test_condition3_g4(g4):
    rep = condition3_check(g4)
    assert rep.ok
    assert str(rep.tau_pi) == "c0^4"


def test_condition3_fault(g6):
    words = [g6.y_word(i) for i in range(g6.l)]
    words[2] = words[0]
    rep = condition3_check(g6, words)
    assert not rep.ok and (0, 2) in rep.nonzero


def test_lifting(g6):
    real = realize("G6")
    words = basis_words(g6)
    assert lifting_check(real, words)
    assert not lifting_check(real, words[:-1] + [words[1]])
    assert not lifting_check(real, words[1:] + [words[1]])


def test_trace_sampling(g6):
    sample = trace_sampling(g6, pairs=200, seed=1)
    assert sample.ok and sample.pairs == 200


def test_run_group_g6(g7):
    v = run_group("G6", RunConfig(), maximal_model=g7)
    assert v.passed, [s.to_json() for s in v.stages if not s.passed]
    names = [s.name for s in v.stages]
    assert names == ["enumerate", "factorization", "table", "relations", "gram", "det-exact",
                     "det-modular", "cond3", "lifting", "specialized-block"]
    assert v.stage("det-exact").skipped and not v.stage("det-modular").skipped
    assert v.stage("gram").details["trace_pairs"] >= 200
    js = v.to_json()
    assert js["pass"] and js["cache_hash"] and js["group"] == "G6"


def test_run_group_g4_exact():
    v = run_group("G4", RunConfig(checks=("table", "det-exact", "det-modular")))
    assert v.passed
    assert v.stage("det-exact").details["determinant"] == "-c0^96"
    assert not v.stage("det-modular").skipped  # requested explicitly, so both run


def test_run_group_explicit_modular():
    v = run_group("G4", RunConfig(checks=("det-modular",), seed=7))
    st = v.stage("det-modular")
    assert v.passed and not st.skipped and st.details["trials"] >= 5
    assert st.details["false_accept_log2"] < -100


def test_maximal_group_skips_specialization():
    v = run_group("G12", RunConfig(checks=("specialized-block",)))
    assert v.passed and v.stage("specialized-block").skipped


def test_unknown_group():
    with pytest.raises(UnknownGroup):
        run_group("G99")


def test_bad_config():
    with pytest.raises(ValueError):
        RunConfig(checks=("gram", "bogus"))
    with pytest.raises(ValueError):
        RunConfig(trials=0)
    assert set(RunConfig().checks) == set(CHECKS)


def test_runner_records_exception_and_halts():
    v = Verdict("G4")
    run = _Runner(v)

    def boom():
        raise RuntimeError("bad entry")

    assert not run.run("table", boom)
    assert not run.run("gram", lambda: (True, {}))
    run.skip("det-exact", "later")
    assert [s.name for s in v.stages] == ["table"]
    assert "RuntimeError: bad entry" in v.stages[0].details["error"]
    assert not v.passed


def test_gram_symmetry_methods(g6):
    full = gram_symmetry(g6)
    assert full.ok and full.method == "full" and full.exact_blocks == 2 * g6.m - 1
    base = gram_symmetry(g6, full_limit=0, spot_points=2, seed=4)
    assert base.ok and base.method == "base" and base.exact_blocks == g6.m
    assert base.spot_points == 2 and base.spot_failures == 0


class _TrivialGroup:
    elements = [0]

    def eval(self, word):
        return 0


def test_lifting_trivial_group():
    assert lifting_check(_TrivialGroup(), [()])
    assert not lifting_check(_TrivialGroup(), [("s",)])
