import json
import math
import random
from pathlib import Path

import pytest

import strategies as S
from ltlsem.errors import PathCountCapError, StateCapError
from ltlsem.formula import FALSE, TRUE, render
from ltlsem.lasso import LassoWord, eval_lasso, powerset
from ltlsem.ldba import (
    ACCEPTING,
    INITIAL,
    REJECT_ACCEPTING,
    REJECT_INITIAL,
    TT_SINK,
    OnTheFly,
    SemanticState,
    accepts_lasso,
    build_full,
    count_simple_paths,
    epsilon_targets,
    initial_state,
    reset,
    simple_path_closed_form,
    step,
)
from ltlsem.parser import parse

GOLDEN = Path(__file__).parent / "golden"
ENV = [frozenset(), frozenset("r"), frozenset("y")]
P = parse


class TestStates:
    def test_initial(self):
        assert initial_state(P("F r & F G y")) == SemanticState(P("F r & F G y"))
        assert initial_state(TRUE) is TT_SINK or initial_state(TRUE) == TT_SINK
        assert initial_state(FALSE) == REJECT_INITIAL

    def test_invariants(self):
        with pytest.raises(ValueError):
            SemanticState(P("a"), P("a"), INITIAL)
        with pytest.raises(ValueError):
            SemanticState(P("a"), None, INITIAL, True)
        with pytest.raises(ValueError):
            SemanticState(P("a"), None, "middle")

    def test_step_examples(self):
        q0 = initial_state(P("F r & F G y"))
        assert step(q0, {"r"}) == SemanticState(P("F G y"))
        q2 = SemanticState(P("G y"), TRUE, ACCEPTING, True)
        assert step(q2, set()) == REJECT_ACCEPTING
        q = SemanticState(P("G y & F r"), P("F r"), ACCEPTING, False)
        assert step(q, {"r", "y"}) == SemanticState(P("G y"), TRUE, ACCEPTING, True)
        assert eval_lasso(LassoWord([{"r", "y"}], [{"y"}]), P("G y & F r"))

    def test_epsilon_examples(self):
        assert epsilon_targets(SemanticState(P("F G y"))) == (
            SemanticState(P("G y"), TRUE, ACCEPTING, True),
        )
        assert epsilon_targets(initial_state(P("F r & F G y"))) == (
            SemanticState(P("G y & F r"), P("F r"), ACCEPTING, False),
        )
        assert epsilon_targets(initial_state(P("F a"))) == ()
        assert epsilon_targets(SemanticState(P("G y"), TRUE, ACCEPTING, True)) == ()

    def test_epsilon_splits_disjunctions(self):
        targets = epsilon_targets(initial_state(P("F G a | G F b")))
        mains = {render(t.main) for t in targets}
        assert mains == {"G a", "G F b"}

    def test_reset(self):
        assert reset(P("G y")) is TRUE
        assert reset(P("G F a & G !b")) is P("F a")
        assert reset(P("F a U b")) is P("F a U b")
        assert reset(P("X(G c & F b)")) is P("X F b")
        # a propositional disjunct is a one-step obligation
        assert reset(P("b | F X b")) is P("b | F X b")
        assert reset(P("G(!a | F X b)")) is P("!a | F X b")


class TestBuildFull:
    def test_running_example_structure(self):
        aut = build_full(P("F r & F G y"), ENV)
        by_main = {}
        for q in aut.states:
            by_main.setdefault(render(q.main), []).append(q)
        q0 = aut.initial
        q1 = SemanticState(P("F G y"))
        q2 = SemanticState(P("G y"), TRUE, ACCEPTING, True)
        assert {"(F r) & (F G y)", "F G y", "G y"} <= set(by_main)
        i0, i1, i2 = aut.index[q0], aut.index[q1], aut.index[q2]
        assert aut.delta[(i0, frozenset("r"))] == i1
        assert i2 in aut.epsilon[i1]
        assert aut.delta[(i2, frozenset("y"))] == i2
        assert aut.states[aut.delta[(i2, frozenset())]] == REJECT_ACCEPTING
        assert q2 in aut.accepting

    def test_tt(self):
        aut = build_full(TRUE, powerset("ab"))
        assert aut.states == [TT_SINK]
        assert all(aut.delta[(0, s)] == 0 for s in aut.alphabet)

    def test_golden_not_a_until_b(self):
        aut = build_full(P("!a U b"), powerset("ab"))
        golden = json.loads((GOLDEN / "not_a_until_b.json").read_text())
        assert aut.to_json() == golden

    def test_golden_against_oracle(self):
        golden = json.loads((GOLDEN / "not_a_until_b.json").read_text())
        states = golden["states"]
        delta = {(i, frozenset(s)): j for i, s, j in golden["delta"]}
        phi = P("!a U b")
        rng = random.Random(12)
        for _ in range(100):
            w = S.lasso(rng, ("a", "b"))
            # co-safe formula: accept iff the run reaches the accepting sink
            q, seen = golden["initial"], set()
            i = 0
            while (q, i) not in seen:
                seen.add((q, i))
                q = delta[(q, w[i])]
                i = w.successor(i)
            assert states[q]["accepting"] == eval_lasso(w, phi)

    def test_structural_laws(self):
        rng = random.Random(5)
        for _ in range(60):
            phi = S.fragment(rng, 4)
            aut = build_full(phi, powerset(S.AP))
            for i, q in enumerate(aut.states):
                for s in aut.alphabet:
                    j = aut.delta[(i, s)]
                    if aut.states[j] != TT_SINK:
                        assert aut.states[j].component == q.component
                for j in aut.epsilon.get(i, ()):
                    assert q.component == INITIAL and aut.states[j].component == ACCEPTING
                if q.accepting:
                    assert q.component == ACCEPTING
            assert aut.initial.component == INITIAL or aut.initial == TT_SINK

    def test_cap(self):
        with pytest.raises(StateCapError, match="frontier"):
            build_full(P("F(a & F(b & F c))"), powerset("abc"), cap=2)
        with pytest.raises(ValueError):
            build_full(P("a"), cap=0)

    def test_on_the_fly_subset(self):
        rng = random.Random(6)
        for _ in range(40):
            phi = S.fragment(rng, 4)
            full = set(build_full(phi, powerset(S.AP)).states)
            otf = OnTheFly(phi)
            q = otf.initial
            for _ in range(30):
                if otf.epsilon(q) and rng.random() < 0.3:
                    q = rng.choice(otf.epsilon(q))
                else:
                    q = otf.step(q, S.letter(rng))
            assert otf.constructed <= full

    def test_deterministic(self):
        a = build_full(P("G(a -> F b) & F G c"), powerset("abc"))
        b = build_full(P("G(a -> F b) & F G c"), powerset("abc"))
        assert a.dumps() == b.dumps()


class TestAcceptance:
    def test_examples(self):
        assert accepts_lasso(P("F r & F G y"), LassoWord([{"r"}], [{"y"}]))
        assert not accepts_lasso(P("F r & F G y"), LassoWord([], [set()]))
        assert accepts_lasso(P("G F a"), LassoWord([], [{"a"}, set()]))

    def test_alphabet_check(self):
        with pytest.raises(ValueError):
            accepts_lasso(P("F a"), LassoWord([], [{"z"}]), alphabet=powerset("a"))

    def test_equivalence_on_fragment(self):
        rng = random.Random(99)
        for _ in range(1000):
            phi = S.fragment(rng, 4)
            w = S.lasso(rng)
            assert accepts_lasso(phi, w) == eval_lasso(w, phi), (render(phi), w)

    @pytest.mark.parametrize(
        "text",
        [
            "G(a -> F b)",
            "G F a & G F b & G !c",
            "F G a | G F b",
            "G(a | F X b)",
            "(F a) U b",
            "F(a & F G b) & G F c",
        ],
    )
    def test_equivalence_named(self, text):
        rng = random.Random(text)
        phi = P(text)
        for _ in range(200):
            w = S.lasso(rng)
            assert accepts_lasso(phi, w) == eval_lasso(w, phi)


class TestPaths:
    @pytest.mark.parametrize("n", range(1, 8))
    def test_complete_digraph(self, n):
        g = {i: [j for j in range(n) if j != i] for i in range(n)}
        total = count_simple_paths(g)
        assert total == simple_path_closed_form(n)
        assert total < math.e * math.factorial(n)
        # from a single start: one n-th of the total
        assert count_simple_paths(g, 0) * n == total

    def test_small_cases(self):
        assert simple_path_closed_form(4) == 4 + 12 + 24 + 24
        assert count_simple_paths({0: []}, 0) == 1
        assert count_simple_paths({0: [1], 1: []}, 0) == 2
        assert count_simple_paths({0: [0]}, 0) == 1

    def test_automaton_paths(self):
        aut = build_full(P("!a U b"), powerset("ab"))
        # q0 -> q_ff, q0 -> q_tt, q0 alone
        assert count_simple_paths(aut, aut.initial) == 3

    def test_cap(self):
        g = {i: [j for j in range(6) if j != i] for i in range(6)}
        with pytest.raises(PathCountCapError):
            count_simple_paths(g, 0, cap=10)
