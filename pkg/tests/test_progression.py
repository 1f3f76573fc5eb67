import random

import strategies as S
from ltlsem.formula import AND, FALSE, GLOBALLY, TRUE, always, canonicalize, implies_syntactic, render
from ltlsem.lasso import eval_lasso
from ltlsem.parser import parse
from ltlsem.progression import prog, prog_word


def test_running_examples():
    assert prog(parse("F(r & F G y)"), {"r"}) is parse("F G y")
    assert prog(parse("F r & F G y"), {"r"}) is parse("F G y")


def test_constants():
    for sigma in ({}, {"a"}, {"a", "b"}):
        assert prog(TRUE, sigma) is TRUE
        assert prog(FALSE, sigma) is FALSE


def test_safety_violation():
    assert prog(parse("G y"), set()) is FALSE


def test_word():
    assert prog_word(parse("!a U (b & F c)"), [set(), {"b"}, {"c"}]) is TRUE
    assert prog_word(parse("!a U b"), [{"a"}]) is FALSE


def test_semantic_correctness():
    rng = random.Random(2024)
    for _ in range(2000):
        f = S.any_formula(rng, 4)
        sigma = S.letter(rng)
        w = S.lasso(rng)
        assert eval_lasso(w.prepend(sigma), f) == eval_lasso(w, prog(f, sigma)), render(f)


def test_output_canonical():
    rng = random.Random(8)
    for _ in range(1000):
        g = prog(S.any_formula(rng, 4), S.letter(rng))
        assert canonicalize(g) is g


def test_globally_regenerates():
    rng = random.Random(4)
    for _ in range(500):
        f = always(S.any_formula(rng, 3))
        if f.op != GLOBALLY:
            continue
        g = prog(f, S.letter(rng))
        # subsumption may swap f for an equivalent stronger conjunct (G X G a -> G a)
        kept = g is f or (g.op == AND and f in g.args) or implies_syntactic(g, f)
        assert g is FALSE or kept, (render(f), render(g))
        if g is not FALSE and not (g is f or (g.op == AND and f in g.args)):
            for _ in range(20):
                w = S.lasso(rng)
                assert not eval_lasso(w, g) or eval_lasso(w, f)
