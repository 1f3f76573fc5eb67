import random
from fractions import Fraction
from itertools import product

import pytest

import strategies as S
from ltlsem.errors import TruenessCapError
from ltlsem.formula import FALSE, TRUE, atom, conj, neg, render
from ltlsem.lasso import LassoWord, eval_lasso, powerset
from ltlsem.parser import parse
from ltlsem.propositional import obligations, skeleton_variables, trueness

L = frozenset


@pytest.mark.parametrize(
    "text, value",
    [
        ("F r & F G y", Fraction(1, 4)),
        ("F G y", Fraction(1, 2)),
        ("F r & G !r", Fraction(1, 4)),
        ("true", Fraction(1)),
        ("false", Fraction(0)),
        ("G F a & G F b & G !c", Fraction(1, 8)),
        ("a | G b", Fraction(3, 4)),
    ],
)
def test_trueness_values(text, value):
    assert trueness(parse(text)).fraction == value


def test_shared_variables():
    f = parse("(F a & b) | (F a & !b)")
    assert len(skeleton_variables(f)) == 2


def _brute_trueness(f):
    # independent count: evaluate the skeleton by substitution
    vs = skeleton_variables(f)
    hits = 0
    for bits in product((False, True), repeat=len(vs)):
        env = dict(zip(vs, bits))

        def ev(g):
            if g in env:
                return env[g]
            if g is TRUE:
                return True
            if g is FALSE:
                return False
            if g.op == "not":
                return not ev(g.args[0])
            vals = [ev(x) for x in g.args]
            return all(vals) if g.op == "and" else any(vals)

        hits += ev(f)
    return Fraction(hits, 2 ** len(vs))


def test_matches_brute_force():
    rng = random.Random(1)
    for _ in range(300):
        f = S.any_formula(rng, 4)
        assert trueness(f).fraction == _brute_trueness(f)


def test_complement():
    rng = random.Random(2)
    for _ in range(500):
        f = S.any_formula(rng, 4)
        assert trueness(neg(f)).fraction == 1 - trueness(f).fraction


def test_cap():
    f = conj(*(atom(f"p{i}") for i in range(5)))
    with pytest.raises(TruenessCapError):
        trueness(f, cap=4)
    assert trueness(f, cap=5).fraction == Fraction(1, 32)


def test_obligation_examples():
    full = powerset("ab")
    assert obligations(parse("F a"), full) == {L("a"), L("ab")}
    assert obligations(parse("G F a & G F b"), full) == {L("ab")}
    env = [L(), L("r"), L("y")]
    assert obligations(parse("F G y"), env) == {L("y")}
    assert obligations(FALSE, full) == set()
    assert obligations(TRUE, full) == set(full)
    with pytest.raises(ValueError):
        obligations(TRUE, [])


def test_obligation_soundness():
    rng = random.Random(3)
    for _ in range(400):
        f = S.any_formula(rng, 4)
        for sigma in obligations(f, powerset(S.AP)):
            assert eval_lasso(LassoWord([], [sigma]), f), (render(f), sorted(sigma))


def test_alphabet_restriction():
    rng = random.Random(4)
    full = powerset(S.AP)
    for _ in range(300):
        f = S.any_formula(rng, 4)
        sub = [s for s in full if rng.random() < 0.5] or [full[0]]
        assert obligations(f, sub) == obligations(f, full) & set(sub)
