"""
Walking through F r & F G y
===========================

Reach r, and from some point on stay on y. We progress the formula,
count its propositional truth, build the automaton and embed a few states.
"""

from ltlsem.embedding import EmbeddingConfig, embed_state, f_attention, f_trueness
from ltlsem.formula import render
from ltlsem.lasso import LassoWord
from ltlsem.ldba import accepts_lasso, build_full
from ltlsem.parser import parse
from ltlsem.progression import prog
from ltlsem.propositional import trueness

phi = parse("F r & F G y")
env = [frozenset(), frozenset("r"), frozenset("y")]  # the letters a grid can emit

# progression: reading {r} discharges F r
print(render(prog(phi, {"r"})))

# trueness treats F r and F G y as two free variables: 1 of 4 assignments
print(trueness(phi), trueness(parse("F G y")))

# how much each letter helps
for s in env:
    print(sorted(s), f_trueness(phi, s))

# after seeing r, every remaining obligation needs y and none needs r
print(f_attention(phi, "r", "r", True, env), f_attention(phi, "r", "y", True, env))

aut = build_full(phi, env)
for i, q in enumerate(aut.states):
    print(i, q)
print("epsilon:", aut.epsilon)

# a run that visits r once and then loops on y is accepted
print(accepts_lasso(phi, LassoWord([{"r"}], [{"y"}])))
print(accepts_lasso(phi, LassoWord([{"r"}], [{"y"}, set()])))

cfg = EmbeddingConfig.for_task(phi, ("r", "y"), env, normalizations=("raw",))
for q in aut.states[:3]:
    v = embed_state(q, cfg)
    print(str(q)[:40].ljust(40), v[:3], v[-1])

# block offsets, handy for reading the vectors above
for block in cfg.layout():
    print(block)
