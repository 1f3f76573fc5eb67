import random

import numpy as np
import pytest

import strategies as S
from ltlsem.embedding import (
    NORMALIZATIONS,
    EmbeddingConfig,
    complexity_features,
    embed_formula,
    embed_state,
    f_attention,
    f_trueness,
    normalize,
)
from ltlsem.formula import TRUE
from ltlsem.lasso import powerset
from ltlsem.ldba import REJECT_INITIAL, TT_SINK, OnTheFly, SemanticState
from ltlsem.parser import parse as P

ENV = (frozenset(), frozenset("r"), frozenset("y"))
EXAMPLE = P("F r & F G y")


@pytest.fixture
def cfg():
    return EmbeddingConfig.for_task(EXAMPLE, ("r", "y"), ENV)


def test_trueness_deltas():
    assert f_trueness(P("G y"), set()) == -0.5
    assert f_trueness(EXAMPLE, {"r"}) == 0.25
    assert f_trueness(EXAMPLE, {"y"}) == 0.0


def test_attention():
    assert f_attention(EXAMPLE, "r", "r", True, ENV) == 0.0
    assert f_attention(EXAMPLE, "r", "y", True, ENV) == 1.0
    assert f_attention(P("G y"), "r", "y", True, ENV) == 0.0
    # negative polarity counts the complement
    assert f_attention(EXAMPLE, "r", "r", False, ENV) == 1.0


class TestNormalize:
    def test_minmax(self):
        np.testing.assert_allclose(normalize([-0.5, 0.25, 0.0], "minmax"), [0.0, 1.0, 2 / 3])
        np.testing.assert_array_equal(normalize([0.1, 0.1], "minmax"), [0.5, 0.5])

    def test_extreme(self):
        np.testing.assert_array_equal(normalize([-0.5, 0.25, 0.0], "extreme"), [-0.5, 0.25, 0.0])
        np.testing.assert_array_equal(normalize([-0.5, 0.1, 0.25], "extreme"), [-0.5, 0.0, 0.25])
        np.testing.assert_array_equal(normalize([0.3, 0.3], "extreme"), [0.3, 0.3])

    def test_reachavoid_keeps_sign(self):
        # negatives scale into [-1, 0]
        np.testing.assert_array_equal(
            normalize([0.25, -0.5, -0.25], "reachavoid"), [1.0, -1.0, -0.5]
        )
        np.testing.assert_array_equal(normalize([0.0, 0.0], "reachavoid"), [0.0, 0.0])

    def test_raw_and_errors(self):
        np.testing.assert_array_equal(normalize([0.2, -0.1], "raw"), [0.2, -0.1])
        with pytest.raises(ValueError):
            normalize([], "raw")
        with pytest.raises(ValueError):
            normalize([1.0], "zscore")

    def test_ranges(self):
        rng = np.random.default_rng(0)
        for _ in range(300):
            x = rng.uniform(-1, 1, size=rng.integers(1, 8))
            if rng.random() < 0.3:
                x = np.round(x, 1)
            mm = normalize(x, "minmax")
            assert ((0 <= mm) & (mm <= 1)).all()
            ra = normalize(x, "reachavoid")
            assert ((-1 <= ra) & (ra <= 1)).all()
            ex = normalize(x, "extreme")
            ends = (x == x.min()) | (x == x.max())
            np.testing.assert_array_equal(ex[ends], x[ends])
            assert (ex[~ends] == 0).all()


class TestComplexity:
    def test_tt(self):
        c = EmbeddingConfig(("a",), ENV, ref_height=4)
        np.testing.assert_array_equal(complexity_features(TRUE, c), [0.25, 0, 0, 1.0])

    def test_example(self, cfg):
        # the and-node sits above F G y, so height 4
        assert (cfg.ref_height, cfg.ref_conjuncts, cfg.ref_disjuncts) == (4, 1, 1)
        np.testing.assert_array_equal(complexity_features(EXAMPLE, cfg), [1, 1, 0, 0.25])

    def test_three_conjuncts(self):
        c = EmbeddingConfig(("a", "b", "c"), ENV, ref_height=3, ref_conjuncts=2)
        f = P("G F a & G F b & G !c")
        np.testing.assert_array_equal(complexity_features(f, c), [1, 1, 0, 0.125])


class TestEmbedState:
    def test_example_initial_state(self, cfg):
        v = embed_state(SemanticState(EXAMPLE), cfg)
        np.testing.assert_array_equal(v[0:3], [0.0, 0.25, 0.0])
        att = cfg.layout()[4]
        assert att["name"] == "main.attention.pos"
        # row r: (r, r) then (r, y)
        np.testing.assert_array_equal(v[att["offset"] : att["offset"] + 2], [0.0, 1.0])
        assert v[-1] == 0.0

    def test_tt_sink(self, cfg):
        v = embed_state(TT_SINK, cfg)
        half = cfg.half_size
        n = len(cfg.normalizations) * len(ENV)
        raw = v[:3]
        np.testing.assert_array_equal(raw, 0.0)
        att = v[n : n + 4]
        # ob(tt) is the whole label set: r in 1 of 3 letters, y in 1 of 3
        np.testing.assert_allclose(att, [1 / 3, 1 / 3, 1 / 3, 1 / 3])
        np.testing.assert_array_equal(v[:half], v[half : 2 * half])

    def test_rejecting_sink(self, cfg):
        v = embed_state(REJECT_INITIAL, cfg)
        n = len(cfg.normalizations) * len(ENV)
        np.testing.assert_array_equal(v[:3], 0.0)
        np.testing.assert_array_equal(v[n : n + 8], 0.0)
        np.testing.assert_allclose(v[n + 8 : n + 12], [1 / 4, 0, 0, 0])

    def test_breakpoint_flag(self, cfg):
        q = SemanticState(P("G y & F r"), P("F r"), "accepting", False)
        assert embed_state(q, cfg)[-1] == 1.0

    def test_similar_formulas_share_sign(self, cfg):
        a = embed_formula(EXAMPLE, cfg)
        b = embed_formula(P("F r"), cfg)
        assert a[1] > 0 and b[1] > 0

    def test_read_only_and_deterministic(self, cfg):
        v = embed_state(SemanticState(EXAMPLE), cfg)
        with pytest.raises(ValueError):
            v[0] = 1.0
        fresh = EmbeddingConfig.for_task(EXAMPLE, ("r", "y"), ENV)
        assert embed_state(SemanticState(EXAMPLE), fresh).tobytes() == v.tobytes()

    def test_layout_and_range(self):
        rng = random.Random(3)
        for _ in range(40):
            phi = S.fragment(rng, 4)
            norms = tuple(n for n in NORMALIZATIONS if rng.random() < 0.7) or ("raw",)
            sigma = powerset(S.AP)
            c = EmbeddingConfig.for_task(phi, S.AP, sigma, norms)
            otf = OnTheFly(phi)
            q = otf.initial
            for _ in range(10):
                v = embed_state(q, c)
                assert v.shape == (2 * (len(norms) * len(sigma) + 2 * len(S.AP) ** 2 + 4) + 1,)
                assert v.shape[0] == c.size == sum(b["length"] for b in c.layout())
                assert ((-1 <= v) & (v <= 1)).all()
                eps = otf.epsilon(q)
                q = rng.choice(eps) if eps and rng.random() < 0.3 else otf.step(q, S.letter(rng))

    def test_config_errors(self):
        with pytest.raises(ValueError):
            EmbeddingConfig(("a",), ())
        with pytest.raises(ValueError):
            EmbeddingConfig(("a",), ENV, ("zscore",))
        with pytest.raises(ValueError):
            EmbeddingConfig(("a",), ENV, ref_height=0)
