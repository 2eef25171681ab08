import numpy as np
import pytest

from cascata.cascade import detect_cascades, seed_sentiment_group
from cascata.corpus import parse_stream, to_jsonl
from cascata.errors import DataError
from cascata.lexicon import annotate_text
from cascata.network import FollowerGraph
from cascata.synth import (SynthConfig, assortative_scores, gen_corpus, gen_graph, sample_discrete_lognormal,
                           sample_discrete_power_law, synth_lexicons)
from oracles import partial_sum_zeta


def test_two_users_complete():
    g = gen_graph(SynthConfig(n_users=2, edge_prob=1.0))
    assert g.n_edges == 2


def test_reciprocity_target():
    g = gen_graph(SynthConfig(n_users=1000, edge_prob=0.01, reciprocity_target=0.5, seed=4))
    src, dst = g.src, g.dst
    pairs = set(zip(src.tolist(), dst.tolist()))
    measured = sum((b, a) in pairs for a, b in pairs) / len(pairs)
    assert 0.45 <= measured <= 0.55
    assert measured == pytest.approx(g.reciprocity())


def test_powerlaw_edge_model_and_reciprocity():
    g = gen_graph(SynthConfig(n_users=2000, edge_model="powerlaw", gamma=2.2, reciprocity_target=0.3, seed=1))
    assert 0.25 <= g.reciprocity() <= 0.35
    assert g.out_degree.max() > 10 * np.median(g.out_degree)


def test_infeasible_reciprocity():
    with pytest.raises(DataError):
        gen_graph(SynthConfig(n_users=3, edge_prob=1.0, reciprocity_target=0.0))


def test_graph_determinism_and_no_self_loops():
    cfg = SynthConfig(n_users=300, edge_prob=0.02, reciprocity_target=0.4, seed=9)
    a, b = gen_graph(cfg), gen_graph(cfg)
    assert a.edges() == b.edges()
    assert a.self_loops == 0 and all(u != v for u, v in a.edges())


@pytest.mark.parametrize("bad", [
    {"n_users": 1}, {"edge_model": "x"}, {"edge_prob": 1.5}, {"emotion_probs": (0.5, 0.5, 0.5)},
    {"gamma": 1.0}, {"window_width": 0}, {"reciprocity_target": -0.1},
])
def test_config_validation(bad):
    with pytest.raises(DataError):
        SynthConfig(**bad)


def test_config_from_mapping():
    cfg = SynthConfig.from_mapping({"n-users": 10, "emotion_probs": "0.2,0.6,0.2"})
    assert cfg.n_users == 10 and cfg.emotion_probs == (0.2, 0.6, 0.2)
    with pytest.raises(DataError):
        SynthConfig.from_mapping({"bogus": 1})


def test_no_replies_means_singletons():
    # seeds confined to one window: without replies nothing can link
    cfg = SynthConfig(n_users=200, edge_prob=0.05, reply_prob=0.0, tweet_rate=0.3, n_windows=5,
                      seed_windows=1, same_window=False, seed=2)
    sc = gen_corpus(cfg, gen_graph(cfg))
    assert len(set(sc.truth.values())) == len(sc.corpus)
    assert all(len(c.tweet_ids) == 1 for c in detect_cascades(sc.corpus, gen_graph(cfg), same_window=False))


def test_forced_chain():
    users = [f"c{i}" for i in range(5)]
    g = FollowerGraph([(users[i], users[i + 1]) for i in range(4)])
    cfg = SynthConfig(n_users=5, reply_prob=1.0, n_windows=6, tweet_rate=0.0, seed=1)
    sc = gen_corpus(cfg, g, seeds=[("c0", 0)])
    (c,) = detect_cascades(sc.corpus, g)
    assert c.n_sp == 5 and len(sc.corpus) == 5
    assert len(set(sc.truth.values())) == 1
    assert sc.parents["t00000004"] == "t00000003"
    with pytest.raises(DataError):
        gen_corpus(cfg, g, seeds=[("stranger", 0)])


@pytest.mark.parametrize("same_window", [True, False])
def test_ground_truth_equals_detector(same_window):
    cfg = SynthConfig(n_users=150, edge_prob=0.04, reciprocity_target=0.3, n_windows=8, tweet_rate=0.05,
                      reply_prob=0.2, same_window=same_window, window_width=3600, seed=5)
    g = gen_graph(cfg)
    sc = gen_corpus(cfg, g)
    got = {frozenset(c.tweet_ids) for c in detect_cascades(sc.corpus, g, same_window=same_window)}
    assert got == sc.partition()
    assert any(len(p) > 1 for p in got)


def test_forced_seed_sentiment_groups():
    # one seed per window with no followers: each cascade is its seed
    g = FollowerGraph([], nodes=[f"u{i}" for i in range(30)])
    cfg = SynthConfig(n_users=30, emotion_probs=(0.3, 0.5, 0.2), tweet_rate=0.0, n_windows=30, seed=3)
    sc = gen_corpus(cfg, g, seeds=[(f"u{i}", i) for i in range(30)])
    cascades = detect_cascades(sc.corpus, g)
    groups = seed_sentiment_group(cascades, sc.corpus.annotations())
    expected = {e: sum(t.annotation.e == e for t in sc.corpus) for e in (1, 0, -1)}
    assert {k: len(v) for k, v in groups.items()} == expected


def test_corpus_invariants_and_text_annotations_agree():
    cfg = SynthConfig(n_users=80, edge_prob=0.05, n_windows=4, tweet_rate=0.3, with_text=True, seed=8)
    sc = gen_corpus(cfg, gen_graph(cfg))
    corpus = sc.corpus
    assert parse_stream(to_jsonl(corpus)).tweets == corpus.tweets
    slex, clex = synth_lexicons()
    for tw in corpus:
        assert annotate_text(tw.text, slex, clex) == tw.annotation


def test_corpus_is_deterministic():
    cfg = SynthConfig(n_users=80, edge_prob=0.05, n_windows=4, tweet_rate=0.3, seed=8)
    g = gen_graph(cfg)
    assert to_jsonl(gen_corpus(cfg, g).corpus) == to_jsonl(gen_corpus(cfg, g).corpus)


def test_empty_corpus_is_an_error():
    cfg = SynthConfig(n_users=10, tweet_rate=0.0)
    with pytest.raises(DataError):
        gen_corpus(cfg, gen_graph(cfg))


def test_power_law_sampler_mean():
    draws = sample_discrete_power_law(3.5, 1, 1_000_000, seed=0)
    expected = partial_sum_zeta(2.5) / partial_sum_zeta(3.5)
    assert abs(draws.mean() / expected - 1) < 0.02


def test_power_law_sampler_support_and_determinism():
    a = sample_discrete_power_law(1.7, 4, 50_000, seed=3)
    assert a.min() >= 4
    assert np.array_equal(a, sample_discrete_power_law(1.7, 4, 50_000, seed=3))
    assert a.max() > 10_004  # the bisection branch is exercised
    with pytest.raises(DataError):
        sample_discrete_power_law(1.0, 1, 10)
    with pytest.raises(DataError):
        sample_discrete_power_law(2.0, 0, 10)


def test_lognormal_sampler():
    x = sample_discrete_lognormal(1.0, 1.0, 10_000, seed=1, x_min=2)
    assert x.size == 10_000 and x.min() >= 2


def test_assortative_scores_shape_and_validation():
    g = gen_graph(SynthConfig(n_users=50, edge_prob=0.1, seed=1))
    assert assortative_scores(g, seed=1).shape == (50,)
    with pytest.raises(DataError):
        assortative_scores(g, strength=1.0)
