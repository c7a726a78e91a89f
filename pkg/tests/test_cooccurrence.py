import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emograph import cooccurrence as cooc
from emograph.cooccurrence import (
    CooccurrenceFormatError,
    CooccurrenceMiner,
    emotion_distribution,
    mine,
    word_pair_weight,
)
from emograph.text import NormalizedCaption

from helpers import LABEL


def nc(words, labels=(), cid="c"):
    return NormalizedCaption(cid, tuple(words), frozenset(labels), (0.5, 0.5, 0.5))


def brute_force_counts(corpus, window):
    """Independent oracle: enumerate every position pair of every caption."""
    m_c, m_w, totals = {}, {}, {}
    for c in corpus:
        ws = c.valid_words
        for a in range(len(ws)):
            totals[ws[a]] = totals.get(ws[a], 0) + 1
            for lab in c.labels:
                m_c[ws[a], lab] = m_c.get((ws[a], lab), 0) + 1
            for b in range(len(ws)):
                if a != b and abs(a - b) <= window - 1 and ws[a] != ws[b]:
                    m_w[ws[a], ws[b]] = m_w.get((ws[a], ws[b]), 0) + 1
    return m_c, m_w, totals


def model_counts(model):
    m_c = {(model.vocab[i], j): int(v) for (i, j), v in model.m_c.todok().items()}
    m_w = {(model.vocab[i], model.vocab[j]): int(v) for (i, j), v in model.m_w.todok().items()}
    totals = {w: int(t) for w, t in zip(model.vocab, model.word_total)}
    return m_c, m_w, totals


P = LABEL["Pleasure"]


class TestMine:
    def test_single_pair(self):
        m = mine([nc(["beach", "sun"], [P])], window=2)
        b, s = m.index["beach"], m.index["sun"]
        assert m.m_c[b, P] == 1 and m.m_c[s, P] == 1
        assert m.m_w[b, s] == 1 and m.m_w[s, b] == 1

    def test_window_one_captures_no_pairs(self):
        m = mine([nc(["beach", "sun"], [P])], window=1)
        assert m.m_w.nnz == 0

    def test_duplicate_word(self):
        m = mine([nc(["a", "b", "a"], [0])], window=3)
        a, b = m.index["a"], m.index["b"]
        assert m.word_total[a] == 2
        assert m.m_c[a, 0] == 2
        assert m.m_w[a, b] == 2
        assert m.m_w[a, a] == 0

    def test_window_limits_distance(self):
        m = mine([nc(["a", "b", "c", "d"])], window=2)
        assert m.m_w[m.index["a"], m.index["c"]] == 0
        assert m.m_w[m.index["a"], m.index["b"]] == 1

    def test_category_prior(self):
        m = mine([nc(["a"], [0, 1]), nc(["b"], [1]), nc([], [1]), nc(["c"], [])], window=3)
        assert m.category_prior[0] == 0.25 and m.category_prior[1] == 0.75
        assert m.category_prior[2:].sum() == 0

    def test_vocab_first_appearance(self):
        m = mine([nc(["z", "a"]), nc(["a", "m", "z"])])
        assert m.vocab == ["z", "a", "m"]

    def test_invalid_window(self):
        with pytest.raises(ValueError):
            mine([nc(["a"])], window=0)

    def test_empty_corpus(self):
        with pytest.raises(ValueError):
            mine([])

    def test_estimator(self):
        est = CooccurrenceMiner(window=2).fit([nc(["beach", "sun"], [P])])
        assert est.model_.window == 2 and est.get_params() == {"window": 2}


vocab = st.sampled_from(list("abcdefg"))
captions = st.lists(
    st.tuples(st.lists(vocab, max_size=8), st.sets(st.integers(0, 25), max_size=3)), min_size=1, max_size=12
)


@settings(max_examples=150, deadline=None)
@given(captions, st.integers(1, 5))
def test_mine_matches_brute_force(raw, window):
    corpus = [nc(w, labs, f"c{i}") for i, (w, labs) in enumerate(raw)]
    m = mine(corpus, window)
    assert model_counts(m) == brute_force_counts(corpus, window)
    assert (m.m_w != m.m_w.T).nnz == 0
    assert m.m_w.diagonal().sum() == 0
    assert m.word_total.sum() == sum(len(c.valid_words) for c in corpus)
    max_labels = max(len(c.labels) for c in corpus)
    assert np.all(m.m_c.toarray() <= m.word_total[:, None] * max_labels)


@settings(max_examples=100, deadline=None)
@given(captions, st.integers(1, 4), st.randoms(use_true_random=False))
def test_mining_is_order_independent(raw, window, rnd):
    corpus = [nc(w, labs, f"c{i}") for i, (w, labs) in enumerate(raw)]
    shuffled = corpus[:]
    rnd.shuffle(shuffled)
    a, b = mine(corpus, window), mine(shuffled, window)
    assert model_counts(a) == model_counts(b)
    np.testing.assert_array_equal(a.category_prior, b.category_prior)


class TestEmotionDistribution:
    def _model(self, counts):
        corpus = []
        for j, k in enumerate(counts):
            corpus += [nc(["w"], [j])] * k
        return mine(corpus)

    def test_ratio(self):
        d = emotion_distribution(self._model([3, 1]), "w")
        assert d[0] == 0.75 and d[1] == 0.25 and d[2:].sum() == 0

    def test_unseen_word_is_uniform(self):
        d = emotion_distribution(self._model([3, 1]), "nope")
        np.testing.assert_array_equal(d, np.full(26, 1 / 26))

    def test_degenerate_single_category(self):
        d = emotion_distribution(self._model([5]), "w")
        assert d[0] == 1.0 and d[1:].sum() == 0

    def test_word_without_labels_is_uniform(self):
        m = mine([nc(["w"], [])])
        np.testing.assert_array_equal(emotion_distribution(m, "w"), np.full(26, 1 / 26))

    @settings(max_examples=100, deadline=None)
    @given(captions)
    def test_distribution_is_stochastic(self, raw):
        m = mine([nc(w, labs, f"c{i}") for i, (w, labs) in enumerate(raw)])
        for w in m.vocab + ["unseen"]:
            d = emotion_distribution(m, w)
            assert np.all(d >= 0) and abs(d.sum() - 1) <= 1e-9


class TestWordPairWeight:
    def test_direction_dependent(self):
        # a occurs 4 times, b twice; the two b's each sit next to an a
        m = mine([nc(["a", "b"]), nc(["a", "b"]), nc(["a"]), nc(["a"])], window=2)
        assert m.m_w[m.index["a"], m.index["b"]] == 2
        assert word_pair_weight(m, "a", "b") == 0.5
        assert word_pair_weight(m, "b", "a") == 1.0

    def test_never_cooccurring(self):
        m = mine([nc(["a"]), nc(["b"])])
        assert word_pair_weight(m, "a", "b") == 0.0

    def test_unknown_word(self):
        m = mine([nc(["a"])])
        with pytest.raises(KeyError):
            word_pair_weight(m, "a", "zzz")


class TestSerialization:
    def test_round_trip(self, tmp_path):
        m = mine([nc(["beach", "sun"], [P])], window=2)
        cooc.save(m, tmp_path / "m.json")
        assert cooc.load(tmp_path / "m.json") == m

    @settings(max_examples=40, deadline=None)
    @given(captions, st.integers(1, 4))
    def test_round_trip_random(self, raw, window):
        m = mine([nc(w, labs, f"c{i}") for i, (w, labs) in enumerate(raw)], window)
        back = cooc.from_dict(json.loads(json.dumps(cooc.to_dict(m))))
        assert back == m and back.vocab == m.vocab

    def test_empty_file(self, tmp_path):
        (tmp_path / "m.json").write_text("")
        with pytest.raises(CooccurrenceFormatError):
            cooc.load(tmp_path / "m.json")

    def test_future_version(self, tmp_path):
        d = cooc.to_dict(mine([nc(["a"])]))
        d["version"] = 99
        (tmp_path / "m.json").write_text(json.dumps(d))
        with pytest.raises(CooccurrenceFormatError, match="99"):
            cooc.load(tmp_path / "m.json")

    def test_truncated(self, tmp_path):
        text = json.dumps(cooc.to_dict(mine([nc(["a", "b"], [1])])))
        (tmp_path / "m.json").write_text(text[: len(text) // 2])
        with pytest.raises(CooccurrenceFormatError):
            cooc.load(tmp_path / "m.json")

    def test_file_layout(self, tmp_path):
        m = mine([nc(["beach", "sun"], [P])], window=2)
        cooc.save(m, tmp_path / "m.json")
        d = json.loads((tmp_path / "m.json").read_text())
        assert d["version"] == 1 and d["window"] == 2
        assert d["m_c"] == [[0, P, 1], [1, P, 1]]
        assert d["m_w"] == [[0, 1, 1], [1, 0, 1]]
