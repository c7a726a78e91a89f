import json

import numpy as np
import pytest

from emograph.cooccurrence import mine
from emograph.gin import (
    Adadelta,
    CheckpointError,
    GinModel,
    LossConfig,
    TrainConfig,
    TrainingDiverged,
    load_checkpoint,
    save_checkpoint,
    train,
)
from emograph.graph import build_graph

from helpers import separable_corpus, targets, toy_lexicon
from helpers import THEMES


@pytest.fixture(scope="module")
def data():
    corpus = separable_corpus(12, 0)
    lex = toy_lexicon(tuple(w for ws in THEMES.values() for w in ws))
    co = mine(corpus)
    graphs = [build_graph(c, co, lex) for c in corpus]
    y_cat, y_cont = targets(corpus)
    return graphs, y_cat, y_cont, LossConfig(category_prior=co.category_prior)


def small_model(seed=0, **kw):
    return GinModel.initialize(seed, hidden=16, d_read=8, **kw)


class TestAdadelta:
    def test_single_step_by_hand(self):
        theta = {"w": np.array([1.0, -2.0])}
        g = {"w": np.array([0.5, 0.0])}
        Adadelta(lr=1.0, rho=0.9, eps=1e-6).step(theta, g)
        sq = 0.1 * 0.25
        expected = 1.0 - np.sqrt(1e-6) / np.sqrt(sq + 1e-6) * 0.5
        assert theta["w"][0] == pytest.approx(expected, rel=1e-12)
        assert theta["w"][1] == -2.0

    def test_decoupled_weight_decay(self):
        theta = {"w": np.array([2.0])}
        Adadelta(lr=0.5, weight_decay=0.1).step(theta, {"w": np.zeros(1)})
        assert theta["w"][0] == pytest.approx(2.0 * (1 - 0.05))

    def test_zero_lr_is_identity(self):
        theta = {"w": np.array([1.0, 2.0])}
        opt = Adadelta(lr=0.0, weight_decay=0.5)
        for _ in range(5):
            opt.step(theta, {"w": np.array([3.0, -1.0])})
        np.testing.assert_array_equal(theta["w"], [1.0, 2.0])


class TestTrain:
    def test_zero_lr_leaves_parameters(self, data):
        graphs, y_cat, y_cont, lc = data
        m = small_model()
        before = {k: v.copy() for k, v in m.params.items()}
        train(graphs, y_cat, y_cont, m, TrainConfig(lr=0.0, epochs=3, batch_size=4), lc)
        assert all(np.array_equal(before[k], m.params[k]) for k in before)

    def test_same_seed_same_history(self, data, tmp_path):
        graphs, y_cat, y_cont, lc = data
        tc = TrainConfig(lr=1.0, epochs=4, batch_size=5, seed=3)
        runs = []
        for i in range(2):
            m, hist, opt = train(graphs, y_cat, y_cont, small_model(1), tc, lc)
            save_checkpoint(m, tmp_path / f"{i}.json", opt)
            runs.append(hist)
        assert [r["train_loss"] for r in runs[0]] == [r["train_loss"] for r in runs[1]]
        assert (tmp_path / "0.json").read_bytes() == (tmp_path / "1.json").read_bytes()

    def test_loss_decreases(self, data):
        graphs, y_cat, y_cont, lc = data
        _, hist, _ = train(graphs, y_cat, y_cont, small_model(), TrainConfig(lr=1.0, epochs=40, batch_size=4), lc)
        assert hist[-1]["train_loss"] < 0.5 * hist[0]["train_loss"]

    def test_single_graph_overfits(self, data):
        graphs, y_cat, y_cont, lc = data
        _, hist, _ = train(graphs[:1], y_cat[:1], y_cont[:1], small_model(), TrainConfig(lr=1.0, epochs=200), lc)
        losses = [h["train_loss"] for h in hist]
        assert losses[-1] < losses[0] and losses[-1] < 0.1 * losses[0]

    def test_validation_columns(self, data):
        graphs, y_cat, y_cont, lc = data
        _, hist, _ = train(
            graphs[:8], y_cat[:8], y_cont[:8], small_model(), TrainConfig(lr=1.0, epochs=2), lc,
            val=(graphs[8:], y_cat[8:], y_cont[8:]),
        )
        assert set(hist[0]) == {"epoch", "train_loss", "val_loss", "val_mAP"}
        assert 0 <= hist[-1]["val_mAP"] <= 1 and np.isfinite(hist[-1]["val_loss"])

    def test_non_finite_loss_aborts(self, data):
        graphs, y_cat, y_cont, lc = data
        bad = y_cont.copy()
        bad[0, 0] = np.nan
        with pytest.raises(TrainingDiverged, match="epoch 1"):
            train(graphs, y_cat, bad, small_model(), TrainConfig(epochs=1, batch_size=len(graphs)), lc)

    def test_empty_training_set(self, data):
        with pytest.raises(ValueError):
            train([], np.zeros((0, 26)), np.zeros((0, 3)), small_model(), TrainConfig(), data[3])

    def test_bad_batch_size(self):
        with pytest.raises(ValueError):
            TrainConfig(batch_size=0)


class TestCheckpoint:
    def _trained(self, data):
        graphs, y_cat, y_cont, lc = data
        return train(graphs, y_cat, y_cont, small_model(), TrainConfig(lr=1.0, epochs=2, batch_size=4), lc)

    def test_round_trip_exact(self, data, tmp_path):
        m, _, opt = self._trained(data)
        save_checkpoint(m, tmp_path / "c.json", opt, meta={"seed": 0})
        back, opt2 = load_checkpoint(tmp_path / "c.json", with_optimizer=True)
        assert back.config == m.config
        for store, other in ((m.params, back.params), (m.buffers, back.buffers)):
            assert set(store) == set(other)
            assert all(np.array_equal(store[k], other[k]) for k in store)
        for name, slots in opt.state.items():
            for slot, arr in slots.items():
                np.testing.assert_array_equal(opt2.state[name][slot], arr)
        assert opt2.lr == opt.lr and opt2.weight_decay == opt.weight_decay

    def test_resumed_training_matches_continuous(self, data, tmp_path):
        graphs, y_cat, y_cont, lc = data
        tc = TrainConfig(lr=1.0, epochs=2, batch_size=4, seed=9)
        m, _, opt = train(graphs, y_cat, y_cont, small_model(), tc, lc)
        save_checkpoint(m, tmp_path / "c.json", opt)
        m2, opt2 = load_checkpoint(tmp_path / "c.json", with_optimizer=True)
        train(graphs, y_cat, y_cont, m, tc, lc, optimizer=opt)
        train(graphs, y_cat, y_cont, m2, tc, lc, optimizer=opt2)
        assert all(np.array_equal(m.params[k], m2.params[k]) for k in m.params)

    def test_truncated(self, data, tmp_path):
        m, _, _ = self._trained(data)
        save_checkpoint(m, tmp_path / "c.json")
        text = (tmp_path / "c.json").read_text()
        (tmp_path / "c.json").write_text(text[: len(text) // 3])
        with pytest.raises(CheckpointError):
            load_checkpoint(tmp_path / "c.json")

    def test_hidden_mismatch(self, tmp_path):
        save_checkpoint(GinModel.initialize(0, hidden=32), tmp_path / "c.json")
        with pytest.raises(CheckpointError, match="hidden"):
            load_checkpoint(tmp_path / "c.json", expected_dims={"hidden": 64})

    def test_tensor_shape_inconsistent_with_dims(self, tmp_path):
        save_checkpoint(GinModel.initialize(0, hidden=32), tmp_path / "c.json")
        d = json.loads((tmp_path / "c.json").read_text())
        d["dims"]["hidden"] = 64
        (tmp_path / "c.json").write_text(json.dumps(d))
        with pytest.raises(CheckpointError, match="shape"):
            load_checkpoint(tmp_path / "c.json")

    def test_unknown_version(self, tmp_path):
        save_checkpoint(GinModel.initialize(0), tmp_path / "c.json")
        d = json.loads((tmp_path / "c.json").read_text())
        d["version"] = 7
        (tmp_path / "c.json").write_text(json.dumps(d))
        with pytest.raises(CheckpointError, match="version"):
            load_checkpoint(tmp_path / "c.json")
