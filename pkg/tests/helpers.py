"""Shared builders for tests: a collision-free toy lexicon and synthetic corpora."""

import numpy as np

from emograph.constants import EMOTIONS, data_path
from emograph.lexicon import EmbeddingTable, LexiconEntry, Lexicon, load_lexicon
from emograph.text import NormalizedCaption

LABEL = {name: i for i, name in enumerate(EMOTIONS)}


def toy_lexicon(words=("beach",), seed=0):
    """Lexicon in which every word, mood, related and second-level label is distinct."""
    entries = {}
    for w in words:
        related = tuple(f"{w}rel{i}" for i in range(5))
        entries[w] = LexiconEntry(w, (f"{w}mooda", f"{w}moodb"), 0.5, -0.25, related)
        for j, r in enumerate(related):
            entries[r] = LexiconEntry(r, ("x", "y"), 0.1, 0.1 * (j + 1), tuple(f"{r}sub{i}" for i in range(5)))
    rng = np.random.default_rng(seed)
    vectors = {w: rng.normal(size=50) for w in words}
    return Lexicon(entries, {}, EmbeddingTable(vectors, rng_seed=seed))


THEMES = {
    "Peace": "beach ocean surfboard wave sand sea sun coast shore surf swim boat water sunset island".split(),
    "Happiness": "party cake birthday balloon gift dance music celebration wedding dress friend laugh".split(),
    "Sadness": "hospital rain storm umbrella injury bed sick doctor funeral grave tear cry lonely".split(),
    "Fear": "fire smoke fight gun police accident crash flood knife scream chase wolf attack".split(),
}


def separable_corpus(n, seed, min_words=2, max_words=5):
    """``n`` captions cycling through four themes; a caption's words all come from its label's theme."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        t = i % len(THEMES)
        emotion = list(THEMES)[t]
        k = int(rng.integers(min_words, max_words + 1))
        words = tuple(str(w) for w in rng.choice(THEMES[emotion], k, replace=False))
        vad = (0.2 + 0.2 * t, 0.5, 0.4 + 0.1 * t)
        out.append(NormalizedCaption(f"syn{i:04d}", words, frozenset([LABEL[emotion]]), vad))
    return out


def random_corpus(n, seed, max_words=3):
    """Captions of 1..max_words random bundled concepts with random labels."""
    concepts = list(load_lexicon(data_path("senticnet.csv")))
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        k = int(rng.integers(1, max_words + 1))
        words = tuple(str(w) for w in rng.choice(concepts, k, replace=False))
        labels = frozenset(int(x) for x in rng.choice(len(EMOTIONS), int(rng.integers(1, 4)), replace=False))
        out.append(NormalizedCaption(f"rnd{i:04d}", words, labels, tuple(rng.uniform(0, 1, 3))))
    return out


def targets(corpus):
    y_cat = np.zeros((len(corpus), len(EMOTIONS)))
    for i, c in enumerate(corpus):
        y_cat[i, sorted(c.labels)] = 1.0
    return y_cat, np.array([c.vad for c in corpus])


def _activation_pattern(batch, model, mode):
    from emograph.gin.model import forward_batch

    _, _, cache = forward_batch(batch, model, mode, keep_cache=True)
    return [np.concatenate([(cache[k]["z1"] > 0).ravel(), (cache[k]["y"] > 0).ravel()]) for k in range(1, model.n_layers + 1)]


def gradient_check(model, graphs, y_cat, y_cont, loss_cfg, mode="eval", h=1e-4, per_group=6, seed=0, max_tries=60):
    """Worst relative error per parameter group between analytic and central-difference gradients.

    Entries whose ``+-h`` perturbation flips a ReLU pattern are resampled: the loss is not
    differentiable across such a kink, so a finite difference there measures nothing.
    """
    from emograph.gin.loss import combined_loss
    from emograph.gin.model import GraphBatch, backward, forward_batch

    batch = GraphBatch(graphs)

    def objective(m):
        # train-mode batch norm mutates running stats, so evaluate on a throwaway copy
        cat, cont, _ = forward_batch(batch, m.copy() if mode == "train" else m, mode)
        return combined_loss(cat, cont, y_cat, y_cont, loss_cfg)[0]

    work = model.copy()
    cat, cont, cache = forward_batch(batch, work, mode, keep_cache=True)
    _, d_cat, d_cont = combined_loss(cat, cont, y_cat, y_cont, loss_cfg)
    analytic = backward(cache, work, d_cat, d_cont)

    base = _activation_pattern(batch, model.copy(), mode)
    rng = np.random.default_rng(seed)
    worst = {}
    for name, value in model.params.items():
        probe = model.copy()
        errors, tries = [], 0
        while len(errors) < min(per_group, value.size) and tries < max_tries:
            tries += 1
            idx = np.unravel_index(int(rng.integers(value.size)), value.shape)
            orig = probe.params[name][idx]
            losses, smooth = [], True
            for sign in (1, -1):
                probe.params[name][idx] = orig + sign * h
                pattern = _activation_pattern(batch, probe.copy(), mode)
                smooth &= all(np.array_equal(a, b) for a, b in zip(pattern, base))
                losses.append(objective(probe))
            probe.params[name][idx] = orig
            if not smooth:
                continue
            fd = (losses[0] - losses[1]) / (2 * h)
            a = analytic[name][idx]
            scale = max(abs(a), abs(fd))
            errors.append(0.0 if scale < 1e-9 else abs(a - fd) / scale)
        worst[name] = max(errors) if errors else float("nan")
    return worst


def brute_force_ap(scores, labels):
    """Average precision by direct enumeration, without sorting.

    The rank of sample ``i`` counts every sample scored higher, plus equal scores
    that come earlier in the input; precision at that rank is then counted by hand.
    """
    n = len(scores)

    def rank(i):
        return 1 + sum(1 for j in range(n) if scores[j] > scores[i] or (scores[j] == scores[i] and j < i))

    ranks = [rank(i) for i in range(n)]
    positives = [i for i in range(n) if labels[i]]
    total = 0.0
    for i in positives:
        hits_above = sum(1 for j in positives if ranks[j] <= ranks[i])
        total += hits_above / ranks[i]
    return total / len(positives)
