"""Sentic lexicon, synonym table and word embeddings backed by local text files."""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass

import numpy as np

from .constants import DEFAULT_SEED, EMBED_DIM, N_MOODS, N_RELATED, data_path

FALLBACK_RANGE = 0.01


class LexiconFormatError(ValueError):
    pass


@dataclass(frozen=True)
class LexiconEntry:
    concept: str
    mood_tags: tuple
    pleasantness: float
    polarity: float
    related: tuple

    def __post_init__(self):
        if len(self.mood_tags) != N_MOODS:
            raise ValueError(f"{self.concept}: expected {N_MOODS} mood tags, got {len(self.mood_tags)}")
        if len(self.related) != N_RELATED:
            raise ValueError(f"{self.concept}: expected {N_RELATED} related concepts, got {len(self.related)}")
        for name in ("pleasantness", "polarity"):
            v = getattr(self, name)
            if not -1.0 <= v <= 1.0:
                raise ValueError(f"{self.concept}: {name} {v} outside [-1, 1]")


class EmbeddingTable:
    """Word vectors with deterministic random fallbacks for unknown words.

    A fallback is drawn uniformly from ``[-0.01, 0.01]^dim`` with a generator
    seeded by ``(rng_seed, sha256(word))``, so it does not depend on query
    order, process or machine. Generated vectors are cached.
    """

    def __init__(self, vectors=None, rng_seed=DEFAULT_SEED, dim=EMBED_DIM):
        self.vectors = dict(vectors or {})
        self.rng_seed = rng_seed
        self.dim = dim
        self.cache = {}
        self._lock = threading.Lock()
        for w, v in self.vectors.items():
            if np.shape(v) != (dim,):
                raise ValueError(f"embedding for {w!r} has shape {np.shape(v)}, expected ({dim},)")

    def __contains__(self, word):
        return word in self.vectors

    def __len__(self):
        return len(self.vectors)

    def _fallback(self, word):
        digest = hashlib.sha256(word.encode("utf-8")).digest()
        key = int.from_bytes(digest[:8], "little")
        rng = np.random.default_rng([self.rng_seed, key])
        return rng.uniform(-FALLBACK_RANGE, FALLBACK_RANGE, self.dim)

    def get(self, word):
        v = self.vectors.get(word)
        if v is not None:
            return v
        v = self.cache.get(word)
        if v is not None:
            return v
        with self._lock:
            return self.cache.setdefault(word, self._fallback(word))

    def save_cache(self, path):
        """Persist generated fallbacks in the embeddings text layout."""
        with open(path, "w", encoding="utf-8") as f:
            for w in sorted(self.cache):
                f.write(w + " " + " ".join(repr(float(x)) for x in self.cache[w]) + "\n")

    def __getstate__(self):
        state = self.__dict__.copy()
        del state["_lock"]
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._lock = threading.Lock()


def embedding(word, emb):
    return emb.get(word)


def load_lexicon(path):
    """Parse ``concept,mood1,mood2,pleasantness,polarity,rel1;rel2;rel3;rel4;rel5`` rows."""
    entries = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line or (lineno == 1 and line.lower().startswith("concept,")):
                continue
            cols = line.split(",")
            if len(cols) != 6:
                raise LexiconFormatError(f"{path}:{lineno}: expected 6 columns, got {len(cols)}")
            concept, m1, m2, pl, po, rel = (c.strip() for c in cols)
            try:
                entry = LexiconEntry(
                    concept.lower(),
                    (m1.lower(), m2.lower()),
                    float(pl),
                    float(po),
                    tuple(r.strip().lower() for r in rel.split(";")),
                )
            except ValueError as exc:
                raise LexiconFormatError(f"{path}:{lineno}: {exc}") from None
            entries[entry.concept] = entry
    return entries


def load_synonyms(path):
    """Parse ``word,syn1;syn2;...`` rows; duplicate candidates are dropped, order kept."""
    table = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            cols = line.split(",")
            if len(cols) != 2:
                raise LexiconFormatError(f"{path}:{lineno}: expected 'word,syn1;syn2;...'")
            cands = [c.strip().lower() for c in cols[1].split(";") if c.strip()]
            table[cols[0].strip().lower()] = list(dict.fromkeys(cands))
    return table


def load_embeddings(path, dim=EMBED_DIM, rng_seed=DEFAULT_SEED):
    vectors = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != dim + 1:
                raise LexiconFormatError(f"{path}:{lineno}: expected {dim} components, got {len(parts) - 1}")
            try:
                vectors[parts[0]] = np.array([float(x) for x in parts[1:]])
            except ValueError:
                raise LexiconFormatError(f"{path}:{lineno}: non-numeric embedding component") from None
    return EmbeddingTable(vectors, rng_seed=rng_seed, dim=dim)


def _cosine(a, b):
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(a @ b) / (na * nb)


def rank_synonyms(word, candidates, emb):
    """Candidates ordered by descending cosine similarity to ``word``, ties lexicographic."""
    q = emb.get(word)
    return sorted(candidates, key=lambda c: (-_cosine(q, emb.get(c)), c))


def lookup_sentic(word, lex, syn, emb):
    """Sentic entry for ``word``, else for its most similar synonym in ``lex``; ``None`` when dropped."""
    entry = lex.get(word)
    if entry is not None:
        return entry
    for cand in rank_synonyms(word, syn.get(word, ()), emb):
        entry = lex.get(cand)
        if entry is not None:
            return entry
    return None


@dataclass
class Lexicon:
    """The three read-mostly stores consulted during graph construction."""

    entries: dict
    synonyms: dict
    embeddings: EmbeddingTable

    def lookup(self, word):
        return lookup_sentic(word, self.entries, self.synonyms, self.embeddings)

    def embed(self, word):
        return self.embeddings.get(word)

    @classmethod
    def from_files(cls, lexicon=None, synonyms=None, embeddings=None, rng_seed=DEFAULT_SEED):
        return cls(
            load_lexicon(lexicon or data_path("senticnet.csv")),
            load_synonyms(synonyms or data_path("synonyms.csv")),
            load_embeddings(embeddings or data_path("embeddings.txt"), rng_seed=rng_seed),
        )

    @classmethod
    def bundled(cls, rng_seed=DEFAULT_SEED):
        return cls.from_files(rng_seed=rng_seed)
