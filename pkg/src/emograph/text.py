"""Caption loading and normalization into valid-word sequences."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from sklearn.base import BaseEstimator, TransformerMixin

from .constants import N_EMOTIONS, N_VAD, data_path

_SPLIT_RE = re.compile(r"[^A-Za-z]+")


class CaptionFormatError(ValueError):
    """A caption file line could not be parsed."""


class CaptionDomainError(ValueError):
    """A caption record is well-formed but holds out-of-range values."""


@dataclass(frozen=True)
class Caption:
    id: str
    text: str
    labels: frozenset = frozenset()
    vad: tuple = (0.5, 0.5, 0.5)

    def __post_init__(self):
        labels = frozenset(int(i) for i in self.labels)
        bad = [i for i in labels if not 0 <= i < N_EMOTIONS]
        if bad:
            raise CaptionDomainError(f"caption {self.id!r}: label index out of range {sorted(bad)}")
        vad = tuple(float(v) for v in self.vad)
        if len(vad) != N_VAD or not all(0.0 <= v <= 1.0 for v in vad):
            raise CaptionDomainError(f"caption {self.id!r}: vad must be 3 values in [0, 1], got {vad}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "vad", vad)


@dataclass(frozen=True)
class NormalizedCaption:
    id: str
    valid_words: tuple
    labels: frozenset = frozenset()
    vad: tuple = (0.5, 0.5, 0.5)

    @property
    def is_empty(self):
        return len(self.valid_words) == 0

    def to_dict(self):
        return {
            "id": self.id,
            "valid_words": list(self.valid_words),
            "labels": sorted(self.labels),
            "vad": list(self.vad),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["id"], tuple(d["valid_words"]), frozenset(d["labels"]), tuple(d["vad"]))


def _read_word_list(path):
    with open(path, encoding="utf-8") as f:
        return {w.strip().lower() for w in f if w.strip()}


def _read_lemmas(path):
    table = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[1].strip():
                raise CaptionFormatError(f"{path}:{lineno}: expected 'surface<TAB>lemma'")
            table[parts[0].strip().lower()] = parts[1].strip().lower()
    return table


@dataclass
class NormalizationConfig:
    stopword_list: set = field(default_factory=set)
    banned_nouns: set = field(default_factory=set)
    lemma_table: dict = field(default_factory=dict)

    def __post_init__(self):
        self.stopword_list = {w.lower() for w in self.stopword_list}
        self.banned_nouns = {w.lower() for w in self.banned_nouns}
        if any(not v for v in self.lemma_table.values()):
            raise ValueError("lemma_table values must be non-empty")

    @classmethod
    def from_files(cls, stopwords=None, banned_nouns=None, lemmas=None):
        """Load lists from disk; any path left as None falls back to the bundled asset."""
        return cls(
            _read_word_list(stopwords or data_path("stopwords.txt")),
            _read_word_list(banned_nouns or data_path("banned_nouns.txt")),
            _read_lemmas(lemmas or data_path("lemmas.tsv")),
        )

    @classmethod
    def default(cls):
        return cls.from_files()


def load_captions(path, vad_scale=1.0):
    """Read a caption-jsonl file.

    Each non-blank line must hold ``id``, ``caption``, ``labels`` and ``vad``.
    ``vad_scale`` divides raw VAD annotations (10 for EMOTIC's 1-10 scale).
    """
    captions = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                cid, text, labels, vad = rec["id"], rec["caption"], rec["labels"], rec["vad"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise CaptionFormatError(f"{path}:{lineno}: malformed caption record ({exc})") from None
            if len(set(labels)) != len(labels):
                raise CaptionDomainError(f"{path}:{lineno}: duplicate label indices {labels}")
            try:
                captions.append(Caption(str(cid), text, labels, [v / vad_scale for v in vad]))
            except CaptionDomainError as exc:
                raise CaptionDomainError(f"{path}:{lineno}: {exc}") from None
    return captions


def tokenize(text):
    """Split on anything non-alphabetic and lowercase: ``"A man, sitting."`` -> ``["a", "man", "sitting"]``."""
    return [t.lower() for t in _SPLIT_RE.split(text) if t]


def normalize_tokens(tokens, cfg):
    out = []
    blocked = cfg.stopword_list | cfg.banned_nouns
    for tok in tokens:
        if tok in blocked:
            continue
        lemma = cfg.lemma_table.get(tok, tok)
        # lemmas are re-checked so that e.g. a plural never sneaks a banned noun back in
        if lemma in blocked:
            continue
        out.append(lemma)
    return out


def normalize(caption, cfg):
    """Reduce a caption to its valid words (stop words, banned nouns removed; lemmatized)."""
    return NormalizedCaption(
        caption.id,
        tuple(normalize_tokens(tokenize(caption.text), cfg)),
        caption.labels,
        caption.vad,
    )


def save_normalized(corpus, path, meta=None):
    payload = {"meta": meta or {}, "captions": [nc.to_dict() for nc in corpus]}
    Path(path).write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")


def load_normalized(path):
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return [NormalizedCaption.from_dict(d) for d in payload["captions"]], payload.get("meta", {})


class CaptionNormalizer(TransformerMixin, BaseEstimator):
    """Stateless transformer mapping :class:`Caption` objects (or raw strings) to valid words.

    Parameters
    ----------
    stopwords, banned_nouns, lemmas : path or None
        Word-list files; ``None`` uses the bundled defaults.
    """

    def __init__(self, stopwords=None, banned_nouns=None, lemmas=None):
        self.stopwords = stopwords
        self.banned_nouns = banned_nouns
        self.lemmas = lemmas

    def fit(self, X=None, y=None):
        self.config_ = NormalizationConfig.from_files(self.stopwords, self.banned_nouns, self.lemmas)
        return self

    def transform(self, X):
        if not hasattr(self, "config_"):
            self.fit()
        out = []
        for i, c in enumerate(X):
            if isinstance(c, str):
                c = Caption(str(i), c)
            out.append(normalize(c, self.config_))
        return out
