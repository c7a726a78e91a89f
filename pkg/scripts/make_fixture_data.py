#!/usr/bin/env python3
"""Regenerate the miniature lexicon, embeddings, synonyms, lemmas and fixture captions.

The bundled files under src/emograph/data/ are the committed output of this
script; rerunning it with the default seed reproduces them byte for byte.

    python scripts/make_fixture_data.py [--out src/emograph/data] [--seed 7]
"""

import argparse
import json
from pathlib import Path

import numpy as np

from emograph.constants import EMBED_DIM, EMOTIONS, emotion_key

THEMES = {
    "seaside": dict(
        moods=("joy", "serenity"),
        pleasantness=0.7,
        polarity=0.65,
        labels=("Peace", "Happiness", "Pleasure"),
        vad=(0.75, 0.45, 0.6),
        words="beach ocean surfboard wave sand sea sun coast shore surf swim boat water "
        "sunset island vacation summer sail fish shell sunny",
    ),
    "party": dict(
        moods=("joy", "ecstasy"),
        pleasantness=0.8,
        polarity=0.75,
        labels=("Happiness", "Excitement", "Affection"),
        vad=(0.85, 0.75, 0.6),
        words="party cake birthday balloon gift dance music celebration wedding dress friend "
        "laugh smile song guitar stage crowd concert festival wine candle",
    ),
    "nature": dict(
        moods=("serenity", "contentment"),
        pleasantness=0.6,
        polarity=0.55,
        labels=("Peace", "Engagement"),
        vad=(0.7, 0.3, 0.55),
        words="park grass tree flower garden field mountain lake forest river bird sky cloud "
        "meadow hill trail walk picnic bench sunshine dog horse",
    ),
    "sport": dict(
        moods=("enthusiasm", "interest"),
        pleasantness=0.5,
        polarity=0.45,
        labels=("Excitement", "Engagement", "Confidence"),
        vad=(0.7, 0.8, 0.7),
        words="ball game baseball bat frisbee kite bike ski snow race run team soccer tennis "
        "racket skateboard jump player goal stadium ride",
    ),
    "urban": dict(
        moods=("interest", "calmness"),
        pleasantness=0.1,
        polarity=0.05,
        labels=("Engagement", "Anticipation"),
        vad=(0.55, 0.5, 0.55),
        words="street car city building road traffic office desk computer phone work meeting "
        "bus train station sidewalk paper book laptop read sit",
    ),
    "hardship": dict(
        moods=("sadness", "grief"),
        pleasantness=-0.6,
        polarity=-0.55,
        labels=("Sadness", "Suffering", "Fatigue"),
        vad=(0.2, 0.3, 0.3),
        words="hospital rain storm umbrella injury bed sick doctor funeral grave tear cry "
        "lonely dark night cold hunger debris ruin war",
    ),
    "danger": dict(
        moods=("fear", "anger"),
        pleasantness=-0.7,
        polarity=-0.7,
        labels=("Fear", "Anger", "Disquietment"),
        vad=(0.15, 0.85, 0.35),
        words="fire smoke fight gun police accident crash flood knife scream chase wolf attack "
        "danger protest riot shout blood threat escape",
    ),
}

# word present only through a synonym (absent from the lexicon itself)
SYNONYMS = {
    "automobile": ["vehicle", "car", "machine"],
    "seashore": ["shore", "coast", "beach"],
    "puppy": ["pup", "dog"],
    "blaze": ["flame", "fire"],
    "infirmary": ["clinic", "hospital"],
    "celebrate": ["party", "celebration"],
    "bicycle": ["cycle", "bike"],
    "tempest": ["storm", "gale"],
    "shoreline": ["coast", "shore"],
    "soaked": ["wet", "rain"],
    "grin": ["smile", "laugh"],
    "woods": ["forest", "wood"],
}

LEMMAS = {
    "sitting": "sit", "sits": "sit", "riding": "ride", "rides": "ride", "horses": "horse",
    "waves": "wave", "surfing": "surf", "walking": "walk", "walks": "walk", "flowers": "flower",
    "trees": "tree", "cars": "car", "dogs": "dog", "balloons": "balloon", "running": "run",
    "runs": "run", "crying": "cry", "cries": "cry", "smiling": "smile", "smiles": "smile",
    "dancing": "dance", "streets": "street", "buildings": "building", "birds": "bird",
    "clouds": "cloud", "mountains": "mountain", "boats": "boat", "skis": "ski", "skiing": "ski",
    "umbrellas": "umbrella", "friends": "friend", "candles": "candle", "gifts": "gift",
    "books": "book", "reading": "read", "swimming": "swim", "sailing": "sail",
    "laughing": "laugh", "fighting": "fight", "screaming": "scream", "shouting": "shout",
    "chasing": "chase", "escaping": "escape", "jumping": "jump", "players": "player",
    "kites": "kite", "bikes": "bike", "racing": "race", "working": "work", "tears": "tear",
    "storms": "storm", "fires": "fire", "buses": "bus", "trains": "train", "cakes": "cake",
    "songs": "song", "protesters": "protest", "ruins": "ruin", "guns": "gun",
    "fish": "fish", "sheep": "sheep",
}

CAPTION_TEMPLATES = (
    "{subj} {verb} a {n1} near the {n2}",
    "{subj} {verb} on the {n1} with a {n2}",
    "a {n1} and a {n2} in the {n3}",
    "{subj} {verb} in front of the {n1}",
    "{subj} standing by a {n1} and {n2} {n3}",
)
SUBJECTS = ("a man", "a woman", "two people", "a young girl", "a boy", "two women")
VERBS = {
    "seaside": ("surfing", "sitting", "swimming", "sailing"),
    "party": ("dancing", "smiling", "laughing", "sitting"),
    "nature": ("walking", "sitting", "riding", "smiling"),
    "sport": ("running", "jumping", "riding", "racing"),
    "urban": ("walking", "sitting", "working", "reading"),
    "hardship": ("crying", "sitting", "walking", "lying"),
    "danger": ("running", "screaming", "fighting", "escaping"),
}


def _theme_words(theme):
    return THEMES[theme]["words"].split()


def make_lexicon(rng):
    rows = []
    for theme, cfg in THEMES.items():
        words = _theme_words(theme)
        for i, w in enumerate(words):
            others = [o for o in words if o != w]
            related = list(rng.choice(others, size=5, replace=False))
            pl = float(np.clip(cfg["pleasantness"] + rng.normal(0, 0.12), -1, 1))
            po = float(np.clip(cfg["polarity"] + rng.normal(0, 0.12), -1, 1))
            moods = list(cfg["moods"])
            if rng.random() < 0.25:
                moods = moods[::-1]
            rows.append([w, moods[0], moods[1], round(pl, 3), round(po, 3), related])
    for r in rows:
        if r[0] == "beach":
            r[1:] = ["joy", "serenity", 0.81, 0.74, ["sand", "sea", "sun", "coast", "shore"]]
    return rows


def make_embeddings(rng, lexicon_rows):
    theme_centroid = {t: rng.normal(0, 0.35, EMBED_DIM) for t in THEMES}
    vectors = {}
    for theme in THEMES:
        for w in _theme_words(theme):
            vectors[w] = theme_centroid[theme] + rng.normal(0, 0.15, EMBED_DIM)
    moods = sorted({r[1] for r in lexicon_rows} | {r[2] for r in lexicon_rows})
    for m in moods:
        vectors[m] = rng.normal(0, 0.3, EMBED_DIM)
    for e in EMOTIONS:
        vectors[emotion_key(e)] = rng.normal(0, 0.3, EMBED_DIM)
    # synonym-only words sit close to their intended target
    for word, cands in SYNONYMS.items():
        target = next(c for c in cands if c in vectors)
        vectors[word] = vectors[target] + rng.normal(0, 0.05, EMBED_DIM)
        for c in cands:
            if c not in vectors:
                vectors[c] = rng.normal(0, 0.35, EMBED_DIM)
    # "vehicle" is deliberately left without an embedding to exercise fallbacks
    vectors.pop("vehicle", None)
    return vectors


def make_captions(rng, n=40):
    themes = list(THEMES)
    label_index = {e: i for i, e in enumerate(EMOTIONS)}
    out = []
    for i in range(n - 2):
        theme = themes[i % len(themes)]
        cfg = THEMES[theme]
        words = _theme_words(theme)
        n1, n2, n3 = rng.choice(words, size=3, replace=False)
        text = CAPTION_TEMPLATES[int(rng.integers(len(CAPTION_TEMPLATES)))].format(
            subj=SUBJECTS[int(rng.integers(len(SUBJECTS)))],
            verb=VERBS[theme][int(rng.integers(4))],
            n1=n1,
            n2=n2,
            n3=n3,
        )
        k = 1 + int(rng.integers(2))
        labels = sorted(label_index[x] for x in cfg["labels"][:k])
        vad = [round(float(np.clip(v + rng.normal(0, 0.05), 0, 1)), 2) for v in cfg["vad"]]
        out.append(dict(id=f"fx{i:03d}", caption=text.capitalize(), labels=labels, vad=vad))
    out.append(dict(id=f"fx{n - 2:03d}", caption="A man and a woman", labels=[label_index["Peace"]],
                    vad=[0.5, 0.5, 0.5]))
    out.append(dict(id=f"fx{n - 1:03d}", caption="A puppy beside an automobile on the seashore",
                    labels=[label_index["Happiness"]], vad=[0.7, 0.5, 0.5]))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parents[1] / "src/emograph/data")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)

    lex = make_lexicon(rng)
    with open(out / "senticnet.csv", "w") as f:
        f.write("concept,mood1,mood2,pleasantness,polarity,related\n")
        for w, m1, m2, pl, po, rel in lex:
            f.write(f"{w},{m1},{m2},{pl},{po},{';'.join(rel)}\n")

    with open(out / "synonyms.csv", "w") as f:
        for w, cands in SYNONYMS.items():
            f.write(f"{w},{';'.join(cands)}\n")

    with open(out / "lemmas.tsv", "w") as f:
        for surface, lemma in sorted(LEMMAS.items()):
            if surface != lemma:
                f.write(f"{surface}\t{lemma}\n")

    vectors = make_embeddings(rng, lex)
    with open(out / "embeddings.txt", "w") as f:
        for w in sorted(vectors):
            f.write(w + " " + " ".join(f"{x:.5f}" for x in vectors[w]) + "\n")

    with open(out / "fixture_captions.jsonl", "w") as f:
        for rec in make_captions(rng):
            f.write(json.dumps(rec) + "\n")


if __name__ == "__main__":
    main()
