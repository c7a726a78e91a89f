"""Command line front end: one subcommand per pipeline stage, handing off through files in ``--out``.

    emograph preprocess --captions captions.jsonl --out run/
    emograph mine --out run/
    emograph build-graphs --out run/
    emograph train --out run/ --epochs 30
    emograph eval --out run/
    emograph infer --out run/ --text "a man surfing a wave on a sunny beach"
    emograph bench --out run/

Settings come from ``--config`` (flat ``key=value`` lines) and are overridden
by the matching ``--key`` flags. Exit codes: 0 ok, 2 usage, 3 input error,
4 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import logging
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from . import cooccurrence as cooc
from .constants import DEFAULT_SEED, DEFAULT_WINDOW, EMOTIONS
from .evaluation import bench_inference, evaluate
from .gin.checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .gin.loss import LossConfig
from .gin.model import GinModel
from .gin.train import TrainConfig, TrainingDiverged, train
from .graph import GraphFormatError, build_corpus_graphs, load_corpus_graphs
from .lexicon import Lexicon, LexiconFormatError
from .pipeline import Predictor
from .text import (
    Caption,
    CaptionDomainError,
    CaptionFormatError,
    NormalizationConfig,
    load_captions,
    load_normalized,
    normalize,
    save_normalized,
)
from .validation import targets_from_captions

log = logging.getLogger("emograph")

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_RUNTIME = 0, 2, 3, 4

NORMALIZED = "normalized.json"
COOCCUR = "cooccur.json"
GRAPHS = "graphs"
CHECKPOINT = "checkpoint.json"
TRAIN_LOG = "train_log.csv"
EVAL_REPORT = "eval_report.json"
LATENCY_REPORT = "latency_report.json"
PREDICTIONS = "predictions.jsonl"

# settings folded into each stage's config hash, cumulatively along the chain;
# input paths of the first stage are left out because the artifact itself carries the data
STAGE_KEYS = {
    "preprocess": ("vad_scale", "stopwords", "banned_nouns", "lemmas"),
    "mine": ("window",),
    "build-graphs": ("lexicon", "synonyms", "embeddings", "seed"),
    "train": (
        "hidden", "d_read", "n_layers", "pooling", "readout_skip_h0", "epochs", "batch_size", "lr",
        "weight_decay", "rho", "adadelta_eps", "lambda_cat", "lambda_cont", "c", "val_fraction",
    ),
}
_CHAIN = list(STAGE_KEYS)


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    captions: str = ""
    eval_captions: str = ""
    vad_scale: float = 1.0
    stopwords: str = ""
    banned_nouns: str = ""
    lemmas: str = ""
    lexicon: str = ""
    synonyms: str = ""
    embeddings: str = ""
    window: int = DEFAULT_WINDOW
    seed: int = DEFAULT_SEED
    hidden: int = 64
    d_read: int = 64
    n_layers: int = 5
    pooling: str = "avg"
    readout_skip_h0: bool = False
    epochs: int = 30
    batch_size: int = 16
    lr: float = 0.001
    weight_decay: float = 0.0004
    rho: float = 0.9
    adadelta_eps: float = 1e-6
    lambda_cat: float = 1.0
    lambda_cont: float = 1.0
    c: float = 1.2
    val_fraction: float = 0.0
    warmup: int = 1
    reps: int = 3
    top_k: int = 3
    threads: int = 1
    out: str = "run"

    @classmethod
    def from_sources(cls, config_file=None, overrides=None):
        values = {}
        if config_file:
            path = Path(config_file)
            if not path.exists():
                raise InputError(f"config file not found: {path}")
            values.update(parse_config_text(path.read_text(encoding="utf-8"), str(path)))
        values.update({k: v for k, v in (overrides or {}).items() if v is not None})
        kinds = {f.name: f.type for f in fields(cls)}
        unknown = set(values) - set(kinds)
        if unknown:
            raise InputError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**{k: _coerce(v, kinds[k], k) for k, v in values.items()})

    def hash(self, stage="train"):
        """Hash of every setting that shapes ``stage``'s artifact, upstream stages included."""
        upto = _CHAIN[: _CHAIN.index(stage) + 1] if stage in STAGE_KEYS else _CHAIN
        values = dataclasses.asdict(self)
        d = {k: values[k] for st in upto for k in STAGE_KEYS[st]}
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]

    def meta(self, stage):
        return {"tool_version": __version__, "seed": self.seed, "config_hash": self.hash(stage), "stage": stage}


def parse_config_text(text, source="<config>"):
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{source}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def _coerce(value, kind, key):
    if not isinstance(value, str):
        return value
    try:
        if kind in ("bool", bool):
            if value.lower() in ("1", "true", "yes", "on"):
                return True
            if value.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(value)
        if kind in ("int", int):
            return int(value)
        if kind in ("float", float):
            return float(value)
    except ValueError:
        raise InputError(f"config key {key!r}: cannot parse {value!r} as {kind}") from None
    return value


# ---------------------------------------------------------------- helpers


def _out(cfg):
    return Path(cfg.out)


def _require(path, stage):
    if not Path(path).exists():
        raise InputError(f"missing {Path(path).name}; run {stage} first")
    return Path(path)


def _check_meta(meta, cfg, name, force):
    if force or not meta:
        return
    expected = cfg.hash(meta.get("stage", "train"))
    if meta.get("config_hash") != expected:
        raise InputError(
            f"{name} was produced with config hash {meta.get('config_hash')}, current config gives "
            f"{expected}; rerun {meta.get('stage', 'that stage')} or pass --force"
        )


def _norm_config(cfg):
    return NormalizationConfig.from_files(cfg.stopwords or None, cfg.banned_nouns or None, cfg.lemmas or None)


def _lexicon(cfg):
    return Lexicon.from_files(cfg.lexicon or None, cfg.synonyms or None, cfg.embeddings or None, rng_seed=cfg.seed)


def _load_cooc(cfg, force):
    co = cooc.load(_require(_out(cfg) / COOCCUR, "mine"))
    _check_meta(co.meta, cfg, COOCCUR, force)
    return co


def _load_model(cfg, force):
    path = _require(_out(cfg) / CHECKPOINT, "train")
    model = load_checkpoint(path, expected_dims={"hidden": cfg.hidden, "d_read": cfg.d_read})
    meta = json.loads(path.read_text(encoding="utf-8")).get("meta", {})
    _check_meta(meta, cfg, CHECKPOINT, force)
    return model


def _read_captions(path, cfg):
    if not path:
        raise InputError("no caption file configured (set captions=...)")
    if not Path(path).exists():
        raise InputError(f"caption file not found: {path}")
    return load_captions(path, vad_scale=cfg.vad_scale)


def _write_json(path, payload):
    Path(path).write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")


# ---------------------------------------------------------------- stages


def cmd_preprocess(cfg, args):
    captions = _read_captions(cfg.captions, cfg)
    norm = _norm_config(cfg)
    corpus = [normalize(c, norm) for c in captions]
    out = _out(cfg)
    out.mkdir(parents=True, exist_ok=True)
    save_normalized(corpus, out / NORMALIZED, cfg.meta("preprocess"))
    empty = sum(nc.is_empty for nc in corpus)
    print(f"preprocess: {len(corpus)} captions, {empty} without valid words -> {out / NORMALIZED}")


def _load_corpus(cfg, force):
    corpus, meta = load_normalized(_require(_out(cfg) / NORMALIZED, "preprocess"))
    _check_meta(meta, cfg, NORMALIZED, force)
    return corpus


def cmd_mine(cfg, args):
    corpus = _load_corpus(cfg, args.force)
    if not corpus:
        raise InputError("normalized corpus is empty")
    co = cooc.mine(corpus, cfg.window)
    co.meta = cfg.meta("mine")
    cooc.save(co, _out(cfg) / COOCCUR)
    print(f"mine: {len(co.vocab)} words, window {co.window} -> {_out(cfg) / COOCCUR}")


def cmd_build_graphs(cfg, args):
    corpus = _load_corpus(cfg, args.force)
    co = _load_cooc(cfg, args.force)
    manifest = build_corpus_graphs(
        corpus, co, _lexicon(cfg), _out(cfg) / GRAPHS, threads=cfg.threads, meta=cfg.meta("build-graphs")
    )
    print(f"build-graphs: {len(manifest['built'])} graphs, {len(manifest['skipped'])} skipped -> {_out(cfg) / GRAPHS}")


def _split(n, fraction, seed):
    idx = np.random.default_rng(seed).permutation(n)
    n_val = int(round(n * fraction))
    return np.sort(idx[n_val:]), np.sort(idx[:n_val])


def cmd_train(cfg, args):
    corpus = {nc.id: nc for nc in _load_corpus(cfg, args.force)}
    co = _load_cooc(cfg, args.force)
    _require(_out(cfg) / GRAPHS / "manifest.json", "build-graphs")
    manifest, graphs = load_corpus_graphs(_out(cfg) / GRAPHS)
    _check_meta(manifest.get("meta"), cfg, "graph manifest", args.force)
    ids = [rec["caption_id"] for rec in manifest["built"]]
    if not ids:
        raise InputError("no graphs to train on")
    missing = [i for i in ids if i not in corpus]
    if missing:
        raise InputError(f"graphs for unknown caption ids: {missing[:3]}")
    gs = [graphs[i] for i in ids]
    y = targets_from_captions([corpus[i] for i in ids])
    tr, va = _split(len(ids), cfg.val_fraction, cfg.seed)
    model = GinModel.initialize(
        cfg.seed,
        input_dim=gs[0].x.shape[1],
        hidden=cfg.hidden,
        d_read=cfg.d_read,
        n_layers=cfg.n_layers,
        pooling=cfg.pooling,
        readout_skip_h0=cfg.readout_skip_h0,
    )
    tc = TrainConfig(cfg.batch_size, cfg.lr, cfg.weight_decay, cfg.epochs, cfg.seed, cfg.rho, cfg.adadelta_eps)
    lc = LossConfig(cfg.lambda_cat, cfg.lambda_cont, cfg.c, co.category_prior)
    val = ([gs[i] for i in va], y[va, :26], y[va, 26:]) if len(va) else None
    _, history, opt = train([gs[i] for i in tr], y[tr, :26], y[tr, 26:], model, tc, lc, val)
    save_checkpoint(model, _out(cfg) / CHECKPOINT, optimizer=opt, meta=cfg.meta("train"))
    with open(_out(cfg) / TRAIN_LOG, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=["epoch", "train_loss", "val_loss", "val_mAP"])
        w.writeheader()
        w.writerows(history)
    last = history[-1]["train_loss"] if history else float("nan")
    print(f"train: {len(tr)} graphs, {cfg.epochs} epochs, final train loss {last:.6f} -> {_out(cfg) / CHECKPOINT}")


def _predictor(cfg, args):
    model = _load_model(cfg, args.force)
    co = _load_cooc(cfg, args.force)
    return Predictor(co, _lexicon(cfg), model, _norm_config(cfg))


def cmd_eval(cfg, args):
    predictor = _predictor(cfg, args)
    captions = _read_captions(cfg.eval_captions or cfg.captions, cfg)
    if not captions:
        raise InputError("evaluation set is empty")
    preds = predictor.predict(captions, threads=cfg.threads)
    report = evaluate(preds, [c.labels for c in captions])
    _write_json(_out(cfg) / EVAL_REPORT, {**report.to_dict(), "meta": cfg.meta("eval")})
    print(report.table())


def _infer_inputs(args):
    if args.text:
        return [Caption(f"text{i}", t) for i, t in enumerate(args.text)]
    if args.input:
        path = Path(args.input)
        if not path.exists():
            raise InputError(f"input file not found: {path}")
        if path.suffix == ".jsonl":
            return load_captions(path)
        lines = [ln.strip() for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()]
        return [Caption(f"line{i}", t) for i, t in enumerate(lines)]
    raise InputError("infer needs --text or --input")


def cmd_infer(cfg, args):
    captions = _infer_inputs(args)
    predictor = _predictor(cfg, args)
    preds = predictor.predict(captions, threads=cfg.threads)
    path = Path(args.predictions) if args.predictions else _out(cfg) / PREDICTIONS
    rows = []
    for c, p in zip(captions, preds):
        top = np.argsort(-p.cat, kind="stable")[: cfg.top_k]
        rows.append(
            {
                "id": c.id,
                "caption": c.text,
                "scores": [float(s) for s in p.cat],
                "vad": [float(v) for v in p.cont],
                "top_k": [EMOTIONS[i] for i in top],
                "degenerate": p.degenerate,
                "meta": cfg.meta("infer"),
            }
        )
    text = "".join(json.dumps(r) + "\n" for r in rows)
    path.write_text(text, encoding="utf-8")
    sys.stdout.write(text)


def cmd_bench(cfg, args):
    predictor = _predictor(cfg, args)
    captions = _read_captions(cfg.eval_captions or cfg.captions, cfg)
    report = bench_inference(captions, predictor.predict_one, warmup=cfg.warmup, reps=cfg.reps)
    _write_json(_out(cfg) / LATENCY_REPORT, {**report.to_dict(), "meta": cfg.meta("bench")})
    print(report.table())


COMMANDS = {
    "preprocess": (cmd_preprocess, "normalize raw captions into valid words"),
    "mine": (cmd_mine, "mine word/emotion and word/word co-occurrences"),
    "build-graphs": (cmd_build_graphs, "build one context graph per caption"),
    "train": (cmd_train, "train the GIN classifier"),
    "eval": (cmd_eval, "score captions and report per-category AP and mAP"),
    "infer": (cmd_infer, "predict emotions for caption text"),
    "bench": (cmd_bench, "measure single-caption inference latency"),
}


def _common_flags(default):
    # subparsers get SUPPRESS so they do not clobber values given before the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=default, help="flat key=value settings file")
    common.add_argument(
        "--force", action="store_true", default=default if default is argparse.SUPPRESS else False,
        help="accept upstream artifacts built with another config",
    )
    common.add_argument("-v", "--verbose", action="store_true", default=default if default is argparse.SUPPRESS else False)
    for f in fields(RunConfig):
        flag = "--" + f.name.replace("_", "-")
        metavar = "BOOL" if f.type in ("bool", bool) else f.name.upper()
        common.add_argument(flag, dest=f.name, default=default, metavar=metavar)
    return common


def build_parser():
    ap = argparse.ArgumentParser(prog="emograph", description=__doc__.splitlines()[0], parents=[_common_flags(None)])
    common = _common_flags(argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, parents=[common])
        if name == "infer":
            p.add_argument("--text", action="append", help="caption text (repeatable)")
            p.add_argument("--input", help="caption-jsonl or one-caption-per-line text file")
            p.add_argument("--predictions", help="output path (default <out>/predictions.jsonl)")
    return ap


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    overrides = {f.name: getattr(args, f.name) for f in fields(RunConfig)}
    func = COMMANDS[args.command][0]
    try:
        cfg = RunConfig.from_sources(args.config, overrides)
        func(cfg, args)
    except (
        InputError,
        CaptionFormatError,
        CaptionDomainError,
        LexiconFormatError,
        GraphFormatError,
        CheckpointError,
        cooc.CooccurrenceFormatError,
        FileNotFoundError,
    ) as exc:
        print(f"emograph: error: stage={args.command} code={EXIT_INPUT} {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001  (TrainingDiverged and anything unexpected)
        log.debug("failure", exc_info=True)
        print(f"emograph: error: stage={args.command} code={EXIT_RUNTIME} {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
