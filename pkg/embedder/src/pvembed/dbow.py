"""PV-DBOW paragraph vectors trained with negative-sampling SGD.

Each document owns a d-dimensional vector that is trained to predict the
document's own words: for every kept token occurrence the document vector
scores the true word against `negative` noise words drawn from the unigram
distribution raised to 0.75, and a logistic update is applied to both sides.
Frequent words are randomly dropped with the usual subsampling rule
(keep probability sqrt(t/f) + t/f for corpus frequency f and threshold t).
The learning rate decays linearly per epoch from alpha to min_alpha.

Everything runs single-threaded off one seeded generator, so a repeat run
is bit-identical. Inference freezes the word matrix and trains a fresh
vector for each new document with an rng seeded from the document id, so
an inferred vector does not depend on what else is in the analysis set.

The context window is recorded with the model for provenance only: pure
PV-DBOW predicts words from the document vector alone, so no window enters
the updates.
"""

from __future__ import annotations

import hashlib
import json
import warnings
import zipfile
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np


class DbowError(ValueError):
    pass


@dataclass
class EmbedConfig:
    dim: int = 300
    epochs: int = 10
    window: int = 15
    min_count: int = 5
    negative: int = 5
    subsample: float = 0.001
    seed: int = 0
    alpha: float = 0.025
    min_alpha: float = 0.0001

    def validate(self) -> None:
        if self.dim < 1:
            raise DbowError(f"dim must be >= 1, got {self.dim}")
        if self.epochs < 1:
            raise DbowError(f"epochs must be >= 1, got {self.epochs}")
        for name in ("window", "min_count", "negative", "subsample"):
            if getattr(self, name) < 0:
                raise DbowError(f"{name} must be >= 0, got {getattr(self, name)}")
        if not self.alpha > 0:
            raise DbowError(f"alpha must be > 0, got {self.alpha}")
        if not 0 < self.min_alpha <= self.alpha:
            raise DbowError(
                f"min_alpha must be in (0, alpha], got {self.min_alpha}"
            )

    def hash(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


@dataclass
class Vocabulary:
    words: list[str]
    counts: np.ndarray  # int64, aligned with words
    index: dict[str, int] = field(init=False)

    def __post_init__(self) -> None:
        self.index = {w: i for i, w in enumerate(self.words)}

    def __len__(self) -> int:
        return len(self.words)


def build_vocabulary(docs: Sequence[Sequence[str]], min_count: int) -> Vocabulary:
    counts: dict[str, int] = {}
    for tokens in docs:
        for w in tokens:
            counts[w] = counts.get(w, 0) + 1
    kept = [(w, c) for w, c in counts.items() if c >= max(min_count, 1)]
    # count-descending order keeps the noise table front-loaded; the word
    # tie-break pins the layout so equal corpora build equal models
    kept.sort(key=lambda wc: (-wc[1], wc[0]))
    if not kept:
        raise DbowError(f"no word reaches min_count={min_count}")
    words = [w for w, _ in kept]
    return Vocabulary(words=words, counts=np.array([c for _, c in kept], dtype=np.int64))


@dataclass
class DbowModel:
    cfg: EmbedConfig
    vocab: Vocabulary
    syn1: np.ndarray  # (V, d) output word matrix
    meta: dict = field(default_factory=dict)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -35.0, 35.0)))


def _keep_prob(counts: np.ndarray, subsample: float) -> np.ndarray:
    if subsample <= 0:
        return np.ones(len(counts))
    freq = counts / counts.sum()
    return np.minimum(1.0, np.sqrt(subsample / freq) + subsample / freq)


def _noise_cdf(counts: np.ndarray) -> np.ndarray:
    weights = counts.astype(float) ** 0.75
    cdf = np.cumsum(weights / weights.sum())
    cdf[-1] = 1.0  # cumsum rounding must not leave draws above the last bin
    return cdf


def _epoch_alpha(cfg: EmbedConfig, epoch: int) -> float:
    if cfg.epochs == 1:
        return cfg.alpha
    frac = epoch / (cfg.epochs - 1)
    return cfg.alpha + (cfg.min_alpha - cfg.alpha) * frac


def _train_document(
    vec: np.ndarray,
    word_ids: np.ndarray,
    syn1: np.ndarray,
    rng: np.random.Generator,
    keep_prob: np.ndarray,
    noise_cdf: np.ndarray,
    negative: int,
    alpha: float,
    update_words: bool,
) -> int:
    """One pass of SGD over a document; returns the number of kept tokens."""
    if word_ids.size == 0:
        return 0
    kept = word_ids[rng.random(word_ids.size) < keep_prob[word_ids]]
    if kept.size == 0:
        return 0
    if negative > 0:
        noise = np.searchsorted(noise_cdf, rng.random((kept.size, negative)))
    for i, target in enumerate(kept):
        if negative > 0:
            draws = noise[i]
            w_idx = np.concatenate(([target], draws[draws != target]))
        else:
            w_idx = np.array([target])
        rows = syn1[w_idx]
        err = -_sigmoid(rows @ vec)
        err[0] += 1.0
        g = alpha * err
        if update_words:
            # np.add.at because a noise word can repeat inside one draw
            np.add.at(syn1, w_idx, g[:, None] * vec)
        vec += g @ rows
    return int(kept.size)


def train(docs: Sequence[Sequence[str]], cfg: EmbedConfig) -> DbowModel:
    cfg.validate()
    if len(docs) == 0 or all(len(tokens) == 0 for tokens in docs):
        raise DbowError("empty training corpus")
    vocab = build_vocabulary(docs, cfg.min_count)
    d = cfg.dim
    rng = np.random.default_rng(cfg.seed)
    doc_vecs = (rng.random((len(docs), d)) - 0.5) / d
    syn1 = np.zeros((len(vocab), d))
    encoded = [
        np.array([vocab.index[w] for w in tokens if w in vocab.index], dtype=np.intp)
        for tokens in docs
    ]
    keep_prob = _keep_prob(vocab.counts, cfg.subsample)
    noise_cdf = _noise_cdf(vocab.counts)
    total_tokens = int(sum(len(t) for t in docs))
    log = [
        f"documents {len(docs)}",
        f"tokens {total_tokens}",
        f"vocabulary {len(vocab)} (min_count {cfg.min_count})",
        f"config_hash {cfg.hash()}",
        f"seed {cfg.seed} single-threaded deterministic",
    ]
    for epoch in range(cfg.epochs):
        alpha = _epoch_alpha(cfg, epoch)
        trained = 0
        for j, word_ids in enumerate(encoded):
            trained += _train_document(
                doc_vecs[j], word_ids, syn1, rng, keep_prob, noise_cdf,
                cfg.negative, alpha, update_words=True,
            )
        log.append(f"epoch {epoch + 1}/{cfg.epochs} alpha {alpha:.6f} examples {trained}")
    meta = {
        "documents": len(docs),
        "tokens": total_tokens,
        "config_hash": cfg.hash(),
        "log": log,
    }
    return DbowModel(cfg=cfg, vocab=vocab, syn1=syn1, meta=meta)


def _doc_rng(seed: int, doc_id: str) -> np.random.Generator:
    digest = hashlib.sha256(doc_id.encode("utf-8")).digest()
    return np.random.default_rng([seed, int.from_bytes(digest[:16], "big")])


def infer_vector(
    model: DbowModel,
    doc_id: str,
    tokens: Sequence[str],
    epochs: int | None = None,
    seed: int | None = None,
) -> np.ndarray:
    cfg = model.cfg
    n_epochs = cfg.epochs if epochs is None else epochs
    if n_epochs < 1:
        raise DbowError(f"epochs must be >= 1, got {n_epochs}")
    rng = _doc_rng(cfg.seed if seed is None else seed, doc_id)
    d = cfg.dim
    vec = (rng.random(d) - 0.5) / d
    word_ids = np.array(
        [model.vocab.index[w] for w in tokens if w in model.vocab.index], dtype=np.intp
    )
    keep_prob = _keep_prob(model.vocab.counts, cfg.subsample)
    noise_cdf = _noise_cdf(model.vocab.counts)
    run_cfg = EmbedConfig(**{**asdict(cfg), "epochs": n_epochs})
    for epoch in range(n_epochs):
        _train_document(
            vec, word_ids, model.syn1, rng, keep_prob, noise_cdf,
            cfg.negative, _epoch_alpha(run_cfg, epoch), update_words=False,
        )
    return vec


def infer(
    model: DbowModel,
    docs: Sequence[tuple[str, Sequence[str]]],
    epochs: int | None = None,
    seed: int | None = None,
) -> tuple[list[str], np.ndarray]:
    """Vectors for an analysis set: (ids, (N, d) matrix) in input order."""
    if len(docs) == 0:
        raise DbowError("empty analysis set")
    ids = [doc_id for doc_id, _ in docs]
    values = np.empty((len(docs), model.cfg.dim))
    for row, (doc_id, tokens) in enumerate(docs):
        known = sum(1 for w in tokens if w in model.vocab.index)
        if known == 0:
            warnings.warn(
                f"document {doc_id!r} has no vocabulary tokens; "
                "its vector stays at the seeded initialisation"
            )
        values[row] = infer_vector(model, doc_id, tokens, epochs=epochs, seed=seed)
    return ids, values


def save_model(model: DbowModel, path: str) -> None:
    """Persist the model at `path` and its training log at `path`.log."""
    meta = dict(model.meta)
    meta["config"] = asdict(model.cfg)
    with open(path, "wb") as fh:
        np.savez(
            fh,
            syn1=model.syn1,
            counts=model.vocab.counts,
            words=np.array(model.vocab.words, dtype=np.str_),
            meta=np.array(json.dumps(meta)),
        )
    with open(path + ".log", "w", encoding="utf-8") as fh:
        for line in model.meta.get("log", []):
            fh.write(line + "\n")


def load_model(path: str) -> DbowModel:
    try:
        with np.load(path, allow_pickle=False) as data:
            meta = json.loads(str(data["meta"]))
            cfg = EmbedConfig(**meta.pop("config"))
            vocab = Vocabulary(words=[str(w) for w in data["words"]], counts=data["counts"])
            return DbowModel(cfg=cfg, vocab=vocab, syn1=data["syn1"], meta=meta)
    except (OSError, KeyError, ValueError, zipfile.BadZipFile) as exc:
        if isinstance(exc, DbowError):
            raise
        raise DbowError(f"{path}: not a model file ({exc})") from exc
