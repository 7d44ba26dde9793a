"""Corpus ingestion and text normalisation.

Input is JSONL, one record per line with required `id` and `text` fields and
an optional `category`. Preprocessing: split on whitespace, strip punctuation
from token edges, lower-case, drop tokens with no alphabetic character, stem,
then drop stop-words (the stop-word list is itself stemmed at load time so
inflected stop-words are caught).
"""

from __future__ import annotations

import hashlib
import json
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Sequence

from .stemming import stem_token


class CorpusError(ValueError):
    pass


@dataclass
class Document:
    id: str
    raw_text: str
    tokens: list[str]
    category: str | None = None


@dataclass
class Corpus:
    documents: list[Document]
    stopwords: frozenset[str]
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.documents)

    def ids(self) -> list[str]:
        return [doc.id for doc in self.documents]


def _strip_edge_punctuation(token: str) -> str:
    start, end = 0, len(token)
    while start < end and unicodedata.category(token[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(token[end - 1]).startswith("P"):
        end -= 1
    return token[start:end]


def load_stopwords(path: str | None = None) -> frozenset[str]:
    """Load a stop-word list (default: the packaged English list), stemmed."""
    if path is None:
        text = (
            resources.files("docstability")
            .joinpath("data/stopwords_en.txt")
            .read_text(encoding="utf-8")
        )
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    words = [line.strip().lower() for line in text.splitlines()]
    return frozenset(stem_token(w) for w in words if w)


def preprocess(text: str, stopwords: frozenset[str]) -> list[str]:
    """Normalise raw text to a token list. Idempotent: running the output
    back through (joined on spaces) returns the same list."""
    tokens = []
    for raw in text.split():
        tok = _strip_edge_punctuation(raw).lower()
        if not tok or not any(ch.isalpha() for ch in tok):
            continue
        stemmed = stem_token(tok)
        if stemmed in stopwords:
            continue
        tokens.append(stemmed)
    return tokens


def _config_hash(stopwords: frozenset[str]) -> str:
    payload = "\n".join(sorted(stopwords)).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()[:16]


def ingest(
    lines: Iterable[str],
    stopwords: frozenset[str] | None = None,
    source: str = "<stream>",
) -> Corpus:
    """Parse JSONL records into a Corpus, preprocessing each document.

    Raises CorpusError naming the 1-based line number for malformed lines,
    and on duplicate ids.
    """
    if stopwords is None:
        stopwords = load_stopwords()
    documents: list[Document] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
        if not isinstance(record, dict):
            raise CorpusError(f"line {lineno}: record is not an object")
        for key in ("id", "text"):
            if key not in record:
                raise CorpusError(f"line {lineno}: missing required field {key!r}")
        doc_id = str(record["id"])
        text = record["text"]
        if not isinstance(text, str):
            raise CorpusError(f"line {lineno}: field 'text' is not a string")
        if doc_id in seen:
            raise CorpusError(f"line {lineno}: duplicate id {doc_id!r}")
        seen.add(doc_id)
        category = record.get("category")
        documents.append(
            Document(
                id=doc_id,
                raw_text=text,
                tokens=preprocess(text, stopwords),
                category=None if category is None else str(category),
            )
        )
    if not documents:
        raise CorpusError("empty corpus: no records found")
    meta = {"source": source, "config_hash": _config_hash(stopwords)}
    return Corpus(documents=documents, stopwords=stopwords, meta=meta)


def ingest_path(path: str, stopwords: frozenset[str] | None = None) -> Corpus:
    with open(path, encoding="utf-8") as fh:
        return ingest(fh, stopwords=stopwords, source=path)


def ngram_summary(
    docs: Sequence[Document], n: int, top: int
) -> list[tuple[str, int]]:
    """Most frequent n-grams over per-document token sequences.

    Ranked by frequency descending, ties broken lexicographically; at most
    `top` entries. N-grams never span document boundaries.
    """
    if n not in (2, 3):
        raise CorpusError(f"n must be 2 or 3, got {n}")
    if not docs:
        raise CorpusError("ngram_summary requires at least one document")
    counts: Counter[str] = Counter()
    for doc in docs:
        toks = doc.tokens
        for i in range(len(toks) - n + 1):
            counts[" ".join(toks[i : i + n])] += 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:top]


def write_token_dump(corpus: Corpus, path: str) -> None:
    """Write the token dump: JSONL with id, tokens, and category if present."""
    with open(path, "w", encoding="utf-8") as fh:
        for doc in corpus.documents:
            record: dict = {"id": doc.id, "tokens": doc.tokens}
            if doc.category is not None:
                record["category"] = doc.category
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def read_token_dump(path: str, stopwords: frozenset[str] | None = None) -> Corpus:
    """Load a Corpus back from a token dump (raw text is not recoverable)."""
    if stopwords is None:
        stopwords = load_stopwords()
    documents: list[Document] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
            if "id" not in record or "tokens" not in record:
                raise CorpusError(f"line {lineno}: missing id or tokens")
            doc_id = str(record["id"])
            if doc_id in seen:
                raise CorpusError(f"line {lineno}: duplicate id {doc_id!r}")
            seen.add(doc_id)
            category = record.get("category")
            documents.append(
                Document(
                    id=doc_id,
                    raw_text="",
                    tokens=[str(t) for t in record["tokens"]],
                    category=None if category is None else str(category),
                )
            )
    if not documents:
        raise CorpusError("empty corpus: no records found")
    meta = {"source": path, "config_hash": _config_hash(stopwords)}
    return Corpus(documents=documents, stopwords=stopwords, meta=meta)
