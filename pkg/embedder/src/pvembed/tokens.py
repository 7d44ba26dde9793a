"""Token-dump reader: JSONL with one document per line, fields `id` and
`tokens` (list of strings), optional `category`. This is the preprocessed
form handed over by the clustering pipeline; no tokenisation happens here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass


class TokensError(ValueError):
    pass


@dataclass
class TokenDoc:
    id: str
    tokens: list[str]
    category: str | None = None


def read_token_dump(path: str) -> list[TokenDoc]:
    docs: list[TokenDoc] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise TokensError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
            if "id" not in record or "tokens" not in record:
                raise TokensError(f"line {lineno}: missing id or tokens")
            doc_id = str(record["id"])
            if doc_id in seen:
                raise TokensError(f"line {lineno}: duplicate id {doc_id!r}")
            seen.add(doc_id)
            tokens = record["tokens"]
            if not isinstance(tokens, list):
                raise TokensError(f"line {lineno}: tokens must be a list")
            category = record.get("category")
            docs.append(
                TokenDoc(
                    id=doc_id,
                    tokens=[str(t) for t in tokens],
                    category=None if category is None else str(category),
                )
            )
    if not docs:
        raise TokensError(f"{path}: no documents")
    return docs


def read_labels(path: str) -> dict[str, str]:
    """Category per document id from a token dump; every document must carry one."""
    labels: dict[str, str] = {}
    for doc in read_token_dump(path):
        if doc.category is None:
            raise TokensError(f"document {doc.id!r} has no category")
        labels[doc.id] = doc.category
    return labels
