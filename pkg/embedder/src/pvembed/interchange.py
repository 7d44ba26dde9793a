"""Plain-text vector interchange: first line `N d`, then N lines of
`id v1 ... vd`, space-separated, UTF-8. Floats are rendered with shortest
round-trip decimals, so export -> import -> export is byte-identical.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np


class InterchangeError(ValueError):
    pass


def write_vectors(path: str, ids: Sequence[str], values: np.ndarray) -> None:
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise InterchangeError(f"values must be 2-d, got shape {values.shape}")
    n, d = values.shape
    if n < 1 or d < 1:
        raise InterchangeError(f"refusing to write an empty vector set ({n} x {d})")
    if len(ids) != n:
        raise InterchangeError(f"{len(ids)} ids for {n} rows")
    for doc_id in ids:
        if not doc_id or any(ch.isspace() for ch in doc_id):
            raise InterchangeError(f"id {doc_id!r} not representable in interchange format")
    if not np.all(np.isfinite(values)):
        raise InterchangeError("non-finite value")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{n} {d}\n")
        for doc_id, row in zip(ids, values):
            rendered = " ".join(repr(float(v)) for v in row)
            fh.write(f"{doc_id} {rendered}\n")


def read_vectors(path: str) -> tuple[list[str], np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        parts = header.split()
        if len(parts) != 2:
            raise InterchangeError("header must be two integers: N d")
        try:
            n, d = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise InterchangeError("header must be two integers: N d") from exc
        if n < 1 or d < 1:
            raise InterchangeError(f"invalid header N={n} d={d}")
        ids: list[str] = []
        values = np.empty((n, d))
        seen: set[str] = set()
        for row in range(n):
            line = fh.readline()
            if not line:
                raise InterchangeError(f"row {row + 1}: unexpected end of file")
            fields = line.split()
            if len(fields) != d + 1:
                raise InterchangeError(
                    f"row {row + 1}: expected {d + 1} fields, got {len(fields)}"
                )
            doc_id = fields[0]
            if doc_id in seen:
                raise InterchangeError(f"row {row + 1}: duplicate id {doc_id!r}")
            seen.add(doc_id)
            try:
                values[row] = [float(v) for v in fields[1:]]
            except ValueError as exc:
                raise InterchangeError(f"row {row + 1}: unparseable value") from exc
            if not np.all(np.isfinite(values[row])):
                raise InterchangeError(f"row {row + 1}: non-finite value")
            ids.append(doc_id)
        if fh.readline().strip():
            raise InterchangeError(f"trailing content after {n} declared rows")
    return ids, values
