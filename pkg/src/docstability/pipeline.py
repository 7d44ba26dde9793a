"""End-to-end pipeline over a working directory of plain-file artefacts.

Stages: ingest -> vectors -> graph -> scan -> select -> evaluate -> sankey
-> report. Each stage hashes its inputs (file contents plus parameters) into
manifest.json and is skipped when the hash matches and its outputs exist, so
re-running an unchanged configuration touches nothing. Timestamps live only
in run_meta.json; every other artefact is a pure function of the inputs.

A lock file guards the workdir against concurrent invocations.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field, fields

import numpy as np

from . import evalmetrics
from .corpus import Corpus, ingest_path, load_stopwords, ngram_summary, read_token_dump, write_token_dump
from .mstability import build_operator, load_scan, scan, select_robust, time_grid
from .simgraph import build_mst_knn, cosine_similarity_matrix, export_graph, is_connected, load_graph
from .vectors import export_vectors, import_vectors, tfidf_vectorize


class PipelineError(RuntimeError):
    pass


STAGES = ["ingest", "vectors", "graph", "scan", "select", "evaluate", "sankey", "report"]

_BOOL_VALUES = {"true": True, "false": False, "1": True, "0": False, "yes": True, "no": False}


@dataclass
class PipelineConfig:
    corpus: str = ""
    workdir: str = ""
    vectors: str | None = None  # interchange file to import; None -> TF-iDF
    stopwords: str | None = None
    k: int = 13
    t_min: float = 0.01
    t_max: float = 100.0
    t_points: int = 400
    runs: int = 500
    top_m: int = 50
    seed: int = 0
    plateau_eps: float | None = None
    plateau_span: float = 0.5
    vi_quantile: float = 0.5
    include_trivial: bool = False
    evaluate: bool = True
    top_words: int = 10

    @classmethod
    def from_file(cls, path: str) -> "PipelineConfig":
        cfg = cls()
        known = {f.name: f for f in fields(cls)}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise PipelineError(f"{path}:{lineno}: expected key = value")
                key, _, value = line.partition("=")
                key, value = key.strip(), value.strip()
                if key not in known:
                    raise PipelineError(f"{path}:{lineno}: unknown key {key!r}")
                setattr(cfg, key, _coerce(key, value, known[key].type))
        return cfg

    def override(self, **kwargs) -> "PipelineConfig":
        for key, value in kwargs.items():
            if value is not None:
                setattr(self, key, value)
        return self

    def validate(self) -> None:
        if not self.corpus:
            raise PipelineError("config: corpus path is required")
        if not self.workdir:
            raise PipelineError("config: workdir is required")
        if self.k < 0:
            raise PipelineError("config: k must be non-negative")
        if not (self.runs >= self.top_m >= 2):
            raise PipelineError("config: need runs >= top_m >= 2")
        if self.t_min <= 0 or self.t_max <= self.t_min or self.t_points < 1:
            raise PipelineError("config: need 0 < t_min < t_max and t_points >= 1")


def _coerce(key: str, value: str, annotation: str):
    if annotation == "int":
        return int(value)
    if annotation == "float":
        return float(value)
    if annotation == "bool":
        if value.lower() not in _BOOL_VALUES:
            raise PipelineError(f"config: {key} must be a boolean, got {value!r}")
        return _BOOL_VALUES[value.lower()]
    if value.lower() in ("none", ""):
        return None
    if annotation == "float | None":
        return float(value)
    return value


def _hash_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _hash_inputs(*parts) -> str:
    digest = hashlib.sha256()
    for part in parts:
        digest.update(json.dumps(part, sort_keys=True).encode("utf-8"))
        digest.update(b"\x00")
    return digest.hexdigest()


class Pipeline:
    def __init__(self, cfg: PipelineConfig):
        cfg.validate()
        self.cfg = cfg
        self.workdir = cfg.workdir
        os.makedirs(self.workdir, exist_ok=True)
        self._manifest_path = os.path.join(self.workdir, "manifest.json")
        self.manifest = self._load_manifest()
        self._corpus_cache: Corpus | None = None

    # ----- plumbing -----

    def _load_manifest(self) -> dict:
        if os.path.exists(self._manifest_path):
            with open(self._manifest_path, encoding="utf-8") as fh:
                return json.load(fh)
        return {}

    def _save_manifest(self) -> None:
        tmp = self._manifest_path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(self.manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, self._manifest_path)

    def path(self, *parts: str) -> str:
        return os.path.join(self.workdir, *parts)

    def _up_to_date(self, stage: str, input_hash: str, outputs: list[str]) -> bool:
        entry = self.manifest.get(stage)
        return (
            entry is not None
            and entry.get("hash") == input_hash
            and all(os.path.exists(self.path(out)) for out in outputs)
        )

    def _mark(self, stage: str, input_hash: str, outputs: list[str]) -> None:
        self.manifest[stage] = {"hash": input_hash, "outputs": outputs}
        self._save_manifest()

    def _corpus(self) -> Corpus:
        if self._corpus_cache is None:
            self._corpus_cache = read_token_dump(self.path("tokens.jsonl"))
        return self._corpus_cache

    def _require(self, stage: str, *artefacts: str) -> None:
        for artefact in artefacts:
            if not os.path.exists(self.path(artefact)):
                raise PipelineError(
                    f"stage {stage}: missing artefact {artefact!r}; run the earlier stages first"
                )

    # ----- stages -----

    def stage_ingest(self, force: bool = False) -> bool:
        cfg = self.cfg
        stopwords_hash = _hash_file(cfg.stopwords) if cfg.stopwords else "builtin"
        input_hash = _hash_inputs("ingest", _hash_file(cfg.corpus), stopwords_hash)
        outputs = ["tokens.jsonl"]
        if not force and self._up_to_date("ingest", input_hash, outputs):
            return False
        stopwords = load_stopwords(cfg.stopwords)
        corpus = ingest_path(cfg.corpus, stopwords=stopwords)
        write_token_dump(corpus, self.path("tokens.jsonl"))
        self._corpus_cache = corpus
        self._mark("ingest", input_hash, outputs)
        return True

    def stage_vectors(self, force: bool = False) -> bool:
        cfg = self.cfg
        self._require("vectors", "tokens.jsonl")
        mode = "import" if cfg.vectors else "tfidf"
        parts = ["vectors", mode, _hash_file(self.path("tokens.jsonl"))]
        if cfg.vectors:
            parts.append(_hash_file(cfg.vectors))
        input_hash = _hash_inputs(*parts)
        outputs = ["vectors.txt"]
        if not force and self._up_to_date("vectors", input_hash, outputs):
            return False
        corpus = self._corpus()
        if cfg.vectors:
            vs = import_vectors(cfg.vectors, corpus_ids=corpus.ids())
        else:
            vs = tfidf_vectorize(corpus)
        export_vectors(vs, self.path("vectors.txt"))
        self._mark("vectors", input_hash, outputs)
        return True

    def stage_graph(self, force: bool = False) -> bool:
        cfg = self.cfg
        self._require("graph", "vectors.txt")
        input_hash = _hash_inputs("graph", _hash_file(self.path("vectors.txt")), cfg.k)
        outputs = ["graph.txt"]
        if not force and self._up_to_date("graph", input_hash, outputs):
            return False
        vs = import_vectors(self.path("vectors.txt"))
        sm = cosine_similarity_matrix(vs)
        graph = build_mst_knn(sm, cfg.k)
        if not is_connected(graph.adjacency):
            raise PipelineError(
                "graph is connected only through zero-weight edges (document "
                "pairs at the maximum cosine distance); the diffusion scan "
                "needs positive-weight connectivity. Reduce duplication or "
                "enrich the corpus so maximally distant pairs are not bridges."
            )
        export_graph(graph, self.path("graph.txt"))
        self._mark("graph", input_hash, outputs)
        return True

    def stage_scan(self, force: bool = False) -> bool:
        cfg = self.cfg
        self._require("scan", "graph.txt")
        params = [cfg.t_min, cfg.t_max, cfg.t_points, cfg.runs, cfg.top_m, cfg.seed]
        input_hash = _hash_inputs("scan", _hash_file(self.path("graph.txt")), params)
        outputs = ["scan/scan.json", "scan/vi_matrix.bin", "scan/vi_matrix.json"]
        if not force and self._up_to_date("scan", input_hash, outputs):
            return False
        graph = load_graph(self.path("graph.txt"))
        op = build_operator(graph)
        times = time_grid(cfg.t_min, cfg.t_max, cfg.t_points)
        scan(
            op,
            times,
            runs=cfg.runs,
            top_m=cfg.top_m,
            seed=cfg.seed,
            persist_dir=self.path("scan"),
        )
        self._mark("scan", input_hash, outputs)
        return True

    def stage_select(self, force: bool = False) -> bool:
        cfg = self.cfg
        self._require("select", "scan/scan.json")
        params = [cfg.plateau_eps, cfg.plateau_span, cfg.vi_quantile, cfg.include_trivial]
        input_hash = _hash_inputs("select", _hash_file(self.path("scan/scan.json")),
                                  _hash_file(self.path("scan/vi_matrix.bin")), params)
        outputs = ["selected.json"]
        if not force and self._up_to_date("select", input_hash, outputs):
            return False
        sr = load_scan(self.path("scan"))
        levels = select_robust(
            sr,
            min_plateau=cfg.plateau_span,
            vi_dip_quantile=cfg.vi_quantile,
            eps_plateau=cfg.plateau_eps,
            exclude_trivial=not cfg.include_trivial,
        )
        payload = [
            {
                "index": lv.index,
                "t": lv.t,
                "C": lv.n_clusters,
                "vi": lv.vi,
                "stability": lv.stability,
                "plateau_t_lo": lv.plateau_t_lo,
                "plateau_t_hi": lv.plateau_t_hi,
                "plateau_span": lv.plateau_span,
                "partition_file": f"scan/partitions/t_{lv.index}.csv",
            }
            for lv in levels
        ]
        with open(self.path("selected.json"), "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        self._mark("select", input_hash, outputs)
        return True

    def _selected_levels(self) -> list[dict]:
        with open(self.path("selected.json"), encoding="utf-8") as fh:
            return json.load(fh)

    def _level_labels(self, level: dict) -> np.ndarray:
        path = self.path(level["partition_file"])
        return np.loadtxt(path, delimiter=",", skiprows=1, dtype=int, ndmin=2)[:, 1]

    def stage_evaluate(self, force: bool = False) -> bool:
        cfg = self.cfg
        if not cfg.evaluate:
            return False
        self._require("evaluate", "selected.json", "tokens.jsonl")
        levels = self._selected_levels()
        level_hashes = [_hash_file(self.path(lv["partition_file"])) for lv in levels]
        input_hash = _hash_inputs(
            "evaluate", _hash_file(self.path("selected.json")),
            _hash_file(self.path("tokens.jsonl")), level_hashes, cfg.top_words,
        )
        outputs = [f"reports/level_t{lv['index']}.json" for lv in levels]
        if not force and self._up_to_date("evaluate", input_hash, outputs):
            return False
        os.makedirs(self.path("reports"), exist_ok=True)
        corpus = self._corpus()
        stats = evalmetrics.WordStats.from_corpus(corpus)
        categories = [doc.category for doc in corpus.documents]
        labelled = all(cat is not None for cat in categories)
        for level in levels:
            labels = self._level_labels(level)
            report = evalmetrics.partition_report(
                labels, corpus, t=level["t"], stability=level["stability"],
                stats=stats, top=cfg.top_words,
            )
            report["vi"] = level["vi"]
            with open(self.path(f"reports/level_t{level['index']}.json"), "w", encoding="utf-8") as fh:
                json.dump(report, fh, indent=2, sort_keys=True)
                fh.write("\n")
            if labelled:
                result = evalmetrics.zscore_contingency(
                    labels, evalmetrics.labels_from_categories(categories)
                )
                evalmetrics.write_contingency_csv(
                    result, self.path(f"reports/contingency_t{level['index']}.csv")
                )
        self._mark("evaluate", input_hash, outputs)
        return True

    def stage_sankey(self, force: bool = False) -> bool:
        self._require("sankey", "selected.json", "tokens.jsonl")
        levels = self._selected_levels()
        level_hashes = [_hash_file(self.path(lv["partition_file"])) for lv in levels]
        input_hash = _hash_inputs(
            "sankey", _hash_file(self.path("selected.json")),
            _hash_file(self.path("tokens.jsonl")), level_hashes,
        )
        outputs = ["sankey.json"]
        if not force and self._up_to_date("sankey", input_hash, outputs):
            return False
        corpus = self._corpus()
        ordered = sorted(levels, key=lambda lv: lv["index"])
        partitions = [self._level_labels(lv) for lv in ordered]
        names = [f"t={lv['t']:.6g} C={lv['C']}" for lv in ordered]
        categories = [doc.category for doc in corpus.documents]
        label_layer = categories if all(cat is not None for cat in categories) else None
        flows = export_sankey(partitions, names, labels=label_layer)
        with open(self.path("sankey.json"), "w", encoding="utf-8") as fh:
            json.dump(flows, fh, indent=2, sort_keys=True)
            fh.write("\n")
        self._mark("sankey", input_hash, outputs)
        return True

    def stage_report(self, force: bool = False) -> bool:
        self._require("report", "selected.json", "tokens.jsonl")
        levels = self._selected_levels()
        input_hash = _hash_inputs(
            "report", _hash_file(self.path("selected.json")),
            _hash_file(self.path("tokens.jsonl")),
            [_hash_file(self.path(lv["partition_file"])) for lv in levels],
            self.cfg.evaluate,
        )
        outputs = ["report.txt"]
        if not force and self._up_to_date("report", input_hash, outputs):
            return False
        text = summarize_levels(self.workdir)
        with open(self.path("report.txt"), "w", encoding="utf-8") as fh:
            fh.write(text)
        self._mark("report", input_hash, outputs)
        return True

    # ----- driver -----

    def run_stage(self, stage: str, force: bool = False) -> bool:
        method = getattr(self, f"stage_{stage}")
        try:
            return method(force=force)
        except PipelineError:
            raise
        except Exception as exc:
            raise PipelineError(f"stage {stage}: {exc}") from exc

    def run(self, force: bool = False) -> dict:
        ran: dict[str, bool] = {}
        with workdir_lock(self.workdir):
            for stage in STAGES:
                ran[stage] = self.run_stage(stage, force=force)
            self._write_run_meta(ran)
        return ran

    def _write_run_meta(self, ran: dict) -> None:
        import datetime

        from . import __version__

        meta = {
            "finished_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "version": __version__,
            "stages_run": ran,
            "config": {f.name: getattr(self.cfg, f.name) for f in fields(self.cfg)},
        }
        with open(self.path("run_meta.json"), "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")


class workdir_lock:
    """Exclusive lock on a workdir; refuses to run when already locked."""

    def __init__(self, workdir: str):
        self.path = os.path.join(workdir, ".lock")
        self.fd: int | None = None

    def __enter__(self):
        try:
            self.fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise PipelineError(
                f"workdir is locked by another run ({self.path}); "
                "remove the lock file if that run is dead"
            ) from None
        os.write(self.fd, str(os.getpid()).encode())
        return self

    def __exit__(self, *exc_info):
        if self.fd is not None:
            os.close(self.fd)
            os.unlink(self.path)
        return False


def export_sankey(partitions: list[np.ndarray], names: list[str], labels: list | None = None) -> dict:
    """Sankey flow tables between adjacent layers of partitions, with an
    optional external-label layer appended last.

    Every flow boundary conserves documents: flows out of a cluster sum to
    its size, and each boundary's total equals N. A quasi-hierarchy score
    (fraction of fine clusters sending >= 95% of their mass to a single
    coarse cluster) is reported per boundary, never enforced.
    """
    if len(partitions) != len(names):
        raise PipelineError("one name per partition layer is required")
    layer_labels: list[np.ndarray] = [np.asarray(p, dtype=int) for p in partitions]
    n = layer_labels[0].size if layer_labels else 0
    for p in layer_labels:
        if p.size != n:
            raise PipelineError("all partitions must cover the same node set")
    layer_ids: list[list] = [sorted(set(int(c) for c in p)) for p in layer_labels]
    layer_names = list(names)
    if labels is not None:
        if len(labels) != n:
            raise PipelineError("label layer does not cover the node set")
        seen: list[str] = []
        for cat in labels:
            if cat not in seen:
                seen.append(cat)
        mapping = {cat: i for i, cat in enumerate(seen)}
        layer_labels.append(np.array([mapping[cat] for cat in labels], dtype=int))
        layer_ids.append(seen)
        layer_names.append("categories")

    layers = []
    for name, ids, assignment in zip(layer_names, layer_ids, layer_labels):
        sizes = np.bincount(assignment, minlength=len(ids))
        layers.append({
            "name": name,
            "clusters": [{"id": ids[c], "size": int(sizes[c])} for c in range(len(ids))],
        })

    flows = []
    quasi = []
    for boundary in range(len(layer_labels) - 1):
        left, right = layer_labels[boundary], layer_labels[boundary + 1]
        counts: dict[tuple[int, int], int] = {}
        for a, b in zip(left, right):
            counts[(int(a), int(b))] = counts.get((int(a), int(b)), 0) + 1
        total = sum(counts.values())
        if total != n:
            raise PipelineError("flow conservation violated")
        left_sizes = np.bincount(left)
        dominant = 0
        for c in range(left_sizes.size):
            outgoing = [w for (a, _), w in counts.items() if a == c]
            if left_sizes[c] > 0 and max(outgoing) >= 0.95 * left_sizes[c]:
                dominant += 1
        quasi.append(dominant / max(left_sizes.size, 1))
        for (a, b), weight in sorted(counts.items()):
            flows.append({
                "from_layer": boundary,
                "from": layer_ids[boundary][a],
                "to": layer_ids[boundary + 1][b],
                "weight": weight,
            })
    return {"layers": layers, "flows": flows, "quasi_hierarchy": quasi}


def summarize_levels(workdir: str) -> str:
    """Human-readable per-level summary; byte-identical across regenerations."""
    selected_path = os.path.join(workdir, "selected.json")
    tokens_path = os.path.join(workdir, "tokens.jsonl")
    for required in (selected_path, tokens_path):
        if not os.path.exists(required):
            raise PipelineError(f"missing artefact {required!r}")
    with open(selected_path, encoding="utf-8") as fh:
        levels = json.load(fh)
    if not levels:
        return "No robust level found.\n"
    corpus = read_token_dump(tokens_path)
    lines = [f"Robust levels: {len(levels)}", ""]
    for level in sorted(levels, key=lambda lv: lv["index"]):
        part_path = os.path.join(workdir, level["partition_file"])
        labels = np.loadtxt(part_path, delimiter=",", skiprows=1, dtype=int, ndmin=2)[:, 1]
        lines.append(
            f"Level at t={level['t']:.6g}: C={level['C']}, "
            f"stability={level['stability']:.6g}, VI(t)={level['vi']:.6g}, "
            f"plateau {level['plateau_t_lo']:.6g}..{level['plateau_t_hi']:.6g} "
            f"({level['plateau_span']:.2f} decades)"
        )
        report_path = os.path.join(workdir, f"reports/level_t{level['index']}.json")
        if os.path.exists(report_path):
            with open(report_path, encoding="utf-8") as fh:
                report = json.load(fh)
            nmi_text = "n/a" if report.get("NMI") is None else f"{report['NMI']:.4f}"
            lines.append(f"  NMI={nmi_text}, PMI={report['PMI']:.4f}")
        for cluster in range(int(labels.max()) + 1):
            members = [corpus.documents[i] for i in np.nonzero(labels == cluster)[0]]
            grams: list[str] = []
            for order in (2, 3):
                if any(len(doc.tokens) >= order for doc in members):
                    grams += [g for g, _ in ngram_summary(members, order, 2)]
            lines.append(f"  cluster {cluster} (n={len(members)}): {'; '.join(grams) if grams else '-'}")
        lines.append("")
    return "\n".join(lines) + "\n"
