"""Silver-standard corpus parsing and the recall / precision / throughput suite.

Corpus documents are plain text with ``[[term|link]]`` or ``[[term]]``
annotations. A system match is a hit for an annotation when the spans are
identical and one of the match's candidate entities carries the annotation's
link as a label.
"""

from __future__ import annotations

import gc
import os
import time
from bisect import bisect_right
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from .engine import Match
from .lexicon import normalize_label

LD_BUCKETS = ("0", "1", "2", "3", "4", ">4")
PRECISION_KEYS = ("P_O", "P_A", "P_O_star", "P_A_star")
DOC_SEPARATOR = "\x01"


class CorpusParseError(ValueError):
    def __init__(self, message: str, offset: int, doc_id: str | None = None):
        self.offset = offset
        self.doc_id = doc_id
        where = f"{doc_id}:" if doc_id else ""
        super().__init__(f"{where}{offset}: {message}")


@dataclass(frozen=True)
class Annotation:
    start: int
    end: int
    surface: str
    link: str
    raw_link: str | None = None  # None for the [[term]] shortcut


@dataclass
class AnnotatedDocument:
    doc_id: str
    plain_text: str
    annotations: list[Annotation] = field(default_factory=list)

    def markup(self) -> str:
        """Re-insert the annotations; inverse of :func:`parse_annotated`."""
        parts = []
        pos = 0
        for a in self.annotations:
            parts.append(self.plain_text[pos:a.start])
            if a.raw_link is None:
                parts.append(f"[[{a.surface}]]")
            else:
                parts.append(f"[[{a.surface}|{a.raw_link}]]")
            pos = a.end
        parts.append(self.plain_text[pos:])
        return "".join(parts)


def parse_annotated(doc: str, doc_id: str = "") -> AnnotatedDocument:
    out: list[str] = []
    annotations: list[Annotation] = []
    plain_len = 0
    pos = 0
    n = len(doc)
    while pos < n:
        open_at = doc.find("[[", pos)
        close_at = doc.find("]]", pos)
        if close_at != -1 and (open_at == -1 or close_at < open_at):
            raise CorpusParseError("unbalanced ']]'", close_at, doc_id)
        if open_at == -1:
            out.append(doc[pos:])
            break
        chunk = doc[pos:open_at]
        out.append(chunk)
        plain_len += len(chunk)
        inner_start = open_at + 2
        close_at = doc.find("]]", inner_start)
        if close_at == -1:
            raise CorpusParseError("unclosed '[['", open_at, doc_id)
        nested = doc.find("[[", inner_start, close_at)
        if nested != -1:
            raise CorpusParseError("nested '[['", nested, doc_id)
        inner = doc[inner_start:close_at]
        term, bar, raw_link = inner.partition("|")
        if not term:
            raise CorpusParseError("empty annotation term", open_at, doc_id)
        if bar:
            if not raw_link:
                raise CorpusParseError("empty annotation link", open_at, doc_id)
            link = normalize_label(raw_link) or raw_link
            ann = Annotation(plain_len, plain_len + len(term), term, link, raw_link)
        else:
            link = normalize_label(term) or term
            ann = Annotation(plain_len, plain_len + len(term), term, link, None)
        annotations.append(ann)
        out.append(term)
        plain_len += len(term)
        pos = close_at + 2
    return AnnotatedDocument(doc_id, "".join(out), annotations)


def read_corpus(path: str | os.PathLike) -> list[AnnotatedDocument]:
    """A directory (one document per file), or one file holding documents
    separated by ``\\x01doc_id\\n`` headers."""
    path = Path(path)
    if path.is_dir():
        files = sorted(p for p in path.iterdir() if p.is_file())
        return [parse_annotated(p.read_text(encoding="utf-8"), p.name) for p in files]
    return split_documents(path.read_text(encoding="utf-8"), path.stem)


def split_documents(blob: str, default_id: str = "doc") -> list[AnnotatedDocument]:
    if DOC_SEPARATOR not in blob:
        return [parse_annotated(blob, default_id)]
    docs = []
    head, *chunks = blob.split(DOC_SEPARATOR)
    if head.strip():
        docs.append(parse_annotated(head, default_id))
    for chunk in chunks:
        doc_id, _, body = chunk.partition("\n")
        docs.append(parse_annotated(body, doc_id.strip()))
    return docs


def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def ld_bucket(distance: int) -> str:
    return str(distance) if distance <= 4 else ">4"


def _rate(num: int, den: int) -> float | None:
    return num / den if den else None


@dataclass
class Count:
    hits: int = 0
    total: int = 0

    def to_json(self) -> dict:
        return {"hits": self.hits, "total": self.total, "rate": _rate(self.hits, self.total)}


@dataclass
class Precision:
    tp: int = 0
    fp: int = 0

    def to_json(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "rate": _rate(self.tp, self.tp + self.fp)}


LabelMap = Mapping[str, Iterable[str]]


def _entity_has_link(labels_of: LabelMap, entity: str, link: str) -> bool:
    return link in labels_of.get(entity, ())


def recall_by_ld(matches: Sequence[Match], doc: AnnotatedDocument,
                 labels_of: LabelMap) -> dict[str, Count]:
    by_span: dict[tuple[int, int], list[Match]] = {}
    for m in matches:
        by_span.setdefault((m.start, m.end), []).append(m)
    out = {b: Count() for b in LD_BUCKETS}
    for a in doc.annotations:
        c = out[ld_bucket(levenshtein(a.surface, a.link))]
        c.total += 1
        if any(
            _entity_has_link(labels_of, e, a.link)
            for m in by_span.get((a.start, a.end), ())
            for e in m.term_ids
        ):
            c.hits += 1
    return out


def precision_suite(matches: Sequence[Match], doc: AnnotatedDocument,
                    labels_of: LabelMap) -> dict[str, Precision]:
    links_at: dict[tuple[int, int], set[str]] = {}
    for a in doc.annotations:
        links_at.setdefault((a.start, a.end), set()).add(a.link)
    spans = sorted(links_at)
    # annotations do not overlap, so their ends are sorted too
    ends = [e for _, e in spans]
    out = {k: Precision() for k in PRECISION_KEYS}

    def overlaps(s: int, e: int) -> bool:
        i = bisect_right(ends, s)
        return i < len(spans) and spans[i][0] < e

    for m in matches:
        links = links_at.get((m.start, m.end), set())
        over = bool(links) or overlaps(m.start, m.end)
        any_ok = False
        for e in sorted(m.term_ids):
            ok = any(_entity_has_link(labels_of, e, l) for l in links)
            any_ok = any_ok or ok
            _count(out["P_A"], ok)
            if over:
                _count(out["P_O"], ok)
        _count(out["P_A_star"], any_ok)
        if over:
            _count(out["P_O_star"], any_ok)
    return out


def _count(p: Precision, ok: bool) -> None:
    if ok:
        p.tp += 1
    else:
        p.fp += 1


@dataclass
class MetricsReport:
    recall_by_ld: dict[str, Count] = field(default_factory=lambda: {b: Count() for b in LD_BUCKETS})
    precision: dict[str, Precision] = field(default_factory=lambda: {k: Precision() for k in PRECISION_KEYS})
    throughput_chars_per_ms: float | None = None
    wall_time_ms: float = 0.0
    match_count: int = 0

    def add(self, recall: Mapping[str, Count], precision: Mapping[str, Precision]) -> None:
        for b, c in recall.items():
            self.recall_by_ld[b].hits += c.hits
            self.recall_by_ld[b].total += c.total
        for k, p in precision.items():
            self.precision[k].tp += p.tp
            self.precision[k].fp += p.fp

    def to_json(self) -> dict:
        return {
            "recall_by_ld": {b: c.to_json() for b, c in self.recall_by_ld.items()},
            "precision": {k: p.to_json() for k, p in self.precision.items()},
            "throughput_chars_per_ms": self.throughput_chars_per_ms,
            "wall_time_ms": self.wall_time_ms,
            "match_count": self.match_count,
        }


Annotator = Callable[[str], Sequence[Match]]


def throughput(annotate: Annotator, texts: Sequence[str], repeats: int = 3,
               warmup: bool = True) -> tuple[float | None, float]:
    """(chars per ms, wall ms) as the minimum over ``repeats`` timed passes.

    The collector is paused while timing; one untimed warm-up pass runs
    first unless ``warmup`` is false.
    """
    total = sum(len(t) for t in texts)
    if warmup:
        for t in texts:
            annotate(t)
    best = float("inf")
    enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(max(1, repeats)):
            t0 = time.perf_counter()
            for t in texts:
                annotate(t)
            best = min(best, time.perf_counter() - t0)
    finally:
        if enabled:
            gc.enable()
    wall_ms = best * 1000.0
    return (total / wall_ms if wall_ms > 0 else None), wall_ms


def evaluate(annotate: Annotator, corpus: Sequence[AnnotatedDocument],
             labels_of: LabelMap, repeats: int = 3, timing: bool = True) -> MetricsReport:
    report = MetricsReport()
    for doc in corpus:
        matches = annotate(doc.plain_text)
        report.match_count += len(matches)
        report.add(recall_by_ld(matches, doc, labels_of),
                   precision_suite(matches, doc, labels_of))
    texts = [d.plain_text for d in corpus]
    if timing and texts:
        report.throughput_chars_per_ms, report.wall_time_ms = throughput(annotate, texts, repeats)
    return report


def compare(recognizers: Mapping[str, Annotator], corpus: Sequence[AnnotatedDocument],
            labels_of: LabelMap, repeats: int = 3, timing: bool = True) -> dict[str, MetricsReport]:
    return {
        name: evaluate(fn, corpus, labels_of, repeats, timing)
        for name, fn in recognizers.items()
    }
