"""Two-layer finite-state transducer for gazetteer matching.

The character layer is a plain trie that maps token surfaces to dense word
ids. The word layer is a trie over *slots* (sets of word ids accepted at one
position of a term), so a multi-word term with per-position inflection sets
is stored as a single chain of nodes while accepting the full Cartesian
product of its forms. Matching runs a rake of processors over the word-id
stream; every processor that reaches an accepting node reports a candidate
and a longest-leftmost voter resolves overlaps.
"""

from __future__ import annotations

import json
import logging
import re
from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, NamedTuple, Sequence

from ._locks import RWLock

log = logging.getLogger(__name__)

# Hyphen and period are token-internal; a trailing period makes a token
# ambiguous between abbreviation and sentence end.
DELIMITER_CHARS = ",;:!?()[]{}\"'«»/\\‘’‚„“”‹›"
SENTENCE_END_CHARS = "!?"

_DELIM_CLASS = (
    r"\s\x00-\x1f\x7f" + re.escape(DELIMITER_CHARS)
)
_TOKEN_RE = re.compile(
    rf"(?P<tok>[^{_DELIM_CLASS}]+)|(?P<end>[!?]|\n[^\S\n]*\n)"
)
_DELIM_RE = re.compile(rf"[{_DELIM_CLASS}]")

DEFAULT_RAKE_CAP = 10_000


class Token(NamedTuple):
    ordinal: int
    start: int
    end: int
    surface: str


def tokenize(text: str) -> Iterator[Token | None]:
    """Yield tokens in order; ``None`` marks a sentence boundary.

    Ordinals count every token, known or not, so consumers can tell when
    two tokens are adjacent.
    """
    ordinal = 0
    for m in _TOKEN_RE.finditer(text):
        surface = m.group("tok")
        if surface is None:
            yield None
            continue
        yield Token(ordinal, m.start(), m.end(), surface)
        ordinal += 1


Span = tuple[int, int, "str | None"]


def token_spans(text: str) -> list[Span]:
    """(start, end, surface) per token; surface ``None`` marks a sentence end."""
    return [(m.start(), m.end(), m.group(1)) for m in _TOKEN_RE.finditer(text)]


def words_of(label: str) -> list[str]:
    """Split a label into the token surfaces the scanner would produce."""
    return [t.surface for t in tokenize(label) if t is not None]


def has_delimiter(surface: str) -> bool:
    return _DELIM_RE.search(surface) is not None


class EventKind(Enum):
    WORD = "word"
    DOT_AMBIGUOUS = "dot"
    SENTENCE_END = "sentence_end"
    STREAM_END = "stream_end"


@dataclass(frozen=True, slots=True)
class LayerEvent:
    kind: EventKind
    start: int = 0
    end: int = 0
    ordinal: int = -1
    word_id: int | None = None
    word_without_dot: int | None = None

    @property
    def word_with_dot(self) -> int | None:
        return self.word_id if self.kind is EventKind.DOT_AMBIGUOUS else None


_SENTENCE_END = LayerEvent(EventKind.SENTENCE_END)
_STREAM_END = LayerEvent(EventKind.STREAM_END)


@dataclass(frozen=True, slots=True)
class Match:
    start: int
    end: int
    surface: str
    term_ids: frozenset[str]
    recognizer_tag: str = "mlfst"

    def to_json(self) -> dict:
        return {
            "start": self.start,
            "end": self.end,
            "surface": self.surface,
            "entity_ids": sorted(self.term_ids),
            "recognizer": self.recognizer_tag,
        }


class Candidate(NamedTuple):
    start: int
    end: int
    term_ids: frozenset[str]
    tag: str


def vote(candidates: Iterable[Candidate], priority: Sequence[str] = ()) -> list[Candidate]:
    """Longest-leftmost overlap resolution.

    Identical spans are merged first (ids unioned, tag set to the one that
    comes earliest in ``priority``). Then longer spans win, ties go to the
    leftmost start, residual ties to the higher-priority tag. The result is
    sorted by start and pairwise non-overlapping.
    """
    rank = {tag: i for i, tag in enumerate(priority)}
    worst = len(rank)
    merged: dict[tuple[int, int], Candidate] = {}
    for c in candidates:
        key = (c.start, c.end)
        prev = merged.get(key)
        if prev is None:
            merged[key] = c
        else:
            tag = prev.tag
            if rank.get(c.tag, worst) < rank.get(tag, worst):
                tag = c.tag
            merged[key] = Candidate(c.start, c.end, prev.term_ids | c.term_ids, tag)

    def key(c):
        return (c.start - c.end, c.start, rank.get(c.tag, worst))

    # Overlap clusters are independent, so the greedy runs per cluster.
    out: list[Candidate] = []
    cluster: list[Candidate] = []
    reach = -1
    for c in sorted(merged.values()):
        if c.start >= reach and cluster:
            out.extend(_greedy(cluster, key))
            cluster = []
        cluster.append(c)
        if c.end > reach:
            reach = c.end
    if cluster:
        out.extend(_greedy(cluster, key))
    return out


def _greedy(cluster: list[Candidate], key) -> list[Candidate]:
    if len(cluster) == 1:
        return cluster
    starts: list[int] = []
    kept: list[Candidate] = []
    for c in sorted(cluster, key=key):
        i = bisect_right(starts, c.start)
        if i and kept[i - 1].end > c.start:
            continue
        if i < len(kept) and kept[i].start < c.end:
            continue
        starts.insert(i, c.start)
        kept.insert(i, c)
    return kept


# ---------------------------------------------------------------------------
# character layer


class _CharNode:
    __slots__ = ("children", "word_id", "refs", "word_refs")

    def __init__(self):
        self.children: dict[str, _CharNode] = {}
        self.word_id: int | None = None
        self.refs = 0
        self.word_refs = 0


class CharTrie:
    """Trie from surface strings to dense word ids, with reference counts."""

    def __init__(self):
        self.root = _CharNode()
        self._surfaces: list[str | None] = []
        self._free: list[int] = []
        self.node_count = 0

    def __len__(self):
        return len(self._surfaces) - len(self._free)

    def register(self, surface: str) -> int:
        if not surface:
            raise ValueError("empty word surface")
        if has_delimiter(surface):
            raise ValueError(f"word surface contains a delimiter: {surface!r}")
        node = self.root
        path = []
        for ch in surface:
            nxt = node.children.get(ch)
            if nxt is None:
                nxt = node.children[ch] = _CharNode()
                self.node_count += 1
            path.append(nxt)
            node = nxt
        for n in path:
            n.refs += 1
        if node.word_id is None:
            if self._free:
                node.word_id = self._free.pop()
                self._surfaces[node.word_id] = surface
            else:
                node.word_id = len(self._surfaces)
                self._surfaces.append(surface)
        node.word_refs += 1
        return node.word_id

    def unregister(self, surface: str) -> None:
        node = self.root
        path = [node]
        for ch in surface:
            node = node.children.get(ch)
            if node is None:
                raise KeyError(surface)
            path.append(node)
        if node.word_id is None:
            raise KeyError(surface)
        node.word_refs -= 1
        if node.word_refs == 0:
            self._free.append(node.word_id)
            self._surfaces[node.word_id] = None
            node.word_id = None
        for parent, child, ch in zip(path, path[1:], surface):
            child.refs -= 1
            if child.refs == 0:
                # everything below has refs 0 as well
                del parent.children[ch]
                self.node_count -= _subtree_size(child)
                break

    def lookup(self, surface: str) -> int | None:
        node = self.root
        for ch in surface:
            node = node.children.get(ch)
            if node is None:
                return None
        return node.word_id

    def refcount(self, surface: str) -> int:
        node = self.root
        for ch in surface:
            node = node.children.get(ch)
            if node is None:
                return 0
        return node.word_refs

    def surface(self, word_id: int) -> str:
        s = self._surfaces[word_id]
        if s is None:
            raise KeyError(word_id)
        return s

    def words(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self._surfaces) if s is not None}


def _subtree_size(node: _CharNode) -> int:
    n = 1
    stack = list(node.children.values())
    while stack:
        cur = stack.pop()
        n += 1
        stack.extend(cur.children.values())
    return n


# ---------------------------------------------------------------------------
# word layer


class _WordNode:
    __slots__ = ("children", "edges", "terms", "term_set", "refs")

    def __init__(self):
        # slot (frozenset of word ids) -> child
        self.children: dict[frozenset[int], _WordNode] = {}
        # word id -> children whose slot contains it
        self.edges: dict[int, list[_WordNode]] = {}
        self.terms: set[str] = set()
        self.term_set: frozenset[str] = frozenset()
        self.refs = 0


class TermGraph:
    def __init__(self):
        self.root = _WordNode()
        self.node_count = 0

    def insert(self, slots: Sequence[frozenset[int]], term_id: str) -> None:
        node = self.root
        for slot in slots:
            child = node.children.get(slot)
            if child is None:
                child = node.children[slot] = _WordNode()
                self.node_count += 1
                for w in slot:
                    node.edges.setdefault(w, []).append(child)
            child.refs += 1
            node = child
        node.terms.add(term_id)
        node.term_set = frozenset(node.terms)

    def delete(self, slots: Sequence[frozenset[int]], term_id: str) -> None:
        path = [self.root]
        node = self.root
        for slot in slots:
            node = node.children[slot]
            path.append(node)
        node.terms.discard(term_id)
        node.term_set = frozenset(node.terms)
        for parent, child, slot in zip(path, path[1:], slots):
            child.refs -= 1
            if child.refs == 0:
                del parent.children[slot]
                for w in slot:
                    lst = parent.edges[w]
                    lst.remove(child)
                    if not lst:
                        del parent.edges[w]
                self.node_count -= _word_subtree_size(child)
                break

    def sequences(self) -> Iterator[tuple[tuple[int, ...], frozenset[str]]]:
        """Enumerate every accepted word-id sequence (exhaustive; small graphs only)."""
        stack: list[tuple[_WordNode, tuple[int, ...]]] = [(self.root, ())]
        while stack:
            node, prefix = stack.pop()
            if node.terms and prefix:
                yield prefix, node.term_set
            for w, children in node.edges.items():
                for child in children:
                    stack.append((child, prefix + (w,)))


def _word_subtree_size(node: _WordNode) -> int:
    n = 1
    stack = list(node.children.values())
    while stack:
        cur = stack.pop()
        n += 1
        stack.extend(cur.children.values())
    return n


# ---------------------------------------------------------------------------
# rake


class Processor:
    __slots__ = ("node", "start")

    def __init__(self, node: _WordNode, start: int):
        self.node = node
        self.start = start


class Rake:
    """Parallel word-layer processors for one annotate pass.

    Completed matches are reported as soon as a processor lands on an
    accepting node; the voter sees the same candidate set it would get from
    harvesting at failure time.
    """

    def __init__(self, graph: TermGraph, cap: int = DEFAULT_RAKE_CAP):
        if cap < 1:
            raise ValueError("rake cap must be >= 1")
        self.graph = graph
        self.cap = cap
        self.processors: list[Processor] = []
        self.last_ordinal = -2
        self.peak = 0
        self.peak_transient = 0
        self.overflow = 0

    def on_event(self, ev: LayerEvent) -> list[Candidate]:
        out: list[Candidate] = []
        kind = ev.kind
        if kind is EventKind.SENTENCE_END or kind is EventKind.STREAM_END:
            self.processors = []
            self.last_ordinal = -2
            return out
        if ev.ordinal != self.last_ordinal + 1:
            # an unknown token sat in between
            self.processors = []
        self.last_ordinal = ev.ordinal

        root = self.graph.root
        live = self.processors
        if kind is EventKind.WORD:
            nxt = self._advance(live, root, ev.word_id, ev.start, ev.end, out)
            pending = 0
        else:
            nxt = self._advance(live, root, ev.word_id, ev.start, ev.end, out)
            # sentence-end branch: consume the bare word, then stop
            ended = self._advance(
                live, root, ev.word_without_dot, ev.start, ev.end - 1, out
            )
            pending = len(ended)
        if len(nxt) + pending > self.peak_transient:
            self.peak_transient = len(nxt) + pending
        if len(nxt) > self.cap:
            self.overflow += len(nxt) - self.cap
            del nxt[: len(nxt) - self.cap]
        # the sentence-end branch is harvested and dropped within this
        # event, so only ``nxt`` stays live
        if len(nxt) > self.peak:
            self.peak = len(nxt)
        self.processors = nxt
        return out

    @staticmethod
    def _advance(live, root, word_id, start, end, out) -> list[Processor]:
        nxt: list[Processor] = []
        if word_id is None:
            return nxt
        for p in live:
            children = p.node.edges.get(word_id)
            if children:
                for child in children:
                    nxt.append(Processor(child, p.start))
                    if child.terms:
                        out.append(Candidate(p.start, end, child.term_set, ""))
        children = root.edges.get(word_id)
        if children:
            for child in children:
                nxt.append(Processor(child, start))
                if child.terms:
                    out.append(Candidate(start, end, child.term_set, ""))
        return nxt


# ---------------------------------------------------------------------------
# the transducer


def _slot_key(forms: Iterable[str]) -> frozenset[str]:
    fs = frozenset(forms)
    if not fs:
        raise ValueError("empty form set")
    return fs


class MultiLayerFST:
    """Character layer + word layer with dynamic term insertion and removal.

    ``annotate`` takes a shared lock and may run concurrently; ``add_term``
    and ``remove_term`` take it exclusively so a term is never visible
    half-inserted.
    """

    def __init__(self, rake_cap: int = DEFAULT_RAKE_CAP, tag: str = "mlfst"):
        if rake_cap < 1:
            raise ValueError("rake cap must be >= 1")
        self.chars = CharTrie()
        self.graph = TermGraph()
        self.rake_cap = rake_cap
        self.tag = tag
        self._terms: dict[tuple[str, tuple[frozenset[str], ...]], tuple[frozenset[int], ...]] = {}
        self._lock = RWLock()
        self.last_peak = 0
        self.last_overflow = 0

    # -- vocabulary ---------------------------------------------------------

    def register_word(self, surface: str) -> int:
        with self._lock.write():
            return self.chars.register(surface)

    def unregister_word(self, surface: str) -> None:
        with self._lock.write():
            self.chars.unregister(surface)

    @property
    def term_count(self) -> int:
        return len(self._terms)

    def terms(self) -> list[tuple[str, list[list[str]]]]:
        return [
            (term_id, [sorted(slot) for slot in slots])
            for term_id, slots in self._terms
        ]

    def add_term(self, per_position_forms: Sequence[Iterable[str]], term_id: str) -> None:
        slots = tuple(_slot_key(f) for f in per_position_forms)
        if not slots:
            raise ValueError("term needs at least one word")
        for slot in slots:
            for surface in slot:
                if not surface or has_delimiter(surface):
                    raise ValueError(f"invalid word surface {surface!r}")
        key = (term_id, slots)
        with self._lock.write():
            if key in self._terms:
                return
            id_slots = tuple(
                frozenset(self.chars.register(s) for s in slot) for slot in slots
            )
            self.graph.insert(id_slots, term_id)
            self._terms[key] = id_slots

    def remove_term(self, per_position_forms: Sequence[Iterable[str]], term_id: str) -> bool:
        slots = tuple(frozenset(f) for f in per_position_forms)
        key = (term_id, slots)
        with self._lock.write():
            id_slots = self._terms.pop(key, None)
            if id_slots is None:
                log.warning("remove_term: unknown term %r", term_id)
                return False
            self.graph.delete(id_slots, term_id)
            for slot in slots:
                for s in slot:
                    self.chars.unregister(s)
            return True

    # -- scanning -----------------------------------------------------------

    def scan_chars(self, text: str) -> Iterator[LayerEvent]:
        """Character-layer pass: one event per known token, plus sentence signals."""
        return self.scan_tokens(token_spans(text))

    def scan_tokens(self, spans: Iterable[Span]) -> Iterator[LayerEvent]:
        root = self.chars.root
        ordinal = -1
        for start, end, surface in spans:
            if surface is None:
                yield _SENTENCE_END
                continue
            ordinal += 1
            node = root
            if surface[-1] == ".":
                with_dot = None
                without = None
                for ch in surface[:-1]:
                    node = node.children.get(ch)
                    if node is None:
                        break
                else:
                    without = node.word_id
                    node = node.children.get(".")
                    if node is not None:
                        with_dot = node.word_id
                if with_dot is None and without is None:
                    continue
                yield LayerEvent(
                    EventKind.DOT_AMBIGUOUS, start, end, ordinal, with_dot, without
                )
            else:
                for ch in surface:
                    node = node.children.get(ch)
                    if node is None:
                        break
                else:
                    if node.word_id is not None:
                        yield LayerEvent(EventKind.WORD, start, end, ordinal, node.word_id)
        yield _STREAM_END

    def candidates(self, spans: Iterable[Span]) -> list[Candidate]:
        """Raw (pre-vote) candidates over a pre-tokenized text.

        Callers must hold :meth:`reading` when the engine may be mutated
        concurrently.
        """
        rake = Rake(self.graph, self.rake_cap)
        out: list[Candidate] = []
        on_event = rake.on_event
        for ev in self.scan_tokens(spans):
            found = on_event(ev)
            if found:
                out.extend(found)
        self.last_peak = rake.peak
        self.last_overflow = rake.overflow
        return out

    def reading(self):
        return self._lock.read()

    def annotate(self, text: str) -> list[Match]:
        if not text:
            return []
        with self._lock.read():
            found = self.candidates(token_spans(text))
        return [
            Match(c.start, c.end, text[c.start:c.end], c.term_ids, self.tag)
            for c in vote(found)
        ]

    # -- introspection ------------------------------------------------------

    def accepted_sequences(self) -> list[tuple[tuple[str, ...], frozenset[str]]]:
        surf = self.chars.surface
        return [
            (tuple(surf(w) for w in seq), ids) for seq, ids in self.graph.sequences()
        ]

    def stats(self) -> dict:
        return {
            "terms": len(self._terms),
            "words": len(self.chars),
            "char_nodes": self.chars.node_count,
            "word_nodes": self.graph.node_count,
        }

    # -- persistence --------------------------------------------------------

    def dump(self, fp) -> None:
        """Line-oriented JSON dump; ``load`` replays it into an equal engine."""
        with self._lock.read():
            header = {"format": "gazner-mlfst", "version": 1, "tag": self.tag,
                      "rake_cap": self.rake_cap, "words": self.chars.words()}
            fp.write(json.dumps(header, ensure_ascii=False) + "\n")
            for term_id, slots in self.terms():
                fp.write(json.dumps({"term": term_id, "slots": slots},
                                    ensure_ascii=False) + "\n")

    @classmethod
    def load(cls, fp) -> "MultiLayerFST":
        header = json.loads(fp.readline())
        if header.get("format") != "gazner-mlfst" or header.get("version") != 1:
            raise ValueError("not a gazner-mlfst v1 dump")
        fst = cls(rake_cap=header["rake_cap"], tag=header["tag"])
        for line in fp:
            if line.strip():
                rec = json.loads(line)
                fst.add_term(rec["slots"], rec["term"])
        return fst
