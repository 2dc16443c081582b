"""StemFST baseline: one character trie over stemmed labels, stemmed input tokens."""

from __future__ import annotations

from typing import Callable

from .engine import Candidate, Match, token_spans, vote, words_of
from .lexicon import Gazetteer
from .morphology import stem as default_stem

TAG = "STEMFST"


class _Node:
    __slots__ = ("children", "ids")

    def __init__(self):
        self.children: dict[str, _Node] = {}
        self.ids: frozenset[str] = frozenset()


def _bare(surface: str) -> str:
    return surface.rstrip(".") or surface


class StemIndex:
    """Keys are label words stemmed and rejoined with single spaces.

    Matching walks the trie across consecutive stemmed tokens, inserting the
    space separator between them, so keys are compared token by token while
    reported spans stay on the original text's token boundaries.
    """

    def __init__(self, stemmer: Callable[[str], str] = default_stem):
        self.stemmer = stemmer
        self.root = _Node()
        self.node_count = 0
        self.keys: dict[str, frozenset[str]] = {}

    def key_of(self, label: str) -> str:
        return " ".join(self.stemmer(_bare(w)) for w in words_of(label))

    def insert(self, label: str, entity: str) -> str:
        key = self.key_of(label)
        if not key:
            return key
        node = self.root
        for ch in key:
            nxt = node.children.get(ch)
            if nxt is None:
                nxt = node.children[ch] = _Node()
                self.node_count += 1
            node = nxt
        node.ids = node.ids | {entity}
        self.keys[key] = node.ids
        return key

    def __len__(self):
        return len(self.keys)

    def annotate(self, text: str) -> list[Match]:
        if not text or not self.keys:
            return []
        stemmer = self.stemmer
        root = self.root
        # sentences split on ! ? and blank lines
        sentences: list[list[tuple[int, int, str]]] = [[]]
        for start, end, surface in token_spans(text):
            if surface is None:
                sentences.append([])
                continue
            bare = _bare(surface)
            sentences[-1].append((start, start + len(bare), stemmer(bare)))

        found: list[Candidate] = []
        for toks in sentences:
            n = len(toks)
            for i in range(n):
                node = root.children.get(toks[i][2][0]) if toks[i][2] else None
                if node is None:
                    continue
                node = root
                j = i
                while j < n:
                    if j > i:
                        node = node.children.get(" ")
                        if node is None:
                            break
                    for ch in toks[j][2]:
                        node = node.children.get(ch)
                        if node is None:
                            break
                    if node is None:
                        break
                    if node.ids:
                        found.append(Candidate(toks[i][0], toks[j][1], node.ids, TAG))
                    j += 1
        return [
            Match(c.start, c.end, text[c.start:c.end], c.term_ids, TAG)
            for c in vote(found)
        ]


def build_stem_index(gazetteer: Gazetteer, stemmer: Callable[[str], str] = default_stem) -> StemIndex:
    index = StemIndex(stemmer)
    for e in gazetteer.entries:
        index.insert(e.label, e.entity)
    return index


def annotate_stemmed(index: StemIndex, text: str) -> list[Match]:
    return index.annotate(text)
