"""Lemma table lookup, decompounding, genitive variants and the baseline stemmer."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Iterable

log = logging.getLogger(__name__)

DEFAULT_TAG_PREFIXES = frozenset({"ADJ", "SUB"})
NOUN_TAG_PREFIX = "SUB"

MIN_SUFFIX = 4
MIN_PREFIX = 3


class Provenance(str, Enum):
    TABLE = "TABLE"
    DECOMPOUNDED = "DECOMPOUNDED"
    FALLBACK = "FALLBACK"


@dataclass(frozen=True)
class LemmaRow:
    inflected: str
    lemma: str
    tags: tuple[str, ...]


@dataclass
class LemmaTable:
    # lemma -> inflected forms in file order (dict used as an ordered set)
    by_lemma: dict[str, dict[str, None]] = field(default_factory=dict)
    by_inflected: dict[str, set[str]] = field(default_factory=dict)
    noun_lemmas: set[str] = field(default_factory=set)
    rows: int = 0
    skipped: int = 0
    malformed: int = 0
    # lowercased noun form or lemma -> noun lemmas
    _noun_keys: dict[str, set[str]] = field(default_factory=dict, repr=False)

    def add(self, row: LemmaRow) -> None:
        self.by_lemma.setdefault(row.lemma, {})[row.inflected] = None
        self.by_inflected.setdefault(row.inflected, set()).add(row.lemma)
        if row.tags[0].startswith(NOUN_TAG_PREFIX):
            self.noun_lemmas.add(row.lemma)
            for key in (row.inflected.lower(), row.lemma.lower()):
                self._noun_keys.setdefault(key, set()).add(row.lemma)
        self.rows += 1

    def forms_of(self, lemma: str) -> list[str]:
        return list(self.by_lemma.get(lemma, ()))

    def lemmas_of(self, word: str) -> set[str]:
        """Lemmas for ``word``, trying it as given and with the first letter's
        case swapped."""
        found: set[str] = set()
        for w in (word, swap_first(word)):
            found |= self.by_inflected.get(w, set())
            if w in self.by_lemma:
                found.add(w)
        return found

    def noun_lemmas_for(self, suffix: str) -> set[str]:
        return self._noun_keys.get(suffix.lower(), set())


def parse_lemma_line(line: str) -> LemmaRow | None:
    parts = line.split()
    if len(parts) != 3:
        return None
    tags = tuple(parts[2].split(":"))
    if not all(tags):
        return None
    return LemmaRow(parts[0], parts[1], tags)


def load_lemma_table(lines: Iterable[str],
                     accepted_tag_prefixes: Iterable[str] = DEFAULT_TAG_PREFIXES) -> LemmaTable:
    prefixes = tuple(accepted_tag_prefixes)
    table = LemmaTable()
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        row = parse_lemma_line(line)
        if row is None:
            table.malformed += 1
            log.debug("lemma table line %d malformed: %r", lineno, line)
            continue
        if not row.tags[0].startswith(prefixes):
            table.skipped += 1
            continue
        table.add(row)
    return table


def swap_first(word: str) -> str:
    if not word:
        return word
    head = word[0]
    swapped = head.lower() if head.isupper() else head.upper()
    # "ß".upper() == "SS" would change the length
    if len(swapped) != 1:
        return word
    return swapped + word[1:]


def match_initial_case(form: str, like: str) -> str:
    """Give ``form`` the initial-letter casing of ``like``."""
    if not form or not like:
        return form
    if like[0].isupper() and form[0].islower():
        return swap_first(form)
    if like[0].islower() and form[0].isupper():
        return swap_first(form)
    return form


@dataclass(frozen=True)
class WordForms:
    base: str
    forms: tuple[str, ...]
    provenance: Provenance


@dataclass(frozen=True)
class Split:
    prefix: str
    suffix_lemma: str
    match_len: int


def decompound(word: str, table: LemmaTable) -> Split | None:
    """Longest noun suffix split (suffix >= 4 chars, prefix >= 3 chars)."""
    for i in range(MIN_PREFIX, len(word) - MIN_SUFFIX + 1):
        lemmas = table.noun_lemmas_for(word[i:])
        if lemmas:
            return Split(word[:i], min(lemmas), len(word) - i)
    return None


def compound_variants(word: str, split: Split, table: LemmaTable) -> list[str]:
    prefix = split.prefix
    head = word[len(prefix):]
    out = {word: None}
    for f in table.forms_of(split.suffix_lemma):
        if prefix.endswith("-"):
            f = match_initial_case(f, head)
        elif f[:1].isupper():
            f = swap_first(f)
        out[prefix + f] = None
    return list(out)


def inflected_forms(word: str, table: LemmaTable) -> WordForms:
    lemmas = table.lemmas_of(word)
    if lemmas:
        forms = {word: None}
        for lemma in sorted(lemmas):
            for f in table.forms_of(lemma):
                forms[match_initial_case(f, word)] = None
        return WordForms(word, tuple(forms), Provenance.TABLE)
    split = decompound(word, table)
    if split is not None:
        return WordForms(word, tuple(compound_variants(word, split, table)),
                         Provenance.DECOMPOUNDED)
    return WordForms(word, (word,), Provenance.FALLBACK)


def genitive_variants(word: str) -> list[str]:
    if word[-1].lower() in "sßxz":
        return [word, word + "'"]
    return [word, word + "s"]


_UMLAUTS = str.maketrans({"ä": "a", "ö": "o", "ü": "u", "ß": "ss"})
_ENDINGS = ("ern", "em", "er", "en", "es", "e", "s", "n")
MIN_STEM = 4


@lru_cache(maxsize=1 << 16)
def stem(word: str) -> str:
    """Simplified German stemmer: lowercase, fold umlauts, then strip the
    longest ending that leaves at least four characters, until none fits."""
    w = word.lower().translate(_UMLAUTS)
    while True:
        for end in _ENDINGS:
            if w.endswith(end) and len(w) - len(end) >= MIN_STEM:
                w = w[: -len(end)]
                break
        else:
            return w
