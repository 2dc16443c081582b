"""Hierarchical recognizer: one transducer per tolerance policy plus a top-level voter."""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from ._locks import RWLock
from .engine import (
    DEFAULT_RAKE_CAP,
    Match,
    MultiLayerFST,
    has_delimiter,
    token_spans,
    vote,
    words_of,
)
from .lexicon import (
    DEFAULT_POLICY_CONFIG,
    Gazetteer,
    TermEntry,
    TolerancePolicy,
)
from .morphology import (
    DEFAULT_TAG_PREFIXES,
    LemmaTable,
    Provenance,
    genitive_variants,
    inflected_forms,
    swap_first,
)

log = logging.getLogger(__name__)

HIGH, LOW, ACRONYM = TolerancePolicy.HIGH, TolerancePolicy.LOW, TolerancePolicy.ACRONYM

# residual-tie order of the top-level voter, most precise first
PRIORITY = (LOW.value, ACRONYM.value, HIGH.value)


@dataclass
class RecognizerConfig:
    policy_config: Mapping[str, TolerancePolicy] = field(
        default_factory=lambda: dict(DEFAULT_POLICY_CONFIG)
    )
    accepted_tag_prefixes: frozenset[str] = DEFAULT_TAG_PREFIXES
    rake_cap: int = DEFAULT_RAKE_CAP
    case_fold_first_letter: bool = True

    def __post_init__(self):
        if self.rake_cap < 1:
            raise ValueError("rake_cap must be >= 1")


def _clean(form: str) -> str | None:
    # "Marx'" tokenizes as "Marx" + delimiter, so the apostrophe never
    # reaches the character layer
    form = form.rstrip("'")
    if not form or has_delimiter(form):
        return None
    return form


def _with_genitive(word: str) -> list[str]:
    if word[-1].isalpha():
        return genitive_variants(word)
    return [word]


def expand(entry: TermEntry, table: LemmaTable, cfg: RecognizerConfig) -> tuple[frozenset[str], ...]:
    """Per-position form sets for ``entry`` under its tolerance policy."""
    words = words_of(entry.label)
    if not words:
        raise ValueError(f"label has no words: {entry.label!r}")
    slots = []
    for i, word in enumerate(words):
        if entry.policy is HIGH:
            wf = inflected_forms(word, table)
            forms = list(wf.forms)
            if wf.provenance is Provenance.FALLBACK:
                forms = _with_genitive(word)
            if cfg.case_fold_first_letter:
                forms = forms + [swap_first(f) for f in forms]
        elif entry.policy is LOW:
            forms = _with_genitive(word) if i == len(words) - 1 else [word]
        else:
            forms = [word]
        cleaned = {c for c in map(_clean, forms) if c}
        cleaned.add(word)
        slots.append(frozenset(cleaned))
    return tuple(slots)


class HierarchicalRecognizer:
    """Routes each gazetteer entry to the sub-transducer of its policy and
    merges the sub-results.

    ``annotate`` may run concurrently; ``update`` is atomic across all
    sub-transducers.
    """

    def __init__(self, table: LemmaTable | None = None, cfg: RecognizerConfig | None = None):
        self.cfg = cfg or RecognizerConfig()
        self.table = table if table is not None else LemmaTable()
        self.engines: dict[TolerancePolicy, MultiLayerFST] = {
            p: MultiLayerFST(rake_cap=self.cfg.rake_cap, tag=p.value)
            for p in (HIGH, LOW, ACRONYM)
        }
        # (entry) -> registered slots; an entry appears at most once
        self.registry: dict[TermEntry, tuple[frozenset[str], ...]] = {}
        # the engine dedupes identical (term, slots); count users here
        self._uses: Counter = Counter()
        self._lock = RWLock()

    @classmethod
    def build(cls, gazetteer: Gazetteer, table: LemmaTable | None = None,
              cfg: RecognizerConfig | None = None) -> "HierarchicalRecognizer":
        rec = cls(table, cfg)
        for entry in gazetteer.entries:
            rec.add(entry)
        return rec

    def __len__(self):
        return len(self.registry)

    @property
    def entries(self) -> list[TermEntry]:
        return list(self.registry)

    def _register(self, entry: TermEntry, slots) -> None:
        key = (entry.policy, entry.entity, slots)
        if self._uses[key] == 0:
            self.engines[entry.policy].add_term(slots, entry.entity)
        self._uses[key] += 1
        self.registry[entry] = slots

    def add(self, entry: TermEntry) -> None:
        slots = expand(entry, self.table, self.cfg)
        with self._lock.write():
            if entry in self.registry:
                return
            self._register(entry, slots)

    def remove(self, entry: TermEntry) -> bool:
        with self._lock.write():
            slots = self.registry.pop(entry, None)
            if slots is None:
                log.warning("remove: unknown entry %r", entry)
                return False
            key = (entry.policy, entry.entity, slots)
            self._uses[key] -= 1
            if self._uses[key] == 0:
                del self._uses[key]
                self.engines[entry.policy].remove_term(slots, entry.entity)
            return True

    def update(self, op: str, entry: TermEntry) -> bool:
        op = op.upper()
        if op == "ADD":
            self.add(entry)
            return True
        if op == "REMOVE":
            return self.remove(entry)
        raise ValueError(f"unknown update op {op!r}")

    def annotate(self, text: str) -> list[Match]:
        if not text:
            return []
        spans = token_spans(text)
        found = []
        with self._lock.read():
            for policy, engine in self.engines.items():
                if not engine.term_count:
                    continue
                tag = policy.value
                cands = engine.candidates(spans)
                if policy is ACRONYM:
                    cands = [c for c in cands if text[c.start:c.end].isupper()]
                found.extend(c._replace(tag=tag) for c in cands)
        return [
            Match(c.start, c.end, text[c.start:c.end], c.term_ids, c.tag)
            for c in vote(found, PRIORITY)
        ]

    @property
    def peak_processors(self) -> int:
        return max(e.last_peak for e in self.engines.values())

    def stats(self) -> dict:
        per = {p.value: e.stats() for p, e in self.engines.items()}
        return {
            "entries": len(self.registry),
            "char_nodes": sum(s["char_nodes"] for s in per.values()),
            "word_nodes": sum(s["word_nodes"] for s in per.values()),
            "engines": per,
        }

    # -- persistence --------------------------------------------------------

    def dump(self, fp) -> None:
        """JSON lines: a header, then one record per entry with its slots."""
        with self._lock.read():
            cfg = self.cfg
            header = {
                "format": "gazner-index",
                "version": 1,
                "rake_cap": cfg.rake_cap,
                "case_fold_first_letter": cfg.case_fold_first_letter,
                "accepted_tag_prefixes": sorted(cfg.accepted_tag_prefixes),
                "policy_config": {k: TolerancePolicy(v).value
                                  for k, v in cfg.policy_config.items()},
            }
            fp.write(json.dumps(header, ensure_ascii=False) + "\n")
            for entry, slots in self.registry.items():
                rec = {
                    "entity": entry.entity,
                    "label": entry.label,
                    "type": entry.entity_type,
                    "policy": entry.policy.value,
                    "slots": [sorted(s) for s in slots],
                }
                fp.write(json.dumps(rec, ensure_ascii=False) + "\n")

    @classmethod
    def load(cls, fp, table: LemmaTable | None = None) -> "HierarchicalRecognizer":
        header = json.loads(fp.readline() or "{}")
        if header.get("format") != "gazner-index" or header.get("version") != 1:
            raise ValueError("not a gazner-index v1 dump")
        cfg = RecognizerConfig(
            policy_config={k: TolerancePolicy(v) for k, v in header["policy_config"].items()},
            accepted_tag_prefixes=frozenset(header["accepted_tag_prefixes"]),
            rake_cap=header["rake_cap"],
            case_fold_first_letter=header["case_fold_first_letter"],
        )
        rec = cls(table, cfg)
        for line in fp:
            if not line.strip():
                continue
            r = json.loads(line)
            entry = TermEntry(r["entity"], r["label"], r["type"], TolerancePolicy(r["policy"]))
            rec._register(entry, tuple(frozenset(s) for s in r["slots"]))
        return rec

    def gazetteer(self) -> Gazetteer:
        return Gazetteer(entries=list(self.registry),
                         policy_config=dict(self.cfg.policy_config))


def build(gazetteer: Gazetteer, table: LemmaTable | None = None,
          cfg: RecognizerConfig | None = None) -> HierarchicalRecognizer:
    return HierarchicalRecognizer.build(gazetteer, table, cfg)
