"""Gazetteer ingestion: TSV entity labels, label normalization, tolerance policies."""

from __future__ import annotations

import logging
import re
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

from .engine import words_of

log = logging.getLogger(__name__)

UNKNOWN_TYPE = "UNKNOWN"


class TolerancePolicy(str, Enum):
    HIGH = "HIGH"
    LOW = "LOW"
    ACRONYM = "ACRONYM"


# ``default`` is the fallback key inside a policy config.
DEFAULT_KEY = "default"

DEFAULT_POLICY_CONFIG: dict[str, TolerancePolicy] = {
    "person": TolerancePolicy.LOW,
    "city": TolerancePolicy.LOW,
    "film": TolerancePolicy.LOW,
}

_QUALIFIER_RE = re.compile(r"\s\([^()]*\)$")


def normalize_label(raw: str) -> str | None:
    """Strip a trailing ``(qualifier)`` and whitespace; ``None`` if the label
    is empty, a single character, or has no letters at all."""
    label = raw.strip()
    m = _QUALIFIER_RE.search(label)
    if m and not _QUALIFIER_RE.search(label[: m.start()].rstrip()):
        label = label[: m.start()].strip()
    if len(label) < 2:
        return None
    if all(
        unicodedata.category(ch)[0] in "NPSZ" for ch in label
    ):
        return None
    return label


def policy_for_type(entity_type: str, config: Mapping[str, TolerancePolicy]) -> TolerancePolicy:
    if entity_type in config:
        return TolerancePolicy(config[entity_type])
    return TolerancePolicy(config.get(DEFAULT_KEY, TolerancePolicy.HIGH))


def is_acronym(label: str) -> bool:
    return (
        " " not in label
        and 2 <= len(label) <= 10
        and label.isupper()
        and len(words_of(label)) == 1
    )


@dataclass(frozen=True)
class TermEntry:
    entity: str
    label: str
    entity_type: str = UNKNOWN_TYPE
    policy: TolerancePolicy = TolerancePolicy.HIGH


@dataclass(frozen=True)
class LoadError:
    lineno: int
    message: str


@dataclass
class Gazetteer:
    entries: list[TermEntry] = field(default_factory=list)
    policy_config: dict[str, TolerancePolicy] = field(default_factory=dict)
    errors: list[LoadError] = field(default_factory=list)
    dropped: int = 0

    def __len__(self):
        return len(self.entries)

    def labels_of(self) -> dict[str, set[str]]:
        """entity id -> set of normalized labels"""
        out: dict[str, set[str]] = {}
        for e in self.entries:
            out.setdefault(e.entity, set()).add(e.label)
        return out

    def entities_of(self) -> dict[str, set[str]]:
        """normalized label -> set of entity ids"""
        out: dict[str, set[str]] = {}
        for e in self.entries:
            out.setdefault(e.label, set()).add(e.entity)
        return out


def make_entry(entity: str, label: str, entity_type: str,
               config: Mapping[str, TolerancePolicy]) -> TermEntry:
    if entity_type not in config and is_acronym(label):
        policy = TolerancePolicy.ACRONYM
    else:
        policy = policy_for_type(entity_type, config)
    return TermEntry(entity, label, entity_type, policy)


def load_gazetteer(lines: Iterable[str],
                   policy_config: Mapping[str, TolerancePolicy] | None = None) -> Gazetteer:
    """Read ``id <TAB> label [<TAB> type]`` lines.

    Malformed lines are logged and counted in ``errors``; labels rejected by
    :func:`normalize_label` are counted in ``dropped``. Duplicate
    (id, label) pairs are kept once.
    """
    config = dict(DEFAULT_POLICY_CONFIG if policy_config is None else policy_config)
    gaz = Gazetteer(policy_config=config)
    seen: set[tuple[str, str]] = set()
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        parts = [p.strip() for p in line.split("\t")]
        if len(parts) < 2 or len(parts) > 3 or not parts[0]:
            msg = "expected 'id<TAB>label[<TAB>type]'"
            log.warning("gazetteer line %d: %s", lineno, msg)
            gaz.errors.append(LoadError(lineno, msg))
            continue
        label = normalize_label(parts[1])
        if label is None:
            gaz.dropped += 1
            continue
        etype = parts[2] if len(parts) == 3 and parts[2] else UNKNOWN_TYPE
        if (parts[0], label) in seen:
            continue
        seen.add((parts[0], label))
        gaz.entries.append(make_entry(parts[0], label, etype, config))
    return gaz


def load_policy_config(lines: Iterable[str]) -> dict[str, TolerancePolicy]:
    """Parse ``type = HIGH|LOW|ACRONYM`` lines (``#`` comments allowed)."""
    config: dict[str, TolerancePolicy] = {}
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ValueError(f"policy config line {lineno}: expected 'type = POLICY'")
        try:
            config[key.strip()] = TolerancePolicy(value.strip().upper())
        except ValueError:
            raise ValueError(
                f"policy config line {lineno}: unknown policy {value.strip()!r}"
            ) from None
    return config
