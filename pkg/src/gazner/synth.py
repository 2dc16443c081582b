"""Synthetic gazetteers, lemma tables and running text for benchmarks and tests."""

from __future__ import annotations

import random

from .lexicon import DEFAULT_POLICY_CONFIG, Gazetteer, make_entry

FILLER = (
    "der die und in den von zu das mit sich des auf für ist im dem nicht ein "
    "eine als auch es an werden aus er hat dass sie nach wird bei einer um am "
    "sind noch wie einem über einen so zum war haben nur oder aber vor zur bis "
    "mehr durch man sein wurde sei wenn dann sehr hier dort heute immer"
).split()

_SYLLABLES = (
    "ka ri to men sel un ber lo ta gen ste mar vi dor al ex fu ham "
    "wo ne pra kel sun tor bi la mo rek fal gri hu zen"
).split()

NOUN_ENDINGS = ("", "s", "es", "e", "en", "er", "ern")
ADJ_ENDINGS = ("", "e", "em", "en", "er", "es")


def pseudo_words(n: int, seed: int = 0, min_syllables: int = 2,
                 max_syllables: int = 4) -> list[str]:
    """``n`` distinct lowercase pseudo-words, none of them a filler word."""
    rng = random.Random(seed)
    banned = set(FILLER)
    out: dict[str, None] = {}
    while len(out) < n:
        w = "".join(rng.choice(_SYLLABLES)
                    for _ in range(rng.randint(min_syllables, max_syllables)))
        if w not in banned:
            out[w] = None
    return list(out)


def synthetic_gazetteer(n_labels: int, seed: int = 0, vocab_size: int | None = None,
                        max_words: int = 3) -> Gazetteer:
    rng = random.Random(seed)
    vocab = [w.capitalize() for w in pseudo_words(vocab_size or max(50, n_labels // 2), seed)]
    gaz = Gazetteer(policy_config=dict(DEFAULT_POLICY_CONFIG))
    seen = set()
    i = 0
    while len(gaz.entries) < n_labels:
        label = " ".join(rng.sample(vocab, rng.randint(1, max_words)))
        if label in seen:
            continue
        seen.add(label)
        gaz.entries.append(make_entry(f"syn:{i}", label, "UNKNOWN", gaz.policy_config))
        i += 1
    return gaz


def generate_text(size: int, vocab: list[str], seed: int = 0, vocab_rate: float = 0.2) -> str:
    """Roughly ``size`` characters of sentence-structured filler text, with
    ``vocab_rate`` of the tokens drawn from ``vocab``."""
    rng = random.Random(seed)
    parts: list[str] = []
    n = 0
    words_in_sentence = 0
    while n < size:
        if vocab and rng.random() < vocab_rate:
            w = rng.choice(vocab)
        else:
            w = rng.choice(FILLER)
        words_in_sentence += 1
        if words_in_sentence > 6 and rng.random() < 0.12:
            w += rng.choice(".....!?")
            words_in_sentence = 0
            sep = "\n\n" if rng.random() < 0.05 else " "
        else:
            sep = ", " if rng.random() < 0.05 else " "
        parts.append(w)
        parts.append(sep)
        n += len(w) + len(sep)
    return "".join(parts)[:size]


def label_words(gaz: Gazetteer) -> list[str]:
    seen: dict[str, None] = {}
    for e in gaz.entries:
        for w in e.label.split():
            seen[w] = None
    return list(seen)


def synthetic_lemma_table(n_nouns: int, n_adjectives: int, seed: int = 0
                          ) -> tuple[list[str], dict[str, list[str]], dict[str, list[str]]]:
    """Lemma table lines plus the noun and adjective paradigms it encodes.

    Nouns get a random subset of ``NOUN_ENDINGS`` (always including the bare
    stem); adjectives get all ``ADJ_ENDINGS``. Forms colliding across
    lemmas are avoided so every paradigm is unambiguous.
    """
    rng = random.Random(seed)
    stems = pseudo_words(n_nouns + n_adjectives, seed + 1, 2, 3)
    nouns: dict[str, list[str]] = {}
    adjs: dict[str, list[str]] = {}
    taken: set[str] = set()
    lines: list[str] = []
    for s in stems[:n_nouns]:
        lemma = s.capitalize()
        endings = [""] + rng.sample(NOUN_ENDINGS[1:], rng.randint(1, 4))
        forms = [lemma + e for e in endings]
        if taken.intersection(f.lower() for f in forms):
            continue
        taken.update(f.lower() for f in forms)
        nouns[lemma] = forms
        for f, e in zip(forms, endings):
            num = "PLU" if e in ("en", "er", "ern", "e") else "SIN"
            lines.append(f"{f} {lemma} SUB:NOM:{num}:NEU")
    for s in stems[n_nouns:]:
        forms = [s + e for e in ADJ_ENDINGS]
        if taken.intersection(forms):
            continue
        taken.update(forms)
        adjs[s] = forms
        for f in forms:
            lines.append(f"{f} {s} ADJ:NOM:SIN:MAS:GRU")
    return lines, nouns, adjs
