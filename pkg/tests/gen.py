"""Random gazetteers and texts with planted variants, shared by the oracle tests."""

from __future__ import annotations

import random

# Overlapping prefixes, case pairs, dotted and undotted twins, a hyphenated
# compound: everything that makes matching ambiguous.
POOL = [
    "Haus", "haus", "Hauses", "Prof.", "Prof", "Dr.", "Dr", "Bank", "Banken",
    "x-ray", "Ufer", "Straße", "Alt", "alt", "A.B.", "Müller", "Müllers", "Zentrum",
]
FILLER = ["und", "der", "die", "im", "zzz", "Haustür", "Bankett", "Pro"]
SEPARATORS = [" ", " ", " ", " ", ". ", ", ", "! ", "? ", "\n", "\n\n", " (", ") ", " \"", ": "]


def random_terms(rng: random.Random, max_terms: int = 50, max_words: int = 3,
                 max_forms: int = 5) -> list[tuple[str, list[set[str]]]]:
    terms = []
    for i in range(rng.randint(1, max_terms)):
        slots = [set(rng.sample(POOL, rng.randint(1, max_forms)))
                 for _ in range(rng.randint(1, max_words))]
        # reuse ids now and then so one id owns several terms
        terms.append((f"t{rng.randint(0, max(1, i))}", slots))
    return terms


def random_text(rng: random.Random, terms, max_chars: int = 2000) -> str:
    parts: list[str] = []
    size = 0
    target = rng.randint(0, max_chars)
    while size < target:
        r = rng.random()
        if r < 0.4 and terms:
            # plant a random variant of a random term
            _, slots = rng.choice(terms)
            piece = " ".join(rng.choice(sorted(s)) for s in slots)
        elif r < 0.7:
            piece = rng.choice(POOL)
        else:
            piece = rng.choice(FILLER)
        piece += rng.choice(SEPARATORS)
        if size + len(piece) > max_chars:
            break
        parts.append(piece)
        size += len(piece)
    return "".join(parts)
