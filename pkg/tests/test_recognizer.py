import io
import itertools
import logging
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gazner.lexicon import Gazetteer, TermEntry, TolerancePolicy, load_gazetteer
from gazner.morphology import load_lemma_table
from gazner.recognizer import HierarchicalRecognizer, RecognizerConfig, build, expand

HIGH, LOW, ACRONYM = TolerancePolicy.HIGH, TolerancePolicy.LOW, TolerancePolicy.ACRONYM
DFKI_LABEL = "Deutsches Forschungszentrum für Künstliche Intelligenz"


def spans(matches):
    return [(m.surface, sorted(m.term_ids), m.recognizer_tag) for m in matches]


def one(entry, table=None, **cfg):
    return build(Gazetteer([entry]), table, RecognizerConfig(**cfg))


def test_dfki_576_sequences(dfki_table_prp):
    cfg = RecognizerConfig(case_fold_first_letter=False,
                           accepted_tag_prefixes=frozenset({"ADJ", "SUB", "PRP"}))
    entry = TermEntry("dbp:DFKI", DFKI_LABEL, "organisation", HIGH)
    slots = expand(entry, dfki_table_prp, cfg)
    assert [len(s) for s in slots] == [6, 3, 1, 16, 2]
    rec = build(Gazetteer([entry]), dfki_table_prp, cfg)
    assert len(rec.engines[HIGH].accepted_sequences()) == 576


def test_dfki_case_fold_doubles_every_position(dfki_table_prp):
    entry = TermEntry("dbp:DFKI", DFKI_LABEL, "organisation", HIGH)
    slots = expand(entry, dfki_table_prp, RecognizerConfig())
    rec = one(entry, dfki_table_prp)
    seqs = {s for s, _ in rec.engines[HIGH].accepted_sequences()}
    assert seqs == set(itertools.product(*slots))
    assert len(seqs) == 576 * 2 ** 5 == math.prod(len(s) for s in slots)


def test_low_policy_genitive_only():
    rec = one(TermEntry("per:M", "Müller", "person", LOW))
    seqs = {s for s, _ in rec.engines[LOW].accepted_sequences()}
    assert seqs == {("Müller",), ("Müllers",)}
    for word, hit in [("Müller", True), ("Müllers", True), ("Müllern", False), ("Müllerin", False)]:
        assert bool(rec.annotate(f"Das ist {word} heute.")) is hit, word


def test_low_policy_multiword_last_word_only():
    rec = one(TermEntry("per:AM", "Anna Müller", "person", LOW))
    assert {s for s, _ in rec.engines[LOW].accepted_sequences()} == {
        ("Anna", "Müller"), ("Anna", "Müllers")}


def test_acronym_exact_uppercase():
    rec = one(TermEntry("org:dfki", "DFKI", "UNKNOWN", ACRONYM))
    for text, hit in [("DFKI", True), ("dfki", False), ("Dfki", False), ("DFKIs", False)]:
        assert bool(rec.annotate(f"beim {text} arbeiten")) is hit, text


def test_identical_span_across_policies_unions_ids():
    table = load_lemma_table(["Müllerscheibe Müllerscheibe SUB:NOM:SIN:FEM",
                              "Müllers Müllerscheibe SUB:GEN:SIN:FEM"])
    gaz = Gazetteer([TermEntry("per:M", "Müller", "person", LOW),
                     TermEntry("x:MS", "Müllerscheibe", "thing", HIGH)])
    rec = build(gaz, table)
    assert spans(rec.annotate("Das Haus des Müllers.")) == [
        ("Müllers", ["per:M", "x:MS"], "LOW")]


def test_residual_tie_prefers_low():
    gaz = Gazetteer([TermEntry("a", "Alpha Beta", "person", LOW),
                     TermEntry("b", "Beta Gamma", "thing", HIGH)])
    rec = build(gaz)
    # equal length, "Alpha Beta" is leftmost
    assert spans(rec.annotate("Alpha Beta Gamma")) == [("Alpha Beta", ["a"], "LOW")]


def test_empty_text():
    assert build(Gazetteer([TermEntry("a", "Haus")])).annotate("") == []


TRUTH_VALUES = (
    "In der Aussagenlogik ordnet man jeder Aussage genau einen von zwei "
    "Wahrheitswerten zu. Die Wahrheitswerte heißen üblicherweise wahr und falsch, "
    "und der Wahrheitswert einer zusammengesetzten Aussage folgt aus den "
    "Wahrheitswerten ihrer Teile."
)


def test_inflected_truth_values_found(dfki_table):
    rec = build(load_gazetteer(["dbp:Wahrheitswert\tWahrheitswert"]), dfki_table)
    found = [m.surface for m in rec.annotate(TRUTH_VALUES)]
    assert found == ["Wahrheitswerten", "Wahrheitswerte", "Wahrheitswert", "Wahrheitswerten"]


def test_update_add_remove(caplog):
    rec = HierarchicalRecognizer()
    entry = TermEntry("a", "Haus")
    rec.update("ADD", entry)
    assert rec.annotate("ein Haus")
    assert rec.update("REMOVE", entry)
    assert rec.annotate("ein Haus") == []
    with caplog.at_level(logging.WARNING):
        assert rec.update("remove", entry) is False
    assert "unknown entry" in caplog.text
    with pytest.raises(ValueError):
        rec.update("MOVE", entry)


def test_shared_slots_survive_partial_removal():
    # the same entity with two labels that expand identically
    a, b = TermEntry("e", "Haus"), TermEntry("e", "Haus", "building")
    rec = build(Gazetteer([a, b]))
    rec.remove(a)
    assert rec.annotate("ein Haus")
    rec.remove(b)
    assert rec.annotate("ein Haus") == []


def test_rake_cap_validated():
    with pytest.raises(ValueError):
        RecognizerConfig(rake_cap=0)


def test_dump_load_round_trip(dfki_table, dfki_gazetteer):
    rec = build(dfki_gazetteer, dfki_table)
    buf = io.StringIO()
    rec.dump(buf)
    buf.seek(0)
    loaded = HierarchicalRecognizer.load(buf)
    text = ("Das Deutsche Forschungszentrum für künstliche Intelligenz, kurz DFKI, "
            "und Müllers Ideen zur Künstlichen Intelligenz. Dfki!")
    assert loaded.annotate(text) == rec.annotate(text)
    assert loaded.stats() == rec.stats()
    assert sorted(loaded.gazetteer().entries, key=repr) == sorted(dfki_gazetteer.entries, key=repr)


def test_dfki_gazetteer_routing(dfki_table, dfki_gazetteer):
    rec = build(dfki_gazetteer, dfki_table)
    assert {e.label: e.policy for e in rec.entries} == {
        DFKI_LABEL: HIGH, "Künstliche Intelligenz": HIGH, "DFKI": ACRONYM, "Müller": LOW}
    got = spans(rec.annotate("Am Deutschen Forschungszentrums für künstlicher Intelligenzen."))
    assert got == [("Deutschen Forschungszentrums für künstlicher Intelligenzen",
                    ["dbp:DFKI"], "HIGH")]


_NOUNS = ["Haus", "Baum", "Wald", "Stadt", "Bank"]
_MONO_TABLE = load_lemma_table(
    [f"{n}{e} {n} SUB:NOM:SIN:NEU" for n in _NOUNS for e in ("", "s", "es", "e")]
)


@settings(max_examples=40)
@given(st.lists(st.sampled_from(_NOUNS), min_size=1, max_size=3),
       st.lists(st.sampled_from(["", "s", "es", "e", "'"]), min_size=3, max_size=3))
def test_policy_monotonicity(words, endings):
    label = " ".join(words)
    low = one(TermEntry("e", label, "person", LOW), _MONO_TABLE)
    high = one(TermEntry("e", label, "person", HIGH), _MONO_TABLE)
    low_seqs = {s for s, _ in low.engines[LOW].accepted_sequences()}
    high_seqs = {s for s, _ in high.engines[HIGH].accepted_sequences()}
    assert low_seqs <= high_seqs
    text = " ".join(w + e for w, e in zip(words, endings))
    if low.annotate(text):
        assert high.annotate(text)


def test_stats_fields(dfki_table, dfki_gazetteer):
    st_ = build(dfki_gazetteer, dfki_table).stats()
    assert st_["entries"] == 4
    assert st_["char_nodes"] > 0 and st_["word_nodes"] > 0
