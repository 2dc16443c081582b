import json
import subprocess
import sys

import pytest

from gazner.cli import main


@pytest.fixture
def paths(data_dir):
    return {
        "gaz": str(data_dir / "dfki_gazetteer.tsv"),
        "lem": str(data_dir / "dfki_lemmas.txt"),
        "pol": str(data_dir / "policies.txt"),
        "corpus": str(data_dir / "corpus3.txt"),
        "cgaz": str(data_dir / "corpus3_gazetteer.tsv"),
    }


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_build_stats(capsys, paths, tmp_path):
    index = tmp_path / "idx.jsonl"
    code, out, _ = run(capsys, "build", "--gazetteer", paths["gaz"], "--lemmas", paths["lem"],
                       "--policies", paths["pol"], "--index", str(index))
    assert code == 0
    stats = json.loads(out)
    assert stats["entries"] == 4
    assert stats["char_nodes"] > 0 and stats["word_nodes"] > 0
    assert "build_ms" in stats
    assert index.read_text(encoding="utf-8").startswith('{"format": "gazner-index"')


def test_build_tiny_gazetteer(capsys, paths, tmp_path):
    gaz = tmp_path / "g.tsv"
    gaz.write_text("a\tHaus\nb\tBaum\nc\tWald\n", encoding="utf-8")
    code, out, _ = run(capsys, "build", "--gazetteer", str(gaz), "--lemmas", paths["lem"])
    assert code == 0 and json.loads(out)["entries"] == 3


def test_build_missing_lemmas(capsys, paths, tmp_path):
    code, _, err = run(capsys, "build", "--gazetteer", paths["gaz"],
                       "--lemmas", str(tmp_path / "missing.txt"))
    assert code == 2 and "cannot read" in err
    code, _, err = run(capsys, "build", "--gazetteer", paths["gaz"])
    assert code == 2 and "--lemmas" in err


def test_annotate_json_and_tsv(capsys, paths, tmp_path):
    src = tmp_path / "in.txt"
    src.write_text("Künstliche Intelligenz beim DFKI.", encoding="utf-8")
    base = ["annotate", "--gazetteer", paths["gaz"], "--lemmas", paths["lem"], "--input", str(src)]
    code, out, _ = run(capsys, *base)
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    assert rows == [
        {"start": 0, "end": 22, "surface": "Künstliche Intelligenz",
         "entity_ids": ["dbp:KI"], "recognizer": "HIGH"},
        {"start": 28, "end": 32, "surface": "DFKI",
         "entity_ids": ["dbp:DFKI"], "recognizer": "ACRONYM"},
    ]
    code, again, _ = run(capsys, *base)
    assert again == out
    code, out, _ = run(capsys, *base, "--format", "tsv")
    assert out.splitlines()[0] == "0\t22\tKünstliche Intelligenz\tdbp:KI\tHIGH"


def test_annotate_from_index_and_both(capsys, paths, tmp_path):
    index = tmp_path / "idx.jsonl"
    run(capsys, "build", "--gazetteer", paths["gaz"], "--lemmas", paths["lem"], "--index", str(index))
    src = tmp_path / "in.txt"
    src.write_text("Die Künstlichen Intelligenzen", encoding="utf-8")
    code, out, _ = run(capsys, "annotate", "--index", str(index), "--input", str(src),
                       "--recognizer", "both")
    assert code == 0
    assert [json.loads(line)["recognizer"] for line in out.splitlines()] == ["HIGH", "STEMFST"]


def test_annotate_empty_input(capsys, paths, tmp_path):
    src = tmp_path / "empty.txt"
    src.write_bytes(b"")
    code, out, _ = run(capsys, "annotate", "--gazetteer", paths["gaz"], "--lemmas", paths["lem"],
                       "--input", str(src))
    assert (code, out) == (0, "")


def test_annotate_invalid_utf8(capsys, paths, tmp_path):
    src = tmp_path / "bad.txt"
    src.write_bytes(b"Haus \xff\xfe")
    code, _, err = run(capsys, "annotate", "--gazetteer", paths["gaz"], "--lemmas", paths["lem"],
                       "--input", str(src))
    assert code == 3 and "UTF-8" in err


def test_eval_both(capsys, paths, tmp_path):
    figs = tmp_path / "figs"
    code, out, _ = run(capsys, "eval", "--gazetteer", paths["cgaz"], "--lemmas", paths["lem"],
                       "--corpus", paths["corpus"], "--recognizer", "both", "--repeats", "1",
                       "--figures", str(figs))
    assert code == 0
    reports = json.loads(out)
    assert set(reports) == {"mlfst", "stemfst"}
    for r in reports.values():
        assert list(r["recall_by_ld"]) == ["0", "1", "2", "3", "4", ">4"]
        assert set(r["precision"]) == {"P_O", "P_A", "P_O_star", "P_A_star"}
    assert (figs / "recall_by_ld.png").exists() and (figs / "precision.png").exists()


def test_eval_corpus_parse_error(capsys, paths, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("\x01doc7\nein [[kaputter Link\n", encoding="utf-8")
    code, _, err = run(capsys, "eval", "--gazetteer", paths["cgaz"], "--lemmas", paths["lem"],
                       "--corpus", str(bad))
    assert code == 4
    assert "doc7" in err and "offset 4" in err


def test_bench_generated(capsys, tmp_path):
    figs = tmp_path / "figs"
    code, out, _ = run(capsys, "bench", "--gen-size", "20000", "40000", "--gen-labels", "300",
                       "--recognizer", "both", "--repeats", "1", "--figures", str(figs))
    assert code == 0
    lines = [json.loads(line) for line in out.splitlines()]
    assert len(lines) == 2
    for res in lines:
        assert set(res) == {"mlfst", "stemfst"}
        for r in res.values():
            assert set(r) == {"chars_per_ms", "wall_time_ms", "total_chars", "matches"}
            assert r["chars_per_ms"] > 0
    assert (figs / "throughput.png").exists() and (figs / "linearity.png").exists()


def test_bench_corpus(capsys, paths):
    code, out, _ = run(capsys, "bench", "--gazetteer", paths["cgaz"], "--lemmas", paths["lem"],
                       "--corpus", paths["corpus"], "--repeats", "1")
    assert code == 0 and json.loads(out)["mlfst"]["total_chars"] > 0


def test_unknown_flag_rejected(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["build", "--bogus"])
    assert exc.value.code == 2


def test_module_entry_point(paths):
    proc = subprocess.run(
        [sys.executable, "-m", "gazner", "annotate", "--gazetteer", paths["gaz"],
         "--lemmas", paths["lem"]],
        input="Mit Müllers Hilfe".encode(), capture_output=True, check=True,
    )
    (row,) = [json.loads(line) for line in proc.stdout.decode().splitlines()]
    assert row["surface"] == "Müllers" and row["recognizer"] == "LOW"
