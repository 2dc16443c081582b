"""Command-line frontend: build, annotate, eval, bench.

Exit codes: 0 success, 2 missing or unreadable input, 3 encoding error,
4 corpus parse error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import synth
from .evaluation import CorpusParseError, compare, read_corpus, throughput
from .lexicon import Gazetteer, load_gazetteer, load_policy_config
from .morphology import DEFAULT_TAG_PREFIXES, LemmaTable, load_lemma_table
from .recognizer import HierarchicalRecognizer, RecognizerConfig
from .stemfst import build_stem_index

log = logging.getLogger("gazner")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_ENCODING = 3
EXIT_CORPUS = 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _read_lines(path: str, what: str) -> list[str]:
    try:
        with open(path, encoding="utf-8") as fp:
            return fp.read().splitlines()
    except UnicodeDecodeError as e:
        raise CliError(f"{what} {path}: invalid UTF-8 ({e.reason} at byte {e.start})",
                       EXIT_ENCODING) from None
    except OSError as e:
        raise CliError(f"cannot read {what} {path}: {e.strerror}", EXIT_INPUT) from None


def _require(args, *names: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if not getattr(args, n)]
    if missing:
        raise CliError(f"{args.command}: missing required {', '.join(missing)}", EXIT_INPUT)


def _config(args) -> RecognizerConfig:
    policies = (
        load_policy_config(_read_lines(args.policies, "policy config"))
        if args.policies else None
    )
    cfg = RecognizerConfig(rake_cap=args.rake_cap,
                           accepted_tag_prefixes=frozenset(args.tag_prefixes))
    if policies is not None:
        cfg.policy_config = policies
    return cfg


def _load_inputs(args, cfg: RecognizerConfig) -> tuple[Gazetteer, LemmaTable]:
    gaz = load_gazetteer(_read_lines(args.gazetteer, "gazetteer"), cfg.policy_config)
    for err in gaz.errors:
        print(f"{args.gazetteer}:{err.lineno}: {err.message}", file=sys.stderr)
    table = load_lemma_table(_read_lines(args.lemmas, "lemma table"),
                             cfg.accepted_tag_prefixes)
    return gaz, table


def _recognizers(args) -> tuple[dict, HierarchicalRecognizer | None, Gazetteer]:
    """Annotators selected by ``--recognizer``, keyed by name."""
    if args.index and not args.gazetteer:
        try:
            with open(args.index, encoding="utf-8") as fp:
                rec = HierarchicalRecognizer.load(fp)
        except OSError as e:
            raise CliError(f"cannot read index {args.index}: {e.strerror}", EXIT_INPUT) from None
        except ValueError as e:
            raise CliError(f"bad index {args.index}: {e}", EXIT_INPUT) from None
        gaz = rec.gazetteer()
    else:
        _require(args, "gazetteer", "lemmas")
        cfg = _config(args)
        gaz, table = _load_inputs(args, cfg)
        rec = HierarchicalRecognizer.build(gaz, table, cfg)
    out = {}
    if args.recognizer in ("mlfst", "both"):
        out["mlfst"] = rec.annotate
    if args.recognizer in ("stemfst", "both"):
        out["stemfst"] = build_stem_index(gaz).annotate
    return out, rec, gaz


def cmd_build(args) -> int:
    _require(args, "gazetteer", "lemmas")
    cfg = _config(args)
    gaz, table = _load_inputs(args, cfg)
    t0 = time.perf_counter()
    rec = HierarchicalRecognizer.build(gaz, table, cfg)
    build_ms = (time.perf_counter() - t0) * 1000.0
    st = rec.stats()
    stats = {
        "entries": st["entries"],
        "char_nodes": st["char_nodes"],
        "word_nodes": st["word_nodes"],
        "build_ms": round(build_ms, 3),
        "gazetteer_errors": len(gaz.errors),
        "dropped_labels": gaz.dropped,
        "lemma_rows": table.rows,
        "policies": {p: s["terms"] for p, s in st["engines"].items()},
    }
    if args.index:
        with open(args.index, "w", encoding="utf-8") as fp:
            rec.dump(fp)
    print(json.dumps(stats, ensure_ascii=False))
    return EXIT_OK


def _read_input(args) -> str:
    try:
        if args.input and args.input != "-":
            with open(args.input, "rb") as fp:
                raw = fp.read()
        else:
            raw = sys.stdin.buffer.read()
    except OSError as e:
        raise CliError(f"cannot read input {args.input}: {e.strerror}", EXIT_INPUT) from None
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise CliError(f"input is not valid UTF-8 (byte {e.start})", EXIT_ENCODING) from None


def cmd_annotate(args) -> int:
    annotators, _, _ = _recognizers(args)
    text = _read_input(args)
    out = sys.stdout
    for fn in annotators.values():
        for m in fn(text):
            if args.format == "tsv":
                surface = m.surface.replace("\t", " ").replace("\n", " ")
                out.write(f"{m.start}\t{m.end}\t{surface}\t"
                          f"{','.join(sorted(m.term_ids))}\t{m.recognizer_tag}\n")
            else:
                out.write(json.dumps(m.to_json(), ensure_ascii=False) + "\n")
    return EXIT_OK


def cmd_eval(args) -> int:
    _require(args, "corpus")
    annotators, _, gaz = _recognizers(args)
    try:
        corpus = read_corpus(args.corpus)
    except CorpusParseError as e:
        raise CliError(f"corpus parse error in document {e.doc_id!r} at offset {e.offset}: {e}",
                       EXIT_CORPUS) from None
    except UnicodeDecodeError as e:
        raise CliError(f"corpus is not valid UTF-8 (byte {e.start})", EXIT_ENCODING) from None
    except OSError as e:
        raise CliError(f"cannot read corpus {args.corpus}: {e.strerror}", EXIT_INPUT) from None
    reports = compare(annotators, corpus, gaz.labels_of(), repeats=args.repeats)
    if args.figures:
        from . import plots
        fig_dir = Path(args.figures)
        fig_dir.mkdir(parents=True, exist_ok=True)
        plots.plot_recall_by_ld(reports, fig_dir / "recall_by_ld.png")
        plots.plot_precision(reports, fig_dir / "precision.png")
    print(json.dumps({name: r.to_json() for name, r in reports.items()},
                     ensure_ascii=False, indent=2))
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.gen_size:
        if args.gazetteer or args.index:
            annotators, _, gaz = _recognizers(args)
        else:
            gaz = synth.synthetic_gazetteer(args.gen_labels, seed=args.seed)
            rec = HierarchicalRecognizer.build(gaz, None, _config(args))
            annotators = {}
            if args.recognizer in ("mlfst", "both"):
                annotators["mlfst"] = rec.annotate
            if args.recognizer in ("stemfst", "both"):
                annotators["stemfst"] = build_stem_index(gaz).annotate
        vocab = synth.label_words(gaz)
        corpora = [[synth.generate_text(n, vocab, seed=args.seed)] for n in args.gen_size]
    else:
        _require(args, "corpus")
        annotators, _, _ = _recognizers(args)
        try:
            corpora = [[d.plain_text for d in read_corpus(args.corpus)]]
        except CorpusParseError as e:
            raise CliError(f"corpus parse error in document {e.doc_id!r} at offset {e.offset}",
                           EXIT_CORPUS) from None
        except OSError as e:
            raise CliError(f"cannot read corpus {args.corpus}: {e.strerror}", EXIT_INPUT) from None

    runs = []
    for texts in corpora:
        results = {}
        for name, fn in annotators.items():
            cpm, wall = throughput(fn, texts, args.repeats)
            results[name] = {
                "chars_per_ms": cpm,
                "wall_time_ms": wall,
                "total_chars": sum(map(len, texts)),
                "matches": sum(len(fn(t)) for t in texts),
            }
        runs.append(results)
        print(json.dumps(results))
    if args.figures and runs:
        from . import plots
        fig_dir = Path(args.figures)
        fig_dir.mkdir(parents=True, exist_ok=True)
        plots.plot_throughput(runs[-1], fig_dir / "throughput.png")
        if len(runs) > 1:
            sizes = [r[next(iter(r))]["total_chars"] for r in runs]
            walls = {n: [r[n]["wall_time_ms"] for r in runs] for n in runs[0]}
            plots.plot_linearity(sizes, walls, fig_dir / "linearity.png")
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--gazetteer", help="TSV: id<TAB>label[<TAB>type]")
    common.add_argument("--lemmas", help="lemma table: inflected lemma TAGS")
    common.add_argument("--policies", help="policy config: 'type = HIGH|LOW|ACRONYM'")
    common.add_argument("--index", help="index dump to write (build) or read")
    common.add_argument("--recognizer", choices=("mlfst", "stemfst", "both"), default="mlfst")
    common.add_argument("--rake-cap", type=int, default=10_000)
    common.add_argument("--tag-prefixes", nargs="+", default=sorted(DEFAULT_TAG_PREFIXES),
                        metavar="PREFIX")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="gazner", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("build", parents=[common], help="build indexes and print stats")

    a = sub.add_parser("annotate", parents=[common], help="annotate text as JSON lines or TSV")
    a.add_argument("--input", help="input file (default: standard input)")
    a.add_argument("--format", choices=("json", "tsv"), default="json")

    for name, help_ in (("eval", "recall/precision report over an annotated corpus"),
                        ("bench", "throughput measurement")):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("--corpus", help="annotated corpus file or directory")
        s.add_argument("--repeats", type=int, default=3, help="timed passes (minimum reported)")
        s.add_argument("--figures", help="directory for PNG figures")
        if name == "bench":
            s.add_argument("--gen-size", type=int, nargs="+",
                           help="generate corpora of these sizes (characters)")
            s.add_argument("--gen-labels", type=int, default=10_000,
                           help="synthetic gazetteer size when no --gazetteer is given")
            s.add_argument("--seed", type=int, default=0)
    return p


COMMANDS = {"build": cmd_build, "annotate": cmd_annotate, "eval": cmd_eval, "bench": cmd_bench}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.rake_cap < 1:
        print("gazner: --rake-cap must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return COMMANDS[args.command](args)
    except CliError as e:
        print(f"gazner: {e}", file=sys.stderr)
        return e.code
    except ValueError as e:
        print(f"gazner: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
