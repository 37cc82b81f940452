"""Command-line front-end.

Subcommands: ingest, discrepancy, attribute, explain, robustness.  Corpora
are one JSONL file each; corpus names come from ``NAME=PATH`` arguments or
default to the file stem.  Every output starts with a header block echoing
the effective configuration ('#' comment lines in CSV, a "config" object in
JSON), and rows/columns are stably ordered so diffs stay meaningful.

Exit codes: 0 success, 2 usage error, 3 data error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

from . import __version__
from .attribution import AttributionReport, attribute, fit_loo_model, jarque_bera
from .discrepancy import corpus_corpus, discrepancy_matrix
from .hc import DEFAULT_GAMMA0
from .ingest import (
    Corpus,
    CorpusFormatError,
    Document,
    collapse_names,
    emit_jsonl,
    parse_jsonl,
    parse_morph_xml,
)
from .robustness import bootstrap_accuracy, gamma_sweep, kfold_accuracy, length_sweep

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3


@dataclass
class RunConfig:
    """Effective pipeline configuration, echoed into every output."""

    ngram: int = 1
    gamma0: float = DEFAULT_GAMMA0
    alpha: float = 0.05
    hc_plus: bool = False
    collapse_names: bool = True
    seed: int = 0
    output_format: str = "csv"
    top_k: int = 20

    def __post_init__(self):
        if self.ngram not in (1, 2, 3):
            raise ValueError("ngram must be 1, 2 or 3")
        if not 0.0 < self.gamma0 < 1.0:
            raise ValueError("gamma0 must lie in (0, 1)")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.output_format not in ("csv", "json"):
            raise ValueError("output format must be csv or json")
        if self.top_k < 1:
            raise ValueError("top-k must be positive")


def _config_from_args(args) -> RunConfig:
    return RunConfig(
        ngram=getattr(args, "ngram", 1),
        gamma0=getattr(args, "gamma0", DEFAULT_GAMMA0),
        alpha=getattr(args, "alpha", 0.05),
        hc_plus=getattr(args, "hc_plus", False),
        collapse_names=not getattr(args, "no_collapse_names", False),
        seed=getattr(args, "seed", 0),
        output_format=getattr(args, "format", "csv"),
        top_k=getattr(args, "top_k", 20),
    )


def _add_common_flags(parser: argparse.ArgumentParser, *, formats=("csv", "json")):
    parser.add_argument("--ngram", type=int, choices=(1, 2, 3), default=1,
                        help="n-gram order of the counted features")
    parser.add_argument("--gamma0", type=float, default=DEFAULT_GAMMA0,
                        help="fraction of sorted p-values searched by HC")
    parser.add_argument("--alpha", type=float, default=0.05,
                        help="rejection level of the same-author test")
    parser.add_argument("--hc-plus", action="store_true",
                        help="restrict the HC search to p-values >= 1/N")
    parser.add_argument("--no-collapse-names", action="store_true",
                        help="keep proper-name/gentilic lemmas instead of <Np>/<Ng>")
    parser.add_argument("--seed", type=int, default=0, help="RNG seed")
    parser.add_argument("--format", choices=formats, default=formats[0],
                        help="output format")
    parser.add_argument("--output", "-o", default="-",
                        help="output path ('-' = stdout)")


def _parse_corpus_arg(spec: str) -> tuple[str, Path]:
    if "=" in spec:
        name, _, path = spec.partition("=")
        if not name:
            raise CorpusFormatError(f"empty corpus name in {spec!r}")
        return name, Path(path)
    path = Path(spec)
    return path.stem, path


def _load_corpus(spec: str, config: RunConfig) -> Corpus:
    name, path = _parse_corpus_arg(spec)
    try:
        with open(path, "rb") as fh:
            corpus = parse_jsonl(fh, corpus_id=name)
    except OSError as e:
        raise CorpusFormatError(f"cannot read {path}: {e.strerror}") from None
    except CorpusFormatError as e:
        raise CorpusFormatError(f"{path}: {e}") from None
    if config.collapse_names:
        corpus = Corpus(name, tuple(collapse_names(d) for d in corpus.documents))
    return corpus


def _load_corpora(specs, config: RunConfig) -> list[Corpus]:
    corpora = [_load_corpus(s, config) for s in specs]
    names = [c.corpus_id for c in corpora]
    if len(set(names)) != len(names):
        raise CorpusFormatError(f"corpus names must be distinct, got {names}")
    return corpora


def _open_output(path: str):
    if path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _config_header(config: RunConfig, **extra) -> dict:
    header = {"tool": f"hcstylo {__version__}", **asdict(config)}
    header.update(extra)
    return header


def _write_csv(path: str, header: dict, columns, rows):
    out, close = _open_output(path)
    try:
        for key, value in header.items():
            out.write(f"# {key}: {json.dumps(value, ensure_ascii=False)}\n")
        writer = csv.writer(out)
        writer.writerow(columns)
        writer.writerows(rows)
    finally:
        if close:
            out.close()


def _write_json(path: str, payload: dict):
    out, close = _open_output(path)
    try:
        json.dump(payload, out, indent=2, ensure_ascii=False, sort_keys=True)
        out.write("\n")
    finally:
        if close:
            out.close()


# ---------------------------------------------------------------------------
# subcommands

def cmd_ingest(args) -> int:
    config = _config_from_args(args)
    out, close = _open_output(args.output)
    info = sys.stderr if out is sys.stdout else sys.stdout
    try:
        for spec in args.paths:
            name, path = _parse_corpus_arg(spec)
            try:
                with open(path, "rb") as fh:
                    if args.input_format == "xml":
                        corpus = parse_morph_xml(fh, corpus_id=name)
                    else:
                        corpus = parse_jsonl(fh, corpus_id=name)
            except OSError as e:
                raise CorpusFormatError(f"cannot read {path}: {e.strerror}") from None
            except CorpusFormatError as e:
                raise CorpusFormatError(f"{path}: {e}") from None
            if config.collapse_names:
                corpus = Corpus(name, tuple(collapse_names(d) for d in corpus.documents))
            emit_jsonl(corpus, out)
            unique = set()
            total = 0
            for doc in corpus.documents:
                distinct = len(set(doc.tokens))
                unique.update(doc.tokens)
                total += len(doc.tokens)
                print(f"{doc.doc_id}: {len(doc.tokens)} tokens, {distinct} unique features",
                      file=info)
            print(f"corpus {name}: {len(corpus.documents)} documents, "
                  f"{total} tokens, {len(unique)} unique features", file=info)
    finally:
        if close:
            out.close()
    return EXIT_OK


def cmd_discrepancy(args) -> int:
    config = _config_from_args(args)
    corpora = _load_corpora(args.corpus, config)
    queries: list[Document] = []
    if args.query:
        queries = list(_load_corpus(args.query, config).documents)
    rows = discrepancy_matrix(corpora, queries, config.ngram, config.gamma0,
                              hc_plus=config.hc_plus)
    rows.sort(key=lambda r: (r[0], r[1]))
    header = _config_header(
        config, corpora=[c.corpus_id for c in corpora],
        note="home-corpus cells are leave-one-out "
             "(the document is removed from its own corpus only)")
    if config.output_format == "json":
        _write_json(args.output, {
            "config": header,
            "columns": [c.corpus_id for c in corpora],
            "rows": [{"doc_id": d, "home_corpus": h, "d_hc": s} for d, h, s in rows],
        })
    else:
        columns = ["doc_id", "home_corpus"] + [c.corpus_id for c in corpora]
        _write_csv(args.output, header, columns,
                   [[d, h] + [repr(x) for x in s] for d, h, s in rows])
    return EXIT_OK


def _verification_dict(vr, model, scores) -> dict:
    entry = {
        "corpus_id": vr.corpus_id,
        "x_prime": vr.x_prime,
        "t_stat": vr.t_stat if math.isfinite(vr.t_stat) else None,
        "p_value": vr.p_value,
        "df": vr.df,
        "rejected": vr.rejected,
        "degenerate_spread": vr.degenerate_spread,
        "model": {"mean": model.mean, "sd": model.sd, "n_docs": model.n_docs},
    }
    if len(scores) >= 4:
        try:
            jb, jb_p = jarque_bera(scores)
            entry["model"]["jarque_bera"] = {"stat": jb, "p_value": jb_p}
        except ValueError:
            entry["model"]["jarque_bera"] = None
    return entry


def cmd_attribute(args) -> int:
    config = _config_from_args(args)
    corpora = _load_corpora(args.corpus, config)
    queries = sorted(_load_corpus(args.query, config).documents, key=lambda d: d.doc_id)
    reports: list[AttributionReport] = []
    models: dict[str, list] = {}
    for q in queries:
        report = attribute(q, corpora, config.ngram, config.gamma0, config.alpha,
                           hc_plus=config.hc_plus)
        reports.append(report)
        if config.output_format == "json":
            models[q.doc_id] = [fit_loo_model(c, q, config.ngram, config.gamma0,
                                              hc_plus=config.hc_plus) for c in corpora]
    header = _config_header(config, corpora=[c.corpus_id for c in corpora])
    if config.output_format == "json":
        payload = {"config": header, "queries": []}
        for report, q in zip(reports, queries):
            payload["queries"].append({
                "doc_id": report.doc_id,
                "decision": report.attributed_to or "unattributable",
                "tie": report.tie,
                "verifications": [
                    _verification_dict(vr, model, model.scores)
                    for vr, model in zip(report.verifications, models[q.doc_id])
                ],
                "discriminating": {
                    cid: [{"feature": r.feature.render(), "p_value": r.p_value,
                           "sign": r.sign} for r in recs]
                    for cid, recs in report.discriminating.items()
                },
            })
        _write_json(args.output, payload)
    else:
        # table layout: rows = corpora, one p-value column per query plus
        # companion rejection/argmax flag columns; 1/0 booleans
        columns = ["corpus"]
        for r in reports:
            columns += [r.doc_id, f"{r.doc_id}_rejected", f"{r.doc_id}_argmax"]
        rows = []
        for ci, c in enumerate(corpora):
            row = [c.corpus_id]
            for r in reports:
                vr = r.verifications[ci]
                row += [repr(vr.p_value), int(vr.rejected), int(r.attributed_to == c.corpus_id)]
            rows.append(row)
        decision_row = ["decision"]
        for r in reports:
            decision_row += [r.attributed_to or "unattributable", "", ""]
        rows.append(decision_row)
        _write_csv(args.output, header, columns, rows)
    return EXIT_OK


def cmd_explain(args) -> int:
    config = _config_from_args(args)
    corpora = _load_corpora(args.corpus, config)
    if len(corpora) < 2:
        raise CorpusFormatError("explain needs one corpus plus at least one to compare against")
    left = corpora[0]
    rest_docs = tuple(d for c in corpora[1:] for d in c.documents)
    rest_id = "+".join(c.corpus_id for c in corpora[1:])
    rest = Corpus(rest_id, rest_docs)
    result = corpus_corpus(left, rest, config.ngram, config.gamma0, hc_plus=config.hc_plus)
    selected = result.hc_detail.selected if result.d_hc > 0 else ()
    rows = []
    for rank, rec in enumerate(selected[:config.top_k], start=1):
        score = -math.log10(rec.p_value) * rec.sign
        rows.append([rank, rec.feature.render(), repr(score), repr(rec.p_value),
                     rec.sign, rec.count_1, rec.n_w - rec.count_1])
    header = _config_header(config, corpus_a=left.corpus_id, corpus_b=rest_id,
                            d_hc=result.d_hc,
                            note="sign +1 = over-represented in corpus_a")
    if config.output_format == "json":
        _write_json(args.output, {
            "config": header,
            "features": [
                {"rank": r[0], "feature": r[1], "signed_score": float(r[2]),
                 "p_value": float(r[3]), "sign": r[4], "count_a": r[5], "count_b": r[6]}
                for r in rows
            ],
        })
    else:
        _write_csv(args.output, header,
                   ["rank", "feature", "signed_score", "p_value", "sign",
                    "count_a", "count_b"], rows)
    return EXIT_OK


def cmd_robustness(args) -> int:
    config = _config_from_args(args)
    corpora = _load_corpora(args.corpus, config)
    common = dict(ngram=config.ngram, gamma0=config.gamma0, alpha=config.alpha,
                  hc_plus=config.hc_plus)
    if args.mode == "bootstrap":
        report = bootstrap_accuracy(corpora, args.iterations, config.seed,
                                    resample=not args.no_resample,
                                    per_document=args.per_document, **common)
    elif args.mode == "kfold":
        report = kfold_accuracy(corpora, args.k, args.splits, config.seed, **common)
    elif args.mode == "length":
        if not args.lengths:
            raise CorpusFormatError("length mode needs --lengths")
        lengths = [int(x) for x in args.lengths.split(",")]
        report = length_sweep(corpora, lengths, args.trials, config.seed,
                              unit=args.unit, **common)
    else:  # gamma
        gammas = [float(x) for x in args.gammas.split(",")]
        del common["gamma0"]
        report = gamma_sweep(corpora, gammas, **common)
    payload = {"config": _config_header(config, corpora=[c.corpus_id for c in corpora]),
               "report": report.to_dict()}
    if config.output_format == "csv":
        header = payload["config"]
        header["mode"] = report.mode
        header["accuracy_mean"] = report.accuracy_mean
        header["accuracy_sd"] = report.accuracy_sd
        if "curve" in report.params:
            # sweep modes: plot-ready two-column curve
            _write_csv(args.output, header, ["x", "accuracy"],
                       [[a, repr(b)] for a, b in report.params["curve"]])
        else:
            _write_csv(args.output, header, ["trial", "accuracy"],
                       [[i, repr(a)] for i, a in enumerate(report.per_trial)])
    else:
        _write_json(args.output, payload)
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hcstylo",
        description="Word-frequency authorship analysis via Higher Criticism "
                    "of exact binomial allocation tests.")
    parser.add_argument("--version", action="version", version=f"hcstylo {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="normalize corpora to canonical JSONL")
    p.add_argument("paths", nargs="+", metavar="NAME=PATH",
                   help="input files (name defaults to the file stem)")
    p.add_argument("--format", dest="input_format", choices=("jsonl", "xml"),
                   default="jsonl", help="input format")
    p.add_argument("--no-collapse-names", action="store_true",
                   help="keep proper-name/gentilic lemmas instead of <Np>/<Ng>")
    p.add_argument("--output", "-o", default="-", help="output path ('-' = stdout)")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("discrepancy",
                       help="documents x corpora HC-discrepancy matrix")
    p.add_argument("--corpus", action="append", required=True, metavar="NAME=PATH")
    p.add_argument("--query", metavar="PATH", help="extra documents to place")
    _add_common_flags(p)
    p.set_defaults(func=cmd_discrepancy)

    p = sub.add_parser("attribute",
                       help="verify and attribute query documents against corpora")
    p.add_argument("--corpus", action="append", required=True, metavar="NAME=PATH")
    p.add_argument("--query", required=True, metavar="PATH")
    _add_common_flags(p)
    p.set_defaults(func=cmd_attribute)

    p = sub.add_parser("explain",
                       help="discriminating features of the first corpus vs the rest")
    p.add_argument("--corpus", action="append", required=True, metavar="NAME=PATH",
                   help="first = subject corpus, remainder = union to compare against")
    p.add_argument("--top-k", type=int, default=20, dest="top_k",
                   help="maximum number of features to report")
    _add_common_flags(p)
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("robustness", help="bootstrap / k-fold / length / gamma sweeps")
    p.add_argument("--mode", choices=("bootstrap", "kfold", "length", "gamma"),
                   required=True)
    p.add_argument("--corpus", action="append", required=True, metavar="NAME=PATH")
    p.add_argument("--iterations", type=int, default=100, help="bootstrap iterations")
    p.add_argument("--no-resample", action="store_true",
                   help="bootstrap identity sampling (reproduces vanilla accuracy)")
    p.add_argument("--per-document", action="store_true",
                   help="bootstrap within each document instead of globally")
    p.add_argument("--k", type=int, default=4, help="number of folds")
    p.add_argument("--splits", type=int, default=100, help="random k-fold splits")
    p.add_argument("--lengths", help="comma-separated budgets for length mode")
    p.add_argument("--unit", choices=("tokens", "verses"), default="tokens",
                   help="budget unit for length mode")
    p.add_argument("--trials", type=int, default=3, help="trials per length budget")
    p.add_argument("--gammas", default="0.2,0.35,0.5",
                   help="comma-separated gamma0 values for gamma mode")
    _add_common_flags(p, formats=("json", "csv"))
    p.set_defaults(func=cmd_robustness)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CorpusFormatError, ValueError, OSError) as e:
        print(f"hcstylo: error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
