#!/usr/bin/env python3
"""Emit a synthetic multi-author benchmark dataset as JSONL corpus files.

One file per author lands in the output directory, ready for the CLI:

    python scripts/make_synthetic_corpus.py --out data/ --seed 0
    hcstylo attribute --corpus data/author0.jsonl --corpus data/author1.jsonl \
        --corpus data/author2.jsonl --query data/author0.jsonl
"""

import argparse
from pathlib import Path

from hcstylo import emit_jsonl, synthetic_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", type=Path, default=Path("data"), help="output directory")
    ap.add_argument("--authors", type=int, default=3)
    ap.add_argument("--vocab", type=int, default=1000)
    ap.add_argument("--perturbed", type=int, default=20)
    ap.add_argument("--intensity", type=float, default=2.0)
    ap.add_argument("--docs", type=int, default=15)
    ap.add_argument("--doc-len", type=int, default=600)
    ap.add_argument("--zipf", type=float, default=1.2)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    corpora = synthetic_suite(args.authors, args.vocab, args.perturbed,
                              args.intensity, args.docs, args.doc_len,
                              args.seed, args.zipf)
    args.out.mkdir(parents=True, exist_ok=True)
    for corpus in corpora:
        path = args.out / f"{corpus.corpus_id}.jsonl"
        with open(path, "w", encoding="utf-8") as fh:
            emit_jsonl(corpus, fh)
        print(f"wrote {path} ({len(corpus.documents)} documents)")


if __name__ == "__main__":
    main()
