#!/usr/bin/env python3
"""Run the 3x3 ablation grid (loss settings x intensity) on a synthetic corpus."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from emoexplain.cli import main as cli
from emoexplain.corpus import generate_synthetic_corpus, save_records
from emoexplain.fixtures import pool_corpus_spec

REPO = Path(__file__).resolve().parents[1]
LEXICON = REPO / "data" / "fixture_lexicon.tsv"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="ablation_run")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--records", type=int, default=120)
    parser.add_argument("--epochs", type=int, default=5)
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    corpus_path = out / "records.jsonl"
    spec = pool_corpus_spec(10, args.records // 10, args.records,
                            (0.25, 0.15, 0.15, 0.15, 0.15, 0.15))
    save_records(corpus_path, generate_synthetic_corpus(spec, args.seed))

    seed = str(args.seed)
    for step in (
        ["prepare", "--records", str(corpus_path), "--lexicon", str(LEXICON),
         "--out", str(out / "prep"), "--seed", seed],
        ["ablate", "--data", str(out / "prep"), "--lexicon", str(LEXICON),
         "--out", str(out / "grid"), "--seed", seed,
         "--max-epochs", str(args.epochs), "--patience", str(args.epochs)],
    ):
        print(f"== emoexplain {' '.join(step)}")
        code = cli(step)
        if code != 0:
            sys.exit(code)
    print((out / "grid" / "ablation.txt").read_text())


if __name__ == "__main__":
    main()
