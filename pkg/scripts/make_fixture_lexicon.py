#!/usr/bin/env python3
"""Regenerate data/fixture_lexicon.tsv from the in-code fixture triples."""

from pathlib import Path

from emoexplain.fixtures import write_fixture_lexicon

if __name__ == "__main__":
    target = Path(__file__).resolve().parents[1] / "data" / "fixture_lexicon.tsv"
    write_fixture_lexicon(target)
    print(f"wrote {target}")
