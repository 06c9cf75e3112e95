#!/usr/bin/env python3
"""Developer aid: show how a license text is interpreted, sentence by sentence.

Usage:
    python tools/dump_matrix.py src/licentia/data/texts/MIT.txt [-v]

-v additionally prints per-sentence entities and relations.
"""

import sys
from pathlib import Path

from licentia.extractor import (
    EntityKind,
    default_extractor,
    extract_relations,
)


def main() -> None:
    args = [a for a in sys.argv[1:] if a != "-v"]
    verbose = "-v" in sys.argv
    path = Path(args[0])
    text = path.read_text(encoding="utf-8")
    ext = default_extractor()

    if verbose:
        for sentence in ext.preprocess(text):
            entities = ext.extract_entities(sentence)
            if not entities:
                continue
            print(f"--- [{sentence.index}] {sentence.text[:160]}")
            for e in entities:
                print(f"      {e.kind.value:10s} {e.label:20s} {e.text!r}")
            for r in extract_relations(entities, sentence):
                print(f"      REL {r.label.value}: {r.head.text!r} -> {r.tail.text!r}")

    matrix = ext.interpret(text, path.stem)
    print(f"=== {path.stem}: {len(matrix.groups)} groups")
    for (action, obj), entries in matrix.sorted_groups():
        shown = ", ".join(
            att.value + (f" if {cond!r}" if cond else "") for att, cond in entries
        )
        print(f"  ({action}, {obj}): {shown}")
    if matrix.warnings:
        print(f"  -- {len(matrix.warnings)} warnings")
        for w in matrix.warnings:
            print(f"     {w}")


if __name__ == "__main__":
    main()
