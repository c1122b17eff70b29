"""Tour of the ambiguous-sentence corpus.

Generates the full 237-sentence corpus and shows one example per
ambiguity class: the surface text, each candidate interpretation's
first-order-logic formula and, where the ambiguity is syntactic, the
parse tree it came from.
"""

from disambig.corpus import generate_corpus
from disambig.logic import format_formula


def main():
    records = generate_corpus()
    counts = {}
    splits = {2: 0, 3: 0}
    for r in records:
        counts[r.ambiguity_class] = counts.get(r.ambiguity_class, 0) + 1
        splits[len(r.interpretations)] += 1
    print(f"{len(records)} sentences")
    for cls, n in counts.items():
        print(f"  {cls:<12} {n}")
    print(f"  {splits[2]} sentences with 2 interpretations, "
          f"{splits[3]} with 3\n")

    shown = set()
    for r in records:
        if r.ambiguity_class in shown:
            continue
        shown.add(r.ambiguity_class)
        print(f"--- {r.ambiguity_class}: {r.text}")
        for interp in r.interpretations:
            print(f"    {interp.id}: {format_formula(interp.formula)}")
            print(f"      gloss: {interp.gloss}")
            if interp.parse:
                print(f"      parse: {interp.parse}")
        print()


if __name__ == "__main__":
    main()
