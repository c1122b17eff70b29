"""Close the loop on one sentence.

Takes the classic PP-attachment sentence ("Sam approached the chair
with a bag."), renders one synthetic trace per interpretation, then
scores every interpretation against every trace.  The score matrix
should be diagonal-dominant: each trace is best explained by the
interpretation it depicts.
"""

from disambig.corpus import generate_corpus
from disambig.hmms import build_library
from disambig.inference import score_formula
from disambig.perception import simulate
from disambig.scenes import script_for


def main():
    record = next(r for r in generate_corpus()
                  if r.text == "Sam approached the chair with a bag.")
    library = build_library()
    print(record.text)
    for interp in record.interpretations:
        print(f"  {interp.id}: {interp.gloss}")
    print()

    traces = [simulate(script_for(record, k, 0), seed=0)
              for k in range(len(record.interpretations))]
    header = "".join(f"{i.id:>14}" for i in record.interpretations)
    label = "trace / reading"
    print(f"{label:<16}{header}")
    for k, trace in enumerate(traces):
        scores = [score_formula(i.formula, trace, library).total
                  for i in record.interpretations]
        row = "".join(f"{s:>14.2f}" for s in scores)
        best = max(range(len(scores)), key=lambda j: (scores[j], -j))
        mark = "  <- correct" if best == k else "  <- WRONG"
        print(f"{trace.id:<16}{row}{mark}")

    print("\nPer-term breakdown for the matching pair (trace 0, reading 0):")
    result = score_formula(record.interpretations[0].formula, traces[0],
                           library).result
    for term, value in result.breakdown.items():
        print(f"  {term:<12} {value:>10.2f}")


if __name__ == "__main__":
    main()
