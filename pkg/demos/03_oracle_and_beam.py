"""Exact DP vs. exhaustive oracle vs. beam search.

On tiny random instances (short traces, few detections) the joint MAP
problem is small enough to enumerate every composite state sequence.
This demo shows that the dynamic program reproduces the oracle exactly,
and how beam search trades accuracy for state-space size.
"""

import numpy as np

from disambig.cli import random_tiny_instance
from disambig.hmms import build_library
from disambig.inference import beam_score, brute_force_score, score_branch


def main():
    rng = np.random.default_rng(99)
    library = build_library()
    print(f"{'instance':>8} {'oracle':>12} {'exact DP':>12} "
          f"{'beam w=1':>12} {'beam w=2':>12}")
    mismatches = 0
    for i in range(12):
        branch, trace = random_tiny_instance(rng)
        brute = brute_force_score(branch, trace, library)
        exact = score_branch(branch, trace, library)
        b1 = beam_score(branch, trace, library, beam_width=1)
        b2 = beam_score(branch, trace, library, beam_width=2)
        mismatches += abs(exact.total - brute.total) > 1e-9
        print(f"{i:>8} {brute.total:>12.4f} {exact.total:>12.4f} "
              f"{b1.total:>12.4f} {b2.total:>12.4f}")
    print(f"\nexact-vs-oracle mismatches: {mismatches}")
    print("beam scores never exceed the exact score (admissible), and a "
          "beam wide enough to keep every detection is exact.")


if __name__ == "__main__":
    main()
