"""Grounded disambiguation of ambiguous sentences against synthetic
detection traces.

Submodules: ``corpus`` (sentence generation), ``lexicon`` / ``grammar``
/ ``semantics`` / ``logic`` (language side), ``scenes`` / ``perception``
(synthetic detector), ``hmms`` (predicate models), ``inference`` (joint
MAP scoring), ``task`` (disambiguation harness) and ``cli``.
"""

__version__ = "0.1.0"
