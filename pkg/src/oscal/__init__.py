"""Exact oscillation calculus on finitely presented countable compact spaces.

Everything in here computes with exact rational (or Gaussian rational)
arithmetic; no floats anywhere.  The main entry points:

- ``oscal.space``       tree presentations of countable compact spaces
- ``oscal.func``        node functions, semicontinuous envelopes, oscillation
- ``oscal.transfinite`` iterated oscillations, the D-index, D-norm, and the
                        attained two-sided decomposition
- ``oscal.oracle``      independent LP cross-check for the D-norm
- ``oscal.seqlab``      finite-dimensional basis/functional laboratory
- ``oscal.extraction``  subsequence extraction with verifiable witnesses
- ``oscal.cli``         the ``oscal`` command line tool
"""

__version__ = "0.1.0"
