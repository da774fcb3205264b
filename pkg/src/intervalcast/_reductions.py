"""Order-independent floating-point reductions.

Plain summation depends on addend order, so permuting rows of a training
set (or duplicating a batch) perturbs results in the last ulps.  The
helpers here make reductions a function of the addend *multiset* only:

- ``stable_sum``/``stable_mean`` sort before summing, so any permutation
  of the inputs yields bit-identical output.
- ``exact_mean`` uses math.fsum (exactly rounded); because
  round(2s) == 2*round(s) in binary, it is also invariant under whole
  multiset duplication, which sorting alone is not.
"""

import math

import numpy as np


def stable_sum(a, axis=0):
    """Sum along ``axis`` invariantly to any permutation along that axis."""
    a = np.asarray(a, dtype=float)
    return np.sum(np.sort(a, axis=axis), axis=axis)


def stable_mean(a, axis=0):
    """Mean along ``axis`` invariantly to any permutation along that axis."""
    a = np.asarray(a, dtype=float)
    return stable_sum(a, axis=axis) / a.shape[axis]


def exact_sum(a):
    """Exactly rounded sum of all elements (scalar)."""
    return math.fsum(np.asarray(a, dtype=float).ravel().tolist())


def exact_mean(a):
    """Exactly rounded mean of all elements (scalar).

    Invariant under both permutation and whole-multiset duplication.
    """
    a = np.asarray(a, dtype=float)
    return exact_sum(a) / a.size
