"""Deterministic summation helpers.

Results must not depend on how work was scheduled, so every reduction here
has a fixed shape: Kahan compensation walks terms in a caller-fixed order,
and partial results from parallel blocks are combined by a pairwise tree
whose layout depends only on the number of blocks.
"""

import numpy as np


class KahanAccumulator:
    """Compensated running sum; add() order defines the result bits."""

    def __init__(self, shape=()):
        self.total = np.zeros(shape)
        self._comp = np.zeros(shape)

    def add(self, term):
        y = np.asarray(term) - self._comp
        t = self.total + y
        self._comp = (t - self.total) - y
        self.total = t
        return self


def tree_reduce(parts):
    """Pairwise-sum a list of arrays/scalars; shape fixed by len(parts)."""
    if not parts:
        return 0.0
    level = list(parts)
    while len(level) > 1:
        nxt = []
        for i in range(0, len(level) - 1, 2):
            nxt.append(level[i] + level[i + 1])
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]


def _two_sum(a, b):
    """Error-free transformation: a + b = s + err exactly."""
    s = a + b
    bv = s - a
    err = (a - (s - bv)) + (b - bv)
    return s, err


def tree_reduce_compensated(parts):
    """Pairwise tree with two-sum nodes; residuals folded in at the root.

    Same fixed shape as tree_reduce, but the result is accurate to
    O(eps^2) regardless of the number of parts.
    """
    if not parts:
        return 0.0
    level = [(np.asarray(p, dtype=float), np.zeros_like(np.asarray(p, dtype=float)))
             for p in parts]
    while len(level) > 1:
        nxt = []
        for i in range(0, len(level) - 1, 2):
            (s1, e1), (s2, e2) = level[i], level[i + 1]
            s, e = _two_sum(s1, s2)
            nxt.append((s, e + e1 + e2))
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    s, e = level[0]
    return s + e
