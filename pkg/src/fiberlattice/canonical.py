"""Canonical labelling of small weighted graphs.

Colour refinement splits the nodes into classes first; the exhaustive search
then only permutes nodes inside a class.  On trees refinement already
separates every non-automorphic pair of nodes, so the search is tiny; on
general graphs it stays exact, just slower.
"""

from __future__ import annotations

import itertools
from typing import Hashable, Sequence

CanonicalKey = tuple


def _refine(labels: Sequence[Hashable], matrix: Sequence[Sequence[int]]) -> list[int]:
    s = len(labels)
    palette = sorted(set(labels))
    colour = [palette.index(x) for x in labels]
    while True:
        sigs = [
            (colour[i], tuple(sorted((colour[j], matrix[i][j]) for j in range(s) if j != i and matrix[i][j])))
            for i in range(s)
        ]
        ranks = sorted(set(sigs))
        new = [ranks.index(sig) for sig in sigs]
        if len(set(new)) == len(set(colour)):
            return new
        colour = new


def canonical_form(labels: Sequence[Hashable], matrix: Sequence[Sequence[int]]) -> tuple[CanonicalKey, tuple[int, ...]]:
    """Return ``(key, order)``.

    ``key`` is equal for two inputs iff there is a node bijection carrying
    labels and matrix entries onto each other.  ``order`` lists the original
    node indices in canonical position order.
    """
    s = len(labels)
    colour = _refine(labels, matrix)
    classes = [[i for i in range(s) if colour[i] == c] for c in sorted(set(colour))]
    best = None
    best_order: tuple[int, ...] = ()
    for perms in itertools.product(*(itertools.permutations(cls) for cls in classes)):
        order = tuple(i for p in perms for i in p)
        key = (
            tuple(labels[i] for i in order),
            tuple(matrix[order[a]][order[b]] for a in range(s) for b in range(a, s)),
        )
        if best is None or key < best:
            best, best_order = key, order
    return best, best_order
