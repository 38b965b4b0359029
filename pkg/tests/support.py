"""Helpers shared by several test modules."""

import itertools

from crtshare.access import LevelStructure
from crtshare.classic import secret_candidate_counts
from crtshare.disjunctive import effective_residue
from crtshare.errors import InvalidStructure


def all_structures(max_n, max_m):
    """Every valid contiguous level structure with n <= max_n and m <= max_m."""
    for n in range(1, max_n + 1):
        for m in range(1, min(n, max_m) + 1):
            for cuts in itertools.combinations(range(1, n), m - 1):
                edges = (0, *cuts, n)
                sizes = tuple(b - a for a, b in zip(edges, edges[1:]))
                for ts in itertools.combinations(range(1, n + 1), m):
                    try:
                        yield LevelStructure(sizes, ts)
                    except InvalidStructure:
                        continue


def coalitions(n):
    for mask in range(1 << n):
        yield frozenset(k + 1 for k in range(n) if mask >> k & 1)


def level_counts(transcript, coalition, i):
    """Per-secret counts of y_i candidates consistent with what the coalition can compute at level i."""
    L = transcript.structure
    usable = L.usable(coalition, i)
    residues = [(effective_residue(transcript.share(k), i, transcript.deltas), transcript.share(k).modulus)
                for k in usable]
    return secret_candidate_counts(residues, transcript.sequence.p0, transcript.bounds[i - 1])
