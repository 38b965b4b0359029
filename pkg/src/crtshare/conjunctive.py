"""Conjunctive multilevel threshold sharing.

The secret is split additively, ``s = sigma_1 + ... + sigma_m (mod p0)``, and
each ``sigma_i`` is shared at level ``i`` with the same share/delta mechanics
as the disjunctive scheme, so every level's threshold must be met.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import ClassVar, Iterable

from .access import LevelStructure, authorized_conjunctive
from .classic import blind
from .disjunctive import (
    DealerTranscript,
    DeltaIndex,
    MtssShare,
    PublicDelta,
    check_setup,
    collect_shares,
    index_deltas,
    issue,
    recover_level,
)
from .errors import AccessDenied
from .numtheory import PrimeSequence

__all__ = ["ConjunctiveTranscript", "deal_conjunctive", "reconstruct_conjunctive"]


@dataclass(frozen=True)
class ConjunctiveTranscript(DealerTranscript):
    summands: tuple[int, ...] = field(default=(), repr=False, compare=False)  # dealer-only

    scheme: ClassVar[str] = "mtss_conjunctive"


def deal_conjunctive(
    s: int, structure: LevelStructure, seq: PrimeSequence, rng: random.Random
) -> ConjunctiveTranscript:
    check_setup(s, structure, seq)
    p0 = seq.p0
    summands = [rng.randrange(p0) for _ in range(structure.m - 1)]
    summands.append((s - sum(summands)) % p0)
    blinded = tuple(blind(sigma, p0, seq.bound(t), rng) for sigma, t in zip(summands, structure.thresholds))
    shares, deltas = issue(structure, seq, (b.y for b in blinded))
    return ConjunctiveTranscript(structure, seq, shares, deltas, blinded, tuple(summands))


def reconstruct_conjunctive(
    shares: Iterable[MtssShare],
    deltas: Iterable[PublicDelta] | DeltaIndex,
    structure: LevelStructure,
    seq: PrimeSequence,
) -> int:
    by_participant = collect_shares(shares, structure, seq)
    if not authorized_conjunctive(by_participant, structure):
        raise AccessDenied(f"coalition {sorted(by_participant)} misses some level threshold")
    index = index_deltas(deltas)
    total = 0
    for i in range(1, structure.m + 1):
        total += recover_level(by_participant, index, structure, seq, i)
    return total % seq.p0
