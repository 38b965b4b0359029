"""Disjunctive multilevel threshold sharing over a single anchor sequence.

Each level ``i`` gets its own blinded value ``y_i = s + alpha_i*p0 < M_i``.
A participant ``k`` at home level ``j`` holds one private share
``y_j mod p_k``; for every lower level ``i > j`` the dealer publishes
``delta = (y_i - mask(k, share, i)) mod p_k`` so that ``k`` can contribute
``y_i mod p_k`` at level ``i`` without a second private value.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from typing import ClassVar, Iterable, Mapping

from .access import LevelStructure, authorized_disjunctive
from .classic import BlindedSecret, blind
from .errors import (
    AccessDenied,
    ConditionViolated,
    DeltaMissing,
    InconsistentShares,
    ReconstructionOverflow,
    SecretOutOfRange,
    StructureMismatch,
)
from .numtheory import PrimeSequence, SequenceKind, check_condition, crt_solve

__all__ = [
    "DealerTranscript",
    "MtssShare",
    "PublicDelta",
    "deal",
    "effective_residue",
    "mask",
    "reconstruct",
    "recover_level",
]

MASK_TAG = b"crtshare/mtss-mask/v1"


def _encode(x: int) -> bytes:
    body = x.to_bytes(max(1, (x.bit_length() + 7) // 8), "big")
    return len(body).to_bytes(4, "big") + body


def mask(k: int, value: int, i: int, modulus: int) -> int:
    """One-way map ``h_k(value, i)`` into ``Z_modulus``.

    SHA-256 blocks ``H(tag || ctr || enc(k) || enc(i) || enc(value))`` for
    ``ctr = 0, 1, ...`` (4-byte big-endian) are concatenated until there are at
    least ``2 * bitlength(modulus)`` bits, read big-endian and reduced. Each
    ``enc`` is a 4-byte length followed by the minimal big-endian bytes.
    Levels are 1-based.
    """
    if not 0 <= value < modulus:
        raise ValueError(f"share value {value} not in Z_{modulus}")
    suffix = _encode(k) + _encode(i) + _encode(value)
    blocks = max(1, -(-2 * modulus.bit_length() // 256))
    wide = b"".join(
        hashlib.sha256(MASK_TAG + ctr.to_bytes(4, "big") + suffix).digest() for ctr in range(blocks)
    )
    return int.from_bytes(wide, "big") % modulus


@dataclass(frozen=True)
class MtssShare:
    participant: int
    level: int
    modulus: int
    value: int

    def __post_init__(self):
        if not 0 <= self.value < self.modulus:
            raise ValueError(f"share value {self.value} not in Z_{self.modulus}")


@dataclass(frozen=True)
class PublicDelta:
    participant: int
    level: int  # target level, strictly lower than the participant's home
    modulus: int
    value: int

    def __post_init__(self):
        if not 0 <= self.value < self.modulus:
            raise ValueError(f"delta {self.value} not in Z_{self.modulus}")


@dataclass(frozen=True)
class DealerTranscript:
    structure: LevelStructure
    sequence: PrimeSequence
    shares: tuple[MtssShare, ...]
    deltas: tuple[PublicDelta, ...]
    # dealer-only; excluded from every serialized document
    blinded: tuple[BlindedSecret, ...] = field(repr=False, compare=False)

    scheme: ClassVar[str] = "mtss_disjunctive"

    @property
    def bounds(self) -> tuple[int, ...]:
        return tuple(self.sequence.bound(t) for t in self.structure.thresholds)

    def share(self, k: int) -> MtssShare:
        return self.shares[k - 1]

    def shares_for(self, coalition: Iterable[int]) -> list[MtssShare]:
        return [self.shares[k - 1] for k in sorted(set(coalition))]


def check_setup(s: int, structure: LevelStructure, seq: PrimeSequence) -> None:
    if seq.n != structure.n:
        raise StructureMismatch(f"sequence has {seq.n} moduli for {structure.n} participants")
    if not 0 <= s < seq.p0:
        raise SecretOutOfRange(f"secret must lie in Z_{seq.p0}")
    if not check_condition(seq, None, SequenceKind.ANCHOR):
        raise ConditionViolated("sequence is not an anchor sequence")
    for t in structure.thresholds:
        if not check_condition(seq, t, SequenceKind.STATISTICAL):
            raise ConditionViolated(f"sequence fails the statistical condition at t={t}")


def issue(
    structure: LevelStructure, seq: PrimeSequence, ys: Iterable[int]
) -> tuple[tuple[MtssShare, ...], tuple[PublicDelta, ...]]:
    """Shares and public deltas for per-level blinded values ``ys``."""
    ys = tuple(ys)
    shares = []
    deltas = []
    for k, home in enumerate(structure.assignment, start=1):
        p = seq.modulus(k)
        share = MtssShare(k, home, p, ys[home - 1] % p)
        shares.append(share)
        for i in range(home + 1, structure.m + 1):
            deltas.append(PublicDelta(k, i, p, (ys[i - 1] - mask(k, share.value, i, p)) % p))
    return tuple(shares), tuple(deltas)


def deal(s: int, structure: LevelStructure, seq: PrimeSequence, rng: random.Random) -> DealerTranscript:
    check_setup(s, structure, seq)
    blinded = tuple(blind(s, seq.p0, seq.bound(t), rng) for t in structure.thresholds)
    shares, deltas = issue(structure, seq, (b.y for b in blinded))
    return DealerTranscript(structure, seq, shares, deltas, blinded)


DeltaIndex = Mapping[tuple[int, int], PublicDelta]


def index_deltas(deltas: Iterable[PublicDelta] | DeltaIndex) -> DeltaIndex:
    if isinstance(deltas, Mapping):
        return deltas
    return {(d.participant, d.level): d for d in deltas}


def effective_residue(
    share: MtssShare, i: int, deltas: Iterable[PublicDelta] | DeltaIndex
) -> int:
    """``y_i mod p_k`` as computable by the share holder at level ``i``."""
    if i == share.level:
        return share.value
    delta = index_deltas(deltas).get((share.participant, i)) if i > share.level else None
    if delta is None:
        raise DeltaMissing(f"no public delta for participant {share.participant} at level {i}")
    if delta.modulus != share.modulus:
        raise InconsistentShares(f"delta modulus {delta.modulus} differs from share modulus {share.modulus}")
    return (mask(share.participant, share.value, i, share.modulus) + delta.value) % share.modulus


def collect_shares(
    shares: Iterable[MtssShare], structure: LevelStructure, seq: PrimeSequence
) -> dict[int, MtssShare]:
    by_participant: dict[int, MtssShare] = {}
    for share in shares:
        k = share.participant
        if k in by_participant:
            raise InconsistentShares(f"participant {k} supplied twice")
        if not 1 <= k <= structure.n:
            raise InconsistentShares(f"participant {k} outside 1..{structure.n}")
        if share.level != structure.level_of(k):
            raise InconsistentShares(f"participant {k} claims level {share.level}")
        if share.modulus != seq.modulus(k):
            raise InconsistentShares(f"participant {k} holds the wrong modulus")
        by_participant[k] = share
    return by_participant


def recover_level(
    shares: Mapping[int, MtssShare],
    deltas: Iterable[PublicDelta] | DeltaIndex,
    structure: LevelStructure,
    seq: PrimeSequence,
    i: int,
) -> int:
    """Blinded value ``y_i`` from the first ``t_i`` usable members (ascending index)."""
    t = structure.threshold(i)
    chosen = structure.usable(shares, i)[:t]
    if len(chosen) < t:
        raise AccessDenied(f"only {len(chosen)} members can act at level {i}, need {t}")
    index = index_deltas(deltas)
    y = crt_solve((effective_residue(shares[k], i, index), shares[k].modulus) for k in chosen)
    if y >= seq.bound(t):
        raise ReconstructionOverflow(f"level {i} value exceeds M_{i}; a share or delta is corrupted")
    return y


def reconstruct(
    shares: Iterable[MtssShare],
    deltas: Iterable[PublicDelta] | DeltaIndex,
    structure: LevelStructure,
    seq: PrimeSequence,
) -> int:
    """Recover the secret at the smallest level the coalition satisfies."""
    by_participant = collect_shares(shares, structure, seq)
    level = authorized_disjunctive(by_participant, structure)
    if level is None:
        raise AccessDenied(f"coalition {sorted(by_participant)} satisfies no level threshold")
    return recover_level(by_participant, deltas, structure, seq, level) % seq.p0
