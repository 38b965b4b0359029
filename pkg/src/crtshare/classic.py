"""Single-threshold CRT schemes: Mignotte and (statistical) Asmuth-Bloom."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable

from .errors import (
    BadThreshold,
    ConditionViolated,
    InconsistentShares,
    InsufficientShares,
    ReconstructionOverflow,
    SecretOutOfRange,
)
from .numtheory import PrimeSequence, SequenceKind, _consecutive_primes, check_condition, crt_solve, mod_inverse

__all__ = [
    "BlindedSecret",
    "ClassicShare",
    "ab_reconstruct",
    "ab_share",
    "blind",
    "mignotte_interval",
    "mignotte_reconstruct",
    "mignotte_sequence",
    "mignotte_share",
    "secret_candidate_counts",
]


@dataclass(frozen=True)
class ClassicShare:
    participant: int
    modulus: int
    value: int

    def __post_init__(self):
        if not 0 <= self.value < self.modulus:
            raise ValueError(f"share value {self.value} not in Z_{self.modulus}")


@dataclass(frozen=True)
class BlindedSecret:
    """Dealer-side ``y = s + alpha*p0`` together with its bound ``M``; never published."""

    y: int
    alpha: int
    bound: int


def blind(s: int, p0: int, bound: int, rng: random.Random, lower: int = -1) -> BlindedSecret:
    """Pick alpha uniformly so that ``lower < s + alpha*p0 < bound``.

    The default ``lower = -1`` is the original Asmuth-Bloom range ``[0, bound)``.
    """
    lo = (lower - s) // p0 + 1
    hi = (bound - 1 - s) // p0
    if lo > hi:
        raise ConditionViolated(f"no blinding factor puts y in ({lower}, {bound})")
    alpha = rng.randint(lo, hi)
    return BlindedSecret(s + alpha * p0, alpha, bound)


def _collect(shares: Iterable[ClassicShare], seq: PrimeSequence) -> list[ClassicShare]:
    out = []
    seen = set()
    for share in shares:
        if share.participant in seen:
            raise InconsistentShares(f"participant {share.participant} supplied twice")
        seen.add(share.participant)
        try:
            expected = seq.modulus(share.participant)
        except IndexError as exc:
            raise InconsistentShares(str(exc)) from None
        if share.modulus != expected:
            raise InconsistentShares(
                f"participant {share.participant} holds modulus {share.modulus}, sequence says {expected}"
            )
        out.append(share)
    return out


def mignotte_interval(seq: PrimeSequence, t: int) -> tuple[int, int]:
    """Open interval of legal secrets: (product of largest t-1, product of smallest t)."""
    check_condition(seq, t, SequenceKind.MIGNOTTE)
    return seq.top_product(t - 1), seq.bound(t)


def _iroot(x: int, k: int) -> int:
    """Largest r with r**k <= x."""
    lo, hi = 0, 1 << (x.bit_length() // k + 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid**k <= x:
            lo = mid
        else:
            hi = mid - 1
    return lo


def mignotte_sequence(s: int, n: int, t: int) -> PrimeSequence:
    """Smallest run of ``n`` consecutive primes whose Mignotte interval contains ``s``."""
    if not 1 <= t <= n:
        raise BadThreshold(f"threshold {t} outside 1..{n}")
    if s < 2:
        raise SecretOutOfRange("a Mignotte secret must be at least 2")
    start = max(2, _iroot(s, t))
    while True:
        seq = PrimeSequence(1, _consecutive_primes(start, n))
        lower, upper = mignotte_interval(seq, t)
        if upper <= s:
            start = seq.primes[0] + 1
        elif lower < s:
            return PrimeSequence(1, seq.primes, SequenceKind.MIGNOTTE, t)
        else:
            raise SecretOutOfRange(f"no run of consecutive primes puts {s} inside the Mignotte interval")


def mignotte_share(s: int, seq: PrimeSequence, t: int) -> list[ClassicShare]:
    low, high = mignotte_interval(seq, t)
    if not low < s < high:
        raise SecretOutOfRange(f"secret must lie strictly between {low} and {high}")
    return [ClassicShare(k, p, s % p) for k, p in enumerate(seq.primes, start=1)]


def mignotte_reconstruct(shares: Iterable[ClassicShare], seq: PrimeSequence, t: int) -> int:
    shares = _collect(shares, seq)
    if len(shares) < t:
        raise InsufficientShares(f"{len(shares)} shares, threshold {t}")
    s = crt_solve((sh.value, sh.modulus) for sh in shares)
    low, high = mignotte_interval(seq, t)
    if not low < s < high:
        raise InconsistentShares(f"reconstructed value {s} is outside the Mignotte interval")
    return s


def ab_share(
    s: int, seq: PrimeSequence, t: int, rng: random.Random
) -> tuple[list[ClassicShare], BlindedSecret]:
    """Share ``s`` in ``Z_p0`` over a sequence meeting the statistical condition at ``t``."""
    if not 0 <= s < seq.p0:
        raise SecretOutOfRange(f"secret must lie in Z_{seq.p0}")
    if not check_condition(seq, t, SequenceKind.STATISTICAL):
        raise ConditionViolated(f"sequence fails p0^2 * (largest {t - 1}) < p_1...p_{t}")
    blinded = blind(s, seq.p0, seq.bound(t), rng)
    shares = [ClassicShare(k, p, blinded.y % p) for k, p in enumerate(seq.primes, start=1)]
    return shares, blinded


def ab_reconstruct(shares: Iterable[ClassicShare], seq: PrimeSequence, t: int) -> int:
    shares = _collect(shares, seq)
    if len(shares) < t:
        raise InsufficientShares(f"{len(shares)} shares, threshold {t}")
    y = crt_solve((sh.value, sh.modulus) for sh in shares)
    if y >= seq.bound(t):
        raise ReconstructionOverflow(f"y={y} exceeds the dealer bound; a share is corrupted")
    return y % seq.p0


def secret_candidate_counts(residues: Iterable[tuple[int, int]], p0: int, bound: int) -> list[int]:
    """For each secret in ``Z_p0``, how many ``y`` in ``[0, bound)`` fit the residues.

    Counts the arithmetic progression ``y' + beta*M'`` exactly instead of
    scanning, so it works at any size. Requires ``gcd(p0, M') == 1``.
    """
    residues = list(residues)
    if residues:
        base = crt_solve(residues)
        step = 1
        for _, p in residues:
            step *= p
    else:
        base, step = 0, 1
    if base >= bound:
        return [0] * p0
    total = (bound - 1 - base) // step + 1
    inv = mod_inverse(step % p0, p0) if p0 > 1 else 0
    counts = []
    for secret in range(p0):
        # beta with base + beta*step = secret (mod p0)
        first = ((secret - base) * inv) % p0 if p0 > 1 else 0
        counts.append((total - 1 - first) // p0 + 1 if first < total else 0)
    return counts
