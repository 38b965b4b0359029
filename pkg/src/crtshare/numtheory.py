"""Arbitrary-precision number theory and CRT prime sequences.

Everything here works on plain Python ints; inequalities are evaluated with
exact integer products, never logarithms.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (
    BadThreshold,
    ConditionViolated,
    GenerationFailure,
    NonCoprimeModuli,
    NotInvertible,
)

__all__ = [
    "CongruenceSystem",
    "PrimeSequence",
    "SequenceKind",
    "check_condition",
    "crt_solve",
    "extended_gcd",
    "generate_anchor_sequence",
    "generate_hf_sequence",
    "is_probable_prime",
    "mod_inverse",
    "next_prime",
]


def _sieve(limit: int) -> tuple[int, ...]:
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(flags[i * i :: i]))
    return tuple(i for i, f in enumerate(flags) if f)


SMALL_PRIMES = _sieve(2000)
# Strong-pseudoprime test with these bases is exact below 3.3e24.
_DETERMINISTIC_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_DETERMINISTIC_LIMIT = 1 << 64


def extended_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, u, v)`` with ``u*a + v*b == g == gcd(a, b)`` and ``g > 0``."""
    if a == 0 and b == 0:
        raise ValueError("extended_gcd(0, 0) is undefined")
    old_r, r = a, b
    old_u, u = 1, 0
    old_v, v = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_u, u = u, old_u - q * u
        old_v, v = v, old_v - q * v
    if old_r < 0:
        return -old_r, -old_u, -old_v
    return old_r, old_u, old_v


def mod_inverse(a: int, m: int) -> int:
    if m <= 1:
        raise ValueError(f"modulus must exceed 1, got {m}")
    g, u, _ = extended_gcd(a % m, m)
    if g != 1:
        raise NotInvertible(f"{a} has no inverse modulo {m} (gcd {g})")
    return u % m


@dataclass(frozen=True)
class CongruenceSystem:
    """x = r_k (mod p_k) for every pair; moduli must be pairwise coprime."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple((int(r), int(p)) for r, p in self.pairs)
        if not pairs:
            raise ValueError("a congruence system needs at least one pair")
        for r, p in pairs:
            if p < 1:
                raise ValueError(f"modulus must be positive, got {p}")
            if not 0 <= r < p:
                raise ValueError(f"residue {r} not in Z_{p}")
        object.__setattr__(self, "pairs", pairs)

    @property
    def modulus(self) -> int:
        return math.prod(p for _, p in self.pairs)


def crt_solve(system: CongruenceSystem | Iterable[tuple[int, int]]) -> int:
    """Unique ``x`` in ``[0, P)`` satisfying every congruence, ``P`` the moduli product."""
    if not isinstance(system, CongruenceSystem):
        system = CongruenceSystem(tuple(system))
    pairs = system.pairs
    if not pairs:
        raise ValueError("empty congruence system")
    moduli = [p for _, p in pairs]
    for i, p in enumerate(moduli):
        for q in moduli[i + 1 :]:
            g = math.gcd(p, q)
            if g != 1:
                raise NonCoprimeModuli(f"moduli {p} and {q} share factor {g}")
    x, big = 0, 1
    for r, p in pairs:
        step = ((r - x) * mod_inverse(big % p, p)) % p if p > 1 else 0
        x += big * step
        big *= p
    return x


def is_probable_prime(x: int, rounds: int = 40, rng: random.Random | None = None) -> bool:
    """Miller-Rabin.

    Inputs below 2**64 use a fixed witness set and the answer is exact. Larger
    inputs use ``rounds`` random bases; without an explicit ``rng`` the bases
    are drawn from a generator seeded by ``x`` so results are reproducible.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if x < 2:
        return False
    for p in SMALL_PRIMES:
        if x == p:
            return True
        if x % p == 0:
            return False
    d, r = x - 1, 0
    while not d & 1:
        d >>= 1
        r += 1
    if x < _DETERMINISTIC_LIMIT:
        witnesses: Iterable[int] = _DETERMINISTIC_WITNESSES
    else:
        rng = rng if rng is not None else random.Random(x)
        witnesses = [rng.randrange(2, x - 1) for _ in range(rounds)]
    for a in witnesses:
        y = pow(a, d, x)
        if y == 1 or y == x - 1:
            continue
        for _ in range(r - 1):
            y = y * y % x
            if y == x - 1:
                break
        else:
            return False
    return True


def next_prime(x: int) -> int:
    """Smallest prime >= x."""
    if x <= 2:
        return 2
    x |= 1
    while not is_probable_prime(x):
        x += 2
    return x


def _consecutive_primes(start: int, count: int) -> tuple[int, ...]:
    out = []
    x = start
    while len(out) < count:
        x = next_prime(x)
        out.append(x)
        x += 1
    return tuple(out)


class SequenceKind(str, enum.Enum):
    MIGNOTTE = "mignotte"
    CLASSIC = "classic"  # Asmuth-Bloom, p0 * (largest t-1) < M
    STATISTICAL = "statistical"  # Asmuth-Bloom, p0**2 * (largest t-1) < M
    ANCHOR = "anchor"


@dataclass(frozen=True)
class PrimeSequence:
    """Secret-space modulus ``p0`` and increasing pairwise coprime moduli ``p_1 < ... < p_n``.

    ``kind``/``threshold`` record which inequality the sequence was validated
    against; when given they are re-checked on construction. Mignotte sequences
    have no secret space and use ``p0 = 1``.
    """

    p0: int
    primes: tuple[int, ...]
    kind: SequenceKind | None = None
    threshold: int | None = field(default=None)

    def __post_init__(self):
        primes = tuple(int(p) for p in self.primes)
        object.__setattr__(self, "primes", primes)
        if self.kind is not None:
            object.__setattr__(self, "kind", SequenceKind(self.kind))
        if self.p0 < 1:
            raise ValueError("p0 must be positive")
        if not primes:
            raise ValueError("sequence must hold at least one modulus")
        if self.p0 >= primes[0]:
            raise ValueError(f"p0={self.p0} must be below p_1={primes[0]}")
        if any(a >= b for a, b in zip(primes, primes[1:])):
            raise ValueError("moduli must be strictly increasing")
        for i, p in enumerate(primes):
            if math.gcd(self.p0, p) != 1:
                raise NonCoprimeModuli(f"p0={self.p0} and {p} are not coprime")
            for q in primes[i + 1 :]:
                if math.gcd(p, q) != 1:
                    raise NonCoprimeModuli(f"moduli {p} and {q} are not coprime")
        if self.kind is not None and not check_condition(self, self.threshold, self.kind):
            raise ConditionViolated(f"sequence fails the {self.kind.value} condition")

    @property
    def n(self) -> int:
        return len(self.primes)

    def modulus(self, k: int) -> int:
        """Modulus of participant ``k`` (1-based)."""
        if not 1 <= k <= self.n:
            raise IndexError(f"participant {k} outside 1..{self.n}")
        return self.primes[k - 1]

    def bound(self, t: int) -> int:
        """M = p_1 * ... * p_t, the product of the t smallest moduli."""
        return math.prod(self.primes[:t])

    def top_product(self, k: int) -> int:
        """Product of the k largest moduli (1 when k == 0)."""
        return math.prod(self.primes[self.n - k :]) if k > 0 else 1


def anchor_threshold(n: int) -> int:
    # floor(n/2), lifted to 1 so that n in {1} still yields p0**2 < p_1
    return max(1, n // 2)


def check_condition(seq: PrimeSequence, t: int | None, kind: SequenceKind | str) -> bool:
    kind = SequenceKind(kind)
    n = seq.n
    if kind is SequenceKind.ANCHOR:
        t = anchor_threshold(n)
    elif t is None or not 1 <= t <= n:
        raise BadThreshold(f"threshold {t} outside 1..{n}")
    left = seq.top_product(t - 1)
    right = seq.bound(t)
    if kind is SequenceKind.MIGNOTTE:
        return left < right
    if kind is SequenceKind.CLASSIC:
        return seq.p0 * left < right
    return seq.p0 * seq.p0 * left < right


def satisfies_all_thresholds(seq: PrimeSequence) -> bool:
    return all(check_condition(seq, t, SequenceKind.STATISTICAL) for t in range(1, seq.n + 1))


def generate_anchor_sequence(
    p0: int, n: int, rng: random.Random | None = None, *, max_rounds: int = 16
) -> PrimeSequence:
    """Anchor sequence of ``n`` primes over secret space ``Z_p0``.

    Consecutive primes are taken from the first prime >= 2*p0**2; the start is
    doubled until the anchor inequality and the statistical inequality for
    every threshold 1..n hold. With ``rng`` the start bound is shifted by a
    random amount below p0**2, so the primes do not pin down p0 exactly (which
    matters when p0 is itself a secret, as in threshold RSA).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if p0 < 2:
        raise ValueError("p0 must be >= 2")
    start = 2 * p0 * p0
    if rng is not None:
        start += rng.randrange(p0 * p0)
    for _ in range(max_rounds):
        candidate = PrimeSequence(p0, _consecutive_primes(start, n))
        if check_condition(candidate, None, SequenceKind.ANCHOR) and satisfies_all_thresholds(candidate):
            return PrimeSequence(p0, candidate.primes, SequenceKind.ANCHOR)
        start *= 2
    raise GenerationFailure(f"no anchor sequence for p0={p0}, n={n} after {max_rounds} rounds")


def generate_hf_sequence(
    p0: int,
    count: int,
    t: int,
    rng: random.Random | None = None,
    *,
    start: int | None = None,
    max_rounds: int = 16,
) -> PrimeSequence:
    """``count`` primes meeting the classic Asmuth-Bloom inequality at threshold ``t``.

    This is the per-level sequence of the Harn-Fuyou construction. ``start``
    lets callers keep levels disjoint.
    """
    if not 1 <= t <= count:
        raise BadThreshold(f"a ({t},{count}) Asmuth-Bloom sequence does not exist")
    bound = max(2 * p0, start or 0)
    if rng is not None:
        bound += rng.randrange(max(p0, 2))
    for _ in range(max_rounds):
        candidate = PrimeSequence(p0, _consecutive_primes(bound, count))
        if check_condition(candidate, t, SequenceKind.CLASSIC):
            return PrimeSequence(p0, candidate.primes, SequenceKind.CLASSIC, t)
        bound *= 2
    raise GenerationFailure(f"no ({t},{count}) sequence for p0={p0} after {max_rounds} rounds")


def prefix_is_minimal(primes: Sequence[int], indices: Iterable[int]) -> bool:
    """True when the chosen moduli multiply to at least the prefix product of the same size."""
    chosen = sorted(set(indices))
    return math.prod(primes[i - 1] for i in chosen) >= math.prod(primes[: len(chosen)])
