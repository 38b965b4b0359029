"""Multilevel (disjunctive) threshold RSA signatures.

The private exponent ``d`` is shared with the disjunctive scheme using
``p0 = phi(N) = 4p'q'``. A coalition acting at level ``i`` signs with CRT
weights ``w_k = (M_A/p_k) * ((M_A/p_k)^-1 mod p_k)``: each member raises the
message to ``r_k * w_k mod M_A`` for its private exponent residue ``r_k`` and
the server adds the public-delta part. The exponents sum to
``y_i + delta*M_A`` with ``0 <= delta < 2*t_i``; since ``y_i = d (mod phi(N))``
the server strips ``msg^(delta*M_A)`` by trying ``kappa^x``,
``kappa = (msg^M_A)^-1 mod N``.

For a member from a higher level the residue it can produce privately is
``mask(k, share, i)``; the public delta supplies the rest, so the server input
stays public.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .access import LevelStructure, authorized_disjunctive
from .disjunctive import DeltaIndex, MtssShare, PublicDelta, deal, index_deltas, mask
from .errors import (
    AccessDenied,
    BadExponent,
    CombinationFailure,
    DeltaMissing,
    GenerationFailure,
    InconsistentShares,
    MessageNotUnit,
    NotMember,
)
from .numtheory import SMALL_PRIMES, generate_anchor_sequence, is_probable_prime, mod_inverse

__all__ = [
    "CoalitionContext",
    "CombinedSignature",
    "PartialSignature",
    "RsaPublic",
    "RsaPublicKey",
    "RsaSetup",
    "build_context",
    "combine",
    "generate_safe_prime",
    "partial_sign",
    "public_part",
    "rsa_setup",
    "verify",
]

MAX_BITS = 512


@dataclass(frozen=True)
class RsaPublicKey:
    n: int
    e: int


@dataclass(frozen=True)
class RsaPublic:
    """What the server and every signer may see."""

    key: RsaPublicKey
    structure: LevelStructure
    moduli: tuple[int, ...]
    deltas: tuple[PublicDelta, ...]

    def context(self, coalition: Iterable[int], level: int | None = None) -> CoalitionContext:
        return build_context(coalition, self.structure, self.moduli, level)


@dataclass(frozen=True)
class RsaSetup:
    """Everything that survives dealing: public data plus per-participant private shares."""

    key: RsaPublicKey
    structure: LevelStructure
    moduli: tuple[int, ...]
    shares: tuple[MtssShare, ...]
    deltas: tuple[PublicDelta, ...]

    @property
    def public(self) -> RsaPublic:
        return RsaPublic(self.key, self.structure, self.moduli, self.deltas)

    def share(self, k: int) -> MtssShare:
        return self.shares[k - 1]


def generate_safe_prime(bits: int, rng: random.Random, max_steps: int = 1 << 22) -> int:
    """Sophie Germain prime ``p'`` such that ``2p'+1`` is a ``bits``-bit safe prime."""
    if bits < 4:
        raise ValueError("safe primes need at least 4 bits")
    if bits <= 8:
        options = [q for q in range(2, 1 << (bits - 1)) if is_probable_prime(q)
                   and is_probable_prime(2 * q + 1) and (2 * q + 1).bit_length() == bits]
        if not options:
            raise GenerationFailure(f"no {bits}-bit safe prime")
        return rng.choice(options)
    lo, hi = 1 << (bits - 2), (1 << (bits - 1)) - 1
    q = rng.randrange(lo, hi) | 1
    sieve = [sp for sp in SMALL_PRIMES[1:] if sp < lo]
    for _ in range(max_steps):
        if q > hi:
            q = lo | 1
        if all(q % sp and (2 * q + 1) % sp for sp in sieve):
            if is_probable_prime(q) and is_probable_prime(2 * q + 1):
                return q
        q += 2
    raise GenerationFailure(f"safe-prime search for {bits} bits timed out")


def rsa_setup(
    bits: int,
    e: int,
    structure: LevelStructure,
    rng: random.Random,
    *,
    safe_primes: tuple[int, int] | None = None,
) -> RsaSetup:
    """Generate ``N = (2p'+1)(2q'+1)``, share ``d`` over an anchor sequence, keep only public data and shares."""
    if safe_primes is None:
        if not 16 <= bits <= MAX_BITS:
            raise ValueError(f"modulus size must be within 16..{MAX_BITS} bits")
        half = bits // 2
        p1 = generate_safe_prime(half, rng)
        q1 = generate_safe_prime(bits - half, rng)
        while q1 == p1:
            q1 = generate_safe_prime(bits - half, rng)
    else:
        p1, q1 = safe_primes
        if p1 == q1 or not all(
            is_probable_prime(x) and is_probable_prime(2 * x + 1) for x in (p1, q1)
        ):
            raise ValueError("safe_primes must be two distinct Sophie Germain primes")
    n = (2 * p1 + 1) * (2 * q1 + 1)
    phi = 4 * p1 * q1
    if e < 3 or math.gcd(e, phi) != 1:
        raise BadExponent(f"e={e} is not invertible modulo phi(N)")
    d = mod_inverse(e, phi)
    seq = generate_anchor_sequence(phi, structure.n, rng)
    transcript = deal(d, structure, seq, rng)
    return RsaSetup(RsaPublicKey(n, e), structure, seq.primes, transcript.shares, transcript.deltas)


@dataclass(frozen=True)
class CoalitionContext:
    level: int
    members: tuple[int, ...]
    homes: tuple[int, ...]
    moduli: tuple[int, ...]
    weights: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        total = math.prod(self.moduli)
        weights = []
        for p in self.moduli:
            basis = total // p
            weights.append(basis * mod_inverse(basis % p, p))
        object.__setattr__(self, "weights", tuple(weights))

    @property
    def modulus(self) -> int:
        """M_A, the product of the members' moduli."""
        return math.prod(self.moduli)

    @property
    def id(self) -> str:
        return f"L{self.level}:" + ",".join(map(str, self.members))

    def index(self, k: int) -> int:
        try:
            return self.members.index(k)
        except ValueError:
            raise NotMember(f"participant {k} is not in coalition {self.id}") from None


def build_context(
    coalition: Iterable[int],
    structure: LevelStructure,
    moduli: Sequence[int],
    level: int | None = None,
) -> CoalitionContext:
    """Pick the signing level (smallest satisfied one unless given) and its first ``t_i`` members."""
    coalition = set(coalition)
    if level is None:
        level = authorized_disjunctive(coalition, structure)
        if level is None:
            raise AccessDenied(f"coalition {sorted(coalition)} satisfies no level threshold")
    usable = structure.usable(coalition, level)
    t = structure.threshold(level)
    if len(usable) < t:
        raise AccessDenied(f"only {len(usable)} members can act at level {level}, need {t}")
    members = usable[:t]
    return CoalitionContext(
        level,
        members,
        tuple(structure.level_of(k) for k in members),
        tuple(moduli[k - 1] for k in members),
    )


@dataclass(frozen=True)
class PartialSignature:
    participant: int
    value: int
    context: str


@dataclass(frozen=True)
class CombinedSignature:
    signature: int
    correction: int


def _check_message(msg: int, key: RsaPublicKey) -> int:
    msg %= key.n
    if math.gcd(msg, key.n) != 1:
        raise MessageNotUnit("message shares a factor with N")
    return msg


def partial_exponent(share: MtssShare, ctx: CoalitionContext) -> int:
    pos = ctx.index(share.participant)
    if share.modulus != ctx.moduli[pos] or share.level != ctx.homes[pos]:
        raise InconsistentShares(f"share of participant {share.participant} does not match the context")
    if share.level == ctx.level:
        residue = share.value
    else:
        residue = mask(share.participant, share.value, ctx.level, share.modulus)
    return residue * ctx.weights[pos] % ctx.modulus


def public_exponent(k: int, deltas: Iterable[PublicDelta] | DeltaIndex, ctx: CoalitionContext) -> int:
    pos = ctx.index(k)
    if ctx.homes[pos] == ctx.level:
        return 0
    delta = index_deltas(deltas).get((k, ctx.level))
    if delta is None:
        raise DeltaMissing(f"no public delta for participant {k} at level {ctx.level}")
    if delta.modulus != ctx.moduli[pos]:
        raise InconsistentShares(f"delta modulus for participant {k} does not match the context")
    return delta.value * ctx.weights[pos] % ctx.modulus


def partial_sign(msg: int, share: MtssShare, ctx: CoalitionContext, key: RsaPublicKey) -> PartialSignature:
    msg = _check_message(msg, key)
    nu = partial_exponent(share, ctx)
    return PartialSignature(share.participant, pow(msg, nu, key.n), ctx.id)


def public_part(
    msg: int, k: int, deltas: Iterable[PublicDelta] | DeltaIndex, ctx: CoalitionContext, key: RsaPublicKey
) -> PartialSignature:
    msg = _check_message(msg, key)
    return PartialSignature(k, pow(msg, public_exponent(k, deltas, ctx), key.n), ctx.id)


def combine(
    partials: Iterable[PartialSignature],
    public_parts: Iterable[PartialSignature],
    msg: int,
    key: RsaPublicKey,
    ctx: CoalitionContext,
) -> CombinedSignature:
    msg = _check_message(msg, key)
    n = key.n
    incomplete = 1
    for label, parts in (("partial", partials), ("public part", public_parts)):
        by_member = {}
        for part in parts:
            if part.context != ctx.id:
                raise CombinationFailure(f"{label} from participant {part.participant} targets {part.context}")
            if part.participant in by_member:
                raise CombinationFailure(f"two {label}s from participant {part.participant}")
            by_member[part.participant] = part.value
        if set(by_member) != set(ctx.members):
            raise CombinationFailure(f"need exactly one {label} per member of {ctx.id}")
        for value in by_member.values():
            incomplete = incomplete * value % n
    kappa = mod_inverse(pow(msg, ctx.modulus, n), n)
    candidate = incomplete
    for x in range(2 * len(ctx.members)):
        if pow(candidate, key.e, n) == msg:
            return CombinedSignature(candidate, x)
        candidate = candidate * kappa % n
    raise CombinationFailure("no correction factor yields a valid signature; a partial is bad")


def verify(msg: int, sgn: int, e: int, n: int) -> bool:
    return pow(sgn, e, n) == msg % n
