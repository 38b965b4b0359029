"""Harn-Fuyou multilevel CRT sharing, its U_i-prime fix, and the interval attack.

Participants are addressed by global index; ``u^i_k`` is the ``k``-th member
(by ascending index) of level ``i``. Every level draws its own classic
Asmuth-Bloom sequence and its blinded value ``y_i`` lies in the t-threshold
range ``(largest t_i - 1 product, M_i)``. A higher-level participant reaches a
lower level ``j`` through a public pair ``(delta, q)`` where
``delta = (y_j - share) mod q``.

Because ``share`` ranges over ``Z_p`` with ``p < q``, each public pair confines
``y_j mod q`` to a window of ``p`` residues, which :func:`attack` exploits.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .access import LevelStructure
from .classic import blind
from .errors import (
    BadThreshold,
    ConditionViolated,
    GapInfeasible,
    GenerationFailure,
    InconsistentShares,
    InsufficientShares,
    NoCandidates,
    ReconstructionOverflow,
    SecretOutOfRange,
)
from .numtheory import (
    PrimeSequence,
    SequenceKind,
    _consecutive_primes,
    check_condition,
    crt_solve,
    generate_hf_sequence,
)

__all__ = [
    "EXAMPLE2",
    "AttackCandidate",
    "AttackReport",
    "HfDelta",
    "HfForced",
    "HfParameters",
    "HfShare",
    "HfTranscript",
    "PublicConstraint",
    "attack",
    "attack_transcript",
    "hf_deal_fixed",
    "hf_deal_original",
    "hf_reconstruct",
    "render_table",
    "run_example2",
]

ORIGINAL = "original"
FIXED = "fixed"


@dataclass(frozen=True)
class HfParameters:
    p0: int
    variant: str
    structure: LevelStructure
    level_primes: tuple[tuple[int, ...], ...]
    """Original variant: the ``n_i`` member primes. Fixed variant: ``U_i`` primes, members first."""
    cross: tuple[tuple[int, int, int], ...]
    """``(participant, target level, modulus)`` for every higher-level participant and lower level."""

    def member_modulus(self, k: int) -> int:
        return self.level_primes[self.structure.level_of(k) - 1][self.structure.position(k) - 1]

    def cross_modulus(self, k: int, j: int) -> int:
        for participant, target, q in self.cross:
            if participant == k and target == j:
                return q
        raise KeyError((k, j))

    def _level_seq(self, i: int) -> PrimeSequence:
        return PrimeSequence(self.p0, self.level_primes[i - 1])

    def bound(self, i: int) -> int:
        """Upper end ``M_i`` of the t-threshold range."""
        return self._level_seq(i).bound(self.structure.threshold(i))

    def floor(self, i: int) -> int:
        """Lower end of the t-threshold range: product of the largest ``t_i - 1`` level primes."""
        return self._level_seq(i).top_product(self.structure.threshold(i) - 1)


@dataclass(frozen=True)
class HfShare:
    participant: int
    level: int
    position: int
    modulus: int
    value: int


@dataclass(frozen=True)
class HfDelta:
    participant: int
    level: int  # home level of the participant
    target: int
    modulus: int
    value: int


@dataclass(frozen=True)
class HfTranscript:
    params: HfParameters
    shares: tuple[HfShare, ...]
    public: tuple[HfDelta, ...]
    blinded: tuple[int, ...] = field(repr=False, compare=False)  # dealer-only y_i

    @property
    def scheme(self) -> str:
        return f"harn_fuyou_{self.params.variant}"

    def share(self, k: int) -> HfShare:
        return self.shares[k - 1]

    def delta(self, k: int, j: int) -> HfDelta:
        for d in self.public:
            if d.participant == k and d.target == j:
                return d
        raise KeyError((k, j))


@dataclass(frozen=True)
class HfForced:
    """Exact dealer choices, used to replay a published transcript."""

    p0: int
    level_primes: tuple[tuple[int, ...], ...]
    alphas: tuple[int, ...]


EXAMPLE2 = HfForced(
    p0=5,
    level_primes=((11, 13, 17, 23), (29, 31, 37, 61, 67, 71)),
    alphas=(5, 952),
)
EXAMPLE2_STRUCTURE = LevelStructure((4, 2), (2, 3))
EXAMPLE2_SECRET = 1


def _higher_participants(structure: LevelStructure, j: int) -> list[int]:
    # ordered by (home level, index); the first one receives the largest cross prime
    return sorted(structure.prefix(j - 1), key=lambda k: (structure.level_of(k), k))


def _assign_cross(structure: LevelStructure, j: int, pool: Sequence[int]) -> list[tuple[int, int, int]]:
    pool = sorted(pool, reverse=True)
    return [(k, j, q) for k, q in zip(_higher_participants(structure, j), pool)]


def _check_thresholds(structure: LevelStructure, per_level: Sequence[int]) -> None:
    for i, (count, t) in enumerate(zip(per_level, structure.thresholds), start=1):
        if t > count:
            raise BadThreshold(f"level {i}: a ({t},{count}) Asmuth-Bloom sequence does not exist")


def _issue(
    s: int, structure: LevelStructure, params: HfParameters, alphas_or_rng
) -> HfTranscript:
    p0 = params.p0
    if not 0 <= s < p0:
        raise SecretOutOfRange(f"secret must lie in Z_{p0}")
    ys = []
    for i in range(1, structure.m + 1):
        lower, upper = params.floor(i), params.bound(i)
        if isinstance(alphas_or_rng, random.Random):
            y = blind(s, p0, upper, alphas_or_rng, lower=lower).y
        else:
            y = s + alphas_or_rng[i - 1] * p0
            if not lower < y < upper:
                raise ConditionViolated(f"y_{i}={y} outside the t-threshold range ({lower}, {upper})")
        ys.append(y)
    shares = []
    for k in range(1, structure.n + 1):
        i = structure.level_of(k)
        p = params.member_modulus(k)
        shares.append(HfShare(k, i, structure.position(k), p, ys[i - 1] % p))
    public = []
    for participant, j, q in sorted(params.cross):
        share = shares[participant - 1]
        public.append(HfDelta(participant, share.level, j, q, (ys[j - 1] - share.value) % q))
    return HfTranscript(params, tuple(shares), tuple(public), tuple(ys))


def _gapped_level(
    p0: int, n: int, t: int, need: int, start: int, max_rounds: int = 16
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    # Consecutive primes with `need` of them lifted out right after p_t, so they
    # fall strictly between p_t and p_{t+1} <= p_{n-t+2}.
    bound = start
    for _ in range(max_rounds):
        run = _consecutive_primes(bound, n + need)
        primes = run[:t] + run[t + need :]
        if check_condition(PrimeSequence(p0, primes), t, SequenceKind.CLASSIC):
            return primes, run[t : t + need]
        bound *= 2
    raise GenerationFailure(f"no gapped ({t},{n}) sequence for p0={p0}")


def hf_deal_original(
    s: int, p0: int, structure: LevelStructure, rng: random.Random
) -> HfTranscript:
    """The scheme as published: ``n_i`` primes per level plus gap primes for cross-level use."""
    _check_thresholds(structure, structure.sizes)
    for j in range(2, structure.m + 1):
        n, t = structure.sizes[j - 1], structure.threshold(j)
        if t >= n - t + 2:
            raise GapInfeasible(
                f"level {j}: need p_{t} < q < p_{n - t + 2}, which contradicts increasing primes"
            )
    start = 2 * p0 + rng.randrange(max(p0, 2))
    level_primes = []
    cross = []
    for j in range(1, structure.m + 1):
        n, t = structure.sizes[j - 1], structure.threshold(j)
        need = len(structure.prefix(j - 1))
        primes, gap = _gapped_level(p0, n, t, need, start)
        upper = primes[n - t + 1] if n - t + 2 <= n else math.inf
        if not all(primes[t - 1] < q < upper for q in gap):
            raise GapInfeasible(f"level {j}: gap primes escaped ({primes[t - 1]}, {upper})")
        level_primes.append(primes)
        cross.extend(_assign_cross(structure, j, gap))
        start = max(primes + gap) + 1
    params = HfParameters(p0, ORIGINAL, structure, tuple(level_primes), tuple(cross))
    return _issue(s, structure, params, rng)


def hf_deal_fixed(
    s: int,
    structure: LevelStructure,
    rng: random.Random | None = None,
    *,
    p0: int | None = None,
    forced: HfForced | None = None,
) -> HfTranscript:
    """The straightforward fix: level ``i`` uses ``U_i`` primes; the extras serve higher levels.

    With ``forced`` the primes and blinding factors are taken verbatim (still
    validated); otherwise ``p0`` and ``rng`` are required.
    """
    cumulative = [len(structure.prefix(i)) for i in range(1, structure.m + 1)]
    _check_thresholds(structure, cumulative)
    if forced is not None:
        p0 = forced.p0
        level_primes = tuple(tuple(ps) for ps in forced.level_primes)
        if [len(ps) for ps in level_primes] != cumulative:
            raise ConditionViolated(f"level {cumulative} primes expected per level")
        for i, (ps, t) in enumerate(zip(level_primes, structure.thresholds), start=1):
            if not check_condition(PrimeSequence(p0, ps), t, SequenceKind.CLASSIC):
                raise ConditionViolated(f"level {i} primes fail p0 * (largest {t - 1}) < M_{i}")
        flat = [p for ps in level_primes for p in ps]
        if len(set(flat)) != len(flat):
            raise ConditionViolated("moduli must be distinct across levels")
    else:
        if p0 is None or rng is None:
            raise ValueError("p0 and rng are required unless forced parameters are given")
        start = None
        level_primes = []
        for count, t in zip(cumulative, structure.thresholds):
            seq = generate_hf_sequence(p0, count, t, rng, start=start)
            level_primes.append(seq.primes)
            start = seq.primes[-1] + 1
        level_primes = tuple(level_primes)
    cross = []
    for j in range(2, structure.m + 1):
        extras = level_primes[j - 1][structure.sizes[j - 1] :]
        cross.extend(_assign_cross(structure, j, extras))
    params = HfParameters(p0, FIXED, structure, level_primes, tuple(cross))
    return _issue(s, structure, params, forced.alphas if forced is not None else rng)


def _residue_at(share: HfShare, j: int, public: Iterable[HfDelta]) -> tuple[int, int]:
    if share.level == j:
        return share.value, share.modulus
    for d in public:
        if d.participant == share.participant and d.target == j:
            return (share.value + d.value) % d.modulus, d.modulus
    raise InconsistentShares(f"no public pair for participant {share.participant} at level {j}")


def hf_reconstruct(
    shares: Iterable[HfShare], public: Iterable[HfDelta], params: HfParameters, j: int
) -> int:
    public = tuple(public)
    usable = sorted((sh for sh in shares if sh.level <= j), key=lambda sh: sh.participant)
    t = params.structure.threshold(j)
    if len(usable) < t:
        raise InsufficientShares(f"{len(usable)} usable shares at level {j}, need {t}")
    for sh in usable:
        if sh.modulus != params.member_modulus(sh.participant):
            raise InconsistentShares(f"participant {sh.participant} holds the wrong modulus")
    y = crt_solve(_residue_at(sh, j, public) for sh in usable[:t])
    if y >= params.bound(j):
        raise ReconstructionOverflow(f"y={y} exceeds M_{j}")
    return y % params.p0


@dataclass(frozen=True)
class PublicConstraint:
    """Adversary's knowledge about one honest higher-level participant at the target level."""

    participant: int
    delta: int
    modulus: int
    share_modulus: int

    def admits(self, residue: int) -> bool:
        return (residue - self.delta) % self.modulus < self.share_modulus

    def intervals(self) -> list[tuple[int, int]]:
        """Inclusive residue windows ``[delta, delta + p - 1] mod q``."""
        q, p, d = self.modulus, self.share_modulus, self.delta
        if p >= q:
            return [(0, q - 1)]
        hi = d + p - 1
        if hi < q:
            return [(d, hi)]
        return [(d, q - 1), (0, hi - q)]


@dataclass(frozen=True)
class AttackCandidate:
    value: int
    multiplier: int
    residues: tuple[int, ...]
    in_range: tuple[bool, ...]

    @property
    def feasible(self) -> bool:
        return all(self.in_range)


@dataclass(frozen=True)
class AttackReport:
    p0: int
    base: int
    step: int
    lower: int
    upper: int
    constraints: tuple[PublicConstraint, ...]
    candidates: tuple[AttackCandidate, ...]

    @property
    def multipliers(self) -> tuple[int, int]:
        return self.candidates[0].multiplier, self.candidates[-1].multiplier

    @property
    def survivors(self) -> tuple[int, ...]:
        return tuple(c.value for c in self.candidates if c.feasible)

    @property
    def secrets(self) -> tuple[int, ...]:
        return tuple(sorted({y % self.p0 for y in self.survivors}))

    def secret_counts(self) -> list[int]:
        counts = [0] * self.p0
        for y in self.survivors:
            counts[y % self.p0] += 1
        return counts


def attack(
    corrupted: Iterable[tuple[int, int]],
    constraints: Iterable[PublicConstraint],
    lower: int,
    upper: int,
    p0: int,
) -> AttackReport:
    """Filter ``y`` candidates in ``(lower, upper)`` through the public windows.

    ``corrupted`` are the congruences the adversary holds for the target level.
    Candidates are ``base + step*K``; one survives when each public pair admits
    its residue.
    """
    corrupted = list(corrupted)
    constraints = tuple(constraints)
    base = crt_solve(corrupted) if corrupted else 0
    step = math.prod(p for _, p in corrupted)
    k_min = max(0, (lower - base) // step + 1)
    k_max = (upper - 1 - base) // step
    if k_min > k_max:
        raise NoCandidates(f"no y = {base} + {step}K in ({lower}, {upper})")
    candidates = []
    for K in range(k_min, k_max + 1):
        y = base + step * K
        residues = tuple(y % c.modulus for c in constraints)
        flags = tuple(c.admits(r) for c, r in zip(constraints, residues))
        candidates.append(AttackCandidate(y, K, residues, flags))
    return AttackReport(p0, base, step, lower, upper, constraints, tuple(candidates))


def attack_transcript(transcript: HfTranscript, corrupted: Iterable[int], j: int) -> AttackReport:
    """Run :func:`attack` with what corrupting ``corrupted`` reveals about level ``j``."""
    params = transcript.params
    corrupted = sorted(set(corrupted))
    congruences = []
    for k in corrupted:
        share = transcript.share(k)
        if share.level > j:
            continue
        congruences.append(_residue_at(share, j, transcript.public))
    constraints = []
    for d in sorted(transcript.public, key=lambda d: d.participant):
        if d.target == j and d.participant not in corrupted:
            share_modulus = params.member_modulus(d.participant)
            constraints.append(PublicConstraint(d.participant, d.value, d.modulus, share_modulus))
    return attack(congruences, constraints, params.floor(j), params.bound(j), params.p0)


def render_table(report: AttackReport, columns: int = 2) -> str:
    """Aligned text in the two-block candidate table layout.

    Residues admitted by their public window carry a ``*``; surviving
    candidates are flagged with ``<=``.
    """
    rows = list(report.candidates)
    per_block = -(-len(rows) // columns)
    blocks = [rows[b * per_block : (b + 1) * per_block] for b in range(columns)]
    width = max(len(str(c.value)) for c in rows)
    cell = max(len(str(c.modulus - 1)) for c in report.constraints) + 1 if report.constraints else 1

    def fmt(c: AttackCandidate | None) -> str:
        if c is None:
            return " " * (width + (cell + 1) * len(report.constraints) + 3)
        cells = " ".join(
            (f"{r}*" if ok else f"{r} ").rjust(cell + 1) for r, ok in zip(c.residues, c.in_range)
        )
        mark = "<=" if c.feasible else "  "
        return f"{str(c.value).rjust(width)} {cells} {mark}"

    head_cells = " ".join(f"u{c.participant}".rjust(cell + 1) for c in report.constraints)
    header = f"{'y'.rjust(width)} {head_cells}   "
    lines = [" || ".join([header] * columns).rstrip()]
    for r in range(per_block):
        line = " || ".join(fmt(b[r] if r < len(b) else None) for b in blocks)
        lines.append(line.rstrip())
    lines.append("")
    lines.append(f"candidates: {len(rows)} of form {report.base} + {report.step}*K, "
                 f"{report.multipliers[0]} <= K <= {report.multipliers[1]}")
    for c in report.constraints:
        windows = " U ".join(f"[{a},{b}]" for a, b in c.intervals())
        lines.append(f"u{c.participant}: delta={c.delta} mod {c.modulus}, share in Z_{c.share_modulus} -> {windows}")
    lines.append(f"survivors: {', '.join(map(str, report.survivors)) or 'none'}")
    lines.append(f"secrets: {', '.join(map(str, report.secrets)) or 'none'}")
    return "\n".join(lines)


def run_example2() -> tuple[HfTranscript, AttackReport]:
    """Replay the published fixed-variant example and attack level 2 with both level-2 members."""
    transcript = hf_deal_fixed(EXAMPLE2_SECRET, EXAMPLE2_STRUCTURE, forced=EXAMPLE2)
    level2 = EXAMPLE2_STRUCTURE.members(2)
    return transcript, attack_transcript(transcript, level2, 2)
