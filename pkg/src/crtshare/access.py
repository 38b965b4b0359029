"""Multilevel participant hierarchies and coalition authorization.

Participants carry a single global index ``1..n``. Level 1 is the most
powerful; a member of level ``j`` may stand in for members of any level
``i >= j``. ``U_i`` denotes the union of levels ``1..i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import InvalidStructure

__all__ = ["LevelStructure", "authorized_conjunctive", "authorized_disjunctive"]


@dataclass(frozen=True)
class LevelStructure:
    sizes: tuple[int, ...]
    thresholds: tuple[int, ...]
    assignment: tuple[int, ...] = ()
    """``assignment[k-1]`` is the level of participant ``k``; contiguous blocks by default."""

    def __post_init__(self):
        sizes = tuple(int(x) for x in self.sizes)
        thresholds = tuple(int(x) for x in self.thresholds)
        if not sizes:
            raise InvalidStructure("at least one level is required")
        if len(sizes) != len(thresholds):
            raise InvalidStructure(f"{len(sizes)} level sizes but {len(thresholds)} thresholds")
        if any(s < 1 for s in sizes):
            raise InvalidStructure("every level needs at least one participant")
        if thresholds[0] < 1:
            raise InvalidStructure("thresholds must be positive")
        if any(a >= b for a, b in zip(thresholds, thresholds[1:])):
            raise InvalidStructure(f"thresholds must be strictly increasing, got {thresholds}")
        cumulative = 0
        for i, (size, t) in enumerate(zip(sizes, thresholds), start=1):
            cumulative += size
            if t > cumulative:
                raise InvalidStructure(f"t_{i}={t} exceeds U_{i}={cumulative}")
        if self.assignment:
            assignment = tuple(int(x) for x in self.assignment)
            if len(assignment) != cumulative:
                raise InvalidStructure(f"assignment covers {len(assignment)} of {cumulative} participants")
            for level, size in enumerate(sizes, start=1):
                if assignment.count(level) != size:
                    raise InvalidStructure(f"level {level} should have {size} members")
        else:
            assignment = tuple(level for level, size in enumerate(sizes, start=1) for _ in range(size))
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "thresholds", thresholds)
        object.__setattr__(self, "assignment", assignment)

    @classmethod
    def from_levels(cls, levels: Mapping[int, int], thresholds: Iterable[int]) -> LevelStructure:
        """Build from an explicit ``participant -> level`` map."""
        n = len(levels)
        if sorted(levels) != list(range(1, n + 1)):
            raise InvalidStructure("participants must be numbered 1..n")
        assignment = tuple(levels[k] for k in range(1, n + 1))
        thresholds = tuple(thresholds)
        sizes = tuple(assignment.count(i) for i in range(1, len(thresholds) + 1))
        if sum(sizes) != n:
            raise InvalidStructure("assignment refers to levels beyond the threshold list")
        return cls(sizes, thresholds, assignment)

    @property
    def m(self) -> int:
        return len(self.sizes)

    @property
    def n(self) -> int:
        return len(self.assignment)

    def threshold(self, i: int) -> int:
        return self.thresholds[i - 1]

    def level_of(self, k: int) -> int:
        if not 1 <= k <= self.n:
            raise InvalidStructure(f"participant {k} outside 1..{self.n}")
        return self.assignment[k - 1]

    def members(self, i: int) -> tuple[int, ...]:
        """Participants of level ``i`` in ascending order."""
        return tuple(k for k, level in enumerate(self.assignment, start=1) if level == i)

    def prefix(self, i: int) -> tuple[int, ...]:
        """Participants of levels ``1..i`` (the set U_i) in ascending order."""
        return tuple(k for k, level in enumerate(self.assignment, start=1) if level <= i)

    def position(self, k: int) -> int:
        """1-based rank of ``k`` within its own level."""
        return self.members(self.level_of(k)).index(k) + 1

    def usable(self, coalition: Iterable[int], i: int) -> tuple[int, ...]:
        """Members of the coalition that may act at level ``i``, ascending."""
        members = _checked(coalition, self)
        return tuple(sorted(k for k in members if self.assignment[k - 1] <= i))


def _checked(coalition: Iterable[int], structure: LevelStructure) -> frozenset[int]:
    members = frozenset(coalition)
    for k in members:
        if not 1 <= k <= structure.n:
            raise InvalidStructure(f"participant {k} outside 1..{structure.n}")
    return members


def authorized_disjunctive(coalition: Iterable[int], structure: LevelStructure) -> int | None:
    """Smallest level ``i`` with ``|A & U_i| >= t_i``, or None when no level is satisfied."""
    members = _checked(coalition, structure)
    count = 0
    levels = structure.assignment
    per_level = [0] * (structure.m + 1)
    for k in members:
        per_level[levels[k - 1]] += 1
    for i in range(1, structure.m + 1):
        count += per_level[i]
        if count >= structure.thresholds[i - 1]:
            return i
    return None


def authorized_conjunctive(coalition: Iterable[int], structure: LevelStructure) -> bool:
    members = _checked(coalition, structure)
    per_level = [0] * (structure.m + 1)
    for k in members:
        per_level[structure.assignment[k - 1]] += 1
    count = 0
    for i in range(1, structure.m + 1):
        count += per_level[i]
        if count < structure.thresholds[i - 1]:
            return False
    return True


def deficient_levels(coalition: Iterable[int], structure: LevelStructure) -> tuple[int, ...]:
    """Levels whose cumulative threshold the coalition misses."""
    return tuple(
        i
        for i in range(1, structure.m + 1)
        if len(structure.usable(coalition, i)) < structure.threshold(i)
    )
