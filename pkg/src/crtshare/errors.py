"""Exception hierarchy.

Every domain failure derives from :class:`CrtShareError`; the CLI maps these to
exit code 1 and :class:`MalformedDocument` to exit code 2.
"""


class CrtShareError(Exception):
    """Base class for all domain errors raised by this package."""

    code = "CrtShareError"

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        cls.code = cls.__name__


# number theory / sequences
class NotInvertible(CrtShareError, ValueError):
    pass


class NonCoprimeModuli(CrtShareError, ValueError):
    pass


class BadThreshold(CrtShareError, ValueError):
    pass


class GenerationFailure(CrtShareError, RuntimeError):
    pass


class ConditionViolated(CrtShareError, ValueError):
    """A prime sequence does not satisfy the inequality a scheme needs."""


# access structures
class InvalidStructure(CrtShareError, ValueError):
    pass


class StructureMismatch(CrtShareError, ValueError):
    pass


class AccessDenied(CrtShareError):
    """The coalition is not in the access structure."""


# sharing / reconstruction
class SecretOutOfRange(CrtShareError, ValueError):
    pass


class InsufficientShares(CrtShareError):
    pass


class InconsistentShares(CrtShareError):
    pass


class ReconstructionOverflow(CrtShareError):
    """The CRT solution exceeds the dealer's bound, so some share is corrupted."""


class DeltaMissing(CrtShareError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


# Harn-Fuyou audit
class GapInfeasible(CrtShareError):
    pass


class NoCandidates(CrtShareError):
    pass


# threshold RSA
class BadExponent(CrtShareError, ValueError):
    pass


class NotMember(CrtShareError):
    pass


class MessageNotUnit(CrtShareError, ValueError):
    pass


class CombinationFailure(CrtShareError):
    pass


class MalformedDocument(CrtShareError, ValueError):
    pass
