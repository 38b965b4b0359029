"""Canonical JSON documents for every artifact the CLI reads or writes.

A document is ``{"schema_version": 1, "scheme": ..., "payload": {...}}`` with
sorted keys and compact separators, so equal values serialize to identical
bytes. Integers inside payloads are decimal strings. Private shares carry a
top-level ``"private": true`` and always live in their own document; dealer
secrets (blinded values, blinding factors, RSA trapdoor) have no encoding at all.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass
from typing import Any, Callable, Iterable

from .access import LevelStructure
from .classic import ClassicShare
from .disjunctive import DealerTranscript, MtssShare, PublicDelta
from .errors import MalformedDocument
from .harn_fuyou import (
    AttackCandidate,
    AttackReport,
    HfDelta,
    HfParameters,
    HfShare,
    HfTranscript,
    PublicConstraint,
)
from .numtheory import PrimeSequence
from .threshold_rsa import (
    CoalitionContext,
    CombinedSignature,
    PartialSignature,
    RsaPublic,
    RsaPublicKey,
)

SCHEMA_VERSION = 1
SCHEMES = frozenset(
    {
        "mignotte",
        "asmuth_bloom",
        "mtss_disjunctive",
        "mtss_conjunctive",
        "harn_fuyou_original",
        "harn_fuyou_fixed",
        "rsa_mtss",
    }
)


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


def document(scheme: str | None, payload: dict, *, private: bool = False) -> dict:
    if scheme is not None and scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    doc = {"schema_version": SCHEMA_VERSION, "scheme": scheme, "payload": payload}
    if private:
        doc["private"] = True
    return doc


def loads(text: str | bytes) -> dict:
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedDocument(f"not a JSON document: {exc}") from None
    if not isinstance(doc, dict) or not {"schema_version", "scheme", "payload"} <= doc.keys():
        raise MalformedDocument("document needs schema_version, scheme and payload")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise MalformedDocument(f"unsupported schema_version {doc['schema_version']!r}")
    if doc["scheme"] is not None and doc["scheme"] not in SCHEMES:
        raise MalformedDocument(f"unknown scheme {doc['scheme']!r}")
    if not isinstance(doc["payload"], dict) or not isinstance(doc["payload"].get("type"), str):
        raise MalformedDocument("payload must be an object with a type")
    return doc


# -- primitives ---------------------------------------------------------------

def _i(x: int) -> str:
    return str(int(x))


def _ints(xs: Iterable[int]) -> list[str]:
    return [_i(x) for x in xs]


def _int(v: Any) -> int:
    if not isinstance(v, str) or not v.lstrip("-").isdigit():
        raise MalformedDocument(f"expected a decimal string, got {v!r}")
    return int(v)


def _int_list(v: Any) -> tuple[int, ...]:
    if not isinstance(v, list):
        raise MalformedDocument(f"expected a list, got {v!r}")
    return tuple(_int(x) for x in v)


def _get(payload: dict, key: str) -> Any:
    try:
        return payload[key]
    except KeyError:
        raise MalformedDocument(f"missing field {key!r}") from None


def _expect(doc: dict, kind: str) -> dict:
    payload = doc["payload"]
    if payload.get("type") != kind:
        raise MalformedDocument(f"expected a {kind} document, got {payload.get('type')!r}")
    return payload


def _parser(func: Callable[..., Any]) -> Callable[..., Any]:
    """Report any shape error inside a parser as a malformed document."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except MalformedDocument:
            raise
        except (ValueError, KeyError, TypeError, IndexError, AttributeError) as exc:
            raise MalformedDocument(f"inconsistent document: {exc}") from None

    return wrapper


# -- building blocks ------------------------------------------------------------

def sequence_payload(seq: PrimeSequence) -> dict:
    return {
        "type": "prime_sequence",
        "p0": _i(seq.p0),
        "primes": _ints(seq.primes),
        "kind": seq.kind.value if seq.kind else None,
        "threshold": _i(seq.threshold) if seq.threshold is not None else None,
    }


@_parser
def parse_sequence(payload: dict) -> PrimeSequence:
    threshold = _get(payload, "threshold")
    return PrimeSequence(
        _int(_get(payload, "p0")),
        _int_list(_get(payload, "primes")),
        _get(payload, "kind"),
        _int(threshold) if threshold is not None else None,
    )


def structure_payload(structure: LevelStructure) -> dict:
    return {
        "type": "level_structure",
        "sizes": _ints(structure.sizes),
        "thresholds": _ints(structure.thresholds),
        "assignment": _ints(structure.assignment),
    }


@_parser
def parse_structure(payload: dict) -> LevelStructure:
    return LevelStructure(
        _int_list(_get(payload, "sizes")),
        _int_list(_get(payload, "thresholds")),
        _int_list(_get(payload, "assignment")),
    )


def _delta_payload(d: PublicDelta) -> dict:
    return {"participant": _i(d.participant), "level": _i(d.level), "modulus": _i(d.modulus), "value": _i(d.value)}


def _parse_delta(p: dict) -> PublicDelta:
    return PublicDelta(*(_int(_get(p, f)) for f in ("participant", "level", "modulus", "value")))


# -- public transcripts -----------------------------------------------------------

@dataclass(frozen=True)
class ClassicPublic:
    scheme: str
    sequence: PrimeSequence
    threshold: int


@dataclass(frozen=True)
class MtssPublic:
    scheme: str
    structure: LevelStructure
    sequence: PrimeSequence
    deltas: tuple[PublicDelta, ...]


def sequence_document(seq: PrimeSequence) -> dict:
    return document(None, sequence_payload(seq))


def classic_public_document(public: ClassicPublic) -> dict:
    return document(
        public.scheme,
        {"type": "classic_public", "sequence": sequence_payload(public.sequence), "threshold": _i(public.threshold)},
    )


@_parser
def parse_classic_public(doc: dict) -> ClassicPublic:
    p = _expect(doc, "classic_public")
    return ClassicPublic(doc["scheme"], parse_sequence(_get(p, "sequence")), _int(_get(p, "threshold")))


def mtss_public_document(transcript: DealerTranscript | MtssPublic) -> dict:
    return document(
        transcript.scheme,
        {
            "type": "mtss_public",
            "structure": structure_payload(transcript.structure),
            "sequence": sequence_payload(transcript.sequence),
            "bounds": _ints(transcript.sequence.bound(t) for t in transcript.structure.thresholds),
            "deltas": [_delta_payload(d) for d in transcript.deltas],
        },
    )


@_parser
def parse_mtss_public(doc: dict) -> MtssPublic:
    p = _expect(doc, "mtss_public")
    return MtssPublic(
        doc["scheme"],
        parse_structure(_get(p, "structure")),
        parse_sequence(_get(p, "sequence")),
        tuple(_parse_delta(d) for d in _get(p, "deltas")),
    )


# -- private shares -------------------------------------------------------------

def share_document(scheme: str, share: ClassicShare | MtssShare | HfShare) -> dict:
    payload = {"type": "share", "participant": _i(share.participant), "modulus": _i(share.modulus), "value": _i(share.value)}
    if isinstance(share, (MtssShare, HfShare)):
        payload["level"] = _i(share.level)
    if isinstance(share, HfShare):
        payload["position"] = _i(share.position)
    return document(scheme, payload, private=True)


@_parser
def parse_share(doc: dict) -> ClassicShare | MtssShare | HfShare:
    p = _expect(doc, "share")
    if doc.get("private") is not True:
        raise MalformedDocument("share documents must be marked private")
    k, modulus, value = (_int(_get(p, f)) for f in ("participant", "modulus", "value"))
    scheme = doc["scheme"]
    if scheme in ("mignotte", "asmuth_bloom"):
        return ClassicShare(k, modulus, value)
    if scheme in ("mtss_disjunctive", "mtss_conjunctive", "rsa_mtss"):
        return MtssShare(k, _int(_get(p, "level")), modulus, value)
    if scheme in ("harn_fuyou_original", "harn_fuyou_fixed"):
        return HfShare(k, _int(_get(p, "level")), _int(_get(p, "position")), modulus, value)
    raise MalformedDocument(f"share document has no usable scheme ({scheme!r})")


# -- Harn-Fuyou -----------------------------------------------------------------

def hf_public_document(transcript: HfTranscript) -> dict:
    params = transcript.params
    return document(
        transcript.scheme,
        {
            "type": "hf_public",
            "p0": _i(params.p0),
            "variant": params.variant,
            "structure": structure_payload(params.structure),
            "level_primes": [_ints(ps) for ps in params.level_primes],
            "cross": [_ints(c) for c in params.cross],
            "public": [
                {
                    "participant": _i(d.participant),
                    "level": _i(d.level),
                    "target": _i(d.target),
                    "modulus": _i(d.modulus),
                    "value": _i(d.value),
                }
                for d in transcript.public
            ],
        },
    )


@_parser
def parse_hf_public(doc: dict) -> tuple[HfParameters, tuple[HfDelta, ...]]:
    p = _expect(doc, "hf_public")
    params = HfParameters(
        _int(_get(p, "p0")),
        _get(p, "variant"),
        parse_structure(_get(p, "structure")),
        tuple(_int_list(ps) for ps in _get(p, "level_primes")),
        tuple(_int_list(c) for c in _get(p, "cross")),
    )
    public = tuple(
        HfDelta(*(_int(_get(d, f)) for f in ("participant", "level", "target", "modulus", "value")))
        for d in _get(p, "public")
    )
    return params, public


def attack_report_document(report: AttackReport, scheme: str = "harn_fuyou_fixed") -> dict:
    return document(
        scheme,
        {
            "type": "attack_report",
            "p0": _i(report.p0),
            "base": _i(report.base),
            "step": _i(report.step),
            "lower": _i(report.lower),
            "upper": _i(report.upper),
            "constraints": [
                {
                    "participant": _i(c.participant),
                    "delta": _i(c.delta),
                    "modulus": _i(c.modulus),
                    "share_modulus": _i(c.share_modulus),
                    "intervals": [_ints(w) for w in c.intervals()],
                }
                for c in report.constraints
            ],
            "candidates": [
                {
                    "value": _i(c.value),
                    "multiplier": _i(c.multiplier),
                    "residues": _ints(c.residues),
                    "in_range": list(c.in_range),
                    "feasible": c.feasible,
                }
                for c in report.candidates
            ],
            "survivors": _ints(report.survivors),
            "secrets": _ints(report.secrets),
        },
    )


@_parser
def parse_attack_report(doc: dict) -> AttackReport:
    p = _expect(doc, "attack_report")
    constraints = tuple(
        PublicConstraint(*(_int(_get(c, f)) for f in ("participant", "delta", "modulus", "share_modulus")))
        for c in _get(p, "constraints")
    )
    candidates = tuple(
        AttackCandidate(
            _int(_get(c, "value")),
            _int(_get(c, "multiplier")),
            _int_list(_get(c, "residues")),
            tuple(bool(x) for x in _get(c, "in_range")),
        )
        for c in _get(p, "candidates")
    )
    return AttackReport(
        *(_int(_get(p, f)) for f in ("p0", "base", "step", "lower", "upper")), constraints, candidates
    )


# -- threshold RSA --------------------------------------------------------------

def rsa_public_document(public: RsaPublic) -> dict:
    return document(
        "rsa_mtss",
        {
            "type": "rsa_public",
            "n": _i(public.key.n),
            "e": _i(public.key.e),
            "structure": structure_payload(public.structure),
            "moduli": _ints(public.moduli),
            "deltas": [_delta_payload(d) for d in public.deltas],
        },
    )


@_parser
def parse_rsa_public(doc: dict) -> RsaPublic:
    p = _expect(doc, "rsa_public")
    return RsaPublic(
        RsaPublicKey(_int(_get(p, "n")), _int(_get(p, "e"))),
        parse_structure(_get(p, "structure")),
        _int_list(_get(p, "moduli")),
        tuple(_parse_delta(d) for d in _get(p, "deltas")),
    )


def context_document(ctx: CoalitionContext) -> dict:
    return document(
        "rsa_mtss",
        {
            "type": "rsa_context",
            "id": ctx.id,
            "level": _i(ctx.level),
            "members": _ints(ctx.members),
            "homes": _ints(ctx.homes),
            "moduli": _ints(ctx.moduli),
        },
    )


@_parser
def parse_context(doc: dict) -> CoalitionContext:
    p = _expect(doc, "rsa_context")
    return CoalitionContext(
        _int(_get(p, "level")), _int_list(_get(p, "members")), _int_list(_get(p, "homes")), _int_list(_get(p, "moduli"))
    )


def partials_document(parts: Iterable[PartialSignature], role: str) -> dict:
    """``role`` is ``signer`` for member partials and ``server`` for public parts."""
    parts = list(parts)
    return document(
        "rsa_mtss",
        {
            "type": "rsa_partials",
            "role": role,
            "parts": [{"participant": _i(x.participant), "value": _i(x.value), "context": x.context} for x in parts],
        },
    )


@_parser
def parse_partials(doc: dict) -> tuple[str, tuple[PartialSignature, ...]]:
    p = _expect(doc, "rsa_partials")
    parts = tuple(
        PartialSignature(_int(_get(x, "participant")), _int(_get(x, "value")), _get(x, "context"))
        for x in _get(p, "parts")
    )
    return _get(p, "role"), parts


def signature_document(msg: int, sig: CombinedSignature) -> dict:
    return document(
        "rsa_mtss",
        {"type": "rsa_signature", "message": _i(msg), "signature": _i(sig.signature), "correction": _i(sig.correction)},
    )


@_parser
def parse_signature(doc: dict) -> tuple[int, CombinedSignature]:
    p = _expect(doc, "rsa_signature")
    return _int(_get(p, "message")), CombinedSignature(_int(_get(p, "signature")), _int(_get(p, "correction")))


def error_document(scheme: str | None, code: str, message: str) -> dict:
    return document(scheme, {"type": "error", "code": code, "message": message})
