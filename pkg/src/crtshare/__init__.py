"""Chinese-remainder-theorem secret sharing: classic, multilevel, audit and threshold RSA."""

from .access import LevelStructure, authorized_conjunctive, authorized_disjunctive
from .classic import ab_reconstruct, ab_share, mignotte_reconstruct, mignotte_share
from .conjunctive import deal_conjunctive, reconstruct_conjunctive
from .disjunctive import deal, reconstruct
from .errors import CrtShareError
from .harn_fuyou import attack, attack_transcript, hf_deal_fixed, hf_deal_original, hf_reconstruct
from .numtheory import (
    PrimeSequence,
    SequenceKind,
    check_condition,
    crt_solve,
    generate_anchor_sequence,
    is_probable_prime,
)
from .threshold_rsa import combine, partial_sign, public_part, rsa_setup, verify

__all__ = [
    "CrtShareError",
    "LevelStructure",
    "PrimeSequence",
    "SequenceKind",
    "ab_reconstruct",
    "ab_share",
    "attack",
    "attack_transcript",
    "authorized_conjunctive",
    "authorized_disjunctive",
    "check_condition",
    "combine",
    "crt_solve",
    "deal",
    "deal_conjunctive",
    "generate_anchor_sequence",
    "hf_deal_fixed",
    "hf_deal_original",
    "hf_reconstruct",
    "is_probable_prime",
    "mignotte_reconstruct",
    "mignotte_share",
    "partial_sign",
    "public_part",
    "reconstruct",
    "reconstruct_conjunctive",
    "rsa_setup",
    "verify",
]
