"""``crtshare`` command line.

Exit codes: 0 success, 1 domain error (the error is printed as a document
with a ``code`` field), 2 malformed input.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path
from typing import Sequence

from . import documents as docs
from .access import LevelStructure
from .classic import ab_reconstruct, ab_share, mignotte_reconstruct, mignotte_sequence, mignotte_share
from .conjunctive import deal_conjunctive, reconstruct_conjunctive
from .disjunctive import deal, reconstruct
from .errors import CrtShareError, MalformedDocument
from .harn_fuyou import (
    attack_transcript,
    hf_deal_fixed,
    hf_deal_original,
    render_table,
    run_example2,
    HfTranscript,
)
from .numtheory import (
    PrimeSequence,
    SequenceKind,
    check_condition,
    generate_anchor_sequence,
    generate_hf_sequence,
)
from .threshold_rsa import combine, partial_sign, public_part, rsa_setup, verify


class _Failed(Exception):
    def __init__(self, code: int, doc: dict):
        self.code = code
        self.doc = doc


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _read(path: str) -> dict:
    try:
        return docs.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise MalformedDocument(f"cannot read {path}: {exc.strerror}") from None


def _emit(doc: dict, out: str | None) -> None:
    text = docs.dumps(doc)
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _write_bundle(out_dir: str, public: dict, shares: Sequence[tuple[int, dict]]) -> None:
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    (root / "public.json").write_text(docs.dumps(public), encoding="utf-8")
    for k, doc in shares:
        (root / f"share-{k}.json").write_text(docs.dumps(doc), encoding="utf-8")
    manifest = {"type": "bundle", "public": "public.json", "shares": [f"share-{k}.json" for k, _ in shares]}
    sys.stdout.write(docs.dumps(docs.document(public["scheme"], manifest)))


def _structure(args) -> LevelStructure:
    return LevelStructure(args.level_sizes, args.thresholds)


# -- commands ------------------------------------------------------------------

def cmd_seq_gen(args) -> int:
    rng = random.Random(args.seed)
    if args.kind == "anchor":
        seq = generate_anchor_sequence(args.p0, args.n, rng)
    else:
        if args.t is None:
            raise MalformedDocument("--t is required for hf sequences")
        seq = generate_hf_sequence(args.p0, args.n, args.t, rng)
    _emit(docs.sequence_document(seq), args.out)
    return 0


def cmd_seq_check(args) -> int:
    if args.input:
        payload = _read(args.input)["payload"]
        if payload.get("type") == "classic_public":
            payload = payload["sequence"]
        seq = docs.parse_sequence(payload)
    elif args.primes:
        seq = PrimeSequence(args.p0 or 1, args.primes)
    else:
        raise MalformedDocument("give --in or --primes")
    kind = SequenceKind(args.kind)
    ok = check_condition(seq, args.t, kind)
    t = args.t if kind is not SequenceKind.ANCHOR else max(1, seq.n // 2)
    left = seq.top_product(t - 1) * (1 if kind is SequenceKind.MIGNOTTE else seq.p0 ** (1 if kind is SequenceKind.CLASSIC else 2))
    result = {
        "type": "check_result",
        "kind": kind.value,
        "threshold": str(t),
        "left": str(left),
        "right": str(seq.bound(t)),
        "pass": ok,
    }
    scheme = "mignotte" if kind is SequenceKind.MIGNOTTE else "asmuth_bloom"
    _emit(docs.document(scheme, result), args.out)
    return 0 if ok else 1


def cmd_deal(args) -> int:
    rng = random.Random(args.seed)
    scheme = args.scheme
    if scheme in ("mignotte", "asmuth_bloom"):
        if len(args.level_sizes) != 1 or len(args.thresholds) != 1:
            raise MalformedDocument(f"{scheme} takes a single --level-sizes n and --thresholds t")
        n, t = args.level_sizes[0], args.thresholds[0]
        if args.sequence:
            seq = docs.parse_sequence(_read(args.sequence)["payload"])
        elif scheme == "mignotte":
            seq = mignotte_sequence(args.secret, n, t)
        else:
            seq = generate_anchor_sequence(args.p0, n, rng)
        if scheme == "mignotte":
            shares = mignotte_share(args.secret, seq, t)
        else:
            shares, _ = ab_share(args.secret, seq, t, rng)
        public = docs.classic_public_document(docs.ClassicPublic(scheme, seq, t))
    else:
        structure = _structure(args)
        if args.sequence:
            seq = docs.parse_sequence(_read(args.sequence)["payload"])
        else:
            seq = generate_anchor_sequence(args.p0, structure.n, rng)
        dealer = deal if scheme == "mtss_disjunctive" else deal_conjunctive
        transcript = dealer(args.secret, structure, seq, rng)
        shares = transcript.shares
        public = docs.mtss_public_document(transcript)
    _write_bundle(args.out, public, [(sh.participant, docs.share_document(scheme, sh)) for sh in shares])
    return 0


def cmd_reconstruct(args) -> int:
    public_doc = _read(args.input)
    scheme = args.scheme = public_doc["scheme"]
    shares = [docs.parse_share(_read(path)) for path in args.shares]
    if scheme in ("mignotte", "asmuth_bloom"):
        public = docs.parse_classic_public(public_doc)
        solve = mignotte_reconstruct if scheme == "mignotte" else ab_reconstruct
        secret = solve(shares, public.sequence, public.threshold)
    elif scheme in ("mtss_disjunctive", "mtss_conjunctive"):
        public = docs.parse_mtss_public(public_doc)
        solve = reconstruct if scheme == "mtss_disjunctive" else reconstruct_conjunctive
        secret = solve(shares, public.deltas, public.structure, public.sequence)
    else:
        raise MalformedDocument(f"reconstruct does not handle scheme {scheme!r}")
    _emit(docs.document(scheme, {"type": "secret", "secret": str(secret)}), args.out)
    return 0


def cmd_hf_deal(args) -> int:
    rng = random.Random(args.seed)
    args.scheme = f"harn_fuyou_{args.variant}"
    structure = _structure(args)
    if args.variant == "original":
        transcript = hf_deal_original(args.secret, args.p0, structure, rng)
    else:
        transcript = hf_deal_fixed(args.secret, structure, rng, p0=args.p0)
    shares = [(sh.participant, docs.share_document(transcript.scheme, sh)) for sh in transcript.shares]
    _write_bundle(args.out, docs.hf_public_document(transcript), shares)
    return 0


def cmd_hf_attack(args) -> int:
    public_doc = _read(args.input)
    args.scheme = public_doc["scheme"]
    params, public = docs.parse_hf_public(public_doc)
    shares = [docs.parse_share(_read(path)) for path in args.shares]
    # Only corrupted shares are known; the rest of the share table is never consulted.
    known = {sh.participant: sh for sh in shares}
    placeholder = HfTranscript(params, tuple(known.get(k) for k in range(1, params.structure.n + 1)), public, ())
    report = attack_transcript(placeholder, sorted(known), args.level)
    if args.text:
        sys.stdout.write(render_table(report) + "\n")
    else:
        _emit(docs.attack_report_document(report, public_doc["scheme"]), args.out)
    return 0


def cmd_rsa_setup(args) -> int:
    rng = random.Random(args.seed)
    setup = rsa_setup(args.bits, args.e, _structure(args), rng, safe_primes=args.safe_primes)
    shares = [(sh.participant, docs.share_document("rsa_mtss", sh)) for sh in setup.shares]
    _write_bundle(args.out, docs.rsa_public_document(setup.public), shares)
    return 0


def _rsa_context(args):
    public = docs.parse_rsa_public(_read(args.key))
    return public, public.context(args.coalition, args.level)


def cmd_rsa_sign_partial(args) -> int:
    public, ctx = _rsa_context(args)
    parts = [partial_sign(args.msg, docs.parse_share(_read(path)), ctx, public.key) for path in args.share]
    _emit(docs.partials_document(parts, "signer"), args.out)
    return 0


def cmd_rsa_public_part(args) -> int:
    public, ctx = _rsa_context(args)
    parts = [public_part(args.msg, k, public.deltas, ctx, public.key) for k in ctx.members]
    _emit(docs.partials_document(parts, "server"), args.out)
    return 0


def cmd_rsa_combine(args) -> int:
    public, ctx = _rsa_context(args)
    partials = []
    for path in args.partials:
        role, parts = docs.parse_partials(_read(path))
        if role != "signer":
            raise MalformedDocument(f"{path} does not hold signer partials")
        partials.extend(parts)
    role, server = docs.parse_partials(_read(args.public_parts))
    if role != "server":
        raise MalformedDocument(f"{args.public_parts} does not hold server public parts")
    sig = combine(partials, server, args.msg, public.key, ctx)
    _emit(docs.signature_document(args.msg, sig), args.out)
    return 0


def cmd_rsa_verify(args) -> int:
    public = docs.parse_rsa_public(_read(args.key))
    msg, sig = docs.parse_signature(_read(args.signature))
    if args.msg is not None:
        msg = args.msg
    ok = verify(msg, sig.signature, public.key.e, public.key.n)
    _emit(docs.document("rsa_mtss", {"type": "verification", "message": str(msg), "valid": ok}), args.out)
    return 0 if ok else 1


def cmd_demo_example2(args) -> int:
    transcript, report = run_example2()
    if args.json:
        _emit(docs.attack_report_document(report, transcript.scheme), args.out)
        return 0
    shares = transcript.shares
    lines = [
        f"p0={transcript.params.p0} secret=1 levels n=(4,2) t=(2,3)",
        f"y_1={transcript.blinded[0]} y_2={transcript.blinded[1]}",
        "level-1 shares: " + ", ".join(str(sh.value) for sh in shares if sh.level == 1),
        "level-2 shares: " + ", ".join(str(sh.value) for sh in shares if sh.level == 2),
        "public deltas: " + ", ".join(f"{d.value} (mod {d.modulus})" for d in transcript.public),
        "",
        render_table(report),
    ]
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crtshare", description="CRT-based multilevel threshold secret sharing")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        return p

    def levels(p):
        p.add_argument("--level-sizes", type=_ints, required=True, help="e.g. 4,2")
        p.add_argument("--thresholds", type=_ints, required=True, help="e.g. 2,3")

    p = add("seq-gen", cmd_seq_gen, "generate an anchor or Harn-Fuyou prime sequence")
    p.add_argument("--kind", choices=["anchor", "hf"], default="anchor")
    p.add_argument("--p0", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=int)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")

    p = add("seq-check", cmd_seq_check, "check a sequence against an inequality")
    p.add_argument("--in", dest="input")
    p.add_argument("--p0", type=int)
    p.add_argument("--primes", type=_ints)
    p.add_argument("--t", type=int)
    p.add_argument("--kind", choices=[k.value for k in SequenceKind], required=True)
    p.add_argument("--out")

    p = add("deal", cmd_deal, "share a secret")
    p.add_argument("--scheme", choices=["mignotte", "asmuth_bloom", "mtss_disjunctive", "mtss_conjunctive"], required=True)
    p.add_argument("--p0", type=int)
    p.add_argument("--secret", type=int, required=True)
    levels(p)
    p.add_argument("--sequence", help="prime sequence document to use instead of generating one")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output directory")

    p = add("reconstruct", cmd_reconstruct, "recover a secret from shares")
    p.add_argument("--in", dest="input", required=True, help="public document")
    p.add_argument("--shares", nargs="+", required=True)
    p.add_argument("--out")

    p = add("hf-deal", cmd_hf_deal, "deal with the Harn-Fuyou scheme")
    p.add_argument("--variant", choices=["original", "fixed"], default="fixed")
    p.add_argument("--p0", type=int, required=True)
    p.add_argument("--secret", type=int, required=True)
    levels(p)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = add("hf-attack", cmd_hf_attack, "run the public-information attack")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--shares", nargs="+", required=True, help="corrupted participants' share documents")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--text", action="store_true", help="print the candidate table instead of JSON")
    p.add_argument("--out")

    p = add("rsa-setup", cmd_rsa_setup, "create a shared RSA key")
    p.add_argument("--bits", type=int, default=128)
    p.add_argument("--e", type=int, default=65537)
    levels(p)
    p.add_argument("--safe-primes", type=int, nargs=2, metavar=("P1", "Q1"))
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    for name, func, help_text in (
        ("rsa-sign-partial", cmd_rsa_sign_partial, "partial signatures from members"),
        ("rsa-public-part", cmd_rsa_public_part, "server-side public parts"),
        ("rsa-combine", cmd_rsa_combine, "combine into a full signature"),
    ):
        p = add(name, func, help_text)
        p.add_argument("--key", required=True)
        p.add_argument("--coalition", type=_ints, required=True)
        p.add_argument("--level", type=int)
        p.add_argument("--msg", type=int, required=True)
        p.add_argument("--out")
        if name == "rsa-sign-partial":
            p.add_argument("--share", nargs="+", required=True)
        if name == "rsa-combine":
            p.add_argument("--partials", nargs="+", required=True)
            p.add_argument("--public-parts", required=True)

    p = add("rsa-verify", cmd_rsa_verify, "verify a signature")
    p.add_argument("--key", required=True)
    p.add_argument("--signature", required=True)
    p.add_argument("--msg", type=int)
    p.add_argument("--out")

    p = add("demo-example2", cmd_demo_example2, "replay the Harn-Fuyou attack example")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MalformedDocument as exc:
        sys.stdout.write(docs.dumps(docs.error_document(None, exc.code, str(exc))))
        return 2
    except CrtShareError as exc:
        scheme = getattr(args, "scheme", None)
        if scheme is None and args.command.startswith("rsa-"):
            scheme = "rsa_mtss"
        sys.stdout.write(docs.dumps(docs.error_document(scheme, exc.code, str(exc))))
        return 1
    except ValueError as exc:
        sys.stdout.write(docs.dumps(docs.error_document(None, "InvalidInput", str(exc))))
        return 2


if __name__ == "__main__":
    sys.exit(main())
