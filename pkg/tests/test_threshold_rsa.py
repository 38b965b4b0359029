import dataclasses
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crtshare import documents as docs
from crtshare import threshold_rsa as trsa
from crtshare.access import LevelStructure, authorized_disjunctive
from crtshare.errors import (
    AccessDenied,
    BadExponent,
    CombinationFailure,
    DeltaMissing,
    MessageNotUnit,
    NotMember,
)
from crtshare.threshold_rsa import (
    build_context,
    combine,
    generate_safe_prime,
    partial_exponent,
    partial_sign,
    public_exponent,
    public_part,
    rsa_setup,
    verify,
)

from support import coalitions

L = LevelStructure((2, 3), (2, 3))


def sign(setup, coalition, msg, level=None):
    ctx = setup.public.context(coalition, level)
    partials = [partial_sign(msg, setup.share(k), ctx, setup.key) for k in ctx.members]
    public = [public_part(msg, k, setup.deltas, ctx, setup.key) for k in ctx.members]
    return ctx, combine(partials, public, msg, setup.key, ctx)


@pytest.fixture(scope="module")
def desk():
    """N = 11 * 23 = 253, e = 3, d = 147."""
    setup = rsa_setup(0, 3, L, random.Random(1), safe_primes=(5, 11))
    return setup


def test_desk_key_parameters(desk):
    assert desk.key.n == 253 and desk.key.e == 3
    phi = 4 * 5 * 11
    d = next(x for x in range(1, phi) if 3 * x % phi == 1)  # exhaustive oracle
    assert d == 147
    assert all(p > 2 * phi**2 for p in desk.moduli)
    assert all(math.gcd(p, phi) == 1 for p in desk.moduli)


def test_bad_exponent():
    with pytest.raises(BadExponent):
        rsa_setup(0, 4, L, random.Random(0), safe_primes=(5, 11))
    with pytest.raises(BadExponent):
        rsa_setup(0, 5, L, random.Random(0), safe_primes=(5, 11))  # 5 divides phi = 220
    with pytest.raises(ValueError):
        rsa_setup(8, 3, L, random.Random(0))


def test_every_authorized_coalition_signs(desk):
    units = [m for m in range(2, 253) if math.gcd(m, 253) == 1]
    for A in coalitions(L.n):
        level = authorized_disjunctive(A, L)
        if level is None:
            with pytest.raises(AccessDenied):
                desk.public.context(A)
            continue
        for msg in units[:: 17]:
            ctx, sig = sign(desk, A, msg)
            assert sig.signature == pow(msg, 147, 253)
            assert verify(msg, sig.signature, 3, 253)
            assert 0 <= sig.correction < 2 * L.threshold(level)


def test_unit_message_signs_to_one(desk):
    ctx = desk.public.context({1, 2})
    assert partial_sign(1, desk.share(1), ctx, desk.key).value == 1


def test_home_level_public_part_is_trivial(desk):
    ctx = desk.public.context({1, 4, 5})
    assert ctx.level == 2
    assert public_part(7, 4, desk.deltas, ctx, desk.key).value == 1
    with pytest.raises(DeltaMissing):
        public_part(7, 1, (), ctx, desk.key)


def test_membership_and_message_checks(desk):
    ctx = desk.public.context({1, 2})
    with pytest.raises(NotMember):
        partial_sign(2, desk.share(3), ctx, desk.key)
    with pytest.raises(MessageNotUnit):
        partial_sign(11, desk.share(1), ctx, desk.key)


def test_forced_level_needs_enough_members(desk):
    with pytest.raises(AccessDenied):
        build_context({1, 4}, L, desk.moduli, level=2)
    ctx = build_context({1, 2, 3}, L, desk.moduli, level=2)
    assert ctx.members == (1, 2, 3)


def test_tampered_partial_is_caught(desk):
    msg = 42
    ctx = desk.public.context({1, 2})
    partials = [partial_sign(msg, desk.share(k), ctx, desk.key) for k in ctx.members]
    public = [public_part(msg, k, desk.deltas, ctx, desk.key) for k in ctx.members]
    bad = [dataclasses.replace(partials[0], value=partials[0].value * 2 % 253)] + partials[1:]
    with pytest.raises(CombinationFailure):
        combine(bad, public, msg, desk.key, ctx)
    with pytest.raises(CombinationFailure):
        combine(partials[:1], public, msg, desk.key, ctx)
    other = desk.public.context({1, 2, 3}, level=2)
    with pytest.raises(CombinationFailure):
        combine(partials, public, msg, desk.key, other)


def test_verify_basics(desk):
    assert verify(1, 1, 3, 253)
    sig = pow(5, 147, 253)
    assert verify(5, sig, 3, 253)
    assert not verify(5, sig ^ 1, 3, 253)


def test_exponent_bookkeeping(monkeypatch):
    captured = {}
    real_deal = trsa.deal

    def spy(*args, **kwargs):
        captured["transcript"] = real_deal(*args, **kwargs)
        return captured["transcript"]

    monkeypatch.setattr(trsa, "deal", spy)
    setup = rsa_setup(96, 65537, L, random.Random(5))
    ys = [b.y for b in captured["transcript"].blinded]
    for A in ({1, 2}, {1, 4, 5}, {2, 3, 5}, {3, 4, 5}):
        ctx = setup.public.context(A)
        total = sum(partial_exponent(setup.share(k), ctx) + public_exponent(k, setup.deltas, ctx) for k in ctx.members)
        y = ys[ctx.level - 1]
        assert total % ctx.modulus == y
        assert (total - y) // ctx.modulus < 2 * len(ctx.members)


def _leaves(node):
    if isinstance(node, dict):
        for v in node.values():
            yield from _leaves(v)
    elif isinstance(node, list):
        for v in node:
            yield from _leaves(v)
    else:
        yield node


def test_no_document_reveals_key_material(monkeypatch):
    captured = {}
    real_deal = trsa.deal
    real_safe = trsa.generate_safe_prime
    primes = []

    def spy(*args, **kwargs):
        captured["transcript"] = real_deal(*args, **kwargs)
        return captured["transcript"]

    def spy_safe(*args, **kwargs):
        primes.append(real_safe(*args, **kwargs))
        return primes[-1]

    monkeypatch.setattr(trsa, "deal", spy)
    monkeypatch.setattr(trsa, "generate_safe_prime", spy_safe)
    setup = rsa_setup(128, 65537, L, random.Random(9))
    p1, q1 = primes[-2:]
    phi = 4 * p1 * q1
    d = pow(65537, -1, phi)
    tr = captured["transcript"]
    forbidden = {d, phi, p1, q1, 2 * p1 + 1, 2 * q1 + 1}
    forbidden |= {b.y for b in tr.blinded} | {b.alpha for b in tr.blinded}
    forbidden = {str(x) for x in forbidden}

    msg = 123456789
    ctx, sig = sign(setup, {1, 4, 5}, msg)
    produced = [docs.rsa_public_document(setup.public), docs.context_document(ctx),
                docs.signature_document(msg, sig)]
    produced += [docs.share_document("rsa_mtss", s) for s in setup.shares]
    produced.append(docs.partials_document(
        [partial_sign(msg, setup.share(k), ctx, setup.key) for k in ctx.members], "signer"))
    produced.append(docs.partials_document(
        [public_part(msg, k, setup.deltas, ctx, setup.key) for k in ctx.members], "server"))
    for doc in produced:
        text = docs.dumps(doc)
        assert not forbidden & {str(v) for v in _leaves(doc)}
        for secret in forbidden:
            assert secret not in text
    assert sig.signature == pow(msg, d, setup.key.n)


def test_safe_prime_generation():
    rng = random.Random(3)
    for bits in (5, 8, 16, 40):
        q = generate_safe_prime(bits, rng)
        assert (2 * q + 1).bit_length() == bits
        assert all(x % f for x in (q, 2 * q + 1) for f in range(2, math.isqrt(2 * q + 1) + 1) if f < x)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([32, 64, 128, 256]), st.integers(0, 10**6), st.data())
def test_round_trip_random_keys(bits, seed, data):
    rng = random.Random(seed)
    half = bits // 2
    p1 = generate_safe_prime(half, rng)
    q1 = generate_safe_prime(bits - half, rng)
    if p1 == q1:
        return
    e = 65537
    phi = 4 * p1 * q1
    if math.gcd(e, phi) != 1:
        return
    d = pow(e, -1, phi)
    setup = rsa_setup(bits, e, L, rng, safe_primes=(p1, q1))
    A = data.draw(st.sampled_from([A for A in coalitions(L.n) if authorized_disjunctive(A, L)]))
    msg = data.draw(st.integers(2, setup.key.n - 1))
    if math.gcd(msg, setup.key.n) != 1:
        return
    ctx, sig = sign(setup, A, msg)
    assert sig.signature == pow(msg, d, setup.key.n)
    assert sig.correction < 2 * len(ctx.members)
