"""Exit criteria. Each test prints one PASS/FAIL line, also collected in the terminal summary."""

import contextlib
import json
import math
import random
import time

import pytest

from crtshare import documents as docs
from crtshare.access import (
    LevelStructure,
    authorized_conjunctive,
    authorized_disjunctive,
    deficient_levels,
)
from crtshare.cli import main
from crtshare.conjunctive import deal_conjunctive, reconstruct_conjunctive
from crtshare.disjunctive import deal, reconstruct
from crtshare.errors import AccessDenied, BadThreshold, GapInfeasible
from crtshare.harn_fuyou import EXAMPLE2_STRUCTURE, attack_transcript, hf_deal_fixed, hf_deal_original
from crtshare.numtheory import generate_anchor_sequence
from crtshare.threshold_rsa import combine, generate_safe_prime, partial_sign, public_part, rsa_setup, verify

from conftest import record_verdict
from support import all_structures, coalitions, level_counts

pytestmark = pytest.mark.acceptance

# Frozen candidate table: implied residues at moduli 71, 67, 61, 37 for each candidate 266 + 899K, K = 5..36
CANDIDATE_TABLE = {
    4761: (4, 4, 3, 25), 5660: (51, 32, 48, 36), 6559: (27, 60, 32, 10), 7458: (3, 21, 16, 21),
    8357: (50, 49, 0, 32), 9256: (26, 10, 45, 6), 10155: (2, 38, 29, 17), 11054: (49, 66, 13, 28),
    11953: (25, 27, 58, 2), 12852: (1, 55, 42, 13), 13751: (48, 16, 26, 24), 14650: (24, 44, 10, 35),
    15549: (0, 5, 55, 9), 16448: (47, 33, 39, 20), 17347: (23, 61, 23, 31), 18246: (70, 22, 7, 5),
    19145: (46, 50, 52, 16), 20044: (22, 11, 36, 27), 20943: (69, 39, 20, 1), 21842: (45, 0, 4, 12),
    22741: (21, 28, 49, 23), 23640: (68, 56, 33, 34), 24539: (44, 17, 17, 8), 25438: (20, 45, 1, 19),
    26337: (67, 6, 46, 30), 27236: (43, 34, 30, 4), 28135: (19, 62, 14, 15), 29034: (66, 23, 59, 26),
    29933: (42, 51, 43, 0), 30832: (18, 12, 27, 11), 31731: (65, 40, 11, 22), 32630: (41, 1, 56, 33),
}


@contextlib.contextmanager
def criterion(number, title):
    start = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        line = f"FAIL criterion {number}: {title} ({type(exc).__name__}: {exc})"
        print(line)
        record_verdict(line)
        raise
    line = f"PASS criterion {number}: {title} [{time.perf_counter() - start:.2f} s]"
    print(line)
    record_verdict(line)


def statistical_holds(p0, primes, t):
    """p0^2 times the t-1 largest moduli stays below the t smallest."""
    low = math.prod(primes[:t])
    high = math.prod(primes[len(primes) - t + 1 :]) if t > 1 else 1
    return p0 * p0 * high < low


def test_worked_attack_example_exactness(capsys):
    with criterion(1, "worked attack example regenerated exactly by demo-example2"):
        start = time.perf_counter()
        assert main(["demo-example2", "--json"]) == 0
        elapsed = time.perf_counter() - start
        report = docs.parse_attack_report(docs.loads(capsys.readouterr().out))
        assert main(["demo-example2"]) == 0
        text = capsys.readouterr().out

        assert "y_1=26 y_2=4761" in text
        assert "level-1 shares: 4, 0, 9, 3" in text and "level-2 shares: 5, 18" in text
        assert [c.delta for c in report.constraints] == [0, 4, 55, 22]
        assert (report.base, report.step, report.multipliers) == (266, 899, (5, 36))
        assert [c.value for c in report.candidates] == [266 + 899 * K for K in range(5, 37)]
        assert {c.value: tuple(c.residues) for c in report.candidates} == CANDIDATE_TABLE
        windows = [c.intervals() for c in report.constraints]
        assert windows == [[(0, 10)], [(4, 16)], [(55, 60), (0, 10)], [(22, 36), (0, 7)]]
        for c in report.candidates:
            flags = tuple(any(lo <= r <= hi for lo, hi in w) for r, w in zip(c.residues, windows))
            assert tuple(c.in_range) == flags
            assert (c.value in report.survivors) == all(flags)
        assert report.survivors == (4761,) and report.secrets == (1,)
        assert elapsed < 1.0, f"{elapsed:.2f} s"


def test_original_scheme_infeasible_settings():
    with criterion(2, "small settings infeasible for the original scheme, disjunctive scheme round-trips"):
        settings = [LevelStructure((2, 3), (2, 3)), LevelStructure((3, 3), (2, 4))]
        with pytest.raises(GapInfeasible):
            hf_deal_original(1, 5, settings[0], random.Random(0))
        with pytest.raises(BadThreshold):
            hf_deal_original(1, 5, settings[1], random.Random(0))
        for L in settings:
            seq = generate_anchor_sequence(5, L.n, random.Random(L.n))
            for s in range(5):
                tr = deal(s, L, seq, random.Random(s))
                for A in coalitions(L.n):
                    if authorized_disjunctive(A, L) is None:
                        with pytest.raises(AccessDenied):
                            reconstruct(tr.shares_for(A), tr.deltas, L, seq)
                    else:
                        assert reconstruct(tr.shares_for(A), tr.deltas, L, seq) == s


def test_anchor_sweep():
    with criterion(3, "500 seeded anchor sequences satisfy the statistical condition for every t"):
        rng = random.Random(20240601)
        start = time.perf_counter()
        failures = []
        for _ in range(500):
            p0 = rng.randrange(2, 1 << 32)
            n = rng.randrange(1, 13)
            seq = generate_anchor_sequence(p0, n, random.Random(rng.randrange(1 << 30)))
            assert len(seq.primes) == n and list(seq.primes) == sorted(set(seq.primes))
            failures += [(p0, n, t) for t in range(1, n + 1) if not statistical_holds(p0, seq.primes, t)]
        elapsed = time.perf_counter() - start
        assert not failures, failures[:5]
        assert elapsed < 30, f"{elapsed:.1f} s"


def test_access_structure_equivalence():
    with criterion(4, "reconstruction succeeds exactly on authorized coalitions, deficient views stay flat"):
        start = time.perf_counter()
        structures = list(all_structures(7, 3))
        checked = 0
        for idx, L in enumerate(structures):
            for p0 in (5, 7):
                seq = generate_anchor_sequence(p0, L.n, random.Random(idx))
                s = (idx + p0) % p0
                disj = deal(s, L, seq, random.Random(3 * idx + p0))
                conj = deal_conjunctive(s, L, seq, random.Random(5 * idx + p0))
                for A in coalitions(L.n):
                    if authorized_disjunctive(A, L) is None:
                        with pytest.raises(AccessDenied):
                            reconstruct(disj.shares_for(A), disj.deltas, L, seq)
                        for i in range(1, L.m + 1):
                            counts = level_counts(disj, A, i)
                            assert max(counts) - min(counts) <= 1, (L, A, i, counts)
                    else:
                        assert reconstruct(disj.shares_for(A), disj.deltas, L, seq) == s
                    if authorized_conjunctive(A, L):
                        assert reconstruct_conjunctive(conj.shares_for(A), conj.deltas, L, seq) == s
                    else:
                        with pytest.raises(AccessDenied):
                            reconstruct_conjunctive(conj.shares_for(A), conj.deltas, L, seq)
                        for i in deficient_levels(A, L):
                            counts = level_counts(conj, A, i)
                            assert max(counts) - min(counts) <= 1, (L, A, i, counts)
                    checked += 1
        elapsed = time.perf_counter() - start
        print(f"{len(structures)} structures, {checked} coalition checks per scheme")
        assert elapsed < 300, f"{elapsed:.1f} s"


def test_attack_soundness():
    with criterion(5, "true y survives the interval filter on 100/100 fixed-variant transcripts"):
        shapes = [EXAMPLE2_STRUCTURE, LevelStructure((2, 3), (2, 3)), LevelStructure((2, 2, 3), (1, 3, 4))]
        survived = 0
        for seed in range(100):
            rng = random.Random(seed)
            L = shapes[seed % len(shapes)]
            p0 = rng.choice([5, 7, 11, 13])
            tr = hf_deal_fixed(rng.randrange(p0), L, rng, p0=p0)
            j = L.m
            level_members = list(L.members(j))
            corrupted = rng.sample(level_members, min(len(level_members), L.threshold(j) - 1))
            report = attack_transcript(tr, corrupted, j)
            survived += tr.blinded[j - 1] in report.survivors
        assert survived == 100, f"{survived}/100"


def _rsa_keys():
    rng = random.Random(512)
    keys = [(5, 11, 3)]
    for bits in (32, 64, 128, 256, 512):
        while True:
            p1 = generate_safe_prime(bits // 2, rng)
            q1 = generate_safe_prime(bits - bits // 2, rng)
            if p1 != q1 and math.gcd(65537, 4 * p1 * q1) == 1:
                keys.append((p1, q1, 65537))
                break
    return keys


def test_threshold_rsa_round_trip():
    with criterion(6, "threshold RSA signatures equal msg^d mod N for every authorized coalition"):
        start = time.perf_counter()
        structures = [LevelStructure((2, 3), (2, 3)), LevelStructure((1, 2, 2), (1, 2, 4))]
        rng = random.Random(6)
        fixture_seen = False
        for p1, q1, e in _rsa_keys():
            n, phi = (2 * p1 + 1) * (2 * q1 + 1), 4 * p1 * q1
            d = pow(e, -1, phi)
            if n == 253:
                assert (e, d) == (3, 147)
                fixture_seen = True
            for L in structures:
                setup = rsa_setup(n.bit_length(), e, L, rng, safe_primes=(p1, q1))
                assert setup.key.n == n
                for A in coalitions(L.n):
                    level = authorized_disjunctive(A, L)
                    if level is None:
                        continue
                    msg = rng.randrange(2, n)
                    while math.gcd(msg, n) != 1:
                        msg = rng.randrange(2, n)
                    ctx = setup.public.context(A)
                    parts = [partial_sign(msg, setup.share(k), ctx, setup.key) for k in ctx.members]
                    server = [public_part(msg, k, setup.deltas, ctx, setup.key) for k in ctx.members]
                    sig = combine(parts, server, msg, setup.key, ctx)
                    assert sig.signature == pow(msg, d, n)
                    assert verify(msg, sig.signature, e, n)
                    assert 0 <= sig.correction < 2 * L.threshold(ctx.level)
        elapsed = time.perf_counter() - start
        assert fixture_seen
        assert elapsed < 60, f"{elapsed:.1f} s"


def test_statistical_vs_classic_witness(capsys):
    with criterion(7, "worked example level-1 sequence passes the classic check and fails the statistical one"):
        base = ["seq-check", "--p0", "5", "--primes", "11,13,17,23", "--t", "2", "--kind"]
        assert main(base + ["classic"]) == 0
        classic = json.loads(capsys.readouterr().out)["payload"]
        assert (classic["pass"], classic["left"], classic["right"]) == (True, "115", "143")
        assert main(base + ["statistical"]) == 1
        stat = json.loads(capsys.readouterr().out)["payload"]
        assert stat["pass"] is False
        assert not statistical_holds(5, (11, 13, 17, 23), 2)
