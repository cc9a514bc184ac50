import pytest

from gl2census.arith import legendre
from gl2census.curves import CurveRecord, enumerate_curves, is_semistable_away_23
from gl2census.galois import (
    BAD,
    batch_traces,
    certified_fraction,
    certify_surjective,
    fingerprint,
    point_count,
    trace_count_oracle,
    verify_witnesses,
)


def naive_point_count(A, B, p):
    """Double loop over (x, y) in F_p^2, plus the point at infinity."""
    n = 1
    for x in range(p):
        rhs = (x**3 + A * x + B) % p
        for y in range(p):
            if (y * y - rhs) % p == 0:
                n += 1
    return n


def naive_a_p(A, B, p):
    return p + 1 - naive_point_count(A, B, p)


def test_point_count_examples():
    assert point_count(0, 1, 7, 5).a_p == -4
    assert naive_point_count(0, 1, 7) == 12
    assert point_count(0, 1, 5, 7).a_p == 0
    assert naive_point_count(0, 1, 5) == 6
    s = point_count(1, 0, 5, 7)
    assert abs(s.a_p) <= 4


def test_point_count_matches_naive_enumeration():
    for A, B in [(0, 1), (1, 1), (-2, 3), (4, -7), (1, 0)]:
        delta = -16 * (4 * A**3 + 27 * B**2)
        for p in (5, 7, 11, 13, 17):
            if delta % p == 0:
                continue
            assert point_count(A, B, p, 19).a_p == naive_a_p(A, B, p)


def test_point_count_rejections():
    with pytest.raises(ValueError):
        point_count(1, 1, 31, 5)  # 31 | delta(1,1) = -496
    with pytest.raises(ValueError):
        point_count(0, 1, 3, 5)
    with pytest.raises(ValueError):
        point_count(0, 1, 7, 7)


def test_fingerprint_examples():
    E = CurveRecord.from_pair(0, 1)
    fp = fingerprint(E, 5, 31)
    assert fp.window[:2] == (7, 11)
    assert fp.values[0] == (-4) % 5 == 1
    assert fp.values[1] == naive_a_p(0, 1, 11) % 5
    assert 5 not in fp.window
    bad_fp = fingerprint(CurveRecord.from_pair(1, 1), 5, 31)
    assert bad_fp.values[bad_fp.window.index(31)] == BAD


def test_fingerprint_prefix_property():
    for A, B in [(0, 1), (1, 1), (2, -3)]:
        E = CurveRecord.from_pair(A, B)
        small = fingerprint(E, 5, 60)
        big = fingerprint(E, 5, 120)
        assert big.window[: len(small.window)] == small.window
        assert big.values[: len(small.values)] == small.values


def test_fingerprint_rejects_bad_configuration():
    E = CurveRecord.from_pair(0, 1)
    with pytest.raises(ValueError):
        fingerprint(E, 3, 200)
    with pytest.raises(ValueError):
        fingerprint(E, 5, 20)


def test_certify_cm_curve_not_certified():
    # j = 0 curve has CM by Q(sqrt(-3)); one semisimple witness class never shows
    verdict = certify_surjective(CurveRecord.from_pair(0, 1), 5, 10**4)
    assert not verdict.certified
    assert verdict.reason == "CM-like trace pattern"


def test_certify_generic_curve():
    E = CurveRecord.from_pair(1, 1)
    verdict = certify_surjective(E, 5, 100)
    assert verdict.certified
    assert verdict.witnesses is not None
    assert all(p < 100 for p in verdict.witnesses)
    assert verify_witnesses(E, 5, verdict)


def test_certify_empty_probe_window():
    verdict = certify_surjective(CurveRecord.from_pair(1, 1), 5, 5)
    assert not verdict.certified
    assert verdict.reason == "witness missing after probe bound"


def test_certified_witnesses_reverify_over_family():
    for E in enumerate_curves(2):
        verdict = certify_surjective(E, 5, 1000)
        if verdict.certified:
            assert verify_witnesses(E, 5, verdict)
            p_split, p_nonsplit, _ = verdict.witnesses
            s = point_count(E.A, E.B, p_split, 5)
            assert legendre(s.t**2 - 4 * s.d, 5) == 1
            s = point_count(E.A, E.B, p_nonsplit, 5)
            assert legendre(s.t**2 - 4 * s.d, 5) == -1


def test_trace_count_oracle_values():
    assert trace_count_oracle(5, 0, 1) == 30
    assert trace_count_oracle(5, 2, 1) == 25
    assert trace_count_oracle(5, 1, 1) == 20
    for d in (1, 2, 3, 4):
        assert sum(trace_count_oracle(5, t, d) for t in range(5)) == 120
    with pytest.raises(ValueError):
        trace_count_oracle(17, 0, 1)
    with pytest.raises(ValueError):
        trace_count_oracle(5, 1, 0)


def test_batch_traces_agree_with_point_count():
    pairs = [(r.A, r.B) for r in enumerate_curves(2)]
    for p in (5, 7, 11, 13):
        traces = batch_traces(pairs, p)
        for (A, B), a in zip(pairs, traces):
            delta = -16 * (4 * A**3 + 27 * B**2)
            if delta % p == 0:
                assert a == 2 * p + 1
            else:
                assert a == point_count(A, B, p, 19 if p != 19 else 23).a_p


def test_batched_certification_matches_per_curve():
    pairs = [(r.A, r.B) for r in enumerate_curves(2)]
    frac = certified_fraction(pairs, 5, 1000)
    per_curve = sum(
        1 for A, B in pairs if certify_surjective(CurveRecord.from_pair(A, B), 5, 1000).certified
    )
    assert frac == per_curve / len(pairs)


def test_semistable_and_certified_families_nest():
    # S = D intersect E as sets of curves
    records = list(enumerate_curves(2))
    n_d = sum(1 for r in records if is_semistable_away_23(r))
    n_e = sum(1 for r in records if certify_surjective(r, 5, 1000).certified)
    n_s = sum(
        1
        for r in records
        if is_semistable_away_23(r) and certify_surjective(r, 5, 1000).certified
    )
    assert n_s <= min(n_d, n_e) <= max(n_d, n_e) <= len(records)
