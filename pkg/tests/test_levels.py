from fractions import Fraction

import pytest

from gl2census.curves import CurveRecord, enumerate_curves, is_semistable_away_23, local_data
from gl2census.galois import certify_surjective
from gl2census.levels import (
    ADDITIVE_SMALL_PRIME_EXPONENT,
    BoundOnly,
    ExponentLedger,
    blanket_disc_bound,
    default_c_ell_exponent,
    disc_bound,
    disc_cutoff_exponent,
    gl2_order,
    height_for_disc_cutoff,
    height_for_level_cutoff,
    m_exponent,
    serre_level,
)

DISC_CUTOFF_FOR_HEIGHT_2 = 2**2304 * 6**3264 * 5**960


def surjective_semistable(X, ell=5, probe=1000):
    for r in enumerate_curves(X):
        if is_semistable_away_23(r) and certify_surjective(r, ell, probe).certified:
            yield r


def test_gl2_order():
    assert gl2_order(5) == 480
    assert gl2_order(7) == 2016
    assert gl2_order(3) == 48
    assert default_c_ell_exponent(5) == 960


def test_ledger_arithmetic():
    led = ExponentLedger.from_int(496)
    assert led.factors == ((2, 4), (31, 1))
    assert led.value() == 496
    assert led.le(496) and not led.le(495)
    assert led.le(Fraction(993, 2))
    assert ExponentLedger.parse(led.serialize()) == led
    assert ExponentLedger.from_dict({}).serialize() == "1"
    assert ExponentLedger.parse("1").value() == 1
    big = ExponentLedger.from_dict({2: 3264, 5: 960, 31: 384})
    assert ExponentLedger.parse(big.serialize()) == big
    assert big.exponent(5) == 960 and big.exponent(7) == 0
    with pytest.raises(ValueError):
        ExponentLedger.from_int(0)


def test_m_exponent_examples():
    E = CurveRecord.from_pair(1, 1)
    assert m_exponent(E, 5, 31) == 480 * 4 // 5 == 384
    assert m_exponent(E, 5, 7) == 0
    assert m_exponent(E, 5, 2) == BoundOnly(3264)
    assert m_exponent(E, 5, 5) == BoundOnly(960)
    assert m_exponent(E, 5, 5, c_ell_exponent=7) == BoundOnly(7)
    with pytest.raises(ValueError):
        m_exponent(CurveRecord.from_pair(7, 7), 5, 7)  # additive at 7 >= 5


def test_m_exponent_unramified_branch():
    # hunt a curve with a multiplicative prime q >= 7 whose v_q(delta) is a
    # multiple of 5: the representation is unramified there, exponent 0
    found = None
    for E in enumerate_curves(6):
        if not is_semistable_away_23(E):
            continue
        for p, ld in ((p, local_data(E, p)) for p in __import__("gl2census.curves", fromlist=["bad_primes"]).bad_primes(E)):
            if p >= 7 and ld.vDelta % 5 == 0 and ld.reduction.value == "multiplicative":
                found = (E, p)
                break
        if found:
            break
    assert found is not None, "no test curve with 5 | v_q(delta) in range"
    E, p = found
    assert m_exponent(E, 5, p) == 0
    assert serre_level(E, 5).serre_level_upper.exponent(p) == 0


def test_m_exponent_multiple_of_ell_minus_one():
    for ell in (5, 7, 11):
        val = gl2_order(ell) * (ell - 1) // ell
        assert val * ell == gl2_order(ell) * (ell - 1)  # exact integer
        assert val % (ell - 1) == 0


def test_serre_level_examples():
    E = CurveRecord.from_pair(1, 1)
    lv = serre_level(E, 5)
    assert lv.serre_level_upper.exponent(31) == 1
    assert lv.serre_level_upper.exponent(5) == 0
    assert lv.serre_level_upper.value() == 496  # = 2^4 * 31, the curve conductor
    assert not lv.serre_level_exact_away_23  # 2 contributes
    with pytest.raises(ValueError):
        serre_level(CurveRecord.from_pair(5, 5), 5)


def test_serre_level_respects_carayol_bound():
    for E in surjective_semistable(2):
        lv = serre_level(E, 5)
        for p, e in lv.serre_level_upper.factors:
            assert e <= local_data(E, p).cond_exp_bound


def test_disc_bound_assembly():
    E = CurveRecord.from_pair(1, 1)
    led = disc_bound(E, 5, 960)
    assert led.factors == ((2, 3264), (5, 960), (31, 384))
    # delta(0,1) = -2^4 * 3^3: both small primes label-additive, nothing else
    led01 = disc_bound(CurveRecord.from_pair(0, 1), 5, 960)
    assert led01.factors == ((2, 3264), (3, 3264), (5, 960))
    # the ell exponent is always present, even for curves good at ell
    assert disc_bound(CurveRecord.from_pair(1, 1), 5, 1).exponent(5) == 1


def test_disc_bound_below_blanket_bound():
    for E in surjective_semistable(2):
        assert disc_bound(E, 5).value() <= blanket_disc_bound(E, 5).value()


def test_admission_instance_checks():
    # every certified semistable curve at height Y1(X) has level <= X
    for X in (496, 496 * 2**6):
        height = height_for_level_cutoff(X)
        assert abs(height - round(height)) < 1e-9
        for E in surjective_semistable(round(height)):
            assert serre_level(E, 5).serre_level_upper.le(X)
    # and at height Y2(X), disc bound <= X
    height = height_for_disc_cutoff(DISC_CUTOFF_FOR_HEIGHT_2, 5, 960)
    assert abs(height - 2) < 1e-9
    for E in surjective_semistable(2):
        assert disc_bound(E, 5, 960).le(DISC_CUTOFF_FOR_HEIGHT_2)


def test_cutoff_heights():
    assert abs(height_for_level_cutoff(496) - 1) < 1e-12
    assert abs(height_for_level_cutoff(496 * 2**6) - 2) < 1e-12
    assert abs(height_for_level_cutoff(496 * 10**6) - 10) < 1e-9
    assert disc_cutoff_exponent(5) == Fraction(5, 11520) == Fraction(1, 2304)
    assert abs(height_for_disc_cutoff(6**3264 * 5**960, 5, 960) - 1) < 1e-9
    grid = [496, 10**4, 10**8, 10**12]
    ys = [height_for_level_cutoff(x) for x in grid]
    assert ys == sorted(ys) and len(set(ys)) == len(ys)
    y2s = [height_for_disc_cutoff(6**3264 * 5**960 * 2**k, 5, 960) for k in (0, 2304, 4608)]
    assert y2s == sorted(y2s) and len(set(y2s)) == len(y2s)
    with pytest.raises(ValueError):
        height_for_level_cutoff(0)


def test_additive_small_prime_constant():
    assert ADDITIVE_SMALL_PRIME_EXPONENT == (3**2 - 1) * (3**2 - 3) * 68 == 3264
