"""Serre levels, division-field discriminant exponents, and admission cutoffs.

Levels and discriminant bounds are carried as exact factored integers
(ExponentLedger): the discriminant bound routinely contains 2^3264-sized
factors, and admission tests against a cutoff X must be exact, so everything
stays in (prime, exponent) form with big-integer comparison underneath.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

from .arith import v_p
from .curves import (
    CurveRecord,
    Reduction,
    bad_primes,
    is_semistable_away_23,
    local_data,
)

ADDITIVE_SMALL_PRIME_EXPONENT = 3264  # (3^2-1)(3^2-3) * 68, additive p in {2,3}


def gl2_order(ell: int) -> int:
    """#GL_2(F_ell) = (ell^2 - 1)(ell^2 - ell)."""
    return (ell * ell - 1) * (ell * ell - ell)


def default_c_ell_exponent(ell: int) -> int:
    """Deliberately generous cap for the discriminant exponent at ell itself."""
    return 2 * gl2_order(ell)


@dataclass(frozen=True)
class ExponentLedger:
    """A positive integer prod p^e as a sorted factor tuple, compared exactly."""

    factors: tuple[tuple[int, int], ...]

    @classmethod
    def from_dict(cls, exponents: dict[int, int]) -> "ExponentLedger":
        return cls(tuple(sorted((p, e) for p, e in exponents.items() if e > 0)))

    @classmethod
    def from_int(cls, n: int) -> "ExponentLedger":
        if n <= 0:
            raise ValueError("ledger represents a positive integer")
        out = {}
        m = n
        p = 2
        while p * p <= m:
            while m % p == 0:
                out[p] = out.get(p, 0) + 1
                m //= p
            p += 1 if p == 2 else 2
        if m > 1:
            out[m] = out.get(m, 0) + 1
        return cls.from_dict(out)

    def value(self) -> int:
        return _ledger_value(self.factors)

    def le(self, bound) -> bool:
        """Exact prod p^e <= bound, for integer / Fraction / float bounds."""
        frac = Fraction(bound)
        return self.value() * frac.denominator <= frac.numerator

    def exponent(self, p: int) -> int:
        for q, e in self.factors:
            if q == p:
                return e
        return 0

    def serialize(self) -> str:
        if not self.factors:
            return "1"
        return ";".join(f"{p}^{e}" for p, e in self.factors)

    @classmethod
    def parse(cls, token: str) -> "ExponentLedger":
        if token == "1":
            return cls(())
        out = {}
        for part in token.split(";"):
            p_str, e_str = part.split("^")
            out[int(p_str)] = int(e_str)
        return cls.from_dict(out)


@lru_cache(maxsize=65536)
def _ledger_value(factors: tuple[tuple[int, int], ...]) -> int:
    n = 1
    for p, e in factors:
        n *= p**e
    return n


class BoundOnly(NamedTuple):
    """An exponent known only as an upper bound (additive small primes, p = ell)."""

    value: int


@dataclass(frozen=True)
class LevelData:
    ell: int
    serre_level_upper: ExponentLedger
    serre_level_exact_away_23: bool
    disc_bound: ExponentLedger
    c_ell_exponent: int


def _require_semistable_family_member(E: CurveRecord) -> None:
    if not is_semistable_away_23(E):
        raise ValueError(f"({E.A}, {E.B}) has an additive prime >= 5; outside the census family")


def _tate_regime_exponent(ld, ell: int) -> int:
    """Discriminant exponent at a multiplicative prime: 0 when ell | v_p(j)
    (unramified Tate parameter), else [Q(E[ell]):Q] * (ell-1)/ell exactly."""
    if ld.vJnum is None or ld.vJnum % ell == 0:
        return 0
    return gl2_order(ell) * (ell - 1) // ell


def m_exponent(E: CurveRecord, ell: int, p: int, c_ell_exponent: int | None = None):
    """Exponent of p in the division-field discriminant bound: an exact integer
    at semistable primes away from ell, a BoundOnly cap at p = ell and at
    additive p in {2, 3}.  Callers must have certified the mod-ell image first
    (the exact value uses the full degree #GL_2(F_ell))."""
    if c_ell_exponent is None:
        c_ell_exponent = default_c_ell_exponent(ell)
    if p == ell:
        return BoundOnly(c_ell_exponent)
    ld = local_data(E, p)
    if ld.reduction is Reduction.GOOD:
        return 0
    if p in (2, 3):
        if ld.reduction is Reduction.ADDITIVE:
            return BoundOnly(ADDITIVE_SMALL_PRIME_EXPONENT)
        return _tate_regime_exponent(ld, ell)
    if ld.reduction is Reduction.ADDITIVE:
        raise ValueError(f"additive reduction at p={p} >= 5; curve is outside the census family")
    return _tate_regime_exponent(ld, ell)


def serre_level(E: CurveRecord, ell: int, c_ell_exponent: int | None = None) -> LevelData:
    """Upper bound for the prime-to-ell Artin conductor of the residual
    representation, assembled prime by prime.

    Multiplicative p outside {2, 3, ell} contributes exponent 1 exactly when
    ell does not divide v_p(delta) (otherwise the representation is unramified
    there); p in {2, 3} contributes the curve conductor-exponent bound; ell
    contributes nothing by definition.  The exactness flag records whether any
    p in {2, 3} contributed."""
    if c_ell_exponent is None:
        c_ell_exponent = default_c_ell_exponent(ell)
    _require_semistable_family_member(E)
    level: dict[int, int] = {}
    disc: dict[int, int] = {ell: c_ell_exponent}
    for p in bad_primes(E):
        ld = local_data(E, p)
        if p == ell:
            continue
        if p in (2, 3):
            if ld.cond_exp_bound:
                level[p] = ld.cond_exp_bound
            m = m_exponent(E, ell, p, c_ell_exponent)
            e = m.value if isinstance(m, BoundOnly) else m
            if e:
                disc[p] = e
        elif ld.reduction is Reduction.MULTIPLICATIVE:
            if ld.vDelta % ell != 0:
                level[p] = 1
            m = m_exponent(E, ell, p, c_ell_exponent)
            assert not isinstance(m, BoundOnly)
            if m:
                disc[p] = m
    exact = not any(p in (2, 3) for p in level)
    return LevelData(
        ell,
        ExponentLedger.from_dict(level),
        exact,
        ExponentLedger.from_dict(disc),
        c_ell_exponent,
    )


def disc_bound(E: CurveRecord, ell: int, c_ell_exponent: int | None = None) -> ExponentLedger:
    """Upper bound for |disc| of the ell-division field, as an exact ledger."""
    return serre_level(E, ell, c_ell_exponent).disc_bound


def blanket_disc_bound(E: CurveRecord, ell: int, c_ell_exponent: int | None = None) -> ExponentLedger:
    """The coarse bound 6^3264 * ell^C * |delta|^((ell-1)/ell * #GL2) that the
    per-prime assembly must never exceed."""
    if c_ell_exponent is None:
        c_ell_exponent = default_c_ell_exponent(ell)
    exp_delta = gl2_order(ell) * (ell - 1) // ell
    out: dict[int, int] = {}
    for p, e in ExponentLedger.from_int(abs(E.delta)).factors:
        out[p] = e * exp_delta
    out[2] = out.get(2, 0) + ADDITIVE_SMALL_PRIME_EXPONENT
    out[3] = out.get(3, 0) + ADDITIVE_SMALL_PRIME_EXPONENT
    out[ell] = out.get(ell, 0) + c_ell_exponent
    return ExponentLedger.from_dict(out)


def _log_big(x) -> float:
    """Natural log for ints/Fractions far beyond float range."""
    if isinstance(x, float):
        return math.log(x)
    frac = Fraction(x)
    num, den = frac.numerator, frac.denominator

    def log_int(n: int) -> float:
        if n.bit_length() <= 512:
            return math.log(n)
        shift = n.bit_length() - 64
        return math.log(n >> shift) + shift * math.log(2)

    return log_int(num) - log_int(den)


def height_for_level_cutoff(X) -> float:
    """Classification height guaranteeing serre_level_upper <= X: (X/496)^(1/6)."""
    if X <= 0:
        raise ValueError("cutoff must be positive")
    return math.exp((_log_big(X) - math.log(496)) / 6)


def disc_cutoff_exponent(ell: int) -> Fraction:
    return Fraction(ell, 6 * (ell - 1) * gl2_order(ell))


def height_for_disc_cutoff(X, ell: int, c_ell_exponent: int | None = None) -> float:
    """Classification height guaranteeing disc_bound <= X:
    (X / (6^3264 * ell^C))^(ell / (6 (ell-1) #GL2)), evaluated in log space."""
    if c_ell_exponent is None:
        c_ell_exponent = default_c_ell_exponent(ell)
    if X <= 0:
        raise ValueError("cutoff must be positive")
    log_base = _log_big(X) - ADDITIVE_SMALL_PRIME_EXPONENT * math.log(6) - c_ell_exponent * math.log(ell)
    return math.exp(float(disc_cutoff_exponent(ell)) * log_base)
