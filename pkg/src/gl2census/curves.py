"""Height-ordered curve family y^2 = x^3 + Ax + B and per-prime reduction data.

The family is the set of integer pairs (A, B) with no prime p having both
p^4 | A and p^6 | B, ordered by naive height H = max(|A|^3, B^2); the family
box at parameter X is |A| <= X^2, |B| <= X^3.  All reduction bookkeeping is
done on this model's discriminant -16(4A^3 + 27B^2); at p in {2, 3} the model
can be non-minimal, so the reduction *label* is model-view (good iff
v_p(delta) = 0) while the conductor-exponent bound comes from a full Tate
reduction run (restarting on non-minimal models), which keeps every
downstream use an honest upper bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterator

import numpy as np

from .arith import primes_upto, v_p


class Reduction(Enum):
    GOOD = "good"
    MULTIPLICATIVE = "multiplicative"
    ADDITIVE = "additive"


@dataclass(frozen=True)
class CurveRecord:
    A: int
    B: int
    delta: int   # -16(4A^3 + 27B^2), nonzero
    height: int  # max(|A|^3, B^2)
    c4: int      # -48A
    local: dict = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def from_pair(cls, A: int, B: int) -> "CurveRecord":
        delta = -16 * (4 * A**3 + 27 * B**2)
        if delta == 0:
            raise ValueError(f"({A}, {B}) is singular")
        return cls(A, B, delta, max(abs(A) ** 3, B * B), -48 * A)


@dataclass(frozen=True)
class LocalData:
    p: int
    vDelta: int
    vJnum: int | None  # v_p of the j-invariant; None encodes j = 0 (A = 0)
    reduction: Reduction
    cond_exp_bound: int


def _box(X) -> tuple[int, int]:
    """Exact floor(X^2), floor(X^3) without float-power rounding traps."""
    x = Fraction(X)
    if x < 1:
        raise ValueError(f"height parameter must be >= 1, got {X}")
    return math.floor(x * x), math.floor(x * x * x)


def _bad_primes_for_A(A: int, bmax: int, primes: tuple[int, ...]) -> list[int]:
    """Primes p that could violate minimality for this A, i.e. with p^4 | A
    (for A = 0 every prime divides, so the p^6 <= bmax ones are the candidates)."""
    if A == 0:
        return [p for p in primes if p**6 <= bmax]
    return [p for p in primes if p**4 <= abs(A) and A % p**4 == 0]


def _singular_b_values(A: int, bmax: int) -> list[int]:
    """B values with 4A^3 + 27B^2 = 0, inside |B| <= bmax.

    Integer solutions are exactly A = -3t^2, B = +-2t^3."""
    if A > 0:
        return []
    if A == 0:
        return [0]
    if A % 3 != 0:
        return []
    tsq = -A // 3
    t = math.isqrt(tsq)
    if t * t != tsq:
        return []
    b = 2 * t**3
    if 4 * A**3 + 27 * b * b != 0 or b > bmax:
        return []
    return [b, -b]


def enumerate_curves(X) -> Iterator[CurveRecord]:
    """Yield the family members with |A| <= X^2, |B| <= X^3, lexicographic in (A, B)."""
    amax, bmax = _box(X)
    primes = primes_upto(max(2, math.isqrt(math.isqrt(amax)) + 1))
    for A in range(-amax, amax + 1):
        bad = [p**6 for p in _bad_primes_for_A(A, bmax, primes)]
        four_a3 = 4 * A**3
        for B in range(-bmax, bmax + 1):
            if four_a3 + 27 * B * B == 0:
                continue
            if any(B % q == 0 for q in bad):
                continue
            yield CurveRecord.from_pair(A, B)


def count_curves(X) -> int:
    """#C(X) by a count-only pass over the A-rows of the box.

    Per row the excluded B are counted in closed form: inclusion-exclusion
    over the (at most two) primes with p^4 | A, plus the explicit singular
    B values when they survive the minimality test.  Agrees exactly with
    the stream length of enumerate_curves.
    """
    amax, bmax = _box(X)
    primes = primes_upto(max(2, math.isqrt(math.isqrt(amax)) + 1))
    total = 0
    for A in range(-amax, amax + 1):
        bad = _bad_primes_for_A(A, bmax, primes)
        excluded = 0
        for mask in range(1, 1 << len(bad)):
            q = 1
            for i, p in enumerate(bad):
                if mask >> i & 1:
                    q *= p**6
            cnt = 2 * (bmax // q) + 1 if q <= bmax else 1  # the +1 / lone 1 is B = 0
            excluded += cnt if bin(mask).count("1") % 2 else -cnt
        sing_minimal = sum(
            1 for b in _singular_b_values(A, bmax) if not any(b % p**6 == 0 for p in bad)
        )
        total += (2 * bmax + 1) - excluded - sing_minimal
    return total


def is_semistable_away_23(E: CurveRecord) -> bool:
    """No additive prime >= 5: gcd(A, B) stripped of 2s and 3s must be 1."""
    g = math.gcd(abs(E.A), abs(E.B))
    while g % 2 == 0:
        g //= 2
    while g % 3 == 0:
        g //= 3
    return g == 1


def density_counts(X) -> tuple[int, int, int]:
    """One vectorized pass over the box: (#C(X), #semistable-away-from-{2,3},
    #unit-gcd members).

    The two filtered counts have limiting densities prod_{p>=5}(1 - p^-2)
    ~ 0.9119 and prod_p (1 - p^-2)/(1 - p^-10) = zeta(10)/zeta(2) ~ 0.6085
    respectively; the second one is the everywhere-no-visible-additive-prime
    slice whose density matches the census normalization constant."""
    amax, bmax = _box(X)
    primes = primes_upto(max(2, math.isqrt(math.isqrt(amax)) + 1))
    b_vals = np.arange(-bmax, bmax + 1, dtype=np.int64)
    b_abs = np.abs(b_vals)
    n_family = 0
    n_semi = 0
    n_unit = 0
    for A in range(-amax, amax + 1):
        member = np.ones(b_vals.shape, dtype=bool)
        for p in _bad_primes_for_A(A, bmax, primes):
            member &= b_vals % p**6 != 0
        for b in _singular_b_values(A, bmax):
            member[b + bmax] = False
        g = np.gcd(abs(A), b_abs)
        n_unit += int((member & (g == 1)).sum())
        for q in (2, 3):
            while True:
                div = g % q == 0
                div &= g > 0
                if not div.any():
                    break
                g[div] //= q
        n_family += int(member.sum())
        n_semi += int((member & (g == 1)).sum())
    return n_family, n_semi, n_unit


def count_semistable(X) -> tuple[int, int]:
    """(#semistable-away-from-{2,3}, #C(X))."""
    n_family, n_semi, _ = density_counts(X)
    return n_semi, n_family


# ---------------------------------------------------------------------------
# Tate reduction on a general integral Weierstrass model
# ---------------------------------------------------------------------------


def _rst_transform(ai, r, s, t):
    """Coefficients after x -> x + r, y -> y + s*x + t (u = 1)."""
    a1, a2, a3, a4, a6 = ai
    return (
        a1 + 2 * s,
        a2 - s * a1 + 3 * r - s * s,
        a3 + r * a1 + 2 * t,
        a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t,
        a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1,
    )


def _b_invariants(ai):
    a1, a2, a3, a4, a6 = ai
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    delta = -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    return b2, b4, b6, b8, delta


def _singular_point(ai, p):
    """The unique singular point of the reduction mod p.

    It is Frobenius-stable, hence F_p-rational.  For p >= 5 it has a closed
    form via the c-invariants; at p in {2, 3} a 9-point search suffices."""
    a1, a2, a3, a4, a6 = ai
    if p >= 5:
        b2, b4, b6, b8, _ = _b_invariants(ai)
        c4 = b2 * b2 - 24 * b4
        c6 = -b2**3 + 36 * b2 * b4 - 216 * b6
        if c4 % p == 0:
            r = (-b2 * pow(12, -1, p)) % p
        else:
            r = (-(c6 + b2 * c4) * pow(12 * c4, -1, p)) % p
        t = (-(a1 * r + a3) * pow(2, -1, p)) % p
        return r, t
    for x in range(p):
        for y in range(p):
            if (y * y + a1 * x * y + a3 * y - (x**3 + a2 * x * x + a4 * x + a6)) % p:
                continue
            if (a1 * y - 3 * x * x - 2 * a2 * x - a4) % p:
                continue
            if (2 * y + a1 * x + a3) % p:
                continue
            return x, y
    raise AssertionError("no singular point found; delta valuation bookkeeping is off")


def _exact_div(n, q):
    assert n % q == 0
    return n // q


def _cubic_repeated_root(a, b, c, p):
    """For T^3 + aT^2 + bT + c mod p: (root, multiplicity) of the repeated root,
    or None when the cubic is squarefree over the algebraic closure."""
    disc = (18 * a * b * c - 4 * a**3 * c + a * a * b * b - 4 * b**3 - 27 * c * c) % p
    if disc != 0:
        return None
    for alpha in range(p):
        m = 0
        poly = [1, a % p, b % p, c % p]
        while len(poly) > 1:
            quot = [poly[0]]
            for coef in poly[1:-1]:
                quot.append((coef + alpha * quot[-1]) % p)
            rem = (poly[-1] + alpha * quot[-1]) % p
            if rem != 0:
                break
            m += 1
            poly = quot
        if m >= 2:
            return alpha, m
    raise AssertionError("repeated root of a cubic mod p must be rational")


def _quadratic_double_root(a, b, p):
    """Double root of Y^2 + aY - b mod p (caller guarantees a^2 + 4b = 0 mod p)."""
    if p == 2:
        return b % 2  # a is even here and squaring is the identity on F_2
    return (-a * pow(2, -1, p)) % p


def tate_reduction(A: int, B: int, p: int) -> tuple[Reduction, int]:
    """Tate reduction of y^2 = x^3 + Ax + B at p: (true reduction type, exact
    conductor exponent).  Non-minimal models are rescaled and rerun, so the
    answer is intrinsic to the curve."""
    ai = (0, 0, 0, A, B)
    while True:
        b2, b4, b6, b8, delta = _b_invariants(ai)
        assert delta != 0
        n = v_p(delta, p)
        if n == 0:
            return Reduction.GOOD, 0
        if (b2 * b2 - 24 * b4) % p != 0:
            # p | delta, p coprime to c4: type I_n on any integral model
            return Reduction.MULTIPLICATIVE, 1
        r, t = _singular_point(ai, p)
        ai = _rst_transform(ai, r, 0, t)
        b2, b4, b6, b8, delta = _b_invariants(ai)
        a1, a2, a3, a4, a6 = ai
        # singular point now at the origin: p | a3, a4, a6; p | b2 (additive)
        p2, p3, p4 = p * p, p**3, p**4
        if a6 % p2 != 0:
            return Reduction.ADDITIVE, n  # type II
        if b8 % p3 != 0:
            return Reduction.ADDITIVE, n - 1  # type III
        if b6 % p3 != 0:
            return Reduction.ADDITIVE, n - 2  # type IV
        # normalize to p | a1, a2; p^2 | a3, a4; p^3 | a6
        for s in range(p):
            done = False
            for tau in range(p):
                cand = _rst_transform(ai, 0, s, p * tau)
                c1, c2, c3, c4_, c6_ = cand
                if (
                    c1 % p == 0
                    and c2 % p == 0
                    and c3 % p2 == 0
                    and c4_ % p2 == 0
                    and c6_ % p3 == 0
                ):
                    ai = cand
                    done = True
                    break
            if done:
                break
        else:
            raise AssertionError("step-6 normalization not reachable")
        a1, a2, a3, a4, a6 = ai
        rep = _cubic_repeated_root(_exact_div(a2, p), _exact_div(a4, p2), _exact_div(a6, p3), p)
        if rep is None:
            return Reduction.ADDITIVE, n - 4  # type I0*
        alpha, mult = rep
        ai = _rst_transform(ai, p * alpha, 0, 0)
        a1, a2, a3, a4, a6 = ai
        if mult == 2:
            # type I_m* chain: alternate double-root tests in the y and x directions
            m = 1
            mx = my = p2
            while True:
                a3t = _exact_div(a3, my)
                a6t = _exact_div(a6, mx * my)
                if (a3t * a3t + 4 * a6t) % p != 0:
                    return Reduction.ADDITIVE, n - 4 - m
                ai = _rst_transform(ai, 0, 0, my * _quadratic_double_root(a3t, a6t, p))
                a1, a2, a3, a4, a6 = ai
                my *= p
                m += 1
                a2t = _exact_div(a2, p)
                a4t = _exact_div(a4, p * mx)
                a6t = _exact_div(a6, mx * my)
                if (a4t * a4t - 4 * a2t * a6t) % p != 0:
                    return Reduction.ADDITIVE, n - 4 - m
                if p == 2:
                    root = (a6t * a2t) % 2
                else:
                    root = (-a4t * pow(2 * a2t, -1, p)) % p
                ai = _rst_transform(ai, mx * root, 0, 0)
                a1, a2, a3, a4, a6 = ai
                mx *= p
                m += 1
        # triple root: p^2 | a2, p^3 | a4, p^4 | a6
        a3t = _exact_div(a3, p2)
        a6t = _exact_div(a6, p4)
        if (a3t * a3t + 4 * a6t) % p != 0:
            return Reduction.ADDITIVE, n - 6  # type IV*
        ai = _rst_transform(ai, 0, 0, p2 * _quadratic_double_root(a3t, a6t, p))
        a1, a2, a3, a4, a6 = ai
        if a4 % p4 != 0:
            return Reduction.ADDITIVE, n - 7  # type III*
        if a6 % p**6 != 0:
            return Reduction.ADDITIVE, n - 8  # type II*
        # non-minimal at p: rescale by u = p and rerun
        ai = (
            _exact_div(a1, p),
            _exact_div(a2, p2),
            _exact_div(a3, p3),
            _exact_div(a4, p4),
            _exact_div(a6, p**6),
        )


def local_data(E: CurveRecord, p: int) -> LocalData:
    """Reduction data of E at p, cached on the record.

    p >= 5: the model is minimal, additive iff p | gcd(A, B).  p in {2, 3}:
    the label is model-view (good iff v_p(delta) = 0; -16 makes 2 always a
    label-additive prime) and the exponent bound is the exact Tate conductor
    exponent of the underlying curve."""
    cached = E.local.get(p)
    if cached is not None:
        return cached
    vd = v_p(E.delta, p) if E.delta % p == 0 else 0
    if E.c4 == 0:
        vj: int | None = None
    else:
        vj = 3 * (v_p(E.c4, p) if E.c4 % p == 0 else 0) - vd
    if vd == 0:
        ld = LocalData(p, 0, vj, Reduction.GOOD, 0)
    elif p >= 5:
        if E.A % p == 0 and E.B % p == 0:
            ld = LocalData(p, vd, vj, Reduction.ADDITIVE, 2)
        else:
            ld = LocalData(p, vd, vj, Reduction.MULTIPLICATIVE, 1)
    elif E.c4 % p != 0:
        ld = LocalData(p, vd, vj, Reduction.MULTIPLICATIVE, 1)
    else:
        _, f = tate_reduction(E.A, E.B, p)
        assert f <= (8 if p == 2 else 5)
        ld = LocalData(p, vd, vj, Reduction.ADDITIVE, f)
    E.local[p] = ld
    return ld


def bad_primes(E: CurveRecord) -> list[int]:
    """Primes dividing delta, by trial division (delta is desk-scale here)."""
    n = abs(E.delta)
    out = []
    for p in primes_upto(max(2, math.isqrt(n))):
        if p * p > n:
            break
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
    if n > 1:
        out.append(n)
    return sorted(set(out))
