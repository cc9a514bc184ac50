"""Shared integer / modular arithmetic primitives.

Everything here is pure and exact: prime sieving, p-adic valuations,
Legendre symbols, and the two zeta constants that normalize the census
density checks.  The zeta values are *computed*, not pasted in, so the
test suite carries its own provenance for them.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class PrimeTable:
    bound: int
    primes: tuple[int, ...]


def sieve_primes(bound: int) -> PrimeTable:
    """All primes <= bound, ascending (Eratosthenes with a bytearray)."""
    if bound < 2:
        raise ValueError(f"sieve bound must be >= 2, got {bound}")
    flags = bytearray(b"\x01") * (bound + 1)
    flags[0:2] = b"\x00\x00"
    for p in range(2, int(bound**0.5) + 1):
        if flags[p]:
            start = p * p
            flags[start : bound + 1 : p] = b"\x00" * ((bound - start) // p + 1)
    return PrimeTable(bound, tuple(i for i, f in enumerate(flags) if f))


_PRIME_CACHE = PrimeTable(2, (2,))


def primes_upto(bound: int) -> tuple[int, ...]:
    """Cached prime list; grows geometrically so repeated callers share one sieve."""
    global _PRIME_CACHE
    if bound > _PRIME_CACHE.bound:
        _PRIME_CACHE = sieve_primes(max(bound, 2 * _PRIME_CACHE.bound))
    if bound == _PRIME_CACHE.bound:
        return _PRIME_CACHE.primes
    cut = bisect.bisect_right(_PRIME_CACHE.primes, bound)
    return _PRIME_CACHE.primes[:cut]


def v_p(n: int, p: int) -> int:
    """Largest k with p^k | n.  n = 0 is rejected (valuation would be infinite)."""
    if n == 0:
        raise ValueError("v_p(0) is infinite; handle the zero case before calling")
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a|p) for odd prime p, via Euler's criterion."""
    ls = pow(a, (p - 1) // 2, p)
    return -1 if ls == p - 1 else ls


@dataclass(frozen=True)
class ZetaConstants:
    """zeta(10), zeta(2) and the two derived density constants, as exact rationals
    certified to the requested number of digits."""

    zeta10: Fraction
    zeta2: Fraction
    c_density: Fraction      # 4 / zeta(10): leading constant of the curve count
    c_semistable: Fraction   # zeta(10) / zeta(2): semistable-away-from-{2,3} density


def _zeta_series(s: int, digits: int) -> Fraction:
    """Direct summation of sum n^-s plus the integral tail bound.

    The tail sum_{n>N} n^-s is bracketed by N^(1-s)/(s-1) from above; we add
    the next two Euler-Maclaurin corrections (-N^-s/2 + s*N^-(s+1)/12) whose
    truncation error is below the first omitted term s(s+1)(s+2)N^-(s+3)/720.
    N is chosen so that correction error plus the accumulated floor error of
    the scaled-integer summation stays under half an ulp of the target digits.
    """
    guard = digits + 12
    scale = 10**guard
    # remainder s(s+1)(s+2)/(720 N^(s+3)) <= 10^-(digits+2)
    target = s * (s + 1) * (s + 2) * 10 ** (digits + 2)
    n_terms = 2
    while 720 * n_terms ** (s + 3) < target:
        n_terms *= 2
    acc = 0
    for n in range(1, n_terms + 1):
        acc += scale // n**s
    acc += scale // ((s - 1) * n_terms ** (s - 1))   # integral tail bound
    acc -= scale // (2 * n_terms**s)                 # Euler-Maclaurin f(N)/2
    acc += s * scale // (12 * n_terms ** (s + 1))    # Euler-Maclaurin B2 term
    return Fraction(acc, scale)


def zeta_constants(digits: int) -> ZetaConstants:
    """Compute the census constants to ``digits`` correct digits (digits <= 30)."""
    if not 1 <= digits <= 30:
        raise ValueError(f"digits must be in 1..30, got {digits}")
    # two guard digits cover the error amplification in the quotients
    z10 = _zeta_series(10, digits + 2)
    z2 = _zeta_series(2, digits + 2)
    return ZetaConstants(z10, z2, Fraction(4) / z10, z10 / z2)
