"""Frobenius traces, mod-ell trace fingerprints, and surjectivity certification.

Traces a_p are computed by the O(p) quadratic-character sum over x; per-prime
residue tables are cached so sweeps over many curves stay cheap.  Surjectivity
of the mod-ell image is *certified* from three kinds of witness traces (split
semisimple, nonsplit semisimple, and large projective order), which together
rule out Borel subgroups, Cartan normalizers, and the exceptional images; a
certificate is a proof, a miss is merely inconclusive.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import legendre, primes_upto

BAD = "B"  # fingerprint marker at primes dividing the discriminant


@dataclass(frozen=True)
class FrobeniusSample:
    p: int
    a_p: int
    t: int  # a_p mod ell
    d: int  # p mod ell, nonzero since p != ell

    @classmethod
    def make(cls, p: int, a_p: int, ell: int) -> "FrobeniusSample":
        assert a_p * a_p <= 4 * p, f"Hasse bound violated at p={p}: a_p={a_p}"
        d = p % ell
        assert d != 0
        return cls(p, a_p, a_p % ell, d)


@dataclass(frozen=True)
class Fingerprint:
    ell: int
    window: tuple[int, ...]          # probe primes in [5, bound], excluding ell
    values: tuple[int | str, ...]    # residues mod ell, or BAD at p | delta


@dataclass(frozen=True)
class SurjectivityVerdict:
    certified: bool
    witnesses: tuple[int, int, int] | None  # (split, nonsplit, large-order) primes
    reason: str  # empty when certified

    CERTIFIED = "CertifiedSurjective"
    NOT_CERTIFIED = "NotCertified"

    @property
    def status(self) -> str:
        return self.CERTIFIED if self.certified else self.NOT_CERTIFIED


_pctx_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _prime_context(p: int) -> tuple[np.ndarray, np.ndarray]:
    """(x^3 mod p for x in 0..p-1, quadratic character table mod p)."""
    ctx = _pctx_cache.get(p)
    if ctx is None:
        xs = np.arange(p, dtype=np.int64)
        cubes = (xs * xs % p) * xs % p
        qr = np.full(p, -1, dtype=np.int64)
        qr[0] = 0
        qr[xs[1:] * xs[1:] % p] = 1
        ctx = (cubes.astype(np.int64), qr)
        _pctx_cache[p] = ctx
    return ctx


def _a_p(A: int, B: int, p: int) -> int:
    """a_p = -sum_x chi(x^3 + Ax + B) for odd p not dividing the discriminant."""
    cubes, qr = _prime_context(p)
    vals = (cubes + (A % p) * np.arange(p, dtype=np.int64) + B) % p
    return -int(qr[vals].sum())


def point_count(A: int, B: int, p: int, ell: int) -> FrobeniusSample:
    """Frobenius sample at a good prime p >= 5 via the quadratic-character sum.

    #E(F_p) = 1 + sum_x (1 + chi(x^3 + Ax + B)), so a_p = p + 1 - #E(F_p) is
    minus the character sum.  The Hasse bound is asserted on every sample.
    """
    if p < 5:
        raise ValueError(f"probe primes start at 5, got {p}")
    if p == ell:
        raise ValueError("trace residues are only used away from ell")
    delta = -16 * (4 * A**3 + 27 * B**2)
    if delta % p == 0:
        raise ValueError(f"p={p} divides the discriminant; trace undefined there")
    return FrobeniusSample.make(p, _a_p(A, B, p), ell)


def fingerprint_window(ell: int, window_bound: int) -> tuple[int, ...]:
    return tuple(p for p in primes_upto(window_bound) if p >= 5 and p != ell)


def fingerprint(E, ell: int, window_bound: int) -> Fingerprint:
    """Trace residues a_p mod ell over the probe window, BAD where p | delta."""
    if ell < 5:
        raise ValueError("ell must be a prime >= 5")
    if window_bound < 30:
        raise ValueError("window bound below 30 leaves too few probe primes")
    window = fingerprint_window(ell, window_bound)
    values: list[int | str] = []
    for p in window:
        if E.delta % p == 0:
            values.append(BAD)
        else:
            values.append(_a_p(E.A, E.B, p) % ell)
    return Fingerprint(ell, window, tuple(values))


# --- surjectivity criterion -------------------------------------------------
#
# For a sample (t, d) = (a_p mod ell, p mod ell) at a good prime:
#   * t != 0 and t^2 - 4d a nonzero square: split semisimple, regular, nonzero
#     trace -- impossible inside a nonsplit-Cartan normalizer.
#   * t != 0 and t^2 - 4d a nonsquare: nonsplit semisimple -- impossible inside
#     a Borel or a split-Cartan normalizer.
#   * u = t^2/d with u not in {0,1,2,4} and u^2 - 3u + 1 != 0: the image of the
#     element in PGL_2 has order > 5 -- impossible for the exceptional
#     (A4/S4/A5-projective) images.
# Any proper subgroup with full determinant lies in one of those families, so
# finding all three witness types (plus determinants generating the full unit
# group, which Dirichlet guarantees eventually) proves surjectivity.


class _WitnessState:
    __slots__ = ("split", "nonsplit", "large_order", "dets", "nonzero_traces")

    def __init__(self):
        self.split: int | None = None
        self.nonsplit: int | None = None
        self.large_order: int | None = None
        self.dets: set[int] = set()
        self.nonzero_traces = 0

    def update(self, p: int, t: int, d: int, ell: int) -> None:
        self.dets.add(d)
        if t != 0:
            self.nonzero_traces += 1
            disc = legendre(t * t - 4 * d, ell)
            if disc == 1 and self.split is None:
                self.split = p
            elif disc == -1 and self.nonsplit is None:
                self.nonsplit = p
        if self.large_order is None:
            u = t * t * pow(d, -1, ell) % ell
            if u not in (0, 1, 2, 4) and (u * u - 3 * u + 1) % ell != 0:
                self.large_order = p

    def dets_generate(self, ell: int) -> bool:
        gen: set[int] = {1}
        frontier = True
        while frontier:
            new = {x * d % ell for x in gen for d in self.dets} - gen
            frontier = bool(new)
            gen |= new
        return len(gen) == ell - 1

    def verdict(self) -> SurjectivityVerdict:
        if self.split and self.nonsplit and self.large_order:
            return SurjectivityVerdict(True, (self.split, self.nonsplit, self.large_order), "")
        missing_one_cartan = (self.split is None) != (self.nonsplit is None)
        if missing_one_cartan and self.nonzero_traces >= 5:
            return SurjectivityVerdict(False, None, "CM-like trace pattern")
        return SurjectivityVerdict(False, None, "witness missing after probe bound")


def certify_surjective(E, ell: int, probe_bound: int) -> SurjectivityVerdict:
    """Scan good primes 5 <= p <= probe_bound, p != ell, for the three witness
    types.  Certification is sound; NotCertified is inconclusive."""
    if ell < 5:
        raise ValueError("ell must be a prime >= 5")
    state = _WitnessState()
    for p in primes_upto(probe_bound):
        if p < 5 or p == ell or E.delta % p == 0:
            continue
        a = _a_p(E.A, E.B, p)
        assert a * a <= 4 * p, f"Hasse bound violated at p={p}"
        state.update(p, a % ell, p % ell, ell)
        if state.split and state.nonsplit and state.large_order and state.dets_generate(ell):
            return state.verdict()
    if state.split and state.nonsplit and state.large_order and not state.dets_generate(ell):
        return SurjectivityVerdict(False, None, "witness missing after probe bound")
    return state.verdict()


def verify_witnesses(E, ell: int, verdict: SurjectivityVerdict) -> bool:
    """Recompute the three witness conditions from scratch (soundness audit)."""
    if not verdict.certified or verdict.witnesses is None:
        return False
    p_split, p_nonsplit, p_large = verdict.witnesses
    s1 = point_count(E.A, E.B, p_split, ell)
    if s1.t == 0 or legendre(s1.t * s1.t - 4 * s1.d, ell) != 1:
        return False
    s2 = point_count(E.A, E.B, p_nonsplit, ell)
    if s2.t == 0 or legendre(s2.t * s2.t - 4 * s2.d, ell) != -1:
        return False
    s3 = point_count(E.A, E.B, p_large, ell)
    u = s3.t * s3.t * pow(s3.d, -1, ell) % ell
    return u not in (0, 1, 2, 4) and (u * u - 3 * u + 1) % ell != 0


@lru_cache(maxsize=None)
def _trace_det_table(ell: int) -> tuple[tuple[int, ...], ...]:
    """N[t][d] = #{g in GL_2(F_ell) : tr g = t, det g = d}, by brute force."""
    table = [[0] * ell for _ in range(ell)]
    for a in range(ell):
        for b in range(ell):
            for c in range(ell):
                for d in range(ell):
                    det = (a * d - b * c) % ell
                    if det:
                        table[(a + d) % ell][det] += 1
    return tuple(tuple(row) for row in table)


def trace_count_oracle(ell: int, t: int, d: int) -> int:
    """#{g in GL_2(F_ell): tr g = t mod ell, det g = d mod ell}, d nonzero."""
    if ell > 13:
        raise ValueError("brute-force table is capped at ell <= 13")
    if d % ell == 0:
        raise ValueError("determinant class must be nonzero")
    return _trace_det_table(ell)[t % ell][d % ell]


# --- batched drivers ---------------------------------------------------------


def batch_traces(pairs: list[tuple[int, int]], p: int) -> np.ndarray:
    """a_p for many curves at one prime; BAD-reduction rows get a sentinel 2p+1
    (outside the Hasse range) so callers can mask them."""
    cubes, qr = _prime_context(p)
    a_arr = np.array([a % p for a, _ in pairs], dtype=np.int64)
    b_arr = np.array([b % p for _, b in pairs], dtype=np.int64)
    vals = (cubes[None, :] + a_arr[:, None] * np.arange(p, dtype=np.int64)[None, :] + b_arr[:, None]) % p
    traces = -qr[vals].sum(axis=1)
    deltas = np.array([(-16 * (4 * a**3 + 27 * b * b)) % p for a, b in pairs], dtype=np.int64)
    traces[deltas == 0] = 2 * p + 1
    good = traces != 2 * p + 1
    assert (traces[good] * traces[good] <= 4 * p).all(), f"Hasse bound violated at p={p}"
    return traces


def certified_fraction(pairs: list[tuple[int, int]], ell: int, probe_bound: int) -> float:
    """Fraction of the given curves certified surjective at this probe bound.

    Same witness logic as certify_surjective, swept prime-by-prime across all
    curves at once so large boxes stay tractable."""
    states = [_WitnessState() for _ in pairs]
    undecided = list(range(len(pairs)))
    chunk = 4096
    for p in primes_upto(probe_bound):
        if p < 5 or p == ell or not undecided:
            continue
        for lo in range(0, len(undecided), chunk):
            idxs = undecided[lo : lo + chunk]
            traces = batch_traces([pairs[i] for i in idxs], p)
            for i, a in zip(idxs, traces):
                if a == 2 * p + 1:
                    continue
                states[i].update(p, int(a) % ell, p % ell, ell)
        undecided = [
            i
            for i in undecided
            if not (
                states[i].split
                and states[i].nonsplit
                and states[i].large_order
                and states[i].dets_generate(ell)
            )
        ]
    certified = len(pairs) - len(undecided)
    return certified / len(pairs)
