"""Classification driver: semistability flag, image certification with probe
escalation, fingerprint, and level/discriminant ledgers, per curve.

Worker pools split the curve list into contiguous chunks processed
independently and written back in order, so any worker count produces the
same bytes; resuming skips the keys already on disk and appends the rest in
the same deterministic order.
"""

from __future__ import annotations

import multiprocessing
import os
import sys
from dataclasses import dataclass

from .curves import CurveRecord, enumerate_curves, is_semistable_away_23
from .galois import certify_surjective, fingerprint
from .levels import default_c_ell_exponent, serre_level
from .store import ClassifiedRecord, Store, StoreError, StoreHeader, serialize_row

PROGRESS_EVERY = 10**6


@dataclass(frozen=True)
class ClassifyConfig:
    ell: int = 5
    window_bound: int = 200
    probe_base: int = 1000
    probe_escalated: int = 10**4
    c_ell_exponent: int | None = None

    def resolved_c_ell(self) -> int:
        return self.c_ell_exponent if self.c_ell_exponent is not None else default_c_ell_exponent(self.ell)

    def header(self, height) -> StoreHeader:
        return StoreHeader(
            ell=self.ell,
            window_bound=self.window_bound,
            probe_base=self.probe_base,
            probe_escalated=self.probe_escalated,
            c_ell_exponent=self.resolved_c_ell(),
            height_completed=float(height),
        )


def classify_curve(E: CurveRecord, cfg: ClassifyConfig) -> ClassifiedRecord:
    semistable = is_semistable_away_23(E)
    verdict = certify_surjective(E, cfg.ell, cfg.probe_base)
    if not verdict.certified and cfg.probe_escalated > cfg.probe_base:
        verdict = certify_surjective(E, cfg.ell, cfg.probe_escalated)
    if semistable and verdict.certified:
        fp = fingerprint(E, cfg.ell, cfg.window_bound)
        lv = serre_level(E, cfg.ell, cfg.resolved_c_ell())
        return ClassifiedRecord(
            E, cfg.ell, True, verdict, fp, lv.serre_level_upper,
            lv.serre_level_exact_away_23, lv.disc_bound,
        )
    return ClassifiedRecord(E, cfg.ell, semistable, verdict, None, None, None, None)


def _classify_chunk(args) -> list[str]:
    pairs, cfg = args
    return [serialize_row(classify_curve(CurveRecord.from_pair(a, b), cfg)) for a, b in pairs]


def classify_lines(pairs: list[tuple[int, int]], cfg: ClassifyConfig, workers: int = 1):
    """Serialized classified rows for the given (A, B) list, in input order."""
    if workers <= 1 or len(pairs) < 64:
        yield from _classify_chunk((pairs, cfg))
        return
    chunk_size = max(32, len(pairs) // (workers * 8))
    chunks = [(pairs[i : i + chunk_size], cfg) for i in range(0, len(pairs), chunk_size)]
    with multiprocessing.Pool(workers) as pool:
        for lines in pool.imap(_classify_chunk, chunks):
            yield from lines


def write_bare_store(path: str, height, force: bool = False, cfg: ClassifyConfig | None = None) -> int:
    """Enumerate the family into a bare store; returns the row count."""
    cfg = cfg or ClassifyConfig()
    store = Store.create(path, cfg.header(height), force=force)
    n = 0
    for rec in enumerate_curves(height):
        store.append(rec)
        n += 1
        if n % PROGRESS_EVERY == 0:
            print(f"enumerated {n} curves", file=sys.stderr)
    store.mark_complete()
    store.close()
    return n


def classify_store(
    bare_path: str,
    out_path: str,
    cfg: ClassifyConfig,
    workers: int = 1,
    force: bool = False,
    resume: bool = True,
) -> int:
    """Classify every row of a complete bare store into a classified store.

    Restarts pick up after the last complete line of an interrupted output
    file and reproduce the uninterrupted bytes exactly."""
    bare = Store.open(bare_path)
    if not bare.complete:
        raise StoreError(f"{bare_path} is not a complete enumeration")
    header = cfg.header(bare.header.height_completed)
    if os.path.exists(out_path) and not force:
        out = Store.open(out_path)
        if out.complete:
            raise StoreError(f"{out_path} is already complete; pass force to redo")
        if out.header != header:
            raise StoreError(f"{out_path} was produced under a different configuration")
        if not resume:
            raise StoreError(f"{out_path} exists; pass force to overwrite")
        out.reopen_for_append()
    else:
        out = Store.create(out_path, header, force=force)
    done = set(out.keys)
    pairs = [(row.A, row.B) for row in bare.scan() if (row.A, row.B) not in done]
    written = 0
    for (a, b), line in zip(pairs, classify_lines(pairs, cfg, workers)):
        out.append_serialized(line, (a, b))
        written += 1
        if written % PROGRESS_EVERY == 0:
            print(f"classified {written} curves", file=sys.stderr)
    out.flush()
    out.mark_complete()
    out.close()
    return written
