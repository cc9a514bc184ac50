"""Persistent line-oriented cache of enumerated / classified curve rows.

One self-describing header line, then one comma-separated record per line
(lists inside a field are semicolon-separated; ledgers are exact `p^e` factor
lists, never floats).  A trailing `#complete` marker distinguishes a finished
pass from an interrupted one, and a crash-cut final line is detected and
ignored on read, which is what makes classification resumable.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, Iterator, Union

from .curves import CurveRecord
from .galois import BAD, Fingerprint, SurjectivityVerdict, fingerprint_window
from .levels import ExponentLedger

FORMAT_VERSION = 1
COMPLETE_MARKER = "#complete"


class StoreError(Exception):
    pass


class DuplicateKeyError(StoreError):
    pass


class HeaderMismatchError(StoreError):
    pass


class CorruptLineError(StoreError):
    pass


@dataclass(frozen=True)
class StoreHeader:
    ell: int
    window_bound: int
    probe_base: int
    probe_escalated: int
    c_ell_exponent: int
    height_completed: float
    format_version: int = FORMAT_VERSION

    def line(self) -> str:
        return (
            f"#gl2census v{self.format_version} ell={self.ell} window={self.window_bound} "
            f"probe={self.probe_base}:{self.probe_escalated} cexp={self.c_ell_exponent} "
            f"height={self.height_completed!r}"
        )

    @classmethod
    def parse(cls, line: str) -> "StoreHeader":
        parts = line.strip().split()
        if len(parts) != 6 or parts[0] != "#gl2census" or not parts[1].startswith("v"):
            raise CorruptLineError(f"bad store header: {line!r}")
        fields = dict(p.split("=", 1) for p in parts[2:])
        probe = fields["probe"].split(":")
        return cls(
            ell=int(fields["ell"]),
            window_bound=int(fields["window"]),
            probe_base=int(probe[0]),
            probe_escalated=int(probe[1]),
            c_ell_exponent=int(fields["cexp"]),
            height_completed=float(fields["height"]),
            format_version=int(parts[1][1:]),
        )


@dataclass(frozen=True)
class ClassifiedRecord:
    """One fully classified curve row.

    serre/exact/disc are None outside the semistable-and-certified subfamily,
    where levels are not defined; the fingerprint is computed exactly there
    too, since only those rows are bucketed."""

    curve: CurveRecord
    ell: int
    semistable: bool
    verdict: SurjectivityVerdict
    fingerprint: Fingerprint | None
    serre: ExponentLedger | None
    exact_away_23: bool | None
    disc: ExponentLedger | None

    @property
    def key(self) -> tuple[int, int]:
        return (self.curve.A, self.curve.B)

    @property
    def in_census_family(self) -> bool:
        return self.semistable and self.verdict.certified


Row = Union[CurveRecord, ClassifiedRecord]


def _verdict_token(v: SurjectivityVerdict) -> str:
    if v.certified:
        assert v.witnesses is not None
        return "S:" + ";".join(str(p) for p in v.witnesses)
    return "N:" + v.reason


def _parse_verdict(token: str) -> SurjectivityVerdict:
    kind, _, rest = token.partition(":")
    if kind == "S":
        w = tuple(int(p) for p in rest.split(";"))
        if len(w) != 3:
            raise CorruptLineError(f"bad witness triple: {token!r}")
        return SurjectivityVerdict(True, w, "")
    if kind == "N":
        return SurjectivityVerdict(False, None, rest)
    raise CorruptLineError(f"bad verdict token: {token!r}")


def _fingerprint_token(fp: Fingerprint | None) -> str:
    if fp is None:
        return "-"
    return ";".join(str(v) for v in fp.values)


def serialize_row(row: Row) -> str:
    if isinstance(row, CurveRecord):
        return f"{row.A},{row.B},{row.delta},{row.height}"
    E = row.curve
    serre = row.serre.serialize() if row.serre is not None else "-"
    disc = row.disc.serialize() if row.disc is not None else "-"
    exact = "-" if row.exact_away_23 is None else str(int(row.exact_away_23))
    return (
        f"{E.A},{E.B},{E.delta},{E.height},{int(row.semistable)},"
        f"{_verdict_token(row.verdict)},{_fingerprint_token(row.fingerprint)},"
        f"{serre},{exact},{disc}"
    )


def parse_row(line: str, header: StoreHeader, lineno: int) -> Row:
    parts = line.split(",")
    try:
        if len(parts) == 4:
            A, B, delta, height = (int(x) for x in parts)
            rec = CurveRecord.from_pair(A, B)
            if rec.delta != delta or rec.height != height:
                raise ValueError("cached invariants disagree with (A, B)")
            return rec
        if len(parts) != 10:
            raise ValueError(f"expected 4 or 10 fields, got {len(parts)}")
        A, B, delta, height = (int(x) for x in parts[:4])
        rec = CurveRecord.from_pair(A, B)
        if rec.delta != delta or rec.height != height:
            raise ValueError("cached invariants disagree with (A, B)")
        semistable = bool(int(parts[4]))
        verdict = _parse_verdict(parts[5])
        if parts[6] == "-":
            fp = None
        else:
            values = tuple(BAD if v == BAD else int(v) for v in parts[6].split(";"))
            window = fingerprint_window(header.ell, header.window_bound)
            if len(values) != len(window):
                raise ValueError("fingerprint length disagrees with header window")
            fp = Fingerprint(header.ell, window, values)
        serre = None if parts[7] == "-" else ExponentLedger.parse(parts[7])
        exact = None if parts[8] == "-" else bool(int(parts[8]))
        disc = None if parts[9] == "-" else ExponentLedger.parse(parts[9])
        return ClassifiedRecord(rec, header.ell, semistable, verdict, fp, serre, exact, disc)
    except (ValueError, IndexError) as exc:
        raise CorruptLineError(f"line {lineno}: {exc}") from exc


class Store:
    """Single-writer, multi-reader record file."""

    def __init__(self, path: str, header: StoreHeader):
        self.path = path
        self.header = header
        self.keys: set[tuple[int, int]] = set()
        self.complete = False
        self.truncated_tail = False
        self.valid_bytes = 0  # prefix length holding the header + complete lines
        self._fh = None

    @classmethod
    def create(cls, path: str, header: StoreHeader, force: bool = False) -> "Store":
        if os.path.exists(path) and not force:
            raise StoreError(f"{path} exists; pass force to overwrite")
        store = cls(path, header)
        store._fh = open(path, "w", encoding="ascii", newline="\n")
        store._fh.write(header.line() + "\n")
        store._fh.flush()
        return store

    @classmethod
    def open(cls, path: str) -> "Store":
        """Read an existing store, tolerating (and flagging) a crash-cut tail."""
        with open(path, "r", encoding="ascii", newline="\n") as fh:
            raw = fh.read()
        lines = raw.split("\n")
        if not lines or not lines[0].startswith("#gl2census"):
            raise CorruptLineError(f"{path} lacks a store header")
        header = StoreHeader.parse(lines[0])
        store = cls(path, header)
        body = lines[1:]
        if body and body[-1] == "":
            body.pop()
        elif body:
            store.truncated_tail = True  # no trailing newline: drop the cut line
            body.pop()
        store.valid_bytes = len(lines[0]) + 1 + sum(len(line) + 1 for line in body)
        for i, line in enumerate(body, start=2):
            if line == COMPLETE_MARKER:
                store.complete = True
                continue
            if line.startswith("#"):
                continue
            row = parse_row(line, header, i)
            key = (row.A, row.B) if isinstance(row, CurveRecord) else row.key
            store.keys.add(key)
        return store

    def reopen_for_append(self) -> None:
        """Drop any crash-cut tail and position the writer after the last
        complete line (the resume path)."""
        if self.complete:
            raise StoreError(f"{self.path} is already complete")
        self.close()
        with open(self.path, "r+", encoding="ascii", newline="\n") as fh:
            fh.truncate(self.valid_bytes)
        self.truncated_tail = False
        self._fh = open(self.path, "a", encoding="ascii", newline="\n")

    def _writer(self):
        if self._fh is None:
            self._fh = open(self.path, "a", encoding="ascii", newline="\n")
        return self._fh

    def append(self, row: Row) -> None:
        key = (row.A, row.B) if isinstance(row, CurveRecord) else row.key
        if isinstance(row, ClassifiedRecord) and row.ell != self.header.ell:
            raise HeaderMismatchError(
                f"record classified for ell={row.ell}, store expects ell={self.header.ell}"
            )
        if isinstance(row, ClassifiedRecord) and row.fingerprint is not None:
            if row.fingerprint.window != fingerprint_window(self.header.ell, self.header.window_bound):
                raise HeaderMismatchError("fingerprint window disagrees with store header")
        if key in self.keys:
            raise DuplicateKeyError(f"record for {key} already present")
        fh = self._writer()
        fh.write(serialize_row(row) + "\n")
        fh.flush()
        self.keys.add(key)

    def append_serialized(self, line: str, key: tuple[int, int]) -> None:
        """Append a pre-serialized row (the worker-pool write path)."""
        if key in self.keys:
            raise DuplicateKeyError(f"record for {key} already present")
        fh = self._writer()
        fh.write(line + "\n")
        self.keys.add(key)

    def flush(self) -> None:
        if self._fh is not None:
            self._fh.flush()

    def mark_complete(self) -> None:
        fh = self._writer()
        fh.write(COMPLETE_MARKER + "\n")
        fh.flush()
        self.complete = True

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def scan(self, predicate: Callable[[Row], bool] | None = None) -> Iterator[Row]:
        """Order-preserving filtered stream of rows from disk."""
        with open(self.path, "r", encoding="ascii", newline="\n") as fh:
            first = fh.readline()
            if not first.startswith("#gl2census"):
                raise CorruptLineError(f"{self.path} lacks a store header")
            lineno = 1
            buffered = fh.read()
        lines = buffered.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        elif lines:
            lines.pop()  # crash-cut tail
        for line in lines:
            lineno += 1
            if line.startswith("#"):
                continue
            row = parse_row(line, self.header, lineno)
            if predicate is None or predicate(row):
                yield row
