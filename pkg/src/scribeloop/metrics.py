"""Error-rate metrics and comparison reports.

WER is the unit-cost edit distance over normalized words divided by the
reference length. KMTER is a checklist over a curated term list: a term
counts as correct when its normalized word sequence occurs contiguously
anywhere in the hypothesis.
"""
from __future__ import annotations

import io
import csv as _csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from . import textproc
from .alignment import Alignment, align

METHOD_ORDER = (
    textproc.METHOD_INITIAL_ASR,
    textproc.METHOD_ONE_SET,
    textproc.METHOD_SENTENCE,
    textproc.METHOD_MANUAL_LLM,
)

_METHOD_LABELS = {
    textproc.METHOD_INITIAL_ASR: "Initial ASR",
    textproc.METHOD_ONE_SET: "One Set",
    textproc.METHOD_SENTENCE: "Sentence by Sentence",
    textproc.METHOD_MANUAL_LLM: "Manual+LLM",
}

CSV_HEADER = ("recording", "method", "wer", "kmter", "s", "d", "i", "n")


class EmptyReferenceError(ValueError):
    """WER is undefined for an empty reference."""


def wer(alignment: Alignment) -> float:
    """(S + D + I) / N for one alignment; may exceed 1.0."""
    if alignment.n_ref == 0:
        raise EmptyReferenceError("reference has no tokens; WER is undefined")
    return alignment.cost / alignment.n_ref


def score_texts(ref_text: str, hyp_text: str) -> tuple[Alignment, float]:
    """Tokenize, align and score a reference/hypothesis text pair."""
    alignment = align(textproc.tokenize(ref_text), textproc.tokenize(hyp_text))
    return alignment, wer(alignment)


@dataclass(frozen=True)
class TermList:
    """Curated key terms (1..5 words each), unique after normalization."""

    terms: tuple[str, ...]
    name: str = "terms"

    def __post_init__(self):
        if not self.terms:
            raise ValueError("term list is empty")
        seen = set()
        for term in self.terms:
            words = textproc.surfaces(term)
            if not words:
                raise ValueError(f"term {term!r} normalizes to nothing")
            if len(words) > 5:
                raise ValueError(f"term {term!r} is longer than 5 words")
            key = tuple(words)
            if key in seen:
                raise ValueError(f"duplicate term after normalization: {term!r}")
            seen.add(key)

    @classmethod
    def from_file(cls, path: str | Path, name: str | None = None) -> "TermList":
        """One term per line, UTF-8; blank lines and # comments ignored."""
        path = Path(path)
        terms = []
        for line in path.read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if line and not line.startswith("#"):
                terms.append(line)
        return cls(tuple(terms), name=name or path.stem)


@dataclass(frozen=True)
class TermVerdict:
    term: str
    correct: bool


@dataclass(frozen=True)
class KmterResult:
    rate: float
    verdicts: tuple[TermVerdict, ...]

    @property
    def total(self) -> int:
        return len(self.verdicts)

    @property
    def incorrect(self) -> int:
        return sum(1 for v in self.verdicts if not v.correct)


def _contains(haystack: list[str], needle: list[str]) -> bool:
    n = len(needle)
    if n == 0 or n > len(haystack):
        return False
    return any(haystack[k:k + n] == needle for k in range(len(haystack) - n + 1))


def kmter(terms: TermList, hyp: Sequence) -> KmterResult:
    """Fraction of terms absent from the hypothesis, with per-term verdicts.

    ``hyp`` is a Token or word list; presence is checked once per term over
    the whole hypothesis.
    """
    words = [
        t.surface if isinstance(t, textproc.Token) else textproc.normalize_token(str(t))
        for t in hyp
    ]
    words = [w for w in words if w]
    verdicts = tuple(
        TermVerdict(term, _contains(words, textproc.surfaces(term)))
        for term in terms.terms
    )
    bad = sum(1 for v in verdicts if not v.correct)
    return KmterResult(bad / len(verdicts), verdicts)


@dataclass(frozen=True)
class MetricsRow:
    """One recording/method cell pair of the comparison table."""

    recording_id: str
    method: str
    s: int
    d: int
    i: int
    n: int
    kmter: float | None = None

    def __post_init__(self):
        if self.method not in METHOD_ORDER:
            raise ValueError(f"unknown method {self.method!r}")
        if min(self.s, self.d, self.i) < 0 or self.n <= 0:
            raise ValueError("counts must be non-negative with n > 0")
        if self.kmter is not None and not 0.0 <= self.kmter <= 1.0:
            raise ValueError("kmter must be within [0, 1]")

    @property
    def wer(self) -> float:
        return (self.s + self.d + self.i) / self.n


@dataclass(frozen=True)
class MetricsReport:
    rows: tuple[MetricsRow, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = _csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow(
                (
                    r.recording_id,
                    r.method,
                    f"{r.wer:.6f}",
                    "" if r.kmter is None else f"{r.kmter:.6f}",
                    r.s,
                    r.d,
                    r.i,
                    r.n,
                )
            )
        return buf.getvalue()

    def to_table(self) -> str:
        """Fixed-width comparison table, percentages with one decimal."""
        recordings: list[str] = []
        cells: dict[tuple[str, str], MetricsRow] = {}
        for r in self.rows:
            if r.recording_id not in recordings:
                recordings.append(r.recording_id)
            cells[(r.recording_id, r.method)] = r

        rec_w = max(len("Recording"), *(len(x) for x in recordings))
        col_w = 7
        top = ["Recording".ljust(rec_w)]
        sub = [" " * rec_w]
        for method in METHOD_ORDER:
            label = _METHOD_LABELS[method]
            span = col_w * 2 + 1
            top.append(label.ljust(span))
            sub.append(("WER".ljust(col_w) + " " + "KMTER".ljust(col_w)))
        lines = ["  ".join(top).rstrip(), "  ".join(sub).rstrip()]
        for rec in recordings:
            parts = [rec.ljust(rec_w)]
            for method in METHOD_ORDER:
                row = cells.get((rec, method))
                if row is None:
                    w_txt, k_txt = "-", "-"
                else:
                    w_txt = f"{row.wer * 100:.1f}"
                    k_txt = "-" if row.kmter is None else f"{row.kmter * 100:.1f}"
                parts.append(w_txt.ljust(col_w) + " " + k_txt.ljust(col_w))
            lines.append("  ".join(parts).rstrip())
        return "\n".join(lines) + "\n"


def build_report(rows: Iterable[MetricsRow]) -> MetricsReport:
    """Group rows by recording in method order; duplicates are rejected."""
    rows = list(rows)
    if not rows:
        raise ValueError("no metrics rows")
    seen = set()
    for r in rows:
        key = (r.recording_id, r.method)
        if key in seen:
            raise ValueError(f"duplicate row for {key}")
        seen.add(key)
    recordings: list[str] = []
    for r in rows:
        if r.recording_id not in recordings:
            recordings.append(r.recording_id)
    ordered = sorted(
        rows,
        key=lambda r: (recordings.index(r.recording_id), METHOD_ORDER.index(r.method)),
    )
    return MetricsReport(tuple(ordered))


def parse_report_csv(text: str) -> list[MetricsRow]:
    """Parse the machine-readable report back into rows.

    Counts are exact; wer is recomputed from them. kmter carries the six
    decimals the format stores.
    """
    reader = _csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != CSV_HEADER:
        raise ValueError(f"bad report header: {header!r}")
    rows = []
    for rec in reader:
        if not rec:
            continue
        recording, method, _wer, km, s, d, i, n = rec
        rows.append(
            MetricsRow(
                recording_id=recording,
                method=method,
                s=int(s),
                d=int(d),
                i=int(i),
                n=int(n),
                kmter=None if km == "" else float(km),
            )
        )
    return rows
