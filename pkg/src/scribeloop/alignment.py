"""Minimal-cost word alignment between reference and hypothesis.

The dynamic-programming fill is the one hot loop in the package. It runs
through numba's @njit when available; setting SCRIBELOOP_NO_NUMBA=1 (or
running without numba installed) selects a pure-numpy fallback that fills
the same matrix row by row. Both kernels produce identical matrices, so
the backtrace and every downstream metric are bit-identical either way.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .textproc import Token

try:
    from numba import njit

    _NUMBA_OK = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None
    _NUMBA_OK = False

MATCH = "match"
SUB = "sub"
DELETE = "del"
INSERT = "ins"

_ENV_FLAG = "SCRIBELOOP_NO_NUMBA"


@dataclass(frozen=True)
class AlignOp:
    """One edit step; indices are None on the side the op does not touch."""

    kind: str
    ref_index: int | None
    hyp_index: int | None


@dataclass(frozen=True)
class Alignment:
    ops: tuple[AlignOp, ...]
    s_count: int
    d_count: int
    i_count: int
    match_count: int
    n_ref: int
    n_hyp: int

    @property
    def cost(self) -> int:
        return self.s_count + self.d_count + self.i_count


def _fill_loops(ref_ids, hyp_ids, dp):
    n = ref_ids.shape[0]
    m = hyp_ids.shape[0]
    for j in range(m + 1):
        dp[0, j] = j
    for i in range(1, n + 1):
        dp[i, 0] = i
        r = ref_ids[i - 1]
        for j in range(1, m + 1):
            best = dp[i - 1, j - 1]
            if r != hyp_ids[j - 1]:
                best += 1
            dlt = dp[i - 1, j] + 1
            if dlt < best:
                best = dlt
            ins = dp[i, j - 1] + 1
            if ins < best:
                best = ins
            dp[i, j] = best
    return dp


_fill_numba = njit(cache=True)(_fill_loops) if _NUMBA_OK else None


def _fill_numpy(ref_ids, hyp_ids, dp):
    n = ref_ids.shape[0]
    m = hyp_ids.shape[0]
    col = np.arange(m + 1, dtype=np.int32)
    dp[0] = col
    t = np.empty(m + 1, dtype=np.int32)
    for i in range(1, n + 1):
        prev = dp[i - 1]
        # candidate ignoring in-row inserts: diagonal-or-delete per cell
        t[0] = i
        np.minimum(prev[:-1] + (ref_ids[i - 1] != hyp_ids), prev[1:] + 1, out=t[1:])
        # fold inserts in with a running minimum of t[k] + (j - k)
        dp[i] = np.minimum.accumulate(t - col) + col
    return dp


def use_numba() -> bool:
    """True when the jitted kernel will be used for the next alignment."""
    if os.environ.get(_ENV_FLAG, "").strip().lower() in ("1", "true", "yes"):
        return False
    return _NUMBA_OK


def _encode(ref_words: list[str], hyp_words: list[str]):
    vocab: dict[str, int] = {}

    def enc(words: list[str]) -> np.ndarray:
        arr = np.empty(len(words), dtype=np.int32)
        for k, w in enumerate(words):
            arr[k] = vocab.setdefault(w, len(vocab))
        return arr

    return enc(ref_words), enc(hyp_words)


def _words(seq: Sequence) -> list[str]:
    return [t.surface if isinstance(t, Token) else str(t) for t in seq]


def cost_matrix(ref_words: list[str], hyp_words: list[str]) -> np.ndarray:
    """Full (len(ref)+1, len(hyp)+1) edit-cost matrix, unit costs."""
    ref_ids, hyp_ids = _encode(ref_words, hyp_words)
    dp = np.empty((len(ref_words) + 1, len(hyp_words) + 1), dtype=np.int32)
    if use_numba():
        return _fill_numba(ref_ids, hyp_ids, dp)
    return _fill_numpy(ref_ids, hyp_ids, dp)


def _backtrace(dp: np.ndarray, ref_words: list[str], hyp_words: list[str]):
    # Ties resolve Match/Substitute > Delete > Insert so the script is
    # reproducible byte for byte.
    ops: list[AlignOp] = []
    i = len(ref_words)
    j = len(hyp_words)
    while i > 0 or j > 0:
        if i > 0 and j > 0:
            same = ref_words[i - 1] == hyp_words[j - 1]
            if dp[i, j] == dp[i - 1, j - 1] + (0 if same else 1):
                ops.append(AlignOp(MATCH if same else SUB, i - 1, j - 1))
                i -= 1
                j -= 1
                continue
        if i > 0 and dp[i, j] == dp[i - 1, j] + 1:
            ops.append(AlignOp(DELETE, i - 1, None))
            i -= 1
            continue
        ops.append(AlignOp(INSERT, None, j - 1))
        j -= 1
    ops.reverse()
    return tuple(ops)


def align(ref: Sequence, hyp: Sequence) -> Alignment:
    """Minimal edit script between two token sequences (unit costs).

    Accepts Token lists or plain word lists; either side may be empty.
    """
    ref_words = _words(ref)
    hyp_words = _words(hyp)
    dp = cost_matrix(ref_words, hyp_words)
    ops = _backtrace(dp, ref_words, hyp_words)
    s = sum(1 for op in ops if op.kind == SUB)
    d = sum(1 for op in ops if op.kind == DELETE)
    ins = sum(1 for op in ops if op.kind == INSERT)
    matches = sum(1 for op in ops if op.kind == MATCH)
    return Alignment(ops, s, d, ins, matches, len(ref_words), len(hyp_words))


def edit_cost(ref: Sequence, hyp: Sequence) -> int:
    """Minimal edit cost only (skips the backtrace)."""
    ref_words = _words(ref)
    hyp_words = _words(hyp)
    return int(cost_matrix(ref_words, hyp_words)[-1, -1])
