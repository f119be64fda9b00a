"""Text primitives shared by scoring, correction and review: token
normalization, tokenization, and sentence segmentation for dictated notes."""
from __future__ import annotations

import re
from dataclasses import dataclass, field

ROLE_REFERENCE = "reference"
ROLE_HYPOTHESIS = "hypothesis"
ROLE_CORRECTED = "corrected"
ROLE_FINAL = "final"

METHOD_INITIAL_ASR = "initial_asr"
METHOD_ONE_SET = "one_set"
METHOD_SENTENCE = "sentence_by_sentence"
METHOD_MANUAL_LLM = "manual_llm"

# Letter-period alternation ("p.o.", "u.s.a."). Tokens matching this keep
# their trailing period; sentence splitting never breaks after them.
_ABBREV = re.compile(r"(?:[a-z]\.){2,}")
_WORD = re.compile(r"\S+")
_TERMINALS = ".?!"


@dataclass(frozen=True)
class Token:
    """A normalized word plus the character span it came from."""

    surface: str
    start: int
    end: int

    @property
    def source_span(self) -> tuple[int, int]:
        return (self.start, self.end)


@dataclass(frozen=True)
class Sentence:
    """One segmented sentence: raw text plus its span in the source text."""

    index: int
    text: str
    start: int
    end: int
    tokens: tuple[Token, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class Transcript:
    """Raw transcript text tagged by its role in the pipeline."""

    text: str
    role: str = ROLE_HYPOTHESIS
    method: str | None = None

    def tokens(self) -> list[Token]:
        return tokenize(self.text)

    def sentences(self) -> list[Sentence]:
        return segment_sentences(self.text)


def normalize_token(raw: str) -> str:
    """Normalize one whitespace-delimited piece to a comparable word.

    Lowercases and strips leading/trailing punctuation. Interior characters
    (digits, slashes, hyphens, percent signs, periods) survive, and a token
    that is a letter-period abbreviation like "p.o." keeps its trailing
    period. Returns "" for punctuation-only input; callers drop those.
    """
    t = raw.strip().lower()
    i = 0
    while i < len(t) and not t[i].isalnum():
        i += 1
    t = t[i:]
    m = _ABBREV.match(t)
    if m and not any(c.isalnum() for c in t[m.end():]):
        return m.group()
    j = len(t)
    while j > 0 and not t[j - 1].isalnum():
        j -= 1
    return t[:j]


def tokenize(text: str) -> list[Token]:
    """Split on whitespace and normalize each piece.

    Punctuation-only pieces are dropped. Token spans cover the raw
    whitespace-delimited piece in the input text, so they are
    non-overlapping and strictly increasing.
    """
    tokens: list[Token] = []
    for m in _WORD.finditer(text):
        surface = normalize_token(m.group())
        if surface:
            tokens.append(Token(surface, m.start(), m.end()))
    return tokens


def surfaces(text: str) -> list[str]:
    """Normalized word list of ``text`` (token surfaces only)."""
    return [t.surface for t in tokenize(text)]


def _abbrev_before(text: str, pos: int) -> bool:
    # Word containing the terminator run that ends at pos, minus any
    # leading punctuation, e.g. "(p.o." -> "p.o.".
    w = pos
    while w > 0 and not text[w - 1].isspace():
        w -= 1
    word = text[w:pos].lower()
    k = 0
    while k < len(word) and not word[k].isalnum():
        k += 1
    return bool(_ABBREV.fullmatch(word[k:]))


def segment_sentences(text: str) -> list[Sentence]:
    """Split text into sentences after ". ", "? ", "! " and at newlines.

    A terminator inside a letter-period abbreviation ("p.o. daily") never
    splits. The dictated word "Period" is ordinary text, not punctuation.
    Sentence spans cover the non-whitespace content, so rejoining the spans
    with the whitespace between them reconstructs the input exactly.
    """
    sentences: list[Sentence] = []
    n = len(text)
    i = 0
    while i < n:
        while i < n and text[i].isspace():
            i += 1
        if i >= n:
            break
        start = i
        end = None
        j = i
        while j < n:
            c = text[j]
            if c == "\n":
                end = j
                break
            if c in _TERMINALS:
                k = j + 1
                while k < n and text[k] in _TERMINALS:
                    k += 1
                if (k >= n or text[k].isspace()) and not _abbrev_before(text, k):
                    end = k
                    break
                j = k
                continue
            j += 1
        if end is None:
            end = n
        while end > start and text[end - 1].isspace():
            end -= 1
        raw = text[start:end]
        toks = tuple(
            Token(t.surface, t.start + start, t.end + start) for t in tokenize(raw)
        )
        sentences.append(Sentence(len(sentences), raw, start, end, toks))
        i = end
    return sentences


def reconstruct(text: str, sentences: list[Sentence]) -> str:
    """Rebuild the original text from sentence spans plus the gaps between
    them; equals ``text`` for any output of segment_sentences."""
    parts: list[str] = []
    last = 0
    for s in sentences:
        parts.append(text[last:s.start])
        parts.append(s.text)
        last = s.end
    parts.append(text[last:])
    return "".join(parts)
