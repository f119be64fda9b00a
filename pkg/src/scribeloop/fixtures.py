"""Bundled recording-1 texts so scoring, correction, and tests run offline."""
from __future__ import annotations

import json
from importlib import resources

from .correction import MockProvider
from .metrics import TermList
from .textproc import METHOD_INITIAL_ASR, ROLE_HYPOTHESIS, ROLE_REFERENCE, Transcript

RECORDING_ID = "recording-1"

_REFERENCE = "recording1_reference.txt"
_ASR = "recording1_asr.txt"
_TERMS = "recording1_terms.txt"
_MOCK = "paper_mock_responses.json"

#: names the CLI accepts in place of file paths
FIXTURE_FILES = {
    "recording-1-reference": _REFERENCE,
    "recording-1-asr": _ASR,
    "recording-1-terms": _TERMS,
    "paper_examples": _MOCK,
}


def _data(name: str):
    return resources.files(__package__).joinpath("data", name)


def read_text(name: str) -> str:
    return _data(name).read_text(encoding="utf-8")


def reference_text() -> str:
    return read_text(_REFERENCE)


def asr_text() -> str:
    return read_text(_ASR)


def reference_transcript() -> Transcript:
    return Transcript(reference_text(), role=ROLE_REFERENCE)


def asr_transcript() -> Transcript:
    return Transcript(asr_text(), role=ROLE_HYPOTHESIS, method=METHOD_INITIAL_ASR)


def term_list() -> TermList:
    terms = tuple(
        line.strip()
        for line in read_text(_TERMS).splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    )
    return TermList(terms, name=RECORDING_ID)


def mock_responses() -> list[dict]:
    return json.loads(read_text(_MOCK))


def mock_provider(delay_fn=None) -> MockProvider:
    return MockProvider(
        [(r["sentence"], r["response"]) for r in mock_responses()], delay_fn
    )


def resolve_fixture(name_or_path: str) -> str | None:
    """Text for a known fixture name, or None when it's a plain path."""
    fname = FIXTURE_FILES.get(name_or_path)
    return read_text(fname) if fname else None
