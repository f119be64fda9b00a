"""Per-sentence human review over (ASR text, LLM suggestion, manual edit):
decision recording, JSON persistence, and finalization."""
from __future__ import annotations

import json
import os
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from . import textproc
from .alignment import edit_cost
from .correction import Suggestion, suggestion_from_dict, suggestion_to_dict
from .textproc import Transcript

KEEP_ASR = "keep_asr"
ACCEPT_LLM = "accept_llm"
MANUAL = "manual"
_CHOICES = (KEEP_ASR, ACCEPT_LLM, MANUAL)

IN_PROGRESS = "in_progress"
FINALIZED = "finalized"

SCHEMA_VERSION = 1


class SessionError(Exception):
    pass


class UnknownSessionError(SessionError):
    pass


class SchemaVersionError(SessionError):
    pass


class SessionFinalizedError(SessionError):
    pass


class InvalidSentenceIndexError(SessionError):
    pass


class UndecidedSentencesError(SessionError):
    def __init__(self, indices: Sequence[int]):
        self.indices = tuple(indices)
        super().__init__(f"undecided sentence indices: {list(self.indices)}")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


@dataclass(frozen=True)
class Decision:
    choice: str
    text: str | None = None
    note: str | None = None
    decided_at: str = field(default_factory=_now)

    def __post_init__(self):
        if self.choice not in _CHOICES:
            raise ValueError(f"unknown choice {self.choice!r}")
        if self.choice == MANUAL and not (self.text or "").strip():
            raise ValueError("manual decision needs non-empty text")


@dataclass
class ReviewSession:
    session_id: str
    recording_id: str
    sentences: tuple[str, ...]
    suggestions: tuple[Suggestion, ...]
    audio_path: str | None = None
    decisions: dict[int, Decision] = field(default_factory=dict)
    status: str = IN_PROGRESS
    final_text: str | None = None
    created_at: str = field(default_factory=_now)
    updated_at: str = field(default_factory=_now)

    @property
    def decided_count(self) -> int:
        return len(self.decisions)


def create_session(
    recording_id: str,
    sentences: Sequence,
    suggestions: Sequence[Suggestion],
    audio_path: str | None = None,
    session_id: str | None = None,
) -> ReviewSession:
    """New in-progress session; suggestion indices must be exactly 0..n-1."""
    texts = tuple(s.text if hasattr(s, "text") else str(s) for s in sentences)
    if not texts:
        raise ValueError("session needs at least one sentence")
    got = [s.sentence_index for s in suggestions]
    if got != list(range(len(texts))):
        raise ValueError(
            f"suggestion indices {got} do not match sentence indices "
            f"0..{len(texts) - 1}"
        )
    return ReviewSession(
        session_id=session_id or uuid.uuid4().hex,
        recording_id=recording_id,
        sentences=texts,
        suggestions=tuple(suggestions),
        audio_path=audio_path,
    )


def record_decision(session: ReviewSession, index: int, decision: Decision) -> ReviewSession:
    """Store (or overwrite) the decision for one sentence."""
    if session.status == FINALIZED:
        raise SessionFinalizedError("session is finalized; decisions are closed")
    if not 0 <= index < len(session.sentences):
        raise InvalidSentenceIndexError(f"no sentence with index {index}")
    session.decisions[index] = decision
    session.updated_at = _now()
    return session


def resolve_text(session: ReviewSession, index: int) -> str:
    """The text the decision at ``index`` selects."""
    decision = session.decisions[index]
    if decision.choice == KEEP_ASR:
        return session.sentences[index]
    if decision.choice == ACCEPT_LLM:
        return session.suggestions[index].corrected_text
    return decision.text  # manual


def undecided_indices(session: ReviewSession) -> list[int]:
    return [i for i in range(len(session.sentences)) if i not in session.decisions]


def finalize(session: ReviewSession) -> Transcript:
    """Join the per-sentence selections into the final transcript.

    Finalizing an already-finalized session re-reads the stored text, so
    the output is idempotent.
    """
    if session.status == FINALIZED:
        return Transcript(
            session.final_text,
            role=textproc.ROLE_FINAL,
            method=textproc.METHOD_MANUAL_LLM,
        )
    missing = undecided_indices(session)
    if missing:
        raise UndecidedSentencesError(missing)
    text = " ".join(resolve_text(session, i) for i in range(len(session.sentences)))
    session.final_text = text
    session.status = FINALIZED
    session.updated_at = _now()
    return Transcript(text, role=textproc.ROLE_FINAL, method=textproc.METHOD_MANUAL_LLM)


def session_to_record(session: ReviewSession) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "session_id": session.session_id,
        "recording_id": session.recording_id,
        "audio_path": session.audio_path,
        "sentences": [
            {"index": i, "text": t} for i, t in enumerate(session.sentences)
        ],
        "suggestions": [suggestion_to_dict(s) for s in session.suggestions],
        "decisions": {
            str(i): {
                "choice": d.choice,
                "text": d.text,
                "note": d.note,
                "decided_at": d.decided_at,
            }
            for i, d in sorted(session.decisions.items())
        },
        "status": session.status,
        "final_text": session.final_text,
        "created_at": session.created_at,
        "updated_at": session.updated_at,
    }


def session_from_record(record: dict) -> ReviewSession:
    version = record.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionError(
            f"unsupported session schema version {version!r} (expected {SCHEMA_VERSION})"
        )
    try:
        sentences = tuple(s["text"] for s in record["sentences"])
        suggestions = tuple(suggestion_from_dict(s) for s in record["suggestions"])
        decisions = {
            int(i): Decision(
                choice=d["choice"],
                text=d.get("text"),
                note=d.get("note"),
                decided_at=d["decided_at"],
            )
            for i, d in record["decisions"].items()
        }
        return ReviewSession(
            session_id=record["session_id"],
            recording_id=record["recording_id"],
            sentences=sentences,
            suggestions=suggestions,
            audio_path=record.get("audio_path"),
            decisions=decisions,
            status=record["status"],
            final_text=record.get("final_text"),
            created_at=record["created_at"],
            updated_at=record["updated_at"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SessionError(f"corrupt session record: {exc}") from exc


def session_path(session_id: str, data_dir: str | Path) -> Path:
    return Path(data_dir) / f"{session_id}.json"


def save_session(session: ReviewSession, data_dir: str | Path) -> Path:
    """Write the session as one JSON document, atomically."""
    path = session_path(session.session_id, data_dir)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".json.tmp")
    tmp.write_text(
        json.dumps(session_to_record(session), indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    os.replace(tmp, path)
    return path


def load_session(session_id: str, data_dir: str | Path) -> ReviewSession:
    path = session_path(session_id, data_dir)
    if not path.exists():
        raise UnknownSessionError(f"no session {session_id!r} under {data_dir}")
    try:
        record = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SessionError(f"corrupt session file {path}: {exc}") from exc
    return session_from_record(record)


def list_sessions(data_dir: str | Path) -> list[ReviewSession]:
    sessions = []
    for path in sorted(Path(data_dir).glob("*.json")):
        sessions.append(load_session(path.stem, data_dir))
    return sessions


def reference_guided_decisions(
    session: ReviewSession, reference_text: str
) -> dict[int, Decision]:
    """Simulated reviewer that knows the reference: per sentence, keep the
    LLM suggestion only when swapping it in lowers the whole-transcript
    edit cost, otherwise keep the ASR text.

    Sweeps sentences in order against the running choice, so the result
    never costs more than keeping every ASR sentence.
    """
    ref_tokens = textproc.tokenize(reference_text)
    current = list(session.sentences)
    cost = edit_cost(ref_tokens, textproc.tokenize(" ".join(current)))
    picks: dict[int, Decision] = {}
    for i, suggestion in enumerate(session.suggestions):
        candidate = suggestion.corrected_text
        if candidate == current[i]:
            picks[i] = Decision(KEEP_ASR)
            continue
        trial = current.copy()
        trial[i] = candidate
        trial_cost = edit_cost(ref_tokens, textproc.tokenize(" ".join(trial)))
        if trial_cost < cost:
            picks[i] = Decision(ACCEPT_LLM)
            current = trial
            cost = trial_cost
        else:
            picks[i] = Decision(KEEP_ASR)
    return picks
