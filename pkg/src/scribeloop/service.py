"""HTTP layer over review sessions: create/review/finalize plus audio
playback and live metrics for the companion UI."""
from __future__ import annotations

import threading
from pathlib import Path

from fastapi import Body, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import fixtures, review, textproc
from ._version import __version__
from .config import ServiceConfig
from .correction import (
    HttpProvider,
    MockProvider,
    ProviderError,
    Suggestion,
    correct_sentences,
)
from .metrics import MetricsRow, TermList, build_report, kmter, score_texts

_AUDIO_TYPES = {".wav": "audio/wav", ".mp3": "audio/mpeg", ".m4a": "audio/mp4"}


class ApiError(Exception):
    """Carries the uniform {error_code, message, details} error body."""

    def __init__(self, status: int, error_code: str, message: str, details=None):
        super().__init__(message)
        self.status = status
        self.error_code = error_code
        self.message = message
        self.details = details if details is not None else {}

    def response(self) -> JSONResponse:
        return JSONResponse(
            status_code=self.status,
            content={
                "error_code": self.error_code,
                "message": self.message,
                "details": self.details,
            },
        )


class _SessionLocks:
    """One lock per session id; mutations to a session are single-writer."""

    def __init__(self):
        self._guard = threading.Lock()
        self._locks: dict[str, threading.Lock] = {}

    def get(self, session_id: str) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault(session_id, threading.Lock())


def _identity_suggestions(sentences) -> list[Suggestion]:
    meta = {"model": "none", "latency_s": 0.0, "raw_response": "", "request_params": {}}
    return [
        Suggestion(
            sentence_index=s.index,
            original_text=s.text,
            corrected_text=s.text,
            provider_meta=dict(meta),
        )
        for s in sentences
    ]


def _sentence_view(session: review.ReviewSession, index: int) -> dict:
    decision = session.decisions.get(index)
    suggestion = session.suggestions[index]
    return {
        "index": index,
        "asr_text": session.sentences[index],
        "suggestion_text": suggestion.corrected_text,
        "rationale": list(suggestion.rationale),
        "decision": None
        if decision is None
        else {
            "choice": decision.choice,
            "text": decision.text,
            "note": decision.note,
            "decided_at": decision.decided_at,
        },
    }


def _summary(session: review.ReviewSession) -> dict:
    return {
        "session_id": session.session_id,
        "recording_id": session.recording_id,
        "status": session.status,
        "sentence_count": len(session.sentences),
        "decided_count": session.decided_count,
        "created_at": session.created_at,
        "updated_at": session.updated_at,
    }


def create_app(config: ServiceConfig) -> FastAPI:
    app = FastAPI(title="scribeloop", version=__version__, docs_url=None, redoc_url=None)
    if config.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(config.cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )
    locks = _SessionLocks()

    if config.mock_responses is not None:
        provider = MockProvider.from_file(config.mock_responses)
    elif config.provider is not None:
        provider = HttpProvider(config.provider)
    else:
        provider = None

    @app.exception_handler(ApiError)
    def _api_error(_request: Request, exc: ApiError):
        return exc.response()

    @app.exception_handler(StarletteHTTPException)
    def _http_error(_request: Request, exc: StarletteHTTPException):
        code = {404: "not_found", 405: "method_not_allowed"}.get(exc.status_code, "http_error")
        return ApiError(exc.status_code, code, str(exc.detail)).response()

    @app.exception_handler(RequestValidationError)
    def _validation_error(_request: Request, exc: RequestValidationError):
        return ApiError(422, "invalid_request", "request body failed validation",
                        {"errors": exc.errors()}).response()

    def _load(session_id: str) -> review.ReviewSession:
        try:
            return review.load_session(session_id, config.data_dir)
        except review.UnknownSessionError:
            raise ApiError(404, "unknown_session", f"no session {session_id!r}")
        except review.SessionError as exc:
            raise ApiError(500, "corrupt_session", str(exc))

    def _audio_file(recording_id: str) -> Path | None:
        if config.audio_dir is None:
            return None
        for ext in _AUDIO_TYPES:
            candidate = Path(config.audio_dir) / f"{recording_id}{ext}"
            if candidate.is_file():
                return candidate
        return None

    def _fetch_asr(audio_ref: str) -> str:
        # Transcripts live next to the audio as <ref>.asr.txt; the bundled
        # recording is always resolvable so demos work with no audio dir.
        if config.audio_dir is not None:
            candidate = Path(config.audio_dir) / f"{audio_ref}.asr.txt"
            if candidate.is_file():
                return candidate.read_text(encoding="utf-8")
        if audio_ref == fixtures.RECORDING_ID:
            return fixtures.asr_text()
        raise ApiError(404, "unknown_recording",
                       f"no transcript source for audio_ref {audio_ref!r}")

    def _reference_for(recording_id: str) -> str | None:
        if config.reference_dir is not None:
            candidate = Path(config.reference_dir) / f"{recording_id}.txt"
            if candidate.is_file():
                return candidate.read_text(encoding="utf-8")
        if recording_id == fixtures.RECORDING_ID:
            return fixtures.reference_text()
        return None

    def _terms_for(recording_id: str) -> TermList | None:
        if config.reference_dir is not None:
            candidate = Path(config.reference_dir) / f"{recording_id}.terms.txt"
            if candidate.is_file():
                return TermList.from_file(candidate, name=recording_id)
        if recording_id == fixtures.RECORDING_ID:
            return fixtures.term_list()
        return None

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/sessions", status_code=201)
    def create_session(payload: dict = Body(...)):
        recording_id = payload.get("recording_id")
        if not isinstance(recording_id, str) or not recording_id.strip():
            raise ApiError(422, "invalid_request", "recording_id is required")
        asr_text = payload.get("asr_transcript")
        asr_fetch = payload.get("asr_fetch")
        if (asr_text is None) == (asr_fetch is None):
            raise ApiError(422, "invalid_request",
                           "exactly one of asr_transcript or asr_fetch is required")
        if asr_fetch is not None:
            audio_ref = (asr_fetch or {}).get("audio_ref") if isinstance(asr_fetch, dict) else None
            if not audio_ref:
                raise ApiError(422, "invalid_request", "asr_fetch.audio_ref is required")
            asr_text = _fetch_asr(audio_ref)
        if not isinstance(asr_text, str) or not asr_text.strip():
            raise ApiError(422, "invalid_request", "asr transcript is empty")

        sentences = textproc.segment_sentences(asr_text)
        if not sentences:
            raise ApiError(422, "invalid_request", "transcript has no sentences")
        if payload.get("run_llm"):
            if provider is None:
                raise ApiError(400, "no_provider",
                               "run_llm requested but no provider is configured")
            try:
                suggestions = correct_sentences(sentences, provider)
            except ProviderError as exc:
                raise ApiError(502, "provider_error", str(exc))
        else:
            suggestions = _identity_suggestions(sentences)

        audio = _audio_file(recording_id)
        session = review.create_session(
            recording_id,
            sentences,
            suggestions,
            audio_path=str(audio) if audio else None,
        )
        review.save_session(session, config.data_dir)
        return review.session_to_record(session)

    @app.get("/sessions")
    def list_sessions():
        return {"sessions": [_summary(s) for s in review.list_sessions(config.data_dir)]}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return review.session_to_record(_load(session_id))

    @app.get("/sessions/{session_id}/sentences")
    def get_sentences(session_id: str):
        session = _load(session_id)
        return {"sentences": [_sentence_view(session, i) for i in range(len(session.sentences))]}

    @app.post("/sessions/{session_id}/sentences/{index}/decision")
    def post_decision(session_id: str, index: int, payload: dict = Body(...)):
        choice = payload.get("choice")
        if choice not in (review.KEEP_ASR, review.ACCEPT_LLM, review.MANUAL):
            raise ApiError(422, "invalid_request",
                           "choice must be keep_asr, accept_llm, or manual")
        with locks.get(session_id):
            session = _load(session_id)
            try:
                decision = review.Decision(
                    choice=choice,
                    text=payload.get("text"),
                    note=payload.get("note"),
                )
                review.record_decision(session, index, decision)
            except review.SessionFinalizedError as exc:
                raise ApiError(409, "session_finalized", str(exc))
            except review.InvalidSentenceIndexError as exc:
                raise ApiError(404, "invalid_index", str(exc))
            except ValueError as exc:
                raise ApiError(422, "invalid_request", str(exc))
            review.save_session(session, config.data_dir)
            return _sentence_view(session, index)

    @app.post("/sessions/{session_id}/finalize")
    def finalize(session_id: str):
        with locks.get(session_id):
            session = _load(session_id)
            try:
                final = review.finalize(session)
            except review.UndecidedSentencesError as exc:
                raise ApiError(409, "undecided_sentences",
                               "all sentences need a decision before finalizing",
                               {"indices": list(exc.indices)})
            review.save_session(session, config.data_dir)
            return {"final_text": final.text, "status": session.status}

    @app.get("/sessions/{session_id}/metrics")
    def get_metrics(session_id: str):
        session = _load(session_id)
        reference = _reference_for(session.recording_id)
        if reference is None:
            raise ApiError(404, "no_reference",
                           f"no reference transcript configured for "
                           f"{session.recording_id!r}")
        terms = _terms_for(session.recording_id)

        def row(method: str, text: str) -> MetricsRow:
            alignment, _ = score_texts(reference, text)
            rate = None
            if terms is not None:
                rate = kmter(terms, textproc.tokenize(text)).rate
            return MetricsRow(
                recording_id=session.recording_id,
                method=method,
                s=alignment.s_count,
                d=alignment.d_count,
                i=alignment.i_count,
                n=alignment.n_ref,
                kmter=rate,
            )

        rows = [
            row(textproc.METHOD_INITIAL_ASR, " ".join(session.sentences)),
            row(textproc.METHOD_SENTENCE,
                " ".join(s.corrected_text for s in session.suggestions)),
        ]
        if session.status == review.FINALIZED:
            rows.append(row(textproc.METHOD_MANUAL_LLM, session.final_text))
        report = build_report(rows)
        return {
            "recording_id": session.recording_id,
            "rows": [
                {
                    "recording": r.recording_id,
                    "method": r.method,
                    "wer": r.wer,
                    "kmter": r.kmter,
                    "s": r.s,
                    "d": r.d,
                    "i": r.i,
                    "n": r.n,
                }
                for r in report.rows
            ],
            "csv": report.to_csv(),
        }

    @app.get("/audio/{recording_id}")
    def get_audio(recording_id: str, request: Request):
        path = _audio_file(recording_id)
        if path is None:
            raise ApiError(404, "no_audio", f"no audio file for {recording_id!r}")
        data = path.read_bytes()
        media_type = _AUDIO_TYPES[path.suffix]
        range_header = request.headers.get("range")
        if not range_header:
            return Response(data, media_type=media_type,
                            headers={"Accept-Ranges": "bytes"})
        try:
            unit, _, spans = range_header.partition("=")
            if unit.strip().lower() != "bytes":
                raise ValueError
            start_s, _, end_s = spans.split(",")[0].strip().partition("-")
            start = int(start_s) if start_s else 0
            end = int(end_s) if end_s else len(data) - 1
            if start_s == "":  # suffix form: last N bytes
                start = max(len(data) - int(end_s), 0)
                end = len(data) - 1
            if start > end or start >= len(data):
                raise ValueError
        except ValueError:
            return Response(
                status_code=416,
                headers={"Content-Range": f"bytes */{len(data)}"},
            )
        end = min(end, len(data) - 1)
        chunk = data[start:end + 1]
        return Response(
            chunk,
            status_code=206,
            media_type=media_type,
            headers={
                "Accept-Ranges": "bytes",
                "Content-Range": f"bytes {start}-{end}/{len(data)}",
            },
        )

    return app


def serve(config: ServiceConfig):
    """Run the service until interrupted."""
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port)
