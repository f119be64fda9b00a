"""LLM correction passes: prompt building, provider transport, response
parsing, and the whole-document / per-sentence pipelines."""
from __future__ import annotations

import json
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import requests

from . import textproc
from .textproc import Sentence, Transcript

SLOT = "{...}"

ONE_SET_TEMPLATE = (
    "Here is a text from a medical transcript obtained from an ASR. It might "
    "contain some error, for example, wrong medical term transcribed. Can you "
    "help me correct it by replacing the words that you think are most likely "
    "the wrong ones, with words that you think are most possibly the right "
    "word in this context? You can also add words or delete words. The words "
    "are mostly in the field of cardiology, so please try to relate to "
    "cardiological terms. If you think it is correct already, leave it "
    "without any change. Here is the text: {...}"
)

SENTENCE_TEMPLATE = (
    "Here is a sentence from a medical transcript obtained from an ASR. It "
    "might contain some error, for example, wrong medical term transcribed. "
    "Can you help me correct it by replacing the words that you think are "
    "most likely the wrong ones, with words that you think are most possibly "
    "the right word in this context? You can also add words or delete words. "
    "The words are mostly in the field of cardiology, so please try to relate "
    "to cardiological terms. If you think it is correct already, leave it "
    "without any change. Here is the sentence: {...}"
)


@dataclass(frozen=True)
class PromptTemplate:
    mode: str  # "one_set" | "sentence"
    template_text: str

    def render(self, payload: str) -> str:
        if not payload.strip():
            raise ValueError("prompt payload is empty")
        return self.template_text.replace(SLOT, payload, 1)


ONE_SET_PROMPT = PromptTemplate("one_set", ONE_SET_TEMPLATE)
SENTENCE_PROMPT = PromptTemplate("sentence", SENTENCE_TEMPLATE)


def build_one_set_prompt(text: str) -> str:
    """Whole-document correction prompt with ``text`` in the slot."""
    return ONE_SET_PROMPT.render(text)


def build_sentence_prompt(sentence: str) -> str:
    """Per-sentence correction prompt with ``sentence`` in the slot."""
    return SENTENCE_PROMPT.render(sentence)


class ProviderError(Exception):
    """Base class for completion-provider failures."""


class ProviderTimeoutError(ProviderError):
    pass


class ProviderAuthError(ProviderError):
    pass


class ProviderHTTPError(ProviderError):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status


class RetriesExhaustedError(ProviderError):
    pass


@dataclass(frozen=True)
class ProviderConfig:
    """Where and how to reach a chat-completion style endpoint.

    The API key is read from the environment variable named by
    ``api_key_env`` at request time and never persisted anywhere.
    """

    endpoint: str
    model: str
    api_key_env: str | None = None
    timeout_s: float = 30.0
    max_retries: int = 2
    parallelism: int = 4
    backoff_base_s: float = 0.5

    def __post_init__(self):
        if not self.endpoint:
            raise ValueError("endpoint is required")
        if not self.model:
            raise ValueError("model is required")
        if self.timeout_s <= 0:
            raise ValueError("timeout_s must be > 0")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")


@dataclass(frozen=True)
class Suggestion:
    """Parsed correction for one sentence."""

    sentence_index: int
    original_text: str
    corrected_text: str
    rationale: tuple[str, ...] = ()
    provider_meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.corrected_text:
            raise ValueError("corrected_text is empty")


def suggestion_to_dict(s: Suggestion) -> dict:
    return {
        "sentence_index": s.sentence_index,
        "original_text": s.original_text,
        "corrected_text": s.corrected_text,
        "rationale": list(s.rationale),
        "provider_meta": dict(s.provider_meta),
    }


def suggestion_from_dict(d: dict) -> Suggestion:
    return Suggestion(
        sentence_index=int(d["sentence_index"]),
        original_text=d["original_text"],
        corrected_text=d["corrected_text"],
        rationale=tuple(d.get("rationale", ())),
        provider_meta=dict(d.get("provider_meta", {})),
    )


class HttpProvider:
    """Chat-completion client with exponential backoff on transient errors."""

    def __init__(self, config: ProviderConfig):
        self.config = config

    @property
    def model(self) -> str:
        return self.config.model

    @property
    def parallelism(self) -> int:
        return self.config.parallelism

    def _headers(self) -> dict:
        import os

        headers = {"Content-Type": "application/json"}
        if self.config.api_key_env:
            key = os.environ.get(self.config.api_key_env, "")
            if key:
                headers["Authorization"] = f"Bearer {key}"
        return headers

    def complete(self, prompt: str) -> str:
        cfg = self.config
        body = {
            "model": cfg.model,
            "messages": [{"role": "user", "content": prompt}],
        }
        attempts = cfg.max_retries + 1
        last: ProviderError | None = None
        for attempt in range(attempts):
            try:
                resp = requests.post(
                    cfg.endpoint,
                    json=body,
                    headers=self._headers(),
                    timeout=cfg.timeout_s,
                )
            except requests.Timeout as exc:
                last = ProviderTimeoutError(f"request timed out after {cfg.timeout_s}s")
                last.__cause__ = exc
            except requests.RequestException as exc:
                last = ProviderError(f"transport error: {exc}")
                last.__cause__ = exc
            else:
                if 200 <= resp.status_code < 300:
                    return _extract_content(resp)
                if resp.status_code in (401, 403):
                    raise ProviderAuthError(
                        f"authentication failed (HTTP {resp.status_code})"
                    )
                err = ProviderHTTPError(
                    resp.status_code, f"HTTP {resp.status_code}: {resp.text[:200]}"
                )
                if resp.status_code < 500 and resp.status_code != 429:
                    raise err
                last = err
            if attempt < attempts - 1:
                time.sleep(cfg.backoff_base_s * (2 ** attempt))
        if attempts == 1 and last is not None:
            raise last
        raise RetriesExhaustedError(
            f"gave up after {attempts} attempts: {last}"
        ) from last


def _extract_content(resp) -> str:
    try:
        payload = resp.json()
        choice = payload["choices"][0]
        if "message" in choice:
            return choice["message"]["content"]
        return choice["text"]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise ProviderError(f"unexpected response shape: {exc}") from exc


def complete(config: ProviderConfig, prompt: str) -> str:
    """One completion against ``config``'s endpoint."""
    return HttpProvider(config).complete(prompt)


def _collapse_ws(s: str) -> str:
    return " ".join(s.split())


class MockProvider:
    """Offline stand-in keyed on (sentence, response) pairs.

    Lookup tries an exact match on the inserted sentence, then containment
    of a configured sentence inside it; anything else echoes the sentence
    unchanged. ``delay_fn`` (seconds) simulates provider latency.
    """

    model = "mock"
    parallelism = 4

    def __init__(self, entries: Sequence[tuple[str, str]], delay_fn=None):
        self._entries = [(_collapse_ws(k), v) for k, v in entries]
        self._exact = {k: v for k, v in self._entries}
        self._delay_fn = delay_fn

    @classmethod
    def from_file(cls, path: str | Path, delay_fn=None) -> "MockProvider":
        records = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls([(r["sentence"], r["response"]) for r in records], delay_fn)

    def complete(self, prompt: str) -> str:
        if self._delay_fn is not None:
            time.sleep(self._delay_fn())
        payload = extract_prompt_payload(prompt)
        key = _collapse_ws(payload)
        if key in self._exact:
            return self._exact[key]
        for k, v in self._entries:
            if k and k in key:
                return v
        return payload


def extract_prompt_payload(prompt: str) -> str:
    """The text inserted into either template, or the prompt itself."""
    for marker in ("Here is the sentence: ", "Here is the text: "):
        pos = prompt.find(marker)
        if pos >= 0:
            return prompt[pos + len(marker):]
    return prompt


_QUOTED = re.compile(r'"([^"]+)"')
_EXPLANATION = re.compile(r"^[ \t]*explanation\s*:?\s*$", re.IGNORECASE | re.MULTILINE)
_ITEM = re.compile(r"^\s*\d+[.)]\s*(.*\S)\s*$")


def parse_suggestion(raw: str, original: str, sentence_index: int = 0,
                     provider_meta: dict | None = None) -> Suggestion:
    """Pull corrected text and numbered reasoning out of a raw response.

    Corrected text is the first double-quoted span, else the first
    non-empty line before an "Explanation" marker, else the whole response
    trimmed, else the original sentence. Rationale items are the numbered
    lines after the marker.
    """
    marker = _EXPLANATION.search(raw)
    head = raw[: marker.start()] if marker else raw
    tail = raw[marker.end():] if marker else ""

    corrected = ""
    m = _QUOTED.search(raw)
    if m:
        corrected = m.group(1).strip()
    if not corrected:
        for line in head.splitlines():
            if line.strip():
                corrected = line.strip()
                break
    if not corrected:
        corrected = raw.strip()
    if not corrected:
        corrected = original

    rationale: list[str] = []
    for line in tail.splitlines():
        item = _ITEM.match(line)
        if item:
            rationale.append(item.group(1))
        elif rationale and line.strip():
            rationale[-1] += " " + line.strip()

    return Suggestion(
        sentence_index=sentence_index,
        original_text=original,
        corrected_text=corrected,
        rationale=tuple(rationale),
        provider_meta=provider_meta or {},
    )


def _meta(provider, latency_s: float, raw: str, error: str | None = None) -> dict:
    meta = {
        "model": getattr(provider, "model", "unknown"),
        "latency_s": round(latency_s, 6),
        "raw_response": raw,
        "request_params": {},  # provider-default decoding
    }
    if error is not None:
        meta["error"] = error
    return meta


def correct_one_set(transcript: Transcript, provider) -> Transcript:
    """Send the whole transcript through one prompt; provider errors
    propagate and no partial transcript is produced."""
    if not transcript.text.strip():
        raise ValueError("transcript is empty")
    prompt = build_one_set_prompt(transcript.text)
    raw = provider.complete(prompt)
    parsed = parse_suggestion(raw, transcript.text)
    return Transcript(
        parsed.corrected_text,
        role=textproc.ROLE_CORRECTED,
        method=textproc.METHOD_ONE_SET,
    )


def _correct_sentence(sentence: Sentence, provider) -> Suggestion:
    prompt = build_sentence_prompt(sentence.text)
    start = time.perf_counter()
    try:
        raw = provider.complete(prompt)
    except ProviderError as exc:
        # Degrade to an identity suggestion so review still sees every
        # sentence; the error is preserved for auditing.
        return Suggestion(
            sentence_index=sentence.index,
            original_text=sentence.text,
            corrected_text=sentence.text,
            provider_meta=_meta(provider, time.perf_counter() - start, "", str(exc)),
        )
    return parse_suggestion(
        raw,
        sentence.text,
        sentence_index=sentence.index,
        provider_meta=_meta(provider, time.perf_counter() - start, raw),
    )


def correct_sentences(
    sentences: Sequence[Sentence], provider, parallelism: int | None = None
) -> list[Suggestion]:
    """One Suggestion per sentence, in sentence order.

    Requests overlap up to ``parallelism`` (provider's own bound by
    default). Per-sentence provider failures yield identity suggestions;
    only configuration errors abort the batch.
    """
    if not sentences:
        raise ValueError("no sentences to correct")
    workers = parallelism if parallelism is not None else getattr(provider, "parallelism", 1)
    if workers < 1:
        raise ValueError("parallelism must be >= 1")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_correct_sentence, s, provider) for s in sentences]
        return [f.result() for f in futures]
