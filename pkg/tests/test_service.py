import copy
import json

import pytest
from fastapi.testclient import TestClient

from scribeloop import fixtures, review, textproc
from scribeloop.config import ServiceConfig
from scribeloop.metrics import kmter, score_texts
from scribeloop.service import create_app

from .golden_prompts import PINK_BOX_CORRECTED

AUDIO_BYTES = bytes(range(256)) * 4  # 1 KiB stand-in for a wav payload


@pytest.fixture()
def service_env(tmp_path):
    data_dir = tmp_path / "sessions"
    data_dir.mkdir()
    audio_dir = tmp_path / "audio"
    audio_dir.mkdir()
    (audio_dir / "recording-1.wav").write_bytes(AUDIO_BYTES)
    mock_file = tmp_path / "mock.json"
    mock_file.write_text(json.dumps(fixtures.mock_responses()), encoding="utf-8")
    config = ServiceConfig(
        data_dir=data_dir,
        audio_dir=audio_dir,
        mock_responses=mock_file,
        cors_origins=("http://localhost:5173",),
    )
    return config


@pytest.fixture()
def client(service_env):
    return TestClient(create_app(service_env))


def _create_fixture_session(client, run_llm=True):
    response = client.post(
        "/sessions",
        json={
            "recording_id": "recording-1",
            "asr_fetch": {"audio_ref": "recording-1"},
            "run_llm": run_llm,
        },
    )
    assert response.status_code == 201, response.text
    return response.json()


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"
    assert body["version"]


def test_create_session_from_transcript(client):
    response = client.post(
        "/sessions",
        json={"recording_id": "demo", "asr_transcript": "One here. Two here."},
    )
    assert response.status_code == 201
    body = response.json()
    assert body["status"] == "in_progress"
    assert [s["text"] for s in body["sentences"]] == ["One here.", "Two here."]
    # without run_llm the suggestions are identity placeholders
    assert all(
        s["corrected_text"] == s["original_text"] for s in body["suggestions"]
    )


def test_create_session_via_asr_fetch_runs_llm(client):
    body = _create_fixture_session(client)
    assert len(body["sentences"]) == 44
    corrected = [s["corrected_text"] for s in body["suggestions"]]
    assert PINK_BOX_CORRECTED in corrected
    assert body["audio_path"].endswith("recording-1.wav")


def test_create_session_validation_errors(client):
    cases = [
        {"recording_id": "x"},  # neither source
        {"recording_id": "x", "asr_transcript": "a.", "asr_fetch": {"audio_ref": "y"}},
        {"asr_transcript": "a."},  # no recording id
        {"recording_id": "x", "asr_transcript": "   "},
        {"recording_id": "x", "asr_fetch": {}},
    ]
    for payload in cases:
        response = client.post("/sessions", json=payload)
        assert response.status_code == 422, payload
        body = response.json()
        assert set(body) == {"error_code", "message", "details"}


def test_create_session_unknown_audio_ref(client):
    response = client.post(
        "/sessions",
        json={"recording_id": "x", "asr_fetch": {"audio_ref": "nope"}},
    )
    assert response.status_code == 404
    assert response.json()["error_code"] == "unknown_recording"


def test_sentences_view_and_decisions(client):
    session = _create_fixture_session(client)
    sid = session["session_id"]

    listing = client.get(f"/sessions/{sid}/sentences").json()["sentences"]
    assert [s["index"] for s in listing] == list(range(44))
    assert all(s["decision"] is None for s in listing)

    response = client.post(
        f"/sessions/{sid}/sentences/2/decision", json={"choice": "accept_llm"}
    )
    assert response.status_code == 200
    body = response.json()
    assert body["decision"]["choice"] == "accept_llm"
    assert body["suggestion_text"] == PINK_BOX_CORRECTED

    # bad payloads
    assert client.post(
        f"/sessions/{sid}/sentences/2/decision", json={"choice": "bogus"}
    ).status_code == 422
    assert client.post(
        f"/sessions/{sid}/sentences/2/decision", json={"choice": "manual"}
    ).status_code == 422
    response = client.post(
        f"/sessions/{sid}/sentences/999/decision", json={"choice": "keep_asr"}
    )
    assert response.status_code == 404
    assert response.json()["error_code"] == "invalid_index"


def test_finalize_flow_and_conflicts(client):
    session = _create_fixture_session(client)
    sid = session["session_id"]

    response = client.post(f"/sessions/{sid}/finalize")
    assert response.status_code == 409
    body = response.json()
    assert body["error_code"] == "undecided_sentences"
    assert body["details"]["indices"] == list(range(44))

    for index in range(44):
        choice = "accept_llm" if index == 2 else "keep_asr"
        response = client.post(
            f"/sessions/{sid}/sentences/{index}/decision", json={"choice": choice}
        )
        assert response.status_code == 200

    response = client.post(f"/sessions/{sid}/finalize")
    assert response.status_code == 200
    final_text = response.json()["final_text"]
    assert PINK_BOX_CORRECTED in final_text

    # idempotent: finalizing again returns the same text
    again = client.post(f"/sessions/{sid}/finalize")
    assert again.status_code == 200
    assert again.json()["final_text"] == final_text

    response = client.post(
        f"/sessions/{sid}/sentences/0/decision", json={"choice": "keep_asr"}
    )
    assert response.status_code == 409
    assert response.json()["error_code"] == "session_finalized"


def test_unknown_session_uniform_error(client):
    for path in ("/sessions/zzz", "/sessions/zzz/sentences", "/sessions/zzz/metrics"):
        response = client.get(path)
        assert response.status_code == 404
        body = response.json()
        assert body["error_code"] == "unknown_session"
        assert set(body) == {"error_code", "message", "details"}


def test_list_sessions(client):
    assert client.get("/sessions").json() == {"sessions": []}
    created = _create_fixture_session(client, run_llm=False)
    listing = client.get("/sessions").json()["sessions"]
    assert len(listing) == 1
    assert listing[0]["session_id"] == created["session_id"]
    assert listing[0]["sentence_count"] == 44
    assert listing[0]["decided_count"] == 0


def test_state_survives_app_restart(service_env):
    first = TestClient(create_app(service_env))
    session = _create_fixture_session(first, run_llm=False)
    sid = session["session_id"]
    first.post(f"/sessions/{sid}/sentences/0/decision", json={"choice": "keep_asr"})

    reloaded = TestClient(create_app(service_env))
    body = reloaded.get(f"/sessions/{sid}").json()
    assert body["decisions"]["0"]["choice"] == "keep_asr"
    assert body["status"] == "in_progress"


def test_metrics_for_fixture_recording(client, reference_text, asr_text, term_list):
    session = _create_fixture_session(client)
    sid = session["session_id"]

    body = client.get(f"/sessions/{sid}/metrics").json()
    rows = {row["method"]: row for row in body["rows"]}
    assert set(rows) == {"initial_asr", "sentence_by_sentence"}

    alignment, rate = score_texts(reference_text, asr_text)
    assert rows["initial_asr"]["wer"] == pytest.approx(rate)
    assert rows["initial_asr"]["n"] == alignment.n_ref
    assert rows["initial_asr"]["kmter"] == pytest.approx(
        kmter(term_list, textproc.tokenize(asr_text)).rate
    )

    for index in range(44):
        client.post(
            f"/sessions/{sid}/sentences/{index}/decision", json={"choice": "keep_asr"}
        )
    client.post(f"/sessions/{sid}/finalize")
    body = client.get(f"/sessions/{sid}/metrics").json()
    methods = {row["method"] for row in body["rows"]}
    assert methods == {"initial_asr", "sentence_by_sentence", "manual_llm"}
    assert body["csv"].startswith("recording,method,wer,kmter,s,d,i,n")


def test_metrics_without_reference_is_distinct_404(client):
    response = client.post(
        "/sessions",
        json={"recording_id": "unknown-rec", "asr_transcript": "One here. Two here."},
    )
    sid = response.json()["session_id"]
    response = client.get(f"/sessions/{sid}/metrics")
    assert response.status_code == 404
    assert response.json()["error_code"] == "no_reference"


def test_audio_full_and_ranges(client):
    full = client.get("/audio/recording-1")
    assert full.status_code == 200
    assert full.content == AUDIO_BYTES
    assert full.headers["accept-ranges"] == "bytes"
    assert full.headers["content-type"] == "audio/wav"

    partial = client.get("/audio/recording-1", headers={"Range": "bytes=0-99"})
    assert partial.status_code == 206
    assert partial.content == AUDIO_BYTES[:100]
    assert partial.headers["content-range"] == f"bytes 0-99/{len(AUDIO_BYTES)}"

    tail = client.get("/audio/recording-1", headers={"Range": "bytes=-50"})
    assert tail.status_code == 206
    assert tail.content == AUDIO_BYTES[-50:]

    open_ended = client.get("/audio/recording-1", headers={"Range": "bytes=1000-"})
    assert open_ended.status_code == 206
    assert open_ended.content == AUDIO_BYTES[1000:]

    bad = client.get(
        "/audio/recording-1", headers={"Range": f"bytes={len(AUDIO_BYTES)}-"}
    )
    assert bad.status_code == 416

    missing = client.get("/audio/nope")
    assert missing.status_code == 404
    assert missing.json()["error_code"] == "no_audio"


def test_cors_allowlist(client):
    response = client.get("/health", headers={"Origin": "http://localhost:5173"})
    assert response.headers["access-control-allow-origin"] == "http://localhost:5173"
    response = client.get("/health", headers={"Origin": "http://evil.example"})
    assert "access-control-allow-origin" not in response.headers


def mask_volatile(record: dict) -> dict:
    masked = copy.deepcopy(record)
    masked["session_id"] = "?"
    masked["created_at"] = masked["updated_at"] = "?"
    for decision in masked["decisions"].values():
        decision["decided_at"] = "?"
    for suggestion in masked["suggestions"]:
        suggestion["provider_meta"].pop("latency_s", None)
    return masked


def test_http_flow_matches_library_flow(service_env, asr_text):
    client = TestClient(create_app(service_env))
    session = _create_fixture_session(client)
    sid = session["session_id"]
    for index in range(44):
        choice = "accept_llm" if index == 2 else "keep_asr"
        client.post(f"/sessions/{sid}/sentences/{index}/decision", json={"choice": choice})
    client.post(f"/sessions/{sid}/finalize")
    via_http = json.loads(
        (service_env.data_dir / f"{sid}.json").read_text(encoding="utf-8")
    )

    from scribeloop.correction import correct_sentences

    sentences = textproc.segment_sentences(asr_text)
    suggestions = correct_sentences(sentences, fixtures.mock_provider())
    lib_session = review.create_session(
        "recording-1",
        sentences,
        suggestions,
        audio_path=str(service_env.audio_dir / "recording-1.wav"),
    )
    for index in range(44):
        choice = review.ACCEPT_LLM if index == 2 else review.KEEP_ASR
        review.record_decision(lib_session, index, review.Decision(choice))
    review.finalize(lib_session)
    lib_dir = service_env.data_dir.parent / "library-sessions"
    lib_dir.mkdir(exist_ok=True)
    path = review.save_session(lib_session, lib_dir)
    via_library = json.loads(path.read_text(encoding="utf-8"))

    assert mask_volatile(via_http) == mask_volatile(via_library)
