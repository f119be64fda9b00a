"""End-to-end acceptance gate.

Each test covers one headline guarantee of the package and prints a PASS/FAIL
line straight to the terminal (bypassing capture) so a plain ``pytest`` run
shows the checklist at a glance.
"""
import copy
import json
import random
import time

import pytest
from fastapi.testclient import TestClient

from scribeloop import fixtures, review, textproc
from scribeloop.alignment import align, edit_cost, use_numba
from scribeloop.cli import main as cli_main
from scribeloop.config import ServiceConfig
from scribeloop.correction import (
    ONE_SET_TEMPLATE,
    SENTENCE_TEMPLATE,
    build_one_set_prompt,
    build_sentence_prompt,
    correct_sentences,
)
from scribeloop.metrics import TermList, kmter, score_texts, wer
from scribeloop.service import create_app

from .golden_prompts import (
    GREEN_BOX_CORRECTED,
    ONE_SET_GOLDEN,
    PINK_BOX_CORRECTED,
    SENTENCE_GOLDEN,
)
from .test_alignment import all_sequences, enumerate_cost, oracle_cost, random_pair


def _announce(name):
    """Tag a test as one acceptance criterion; conftest prints its PASS/FAIL
    line on the terminal as the run progresses."""

    def decorate(fn):
        fn._acceptance_label = name
        return fn

    return decorate


def _warm_kernel():
    edit_cost(("warm",), ("up",))


@_announce("wer on bundled recording (0.502 ± 0.05, < 1 s)")
def test_acceptance_wer_fixture(reference_text, asr_text):
    _warm_kernel()
    start = time.perf_counter()
    alignment, rate = score_texts(reference_text, asr_text)
    elapsed = time.perf_counter() - start
    assert abs(rate - 0.502) <= 0.05, f"wer={rate:.4f}"
    assert alignment.s_count + alignment.d_count + alignment.i_count == alignment.cost
    assert elapsed < 1.0, f"took {elapsed:.3f}s"


@_announce("key-term error rate on bundled recording (12 ± 2 wrong, 0 vs reference, < 1 s)")
def test_acceptance_kmter_fixture(reference_text, asr_text, term_list):
    start = time.perf_counter()
    against_asr = kmter(term_list, textproc.tokenize(asr_text))
    against_ref = kmter(term_list, textproc.tokenize(reference_text))
    elapsed = time.perf_counter() - start
    incorrect = against_asr.incorrect
    assert abs(incorrect - 12) <= 2, f"incorrect={incorrect}"
    assert against_ref.incorrect == 0, "reference must contain every term"
    assert against_ref.rate == 0.0
    assert elapsed < 1.0, f"took {elapsed:.3f}s"


@_announce("alignment cost equals brute-force minimum (all pairs len ≤ 6 over 3 symbols + 200 longer, < 30 s)")
def test_acceptance_alignment_oracle():
    _warm_kernel()
    start = time.perf_counter()

    # The memoized oracle is itself validated against pure exhaustive
    # enumeration on every short pair before it judges the production kernel.
    for a in all_sequences("abc", 3):
        for b in all_sequences("abc", 3):
            assert oracle_cost(a, b) == enumerate_cost(a, b)

    seqs = all_sequences("abc", 6)
    oracle_cache = {}

    def canon(a, b):
        ids = {}
        out = [len(a)]
        for ch in a + b:
            out.append(ids.setdefault(ch, len(ids)))
        return tuple(out)

    checked = 0
    for ia, a in enumerate(seqs):
        for b in seqs[ia:]:
            key = canon(a, b)
            expected = oracle_cache.get(key)
            if expected is None:
                expected = oracle_cache[key] = oracle_cost(a, b)
            assert edit_cost(a, b) == expected
            assert edit_cost(b, a) == expected
            checked += 1
    assert checked == len(seqs) * (len(seqs) + 1) // 2

    rng = random.Random(20240917)
    for _ in range(200):
        a, b = random_pair(rng, 12, "abcde")
        assert edit_cost(a, b) == oracle_cost(a, b)

    elapsed = time.perf_counter() - start
    if use_numba():  # the budget describes the default (jitted) kernel
        assert elapsed < 30.0, f"took {elapsed:.1f}s"


@_announce("metric identities (zero self-WER, k/n junk, k/n deletion, formula, monotone kmter)")
def test_acceptance_metric_properties():
    rng = random.Random(7001)
    vocab = ["alpha", "beta", "gamma", "delta", "mu"]

    for _ in range(50):
        n = rng.randint(1, 30)
        ref = [rng.choice(vocab) for _ in range(n)]
        assert wer(align(ref, ref)) == 0.0

        k = rng.randint(1, 10)
        junk = ref + [f"junk{j}" for j in range(k)]
        assert wer(align(ref, junk)) == pytest.approx(k / n)

        if n > 1:
            k = rng.randint(1, n - 1)
            assert wer(align(ref, ref[: n - k])) == pytest.approx(k / n)

        hyp = [rng.choice(vocab) for _ in range(rng.randint(0, 30))]
        alignment = align(ref, hyp)
        assert wer(alignment) == pytest.approx(
            (alignment.s_count + alignment.d_count + alignment.i_count)
            / alignment.n_ref
        )

    terms = TermList(("alpha", "beta gamma", "delta"))
    hyp_words: list[str] = ["noise"]
    previous = kmter(terms, hyp_words).rate
    for extra in ("alpha", "beta gamma", "delta", "alpha"):
        hyp_words.extend(extra.split())
        current = kmter(terms, hyp_words).rate
        assert current <= previous
        previous = current
    assert previous == 0.0


@_announce("prompt templates match the published wording byte-for-byte")
def test_acceptance_prompt_goldens():
    marker = "{...}"
    assert ONE_SET_TEMPLATE == ONE_SET_GOLDEN + marker
    assert SENTENCE_TEMPLATE == SENTENCE_GOLDEN + marker
    assert build_one_set_prompt("BODY") == ONE_SET_GOLDEN + "BODY"
    assert build_sentence_prompt("BODY") == SENTENCE_GOLDEN + "BODY"


@_announce("published correction examples flow through the pipeline; guided review beats both uniform picks")
def test_acceptance_paper_example_pipeline(reference_text, asr_text, mock_provider):
    sentences = textproc.segment_sentences(asr_text)
    suggestions = correct_sentences(sentences, mock_provider)

    by_text = {s.corrected_text: s for s in suggestions}
    pink = by_text[PINK_BOX_CORRECTED]
    assert len(pink.rationale) == 3
    assert sentences[pink.sentence_index].text.rstrip(".").endswith("POO daily")

    green = by_text[GREEN_BOX_CORRECTED]
    assert "ecchymosis" in green.corrected_text
    assert "hematoma" in sentences[green.sentence_index].text

    session = review.create_session("recording-1", sentences, suggestions)
    picks = review.reference_guided_decisions(session, reference_text)
    for index, decision in picks.items():
        review.record_decision(session, index, decision)
    final = review.finalize(session)

    ref_tokens = textproc.surfaces(reference_text)

    def cost(text: str) -> int:
        return edit_cost(ref_tokens, textproc.surfaces(text))

    cost_final = cost(final.text)
    cost_all_asr = cost(" ".join(s.text for s in sentences))
    cost_all_llm = cost(" ".join(s.corrected_text for s in suggestions))
    assert cost_final <= cost_all_asr
    assert cost_final <= cost_all_llm


@_announce("review sessions round-trip; finalize reports undecided indices; finalized sessions reject edits")
def test_acceptance_session_round_trip(tmp_path, asr_text, mock_provider):
    sentences = textproc.segment_sentences(asr_text)[:5]
    suggestions = correct_sentences(sentences, mock_provider)
    session = review.create_session("recording-1", sentences, suggestions)
    review.record_decision(session, 1, review.Decision(review.KEEP_ASR))

    review.save_session(session, tmp_path)
    assert review.load_session(session.session_id, tmp_path) == session

    with pytest.raises(review.UndecidedSentencesError) as excinfo:
        review.finalize(session)
    assert excinfo.value.indices == (0, 2, 3, 4)

    for index in (0, 2, 3, 4):
        review.record_decision(session, index, review.Decision(review.ACCEPT_LLM))
    final = review.finalize(session)
    assert session.status == review.FINALIZED

    review.save_session(session, tmp_path)
    reloaded = review.load_session(session.session_id, tmp_path)
    assert reloaded == session
    assert review.finalize(reloaded).text == final.text

    with pytest.raises(review.SessionFinalizedError):
        review.record_decision(session, 0, review.Decision(review.KEEP_ASR))


def _mask_volatile(record: dict) -> dict:
    masked = copy.deepcopy(record)
    masked["session_id"] = "?"
    masked["created_at"] = masked["updated_at"] = "?"
    for decision in masked["decisions"].values():
        decision["decided_at"] = "?"
    for suggestion in masked["suggestions"]:
        suggestion["provider_meta"].pop("latency_s", None)
    return masked


@_announce("HTTP flow reproduces the library flow; /metrics WER equals CLI score to 6 decimals")
def test_acceptance_service_conformance(tmp_path, capsys, asr_text):
    data_dir = tmp_path / "sessions"
    data_dir.mkdir()
    mock_file = tmp_path / "mock.json"
    mock_file.write_text(json.dumps(fixtures.mock_responses()), encoding="utf-8")
    config = ServiceConfig(data_dir=data_dir, mock_responses=mock_file)
    client = TestClient(create_app(config))

    created = client.post(
        "/sessions",
        json={
            "recording_id": "recording-1",
            "asr_fetch": {"audio_ref": "recording-1"},
            "run_llm": True,
        },
    )
    assert created.status_code == 201
    sid = created.json()["session_id"]
    count = len(created.json()["sentences"])
    for index in range(count):
        choice = "accept_llm" if index == 2 else "keep_asr"
        response = client.post(
            f"/sessions/{sid}/sentences/{index}/decision", json={"choice": choice}
        )
        assert response.status_code == 200
    assert client.post(f"/sessions/{sid}/finalize").status_code == 200
    metrics = client.get(f"/sessions/{sid}/metrics")
    assert metrics.status_code == 200
    via_http = json.loads((data_dir / f"{sid}.json").read_text(encoding="utf-8"))

    sentences = textproc.segment_sentences(asr_text)
    suggestions = correct_sentences(sentences, fixtures.mock_provider())
    lib_session = review.create_session("recording-1", sentences, suggestions)
    for index in range(len(sentences)):
        choice = review.ACCEPT_LLM if index == 2 else review.KEEP_ASR
        review.record_decision(lib_session, index, review.Decision(choice))
    review.finalize(lib_session)
    lib_dir = tmp_path / "library"
    lib_dir.mkdir()
    via_library = json.loads(
        review.save_session(lib_session, lib_dir).read_text(encoding="utf-8")
    )
    # identical up to generated ids/timestamps/latency samples
    assert _mask_volatile(via_http) == _mask_volatile(via_library)

    http_wer = next(
        row["wer"]
        for row in metrics.json()["rows"]
        if row["method"] == "initial_asr"
    )
    code = cli_main(
        ["score", "--ref", "recording-1-reference", "--hyp", "recording-1-asr",
         "--format", "csv"]
    )
    assert code == 0
    out = capsys.readouterr().out
    cli_wer = out.splitlines()[1].split(",")[2]
    assert f"{http_wer:.6f}" == cli_wer
