/**
 * SentenceCard: one sentence of the session — ASR text and LLM suggestion
 * side by side with word-diff highlights, the model's rationale, and the
 * decision controls (Keep ASR / Accept LLM / Manual edit).
 *
 * Decisions are optimistic: the card reflects the click immediately, then
 * confirms against the server's response and rolls back if the write fails.
 */

import type { Choice, DecisionBody, DecisionRecord, SentenceView } from "./api.js";
import { diffWords, leftWords, rightWords } from "./diff.js";
import { clear, el } from "./dom.js";

export interface CardHandlers {
  submitDecision(index: number, body: DecisionBody): Promise<SentenceView>;
  onDecided(view: SentenceView): void;
  onError(message: string): void;
  onReplay?(index: number): void;
}

export interface SentenceCard {
  root: HTMLElement;
  readonly index: number;
  update(view: SentenceView): void;
  setLocked(locked: boolean, reason?: string): void;
  choose(choice: Choice): void;
  focusManual(): void;
}

const CHOICE_LABELS: Record<Choice, string> = {
  keep_asr: "Keep ASR",
  accept_llm: "Accept LLM",
  manual: "Manual",
};

function resolvedText(view: SentenceView, decision: DecisionRecord): string {
  if (decision.choice === "accept_llm") return view.suggestion_text;
  if (decision.choice === "manual") return decision.text ?? "";
  return view.asr_text;
}

function renderWords(
  container: HTMLElement,
  words: { word: string; highlighted: boolean; kind: string }[],
): void {
  clear(container);
  words.forEach((w, k) => {
    if (k > 0) container.appendChild(document.createTextNode(" "));
    const span = el("span", w.highlighted ? `diff diff-${w.kind}` : "word", w.word);
    container.appendChild(span);
  });
}

export function createSentenceCard(
  view: SentenceView,
  handlers: CardHandlers,
): SentenceCard {
  let current = view;
  let locked = false;
  let pending = false;

  const root = el("article", "sentence-card");
  root.dataset.index = String(view.index);

  const header = el("header", "card-header");
  header.appendChild(el("span", "card-index", `#${view.index + 1}`));
  const statusBadge = el("span", "decision-badge", "undecided");
  header.appendChild(statusBadge);
  if (handlers.onReplay) {
    const replay = el("button", "replay-btn", "replay");
    replay.type = "button";
    replay.title = "Replay audio around this sentence";
    replay.addEventListener("click", () => handlers.onReplay?.(current.index));
    header.appendChild(replay);
  }
  root.appendChild(header);

  const asrLabel = el("div", "text-label", "ASR");
  const asrLine = el("p", "asr-text");
  const suggestionLabel = el("div", "text-label", "Suggestion");
  const suggestionLine = el("p", "suggestion-text");
  root.append(asrLabel, asrLine, suggestionLabel, suggestionLine);

  const rationaleList = el("ol", "rationale");
  root.appendChild(rationaleList);

  const resolvedLine = el("p", "resolved-text");
  resolvedLine.hidden = true;
  root.appendChild(resolvedLine);

  const controls = el("div", "controls");
  const keepBtn = el("button", "keep-asr-btn", CHOICE_LABELS.keep_asr);
  const acceptBtn = el("button", "accept-llm-btn", CHOICE_LABELS.accept_llm);
  const manualBtn = el("button", "manual-btn", CHOICE_LABELS.manual);
  [keepBtn, acceptBtn, manualBtn].forEach((b) => (b.type = "button"));
  controls.append(keepBtn, acceptBtn, manualBtn);
  root.appendChild(controls);

  const manualBox = el("div", "manual-box");
  manualBox.hidden = true;
  const manualInput = el("textarea", "manual-input");
  manualInput.rows = 2;
  manualInput.placeholder = "Corrected sentence…";
  const manualSave = el("button", "manual-save-btn", "Save manual text");
  manualSave.type = "button";
  const manualError = el("p", "manual-error");
  manualError.hidden = true;
  manualBox.append(manualInput, manualSave, manualError);
  root.appendChild(manualBox);

  const lockNote = el("p", "lock-note");
  lockNote.hidden = true;
  root.appendChild(lockNote);

  function renderDecision(decision: DecisionRecord | null): void {
    root.dataset.decision = decision ? decision.choice : "";
    root.classList.toggle("pending", pending);
    statusBadge.textContent = decision
      ? CHOICE_LABELS[decision.choice]
      : "undecided";
    statusBadge.className = `decision-badge ${decision ? `badge-${decision.choice}` : ""}`;
    if (decision) {
      resolvedLine.hidden = false;
      resolvedLine.textContent = resolvedText(current, decision);
    } else {
      resolvedLine.hidden = true;
      resolvedLine.textContent = "";
    }
  }

  function render(): void {
    const spans = diffWords(current.asr_text, current.suggestion_text);
    renderWords(asrLine, leftWords(spans));
    renderWords(suggestionLine, rightWords(spans));
    clear(rationaleList);
    for (const item of current.rationale) {
      rationaleList.appendChild(el("li", "rationale-item", item));
    }
    rationaleList.hidden = current.rationale.length === 0;
    renderDecision(current.decision);
  }

  async function submit(body: DecisionBody): Promise<void> {
    if (locked || pending) return;
    const before = current.decision;
    pending = true;
    // optimistic: show the chosen state before the server confirms it
    renderDecision({
      choice: body.choice,
      text: body.text ?? null,
      note: body.note ?? null,
      decided_at: "",
    });
    try {
      const confirmed = await handlers.submitDecision(current.index, body);
      current = confirmed;
      pending = false;
      render();
      handlers.onDecided(confirmed);
    } catch (err) {
      pending = false;
      renderDecision(before);
      handlers.onError(err instanceof Error ? err.message : String(err));
    }
  }

  keepBtn.addEventListener("click", () => void submit({ choice: "keep_asr" }));
  acceptBtn.addEventListener("click", () => void submit({ choice: "accept_llm" }));
  manualBtn.addEventListener("click", () => {
    manualBox.hidden = !manualBox.hidden;
    if (!manualBox.hidden) {
      manualInput.value = current.decision?.text ?? "";
      manualInput.focus();
    }
  });
  manualSave.addEventListener("click", () => {
    const text = manualInput.value.trim();
    if (!text) {
      manualError.textContent = "Manual text cannot be empty.";
      manualError.hidden = false;
      return; // client-side validation: no request is sent
    }
    manualError.hidden = true;
    manualBox.hidden = true;
    void submit({ choice: "manual", text });
  });

  function setLocked(value: boolean, reason?: string): void {
    locked = value;
    for (const b of [keepBtn, acceptBtn, manualBtn, manualSave]) {
      b.disabled = value;
    }
    lockNote.hidden = !value || !reason;
    lockNote.textContent = reason ?? "";
    root.classList.toggle("locked", value);
  }

  render();

  return {
    root,
    get index() {
      return current.index;
    },
    update(next: SentenceView) {
      current = next;
      render();
    },
    setLocked,
    choose(choice: Choice) {
      if (choice === "manual") {
        manualBtn.click();
      } else if (choice === "keep_asr") {
        keepBtn.click();
      } else {
        acceptBtn.click();
      }
    },
    focusManual() {
      manualBox.hidden = false;
      manualInput.focus();
    },
  };
}
