/**
 * Review UI shell: session list, per-sentence review cards, audio playback
 * with a per-card seek nudge, finalize flow, and the post-finalize metrics
 * panel. The server owns all state — the page re-fetches on focus and after
 * every write, so reloading reconstructs the exact decision state.
 */

import {
  ApiError,
  ReviewApi,
  type Choice,
  type SentenceView,
  type SessionRecord,
  type SessionSummary,
} from "./api.js";
import { createSentenceCard, type SentenceCard } from "./cards.js";
import { clear, el, formatPercent } from "./dom.js";

const METHOD_LABELS: Record<string, string> = {
  initial_asr: "Initial ASR",
  one_set: "One Set",
  sentence_by_sentence: "Sentence by Sentence",
  manual_llm: "Manual+LLM",
};

/** Seek target for "replay around this sentence": proportional position in
 * the recording minus a small lead-in. Crude by design — no forced
 * alignment is available. */
export function seekTarget(
  index: number,
  sentenceCount: number,
  duration: number,
  leadInSeconds = 2,
): number {
  if (!Number.isFinite(duration) || duration <= 0 || sentenceCount <= 0) return 0;
  return Math.max(0, (duration * index) / sentenceCount - leadInSeconds);
}

export class App {
  private readonly banner: HTMLElement;
  private readonly main: HTMLElement;
  private session: SessionRecord | null = null;
  private cards: SentenceCard[] = [];
  private activeIndex = 0;
  private audio: HTMLAudioElement | null = null;
  private progressNode: HTMLElement | null = null;
  private readonly onFocus = () => void this.refresh();
  private readonly onKey = (event: KeyboardEvent) => this.handleKey(event);

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ReviewApi,
  ) {
    this.banner = el("div", "banner");
    this.banner.hidden = true;
    this.main = el("main", "main");
    root.append(this.banner, this.main);
    window.addEventListener("focus", this.onFocus);
    document.addEventListener("keydown", this.onKey);
  }

  dispose(): void {
    window.removeEventListener("focus", this.onFocus);
    document.removeEventListener("keydown", this.onKey);
  }

  showError(message: string): void {
    this.banner.textContent = message;
    this.banner.hidden = false;
  }

  clearError(): void {
    this.banner.hidden = true;
    this.banner.textContent = "";
  }

  async showSessionList(): Promise<void> {
    this.session = null;
    this.cards = [];
    clear(this.main);
    const heading = el("h1", "title", "Review sessions");
    const list = el("ul", "session-list");
    const refresh = el("button", "refresh-btn", "Refresh");
    refresh.type = "button";
    refresh.addEventListener("click", () => void this.showSessionList());
    this.main.append(heading, refresh, list);
    try {
      const { sessions } = await this.api.listSessions();
      clear(list);
      if (sessions.length === 0) {
        list.appendChild(el("li", "empty", "No sessions yet."));
      }
      for (const summary of sessions) {
        list.appendChild(this.sessionRow(summary));
      }
      this.clearError();
    } catch (err) {
      this.showError(errMessage(err));
    }
  }

  private sessionRow(summary: SessionSummary): HTMLElement {
    const item = el("li", "session-row");
    item.dataset.sessionId = summary.session_id;
    item.appendChild(
      el(
        "span",
        "session-label",
        `${summary.recording_id} — ${summary.decided_count}/${summary.sentence_count} decided (${summary.status})`,
      ),
    );
    const open = el("button", "open-btn", "Open");
    open.type = "button";
    open.addEventListener("click", () => void this.openSession(summary.session_id));
    item.appendChild(open);
    return item;
  }

  async openSession(sessionId: string): Promise<void> {
    try {
      const session = await this.api.getSession(sessionId);
      const { sentences } = await this.api.getSentences(sessionId);
      this.renderSession(session, sentences);
      this.clearError();
    } catch (err) {
      this.showError(errMessage(err));
    }
  }

  private renderSession(session: SessionRecord, sentences: SentenceView[]): void {
    this.session = session;
    this.activeIndex = 0;
    clear(this.main);
    const view = el("section", "session-view");
    view.dataset.sessionId = session.session_id;

    const back = el("button", "back-btn", "← Sessions");
    back.type = "button";
    back.addEventListener("click", () => void this.showSessionList());
    view.appendChild(back);

    view.appendChild(el("h1", "title", session.recording_id));
    this.progressNode = el("p", "progress");
    view.appendChild(this.progressNode);

    const audio = document.createElement("audio");
    audio.className = "player";
    audio.controls = true;
    audio.preload = "none";
    audio.src = this.api.audioUrl(session.recording_id);
    audio.addEventListener("error", () => {
      audio.hidden = true;
    });
    view.appendChild(audio);
    this.audio = audio;

    const finalize = el("button", "finalize-btn", "Finalize transcript");
    finalize.type = "button";
    finalize.addEventListener("click", () => void this.finalize());
    view.appendChild(finalize);

    const undecidedDialog = el("p", "undecided-dialog");
    undecidedDialog.hidden = true;
    view.appendChild(undecidedDialog);

    const finalText = el("p", "final-text");
    finalText.hidden = true;
    view.appendChild(finalText);

    const metricsPanel = el("div", "metrics-panel");
    metricsPanel.hidden = true;
    view.appendChild(metricsPanel);

    const cardsHost = el("div", "cards");
    view.appendChild(cardsHost);

    this.cards = sentences.map((sentence) =>
      createSentenceCard(sentence, {
        submitDecision: (index, body) =>
          this.api.postDecision(session.session_id, index, body),
        onDecided: (confirmed) => {
          this.clearError();
          this.updateProgress();
          this.advanceFrom(confirmed.index);
        },
        onError: (message) => this.showError(message),
        onReplay: (index) => this.replayAround(index),
      }),
    );
    for (const card of this.cards) {
      card.root.addEventListener("click", () => {
        this.setActive(card.index);
      });
      cardsHost.appendChild(card.root);
    }

    this.main.appendChild(view);
    this.updateProgress();
    this.setActive(this.firstUndecided() ?? 0);
    if (session.status === "finalized") {
      this.lockCards("Session is finalized; decisions are closed.");
      if (session.final_text !== null) {
        this.showFinalText(session.final_text);
      }
      void this.loadMetrics();
    }
  }

  private firstUndecided(): number | null {
    const card = this.cards.find(
      (c) => !(c.root.dataset.decision && c.root.dataset.decision !== ""),
    );
    return card ? card.index : null;
  }

  private decidedCount(): number {
    return this.cards.filter(
      (c) => c.root.dataset.decision && c.root.dataset.decision !== "",
    ).length;
  }

  private updateProgress(): void {
    if (this.progressNode) {
      this.progressNode.textContent = `${this.decidedCount()}/${this.cards.length} decided`;
    }
  }

  private setActive(index: number): void {
    this.activeIndex = index;
    for (const card of this.cards) {
      card.root.classList.toggle("active", card.index === index);
    }
  }

  private advanceFrom(index: number): void {
    const next = this.cards.find(
      (c) =>
        c.index > index &&
        !(c.root.dataset.decision && c.root.dataset.decision !== ""),
    );
    this.setActive(next ? next.index : index);
  }

  private handleKey(event: KeyboardEvent): void {
    if (!this.session || this.cards.length === 0) return;
    const target = event.target as HTMLElement | null;
    if (target && (target.tagName === "TEXTAREA" || target.tagName === "INPUT")) {
      return; // typing a manual correction
    }
    const card = this.cards[this.activeIndex];
    if (!card) return;
    const actions: Record<string, () => void> = {
      "1": () => card.choose("keep_asr"),
      "2": () => card.choose("accept_llm"),
      "3": () => card.focusManual(),
      j: () => this.setActive(Math.min(this.activeIndex + 1, this.cards.length - 1)),
      k: () => this.setActive(Math.max(this.activeIndex - 1, 0)),
    };
    const action = actions[event.key];
    if (action) {
      event.preventDefault();
      action();
    }
  }

  private replayAround(index: number): void {
    if (!this.audio || this.audio.hidden) return;
    this.audio.currentTime = seekTarget(
      index,
      this.cards.length,
      this.audio.duration,
    );
    const playing = this.audio.play() as Promise<void> | undefined;
    if (playing) {
      playing.catch(() => {
        /* autoplay restrictions or headless environment */
      });
    }
  }

  private lockCards(reason: string): void {
    for (const card of this.cards) card.setLocked(true, reason);
    const finalize = this.main.querySelector<HTMLButtonElement>(".finalize-btn");
    if (finalize) finalize.disabled = true;
  }

  private showFinalText(text: string): void {
    const node = this.main.querySelector<HTMLElement>(".final-text");
    if (node) {
      node.hidden = false;
      node.textContent = text;
    }
  }

  async finalize(): Promise<void> {
    if (!this.session) return;
    const dialog = this.main.querySelector<HTMLElement>(".undecided-dialog");
    try {
      const result = await this.api.finalize(this.session.session_id);
      if (dialog) dialog.hidden = true;
      this.clearError();
      // the rendered final text is exactly what the service returned
      this.showFinalText(result.final_text);
      this.lockCards("Session is finalized; decisions are closed.");
      await this.loadMetrics();
      await this.refresh();
    } catch (err) {
      if (err instanceof ApiError && err.errorCode === "undecided_sentences") {
        const indices = (err.details.indices as number[] | undefined) ?? [];
        if (dialog) {
          dialog.hidden = false;
          dialog.textContent = `Undecided sentences: ${indices
            .map((i) => `#${i + 1}`)
            .join(", ")}`;
        }
        return;
      }
      this.showError(errMessage(err));
    }
  }

  private async loadMetrics(): Promise<void> {
    if (!this.session) return;
    const panel = this.main.querySelector<HTMLElement>(".metrics-panel");
    if (!panel) return;
    try {
      const metrics = await this.api.getMetrics(this.session.session_id);
      clear(panel);
      panel.hidden = false;
      panel.appendChild(el("h2", "metrics-title", "Metrics"));
      const table = el("table", "metrics-table");
      const head = el("tr");
      for (const label of ["Method", "WER", "KMTER"]) {
        head.appendChild(el("th", "", label));
      }
      table.appendChild(head);
      for (const row of metrics.rows) {
        const tr = el("tr", "metrics-row");
        tr.dataset.method = row.method;
        tr.appendChild(el("td", "", METHOD_LABELS[row.method] ?? row.method));
        tr.appendChild(el("td", "metric-wer", formatPercent(row.wer)));
        tr.appendChild(
          el("td", "metric-kmter", row.kmter === null ? "–" : formatPercent(row.kmter)),
        );
        table.appendChild(tr);
      }
      panel.appendChild(table);
    } catch (err) {
      if (err instanceof ApiError && err.errorCode === "no_reference") {
        panel.hidden = false;
        panel.textContent = "No reference transcript — metrics unavailable.";
        return;
      }
      this.showError(errMessage(err));
    }
  }

  /** Re-fetch the open session (or the list) from the server. */
  async refresh(): Promise<void> {
    if (!this.session) return;
    try {
      const session = await this.api.getSession(this.session.session_id);
      const { sentences } = await this.api.getSentences(session.session_id);
      this.session = session;
      for (const sentence of sentences) {
        this.cards[sentence.index]?.update(sentence);
      }
      this.updateProgress();
      if (session.status === "finalized") {
        this.lockCards("Session is finalized; decisions are closed.");
        if (session.final_text !== null) this.showFinalText(session.final_text);
      }
    } catch (err) {
      this.showError(errMessage(err));
    }
  }
}

function errMessage(err: unknown): string {
  if (err instanceof ApiError) return `${err.errorCode}: ${err.message}`;
  return err instanceof Error ? err.message : String(err);
}

export function boot(root: HTMLElement, api: ReviewApi): App {
  const app = new App(root, api);
  void app.showSessionList();
  return app;
}

const autoRoot = typeof document !== "undefined" ? document.getElementById("app") : null;
if (autoRoot && autoRoot.dataset.autoboot === "true") {
  const base = autoRoot.dataset.apiBase ?? "http://127.0.0.1:8000";
  boot(autoRoot, new ReviewApi(base));
}
