/**
 * Word-level diff between the ASR sentence and the suggestion, computed with
 * the same unit-cost edit alignment the scoring core uses (match/substitute
 * preferred over delete over insert on ties), so highlights agree with core
 * alignments on shared cases. Words are compared by normalized form
 * (lowercased, edge punctuation stripped, dotted abbreviations kept) but
 * displayed raw, and the resulting spans cover both texts completely.
 */

export type DiffKind = "same" | "sub" | "del" | "ins";

export interface DiffSpan {
  kind: DiffKind;
  /** Raw word from the left (ASR) text; null for insertions. */
  a: string | null;
  /** Raw word from the right (suggestion) text; null for deletions. */
  b: string | null;
}

const ABBREV = /^(?:[a-z]\.){2,}/;

function isAlnum(ch: string): boolean {
  return /[\p{L}\p{N}]/u.test(ch);
}

/** Mirror of the core tokenizer's per-word normalization. */
export function normalizeWord(raw: string): string {
  let t = raw.trim().toLowerCase();
  let i = 0;
  while (i < t.length && !isAlnum(t[i]!)) i += 1;
  t = t.slice(i);
  const m = ABBREV.exec(t);
  if (m && ![...t.slice(m[0].length)].some(isAlnum)) {
    return m[0];
  }
  let j = t.length;
  while (j > 0 && !isAlnum(t[j - 1]!)) j -= 1;
  return t.slice(0, j);
}

function splitWords(text: string): string[] {
  return text.split(/\s+/).filter((w) => w.length > 0);
}

function compareKey(raw: string): string {
  const normalized = normalizeWord(raw);
  // Punctuation-only pieces still need to participate so spans cover the
  // whole text; compare them literally.
  return normalized === "" ? raw : normalized;
}

export function diffWords(asrText: string, suggestionText: string): DiffSpan[] {
  const a = splitWords(asrText);
  const b = splitWords(suggestionText);
  const keysA = a.map(compareKey);
  const keysB = b.map(compareKey);
  const n = a.length;
  const m = b.length;

  const width = m + 1;
  const dp = new Int32Array((n + 1) * width);
  for (let j = 0; j <= m; j += 1) dp[j] = j;
  for (let i = 1; i <= n; i += 1) {
    dp[i * width] = i;
    for (let j = 1; j <= m; j += 1) {
      const diag =
        dp[(i - 1) * width + (j - 1)]! + (keysA[i - 1] === keysB[j - 1] ? 0 : 1);
      const del = dp[(i - 1) * width + j]! + 1;
      const ins = dp[i * width + (j - 1)]! + 1;
      dp[i * width + j] = Math.min(diag, del, ins);
    }
  }

  const spans: DiffSpan[] = [];
  let i = n;
  let j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const same = keysA[i - 1] === keysB[j - 1];
      if (dp[i * width + j] === dp[(i - 1) * width + (j - 1)]! + (same ? 0 : 1)) {
        spans.push({ kind: same ? "same" : "sub", a: a[i - 1]!, b: b[j - 1]! });
        i -= 1;
        j -= 1;
        continue;
      }
    }
    if (i > 0 && dp[i * width + j] === dp[(i - 1) * width + j]! + 1) {
      spans.push({ kind: "del", a: a[i - 1]!, b: null });
      i -= 1;
      continue;
    }
    spans.push({ kind: "ins", a: null, b: b[j - 1]! });
    j -= 1;
  }
  spans.reverse();
  return spans;
}

export function countDifferences(spans: DiffSpan[]): number {
  return spans.reduce((acc, s) => acc + (s.kind === "same" ? 0 : 1), 0);
}

export interface RenderedWord {
  word: string;
  highlighted: boolean;
  kind: DiffKind;
}

/** Words of the left (ASR) text, in order, with highlight flags. */
export function leftWords(spans: DiffSpan[]): RenderedWord[] {
  return spans
    .filter((s) => s.a !== null)
    .map((s) => ({ word: s.a!, highlighted: s.kind !== "same", kind: s.kind }));
}

/** Words of the right (suggestion) text, in order, with highlight flags. */
export function rightWords(spans: DiffSpan[]): RenderedWord[] {
  return spans
    .filter((s) => s.b !== null)
    .map((s) => ({ word: s.b!, highlighted: s.kind !== "same", kind: s.kind }));
}
