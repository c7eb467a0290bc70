import type { DraftEntry } from "./types";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

interface Span {
  start: number;
  end: number;
  status: string;
}

/** Presentational highlighting of entry strings inside the article body.
 * Longest entries claim their spans first so substrings never split a
 * longer mention; the saved payload is always the entry list, never these
 * character offsets. */
export function highlightBody(body: string, entries: DraftEntry[]): string {
  const targets = entries
    .filter((e) => e.text.trim() && e.status !== "rejected")
    .sort((a, b) => b.text.length - a.text.length);
  const spans: Span[] = [];
  const taken: Array<[number, number]> = [];

  for (const entry of targets) {
    let from = 0;
    for (;;) {
      const start = body.indexOf(entry.text, from);
      if (start < 0) {
        break;
      }
      const end = start + entry.text.length;
      if (!taken.some(([s, e]) => start < e && s < end)) {
        spans.push({ start, end, status: entry.status });
        taken.push([start, end]);
      }
      from = end;
    }
  }

  spans.sort((a, b) => a.start - b.start);
  let html = "";
  let cursor = 0;
  for (const span of spans) {
    html += escapeHtml(body.slice(cursor, span.start));
    html += `<mark class="hl-${span.status}">${escapeHtml(body.slice(span.start, span.end))}</mark>`;
    cursor = span.end;
  }
  html += escapeHtml(body.slice(cursor));
  return html;
}
