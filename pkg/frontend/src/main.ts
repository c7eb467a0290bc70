import { ApiClient, ApiError } from "./api";
import { highlightBody } from "./highlight";
import {
  ReviewState,
  addEntry,
  adoptServerDraft,
  acceptAll,
  editText,
  keepLocalEdits,
  removeEntry,
  setStatus,
} from "./state";
import { loadReview, saveReview } from "./flow";
import type { Article, EntityClass, Verdict } from "./types";

const api = new ApiClient("");

let articles: Article[] = [];
let currentArticle: Article | null = null;
let entityClass: EntityClass = "individual";
let review: ReviewState | null = null;
let verdicts: Verdict[] = [];
let statusLine = "";

function $(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function setStatusLine(text: string): void {
  statusLine = text;
  render();
}

async function selectArticle(article: Article): Promise<void> {
  currentArticle = article;
  verdicts = [];
  review = await loadReview(api, article.id, entityClass);
  setStatusLine("");
}

async function switchClass(next: EntityClass): Promise<void> {
  entityClass = next;
  if (currentArticle) {
    verdicts = [];
    review = await loadReview(api, currentArticle.id, entityClass);
  }
  setStatusLine("");
}

function mutate(next: ReviewState): void {
  review = next;
  render();
}

async function onSave(): Promise<void> {
  if (!review) return;
  const outcome = await saveReview(api, review);
  review = outcome.state;
  setStatusLine(
    outcome.kind === "saved"
      ? `Saved as version ${outcome.state.version}.`
      : "Conflict: this draft changed on the server while you edited.",
  );
}

async function onVerify(): Promise<void> {
  if (!currentArticle) return;
  try {
    const result = await api.verify(currentArticle.id, entityClass);
    verdicts = result.verdicts;
    setStatusLine(`Verification returned ${verdicts.length} verdict(s); advisory only.`);
  } catch (error) {
    setStatusLine(`Verification unavailable: ${(error as ApiError).message}`);
  }
}

async function onExport(): Promise<void> {
  const name = window.prompt("Dataset name for the export?", "reviewed");
  if (!name) return;
  try {
    const doc = await api.exportDataset(name);
    const blob = new Blob([JSON.stringify(doc, null, 2)], { type: "application/json" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = `${name}.json`;
    link.click();
    URL.revokeObjectURL(link.href);
    setStatusLine(`Exported ${doc.articles.length} articles.`);
  } catch (error) {
    setStatusLine(`Export refused: ${(error as ApiError).message}`);
  }
}

function entryRow(index: number): HTMLElement {
  const entry = review!.entries[index];
  const row = document.createElement("div");
  row.className = `entry entry-${entry.status}`;

  const text = document.createElement("input");
  text.value = entry.text;
  text.addEventListener("change", () => mutate(editText(review!, index, text.value)));
  row.appendChild(text);

  const badge = document.createElement("span");
  badge.className = "badge";
  badge.textContent = `${entry.status} · ${entry.source}`;
  row.appendChild(badge);

  for (const status of ["accepted", "rejected"] as const) {
    const button = document.createElement("button");
    button.textContent = status === "accepted" ? "accept" : "reject";
    button.disabled = entry.status === status;
    button.addEventListener("click", () => mutate(setStatus(review!, index, status)));
    row.appendChild(button);
  }
  if (entry.status === "added") {
    const drop = document.createElement("button");
    drop.textContent = "remove";
    drop.addEventListener("click", () => mutate(removeEntry(review!, index)));
    row.appendChild(drop);
  }
  const verdict = verdicts.find((v) => v.entry === entry.text);
  if (verdict) {
    const flag = document.createElement("span");
    flag.className = `verdict verdict-${verdict.verdict}`;
    flag.title = verdict.note;
    flag.textContent = verdict.verdict;
    row.appendChild(flag);
  }
  return row;
}

function render(): void {
  const list = $("article-list");
  list.replaceChildren(
    ...articles.map((article) => {
      const item = document.createElement("li");
      const link = document.createElement("a");
      link.textContent = article.title ?? article.id;
      link.href = "#";
      if (article.id === currentArticle?.id) item.className = "current";
      link.addEventListener("click", (event) => {
        event.preventDefault();
        void selectArticle(article);
      });
      item.appendChild(link);
      return item;
    }),
  );

  for (const cls of ["individual", "organization"] as const) {
    const tab = $(`tab-${cls}`) as HTMLButtonElement;
    tab.classList.toggle("active", entityClass === cls);
  }

  const body = $("article-body");
  const entriesBox = $("entries");
  const conflictBox = $("conflict");
  if (!currentArticle || !review) {
    body.textContent = "Select an article to review.";
    entriesBox.replaceChildren();
    conflictBox.hidden = true;
  } else {
    body.innerHTML = highlightBody(currentArticle.body, review.entries);
    entriesBox.replaceChildren(...review.entries.map((_, i) => entryRow(i)));

    conflictBox.hidden = review.conflict === null;
    if (review.conflict) {
      $("conflict-info").textContent =
        `Server is at version ${review.conflict.version}; your edits are based on ` +
        `version ${review.version} and are still held locally.`;
    }
  }

  ($("save") as HTMLButtonElement).disabled = !review?.dirty;
  $("dirty-indicator").textContent = review?.dirty ? "unsaved changes" : "";
  $("status-line").textContent = statusLine;
}

async function boot(): Promise<void> {
  articles = await api.listArticles();

  $("tab-individual").addEventListener("click", () => void switchClass("individual"));
  $("tab-organization").addEventListener("click", () => void switchClass("organization"));
  $("save").addEventListener("click", () => void onSave());
  $("verify").addEventListener("click", () => void onVerify());
  $("export").addEventListener("click", () => void onExport());
  $("accept-all").addEventListener("click", () => review && mutate(acceptAll(review)));
  $("add-form").addEventListener("submit", (event) => {
    event.preventDefault();
    const input = $("add-text") as HTMLInputElement;
    if (review) mutate(addEntry(review, input.value));
    input.value = "";
  });
  $("conflict-keep").addEventListener("click", () => review && mutate(keepLocalEdits(review)));
  $("conflict-adopt").addEventListener("click", () => review && mutate(adoptServerDraft(review)));

  render();
}

void boot();
