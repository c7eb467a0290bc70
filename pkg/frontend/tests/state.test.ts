import { describe, expect, it } from "vitest";

import {
  acceptAll,
  addEntry,
  adoptServerDraft,
  editText,
  fromDraft,
  keepLocalEdits,
  keptEntries,
  markConflict,
  markSaved,
  removeEntry,
  setStatus,
} from "../src/state";
import type { Draft } from "../src/types";

const draft: Draft = {
  article_id: "a1",
  entity_class: "organization",
  version: 2,
  entries: [
    { text: "Helix Group", status: "proposed", source: "baseline", note: "" },
    { text: "Ghost Corp", status: "proposed", source: "baseline", note: "" },
  ],
};

describe("review state", () => {
  it("derives cleanly from a fetched draft", () => {
    const state = fromDraft(draft);
    expect(state.version).toBe(2);
    expect(state.dirty).toBe(false);
    expect(state.conflict).toBeNull();
  });

  it("status toggles and edits set the dirty flag", () => {
    let state = fromDraft(draft);
    state = setStatus(state, 0, "accepted");
    expect(state.entries[0].status).toBe("accepted");
    expect(state.dirty).toBe(true);
    state = editText(state, 0, "Helix Group Ltd");
    expect(state.entries[0].text).toBe("Helix Group Ltd");
  });

  it("accept-all only touches proposed entries", () => {
    let state = fromDraft(draft);
    state = setStatus(state, 1, "rejected");
    state = acceptAll(state);
    expect(state.entries.map((e) => e.status)).toEqual(["accepted", "rejected"]);
  });

  it("added entries are human-sourced and trimmed", () => {
    const state = addEntry(fromDraft(draft), "  Europol ");
    const added = state.entries[2];
    expect(added).toMatchObject({ text: "Europol", status: "added", source: "human" });
  });

  it("blank additions are ignored", () => {
    const state = addEntry(fromDraft(draft), "   ");
    expect(state.entries).toHaveLength(2);
  });

  it("remove drops exactly one entry", () => {
    const state = removeEntry(addEntry(fromDraft(draft), "X"), 2);
    expect(state.entries).toHaveLength(2);
  });

  it("saving clears dirty and adopts the new version", () => {
    const state = markSaved(setStatus(fromDraft(draft), 0, "accepted"), 3);
    expect(state.version).toBe(3);
    expect(state.dirty).toBe(false);
  });

  it("conflicts retain local edits alongside the server draft", () => {
    const local = setStatus(fromDraft(draft), 0, "accepted");
    const server: Draft = { ...draft, version: 5, entries: [] };
    const conflicted = markConflict(local, server);
    expect(conflicted.entries[0].status).toBe("accepted"); // nothing lost
    expect(conflicted.conflict?.version).toBe(5);

    const reapplied = keepLocalEdits(conflicted);
    expect(reapplied.version).toBe(5);
    expect(reapplied.entries[0].status).toBe("accepted");
    expect(reapplied.dirty).toBe(true);

    const adopted = adoptServerDraft(conflicted);
    expect(adopted.entries).toHaveLength(0);
    expect(adopted.version).toBe(5);
    expect(adopted.dirty).toBe(false);
  });

  it("kept entries are the accepted and added texts", () => {
    let state = fromDraft(draft);
    state = setStatus(state, 0, "accepted");
    state = setStatus(state, 1, "rejected");
    state = addEntry(state, "Europol");
    expect(keptEntries(state)).toEqual(["Helix Group", "Europol"]);
  });
});
