import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { loadReview, saveReview } from "../src/flow";
import { acceptAll, addEntry, keepLocalEdits, setStatus } from "../src/state";
import { FakeService, demoArticles } from "./fake_service";

describe("review flow against the service contract", () => {
  let service: FakeService;
  let api: ApiClient;

  beforeEach(() => {
    service = new FakeService(demoArticles());
    service.drafts.set("a1/organization", { version: 0, entries: [] });
    service.install();
    api = new ApiClient("");
  });

  async function reviewEverything(): Promise<void> {
    for (const article of demoArticles()) {
      for (const cls of ["individual", "organization"] as const) {
        let state = await loadReview(api, article.id, cls);
        state = acceptAll(state);
        if (article.id === "a2" && cls === "individual") {
          state = addEntry(state, "Noor Aziz");
        }
        const outcome = await saveReview(api, state);
        expect(outcome.kind).toBe("saved");
      }
    }
  }

  it("accept-all plus one added entry round-trips into the export", async () => {
    await reviewEverything();
    const doc = await api.exportDataset("reviewed");
    const a2 = doc.gold.find((g) => g.article_id === "a2")!;
    expect(a2.individuals).toContain("Noor Aziz");
    expect(doc.articles).toHaveLength(2);
  });

  it("saving increments the stored version", async () => {
    let state = await loadReview(api, "a1", "organization");
    expect(state.version).toBe(0);
    const outcome = await saveReview(api, addEntry(state, "Port Authority"));
    expect(outcome.kind).toBe("saved");
    expect(outcome.state.version).toBe(1);
    expect(outcome.state.dirty).toBe(false);
  });

  it("a concurrent edit surfaces as a conflict and never overwrites", async () => {
    // two reviewers load the same draft version
    const mine = await loadReview(api, "a1", "organization");
    const theirs = await loadReview(api, "a1", "organization");

    const theirSave = await saveReview(api, addEntry(theirs, "Europol"));
    expect(theirSave.kind).toBe("saved");

    const myEdit = addEntry(mine, "Interpol");
    const myOutcome = await saveReview(api, myEdit);
    expect(myOutcome.kind).toBe("conflict");
    // local edits retained, server draft attached
    expect(myOutcome.state.entries.map((e) => e.text)).toContain("Interpol");
    expect(myOutcome.state.conflict?.entries.map((e) => e.text)).toContain("Europol");
    // the server still holds the first writer's save, untouched
    expect(service.drafts.get("a1/organization")!.entries.map((e) => e.text)).toEqual([
      "Europol",
    ]);

    // explicit re-apply on the fresh version then succeeds
    const retried = await saveReview(api, keepLocalEdits(myOutcome.state));
    expect(retried.kind).toBe("saved");
    expect(retried.state.version).toBe(2);
  });

  it("export refuses while any article is unreviewed", async () => {
    let state = await loadReview(api, "a1", "individual");
    state = setStatus(addEntry(state, "Mira Holt"), 0, "accepted");
    await saveReview(api, state);
    await expect(api.exportDataset("partial")).rejects.toThrowError(/a2/);
  });
});
