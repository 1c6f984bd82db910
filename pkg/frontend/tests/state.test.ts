/** View-state invariants: stale-response discard, request serialization,
 *  failure handling, and preview-target bookkeeping. */
import { expect, it } from "vitest";

import { SessionApi } from "../src/api.js";
import { Store } from "../src/store.js";
import type { SessionDoc } from "../src/types.js";
import { FetchScript, flush, sessionFixture } from "./helpers.js";

const CHANG = "https://dblp.org/pid/69/4618";

function makeStore(): Store {
  return new Store(new SessionApi(""));
}

function base(doc: SessionDoc): string {
  return `/api/sessions/${doc.id}`;
}

it("discards a response older than the newest applied revision", async () => {
  const create = sessionFixture("create.json");
  const newer = { ...sessionFixture("tick_preprint.json"), revision: 7 };
  const stale = { ...sessionFixture("tick_template.json"), revision: 3 };
  const script = new FetchScript()
    .expect("POST", "/api/sessions", create)
    .expect("POST", `${base(create)}/entity-selection`, newer)
    .expect("POST", `${base(create)}/template-selection`, stale);
  script.install();

  const store = makeStore();
  await store.ask(create.question);
  await store.tickEntity(0, 1);
  await store.tickTemplate(2);

  expect(store.session?.revision).toBe(7);
  expect(store.session?.query.sparql).toBe(newer.query.sparql);
  expect(store.lastRevision).toBe(7);
  script.assertDone();
});

it("drops a mutation response that belongs to another session", async () => {
  const create = sessionFixture("create.json");
  const foreign = { ...sessionFixture("tick_preprint.json"), id: "someone-else" };
  const script = new FetchScript()
    .expect("POST", "/api/sessions", create)
    .expect("POST", `${base(create)}/entity-selection`, foreign);
  script.install();

  const store = makeStore();
  await store.ask(create.question);
  await store.tickEntity(0, 1);

  expect(store.session?.id).toBe(create.id);
  expect(store.session?.revision).toBe(create.revision);
  expect(store.session?.query.sparql).toBe(create.query.sparql);
});

it("serializes mutations: FIFO order, one request in flight", async () => {
  const create = sessionFixture("create.json");
  const tickPreprint = sessionFixture("tick_preprint.json");
  const tickTemplate = sessionFixture("tick_template.json");
  let release!: () => void;
  const gate = new Promise<void>((resolve) => {
    release = resolve;
  });
  const script = new FetchScript()
    .expect("POST", "/api/sessions", create)
    .expect("POST", `${base(create)}/entity-selection`, gate.then(() => tickPreprint))
    .expect("POST", `${base(create)}/template-selection`, tickTemplate);
  script.install();

  const store = makeStore();
  await store.ask(create.question);
  void store.tickEntity(0, 1);
  const done = store.tickTemplate(2);
  await flush();

  // the template request must wait for the entity one to settle
  expect(script.seen).toHaveLength(2);
  expect(store.busy("entity")).toBe(true);
  expect(store.busy("template")).toBe(true);
  expect(store.anyBusy()).toBe(true);

  release();
  await done;
  expect(script.seen).toHaveLength(3);
  expect(script.seen[2]?.path).toContain("template-selection");
  expect(store.session?.revision).toBe(tickTemplate.revision);
  expect(store.anyBusy()).toBe(false);
  script.assertDone();
});

it("keeps the previous state and raises a banner when a request fails", async () => {
  const create = sessionFixture("create.json");
  const tickPreprint = sessionFixture("tick_preprint.json");
  const script = new FetchScript()
    .expect("POST", "/api/sessions", create)
    .expect(
      "POST",
      `${base(create)}/entity-selection`,
      { error: "IndexOutOfRange", message: "no such candidate" },
      { status: 400 },
    )
    .expect("POST", `${base(create)}/entity-selection`, tickPreprint);
  script.install();

  const store = makeStore();
  await store.ask(create.question);
  await store.tickEntity(0, 9);

  expect(store.toast).toBe("no such candidate");
  expect(store.session?.revision).toBe(create.revision);
  expect(store.session?.query.sparql).toBe(create.query.sparql);
  expect(store.busy("entity")).toBe(false);

  await store.tickEntity(0, 1);
  expect(store.toast).toBeNull();
  expect(store.session?.revision).toBe(tickPreprint.revision);
});

it("previews the first answer URL by default and re-targets when it disappears", async () => {
  const create = sessionFixture("create.json");
  const tickTemplate = { ...sessionFixture("tick_template.json"), revision: 2 };
  const script = new FetchScript()
    .expect("POST", "/api/sessions", create)
    .expect("POST", `${base(create)}/template-selection`, tickTemplate);
  script.install();

  const store = makeStore();
  await store.ask(create.question);
  expect(store.previewedUrl).toBe("https://dblp.org/pid/184/3733");

  store.previewAnswer(CHANG); // local tick, no request
  expect(store.previewedUrl).toBe(CHANG);
  expect(script.seen).toHaveLength(1);

  await store.tickTemplate(2); // answer set without the person page
  expect(store.previewedUrl).toBe("https://dblp.org/rec/conf/naacl/DevlinCLT19");
});

it("retains a ticked preview while its URL stays in the answers", async () => {
  const create = sessionFixture("create.json");
  const again = { ...sessionFixture("create.json"), revision: 2 };
  const script = new FetchScript()
    .expect("POST", "/api/sessions", create)
    .expect("POST", `${base(create)}/entity-selection`, again);
  script.install();

  const store = makeStore();
  await store.ask(create.question);
  store.previewAnswer(CHANG);
  await store.tickEntity(0, 0);
  expect(store.session?.revision).toBe(2);
  expect(store.previewedUrl).toBe(CHANG);
});

it("accepts a fresh session even when its revision restarts", async () => {
  const create = sessionFixture("create.json");
  const bumped = { ...sessionFixture("tick_preprint.json"), revision: 9 };
  const fresh = { ...sessionFixture("create.json"), id: "fresh", revision: 1 };
  const script = new FetchScript()
    .expect("POST", "/api/sessions", create)
    .expect("POST", `${base(create)}/entity-selection`, bumped)
    .expect("POST", "/api/sessions", fresh);
  script.install();

  const store = makeStore();
  await store.ask(create.question);
  await store.tickEntity(0, 1);
  expect(store.lastRevision).toBe(9);

  await store.ask(create.question);
  expect(store.session?.id).toBe("fresh");
  expect(store.lastRevision).toBe(1);
});

it("preserves the editor draft across a rejected run", async () => {
  const create = sessionFixture("create.json");
  const runLimit1 = sessionFixture("run_limit1.json");
  const script = new FetchScript()
    .expect("POST", "/api/sessions", create)
    .expect(
      "POST",
      `${base(create)}/query`,
      { error: "QueryRejected", message: "endpoint denied the query" },
      { status: 400 },
    )
    .expect("POST", `${base(create)}/query`, { ...runLimit1, revision: 2 });
  script.install();

  const store = makeStore();
  await store.ask(create.question);
  store.setDraft("SELECT ?x WHERE { garbage");
  await store.run("SELECT ?x WHERE { garbage");

  expect(store.toast).toBe("endpoint denied the query");
  expect(store.draft).toBe("SELECT ?x WHERE { garbage");
  expect(store.session?.query.origin).toBe("generated");

  await store.run("fine");
  expect(store.draft).toBeNull();
  expect(store.toast).toBeNull();
});

it("ignores ticks when no session ever materialized", async () => {
  const script = new FetchScript();
  script.install();
  const store = makeStore();
  await store.tickEntity(0, 0);
  await store.whenIdle();
  expect(script.seen).toHaveLength(0);
  expect(store.toast).toBeNull();
});
