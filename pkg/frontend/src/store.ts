import { ApiError, SessionApi } from "./api.js";
import { answerUrls } from "./types.js";
import type { ExampleDoc, SessionDoc } from "./types.js";

export type RequestKind = "ask" | "entity" | "template" | "query" | "regenerate";

type Listener = () => void;

/** Client view state.  Everything the DOM shows is a function of this
 *  object plus nothing else; mutations only happen through server
 *  responses, except the answer-preview tick which is purely local. */
export class Store {
  session: SessionDoc | null = null;
  examples: ExampleDoc[] = [];
  /* URL shown in the preview pane; defaults to the first answer URL */
  previewedUrl: string | null = null;
  /* unsent editor text for the query box; null = mirror the session query */
  draft: string | null = null;
  /* transient banner for a failed request; cleared by the next success */
  toast: string | null = null;
  lastRevision = 0;

  private counts = new Map<RequestKind, number>();
  /* mutating requests are serialized: at most one in flight, FIFO order */
  private chain: Promise<void> = Promise.resolve();
  private listeners: Listener[] = [];

  constructor(private readonly api: SessionApi) {}

  subscribe(fn: Listener): void {
    this.listeners.push(fn);
  }

  private notify(): void {
    for (const fn of this.listeners) fn();
  }

  busy(kind: RequestKind): boolean {
    return (this.counts.get(kind) ?? 0) > 0;
  }

  anyBusy(): boolean {
    for (const n of this.counts.values()) if (n > 0) return true;
    return false;
  }

  /** Resolves once every queued request so far has settled. */
  whenIdle(): Promise<void> {
    return this.chain;
  }

  async loadExamples(): Promise<void> {
    try {
      const doc = await this.api.listExamples();
      this.examples = doc.examples;
    } catch {
      this.examples = []; // the page still works without suggestions
    }
    this.notify();
  }

  ask(question: string): Promise<void> {
    return this.enqueue("ask", () => this.api.createSession(question), true);
  }

  tickEntity(mentionIndex: number, candidateIndex: number): Promise<void> {
    return this.enqueue("entity", (sid) => this.api.selectEntity(sid, mentionIndex, candidateIndex));
  }

  tickTemplate(templateIndex: number): Promise<void> {
    return this.enqueue("template", (sid) => this.api.selectTemplate(sid, templateIndex));
  }

  run(sparql: string): Promise<void> {
    return this.enqueue("query", (sid) => this.api.runQuery(sid, sparql));
  }

  regenerate(): Promise<void> {
    return this.enqueue("regenerate", (sid) => this.api.regenerate(sid));
  }

  /** Answer-preview tick: swaps the pane target without any server call. */
  previewAnswer(url: string): void {
    this.previewedUrl = url;
    this.notify();
  }

  setDraft(text: string): void {
    this.draft = text;
  }

  dismissToast(): void {
    this.toast = null;
    this.notify();
  }

  private enqueue(
    kind: RequestKind,
    op: (sessionId: string) => Promise<SessionDoc>,
    replaces = false,
  ): Promise<void> {
    this.counts.set(kind, (this.counts.get(kind) ?? 0) + 1);
    this.notify();
    const step = this.chain.then(async () => {
      try {
        let doc: SessionDoc;
        if (replaces) {
          doc = await op("");
        } else {
          const sid = this.session?.id;
          if (!sid) return; // the session this tick targeted never materialized
          doc = await op(sid);
        }
        this.accept(doc, replaces);
      } catch (exc) {
        // prior state stays on screen; only the banner changes
        this.toast = exc instanceof ApiError ? exc.message : String(exc);
      } finally {
        this.counts.set(kind, (this.counts.get(kind) ?? 0) - 1);
        this.notify();
      }
    });
    this.chain = step;
    return step;
  }

  private accept(doc: SessionDoc, replaces: boolean): void {
    if (!replaces) {
      if (!this.session || doc.id !== this.session.id) return; // different session, drop
      if (doc.revision < this.lastRevision) return; // stale response, drop
    }
    this.session = doc;
    this.lastRevision = doc.revision;
    this.draft = null;
    this.toast = null;
    const urls = answerUrls(doc);
    if (urls.length === 0) {
      this.previewedUrl = null;
    } else if (replaces || this.previewedUrl === null || !urls.includes(this.previewedUrl)) {
      this.previewedUrl = urls[0] ?? null;
    }
  }
}
