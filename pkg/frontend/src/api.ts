import type { ExampleListDoc, SessionDoc } from "./types.js";

/** Error body surfaced by the session API: {"error": code, "message": text}. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function fail(res: Response): Promise<never> {
  let code = `HTTP${res.status}`;
  let message = res.statusText || `request failed with status ${res.status}`;
  try {
    const body: unknown = await res.json();
    if (body && typeof body === "object") {
      const rec = body as Record<string, unknown>;
      if (typeof rec["error"] === "string") code = rec["error"];
      if (typeof rec["message"] === "string") message = rec["message"];
      // FastAPI validation errors arrive as {"detail": [...]}
      else if (rec["detail"] !== undefined) message = JSON.stringify(rec["detail"]);
    }
  } catch {
    /* non-JSON body; keep the status line */
  }
  throw new ApiError(res.status, code, message);
}

/** Thin typed client over the session endpoints; no state of its own. */
export class SessionApi {
  constructor(private readonly base: string = "") {}

  private async send<T>(path: string, init?: RequestInit): Promise<T> {
    let res: Response;
    try {
      res = await fetch(this.base + path, init);
    } catch (exc) {
      const reason = exc instanceof Error ? exc.message : String(exc);
      throw new ApiError(0, "NetworkError", `cannot reach the server: ${reason}`);
    }
    if (!res.ok) await fail(res);
    return (await res.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.send<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  listExamples(): Promise<ExampleListDoc> {
    return this.send<ExampleListDoc>("/api/examples");
  }

  createSession(question: string): Promise<SessionDoc> {
    return this.post<SessionDoc>("/api/sessions", { question });
  }

  getSession(id: string): Promise<SessionDoc> {
    return this.send<SessionDoc>(`/api/sessions/${encodeURIComponent(id)}`);
  }

  selectEntity(id: string, mentionIndex: number, candidateIndex: number): Promise<SessionDoc> {
    return this.post<SessionDoc>(`/api/sessions/${encodeURIComponent(id)}/entity-selection`, {
      mention_index: mentionIndex,
      candidate_index: candidateIndex,
    });
  }

  selectTemplate(id: string, templateIndex: number): Promise<SessionDoc> {
    return this.post<SessionDoc>(`/api/sessions/${encodeURIComponent(id)}/template-selection`, {
      template_index: templateIndex,
    });
  }

  runQuery(id: string, sparql: string): Promise<SessionDoc> {
    return this.post<SessionDoc>(`/api/sessions/${encodeURIComponent(id)}/query`, { sparql });
  }

  regenerate(id: string): Promise<SessionDoc> {
    return this.post<SessionDoc>(`/api/sessions/${encodeURIComponent(id)}/regenerate`, {});
  }
}
