import { deepStrictEqual } from "node:assert";
import { readFileSync } from "node:fs";
import { join } from "node:path";

import type { SessionDoc } from "../src/types.js";

export function fixture<T>(name: string): T {
  // vitest runs with the package as cwd; import.meta.url is rewritten by
  // the transform, so resolve from the working directory instead
  const raw = readFileSync(join(process.cwd(), "tests", "fixtures", name), "utf8");
  return JSON.parse(raw) as T;
}

/** Deep-copied session fixture so a test can tweak fields freely. */
export function sessionFixture(name: string): SessionDoc {
  return fixture<SessionDoc>(name);
}

interface Expectation {
  method: string;
  path: string;
  body?: unknown;
  status?: number;
  /* a promise here holds the response open until the test releases it */
  payload: unknown;
}

interface SeenRequest {
  method: string;
  path: string;
  body: unknown;
}

/** Strict scripted double for global fetch: requests must arrive in the
 *  expected order with the expected bodies, anything else throws. */
export class FetchScript {
  private queue: Expectation[] = [];
  readonly seen: SeenRequest[] = [];

  expect(method: string, path: string, payload: unknown, opts: { body?: unknown; status?: number } = {}): this {
    this.queue.push({ method, path, payload, body: opts.body, status: opts.status });
    return this;
  }

  install(): void {
    const handler = async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
      const path =
        typeof input === "string" ? input : input instanceof URL ? input.href : input.url;
      const method = init?.method ?? "GET";
      const body = init?.body !== undefined ? JSON.parse(String(init.body)) : null;
      this.seen.push({ method, path, body });
      const next = this.queue.shift();
      if (!next) {
        throw new Error(`unexpected request: ${method} ${path}`);
      }
      if (next.method !== method || next.path !== path) {
        throw new Error(`expected ${next.method} ${next.path}, got ${method} ${path}`);
      }
      if (next.body !== undefined) {
        deepStrictEqual(body, next.body);
      }
      const payload = await next.payload;
      return new Response(JSON.stringify(payload), {
        status: next.status ?? 200,
        headers: { "content-type": "application/json" },
      });
    };
    globalThis.fetch = handler as unknown as typeof fetch;
  }

  assertDone(): void {
    if (this.queue.length > 0) {
      const left = this.queue.map((e) => `${e.method} ${e.path}`).join(", ");
      throw new Error(`expected requests never arrived: ${left}`);
    }
  }
}

/** Lets queued microtasks and zero-delay timers drain. */
export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
