// Fake fetch plumbing shared by the tests: scripted and deferrable responses.

import { SearchResult } from "../src/api.js";

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export function result(name: string, overrides: Partial<SearchResult> = {}): SearchResult {
  const id = name.repeat(8).padEnd(64, "0").slice(0, 64);
  return {
    id,
    display_name: `${name}.jpg`,
    caption: `A picture of ${name}`,
    tags: [],
    matched: ["animal"],
    score: 1.0,
    file_url: `/api/images/${id}/file`,
    ...overrides,
  };
}

export function searchPayload(results: SearchResult[], total = results.length) {
  return { query: ["animal"], total, results };
}

export interface Deferred {
  url: string;
  resolve: (response: Response) => void;
  reject: (error: Error) => void;
}

/** A fetch stub whose responses are resolved by hand, for race tests. */
export function deferredFetch() {
  const pending: Deferred[] = [];
  const fetchFn = (url: string) =>
    new Promise<Response>((resolve, reject) => {
      pending.push({ url, resolve, reject });
    });
  return { fetchFn, pending };
}

/** A fetch stub answering immediately from a URL-substring script. */
export function scriptedFetch(script: Array<[string, () => Response]>) {
  const calls: string[] = [];
  const fetchFn = async (url: string): Promise<Response> => {
    calls.push(url);
    for (const [needle, respond] of script) {
      if (url.includes(needle)) return respond();
    }
    return jsonResponse({ error: "not_found" }, 404);
  };
  return { fetchFn, calls };
}

export const PAGE_HTML = `
  <header>
    <input id="query" type="search">
  </header>
  <p id="status"></p>
  <p id="error" hidden></p>
  <main>
    <section id="grid"></section>
    <aside id="detail" hidden></aside>
  </main>
  <button id="show-more" hidden>Show more</button>
`;
