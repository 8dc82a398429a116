// Full loop against a scripted fixture API: type, see cards, refine, clear.

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { bootstrap } from "../src/app.js";
import { deferredFetch, jsonResponse, PAGE_HTML, result, scriptedFetch, searchPayload } from "./support.js";

const PAIR = [
  result("a_small_brown_animal_sitting_in_tall_grass", {
    caption: "A small brown animal sitting in tall grass",
    tags: ["happy"],
    matched: ["animal", "happy"],
    score: 3,
  }),
  result("dry_land_with_animals_and_people_on_it", {
    caption: "Dry land with animals and people on it",
    tags: ["happy"],
    matched: ["animal", "happy"],
    score: 3,
  }),
];

function type(text: string): void {
  const input = document.getElementById("query") as HTMLInputElement;
  input.value = text;
  input.dispatchEvent(new Event("input", { bubbles: true }));
}

function cardNames(): string[] {
  return [...document.querySelectorAll("#grid .card strong")].map((el) => el.textContent ?? "");
}

beforeEach(() => {
  document.body.innerHTML = PAGE_HTML;
  vi.useFakeTimers();
});

afterEach(() => {
  vi.useRealTimers();
});

describe("search loop", () => {
  it("typing the two-term query renders exactly the fixture pair, in API order", async () => {
    const { fetchFn, calls } = scriptedFetch([
      ["/api/search", () => jsonResponse(searchPayload(PAIR))],
    ]);
    bootstrap(document, { fetchFn });

    type("Animal, happy");
    await vi.advanceTimersByTimeAsync(300);

    expect(calls).toHaveLength(1);
    expect(calls[0]).toContain("q=Animal%2C+happy");
    expect(cardNames()).toEqual([
      "a_small_brown_animal_sitting_in_tall_grass.jpg",
      "dry_land_with_animals_and_people_on_it.jpg",
    ]);
  });

  it("clearing the box clears the grid without another request", async () => {
    const { fetchFn, calls } = scriptedFetch([
      ["/api/search", () => jsonResponse(searchPayload(PAIR))],
    ]);
    bootstrap(document, { fetchFn });

    type("Animal, happy");
    await vi.advanceTimersByTimeAsync(300);
    expect(cardNames()).toHaveLength(2);

    type("");
    await vi.advanceTimersByTimeAsync(1000);

    expect(calls).toHaveLength(1);
    expect(cardNames()).toEqual([]);
    expect(document.getElementById("status")?.textContent).toContain("Type keywords");
  });

  it("out-of-order responses never paint stale results", async () => {
    const { fetchFn, pending } = deferredFetch();
    bootstrap(document, { fetchFn });

    type("Animal");
    await vi.advanceTimersByTimeAsync(300);
    type("Animal, happy");
    await vi.advanceTimersByTimeAsync(300);
    expect(pending).toHaveLength(2);

    // newest settles first, older one afterwards
    pending[1].resolve(jsonResponse(searchPayload(PAIR)));
    await vi.advanceTimersByTimeAsync(0);
    expect(cardNames()).toHaveLength(2);

    pending[0].resolve(jsonResponse(searchPayload([result("stale_everything")], 1)));
    await vi.advanceTimersByTimeAsync(0);
    expect(cardNames()).toEqual([
      "a_small_brown_animal_sitting_in_tall_grass.jpg",
      "dry_land_with_animals_and_people_on_it.jpg",
    ]);
  });

  it("clicking a card opens the detail panel with the original name", async () => {
    const detail = {
      id: PAIR[0].id,
      path: PAIR[0].display_name,
      original_name: "8c1aa7ed-1c6a-4cf2-8fas-d4a8dbbfd3e.jpg",
      display_name: PAIR[0].display_name,
      caption: PAIR[0].caption,
      caption_source: "mock",
      tags: ["happy"],
      readable_original: false,
      ingested_at: "2026-01-15T08:00:00Z",
    };
    const { fetchFn } = scriptedFetch([
      ["/file", () => new Response("jpg")],
      [`/api/images/${PAIR[0].id}`, () => jsonResponse(detail)],
      ["/api/search", () => jsonResponse(searchPayload(PAIR))],
    ]);
    bootstrap(document, { fetchFn });

    type("Animal, happy");
    await vi.advanceTimersByTimeAsync(300);

    const card = document.querySelector<HTMLElement>("#grid .card");
    card?.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    await vi.advanceTimersByTimeAsync(0);

    const panel = document.getElementById("detail") as HTMLElement;
    expect(panel.hidden).toBe(false);
    expect(panel.textContent).toContain("8c1aa7ed-1c6a-4cf2-8fas-d4a8dbbfd3e.jpg");

    panel.querySelector<HTMLElement>("#detail-close")?.dispatchEvent(
      new MouseEvent("click", { bubbles: true }),
    );
    expect(panel.hidden).toBe(true);
  });

  it("a 400 reply shows the server's error field in the banner", async () => {
    const { fetchFn } = scriptedFetch([
      ["/api/search", () => jsonResponse({ error: "empty_query" }, 400)],
    ]);
    bootstrap(document, { fetchFn });

    type("???");
    await vi.advanceTimersByTimeAsync(300);

    const banner = document.getElementById("error") as HTMLElement;
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toBe("empty_query");
  });
});
