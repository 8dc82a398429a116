// Wires DOM events to the controller; main.ts calls this on the real page,
// tests call it on a synthetic document with an injected fetch.

import { ControllerOptions, SearchController } from "./controller.js";
import { findRefs, render } from "./view.js";

export function bootstrap(doc: Document, options: ControllerOptions = {}): SearchController {
  const refs = findRefs(doc);
  const controller = new SearchController({
    ...options,
    onChange: (state) => {
      render(state, refs);
      options.onChange?.(state);
    },
  });

  const input = doc.getElementById("query") as HTMLInputElement;
  input.addEventListener("input", () => controller.setQuery(input.value));

  refs.grid.addEventListener("click", (event) => {
    const card = (event.target as HTMLElement).closest<HTMLElement>(".card");
    if (card?.dataset.id) void controller.openDetail(card.dataset.id);
  });

  refs.detail.addEventListener("click", (event) => {
    if ((event.target as HTMLElement).id === "detail-close") controller.closeDetail();
  });

  refs.showMore.addEventListener("click", () => controller.showMore());

  render(controller.state, refs);
  return controller;
}
