// DOM rendering: a pure projection of SearchViewState, no client-side
// sorting or filtering — card order is exactly the API's result order.

import { SearchResult } from "./api.js";
import { SearchViewState } from "./controller.js";

export interface ViewRefs {
  grid: HTMLElement;
  status: HTMLElement;
  errorBanner: HTMLElement;
  detail: HTMLElement;
  showMore: HTMLButtonElement;
}

export function findRefs(root: Document): ViewRefs {
  const get = (id: string): HTMLElement => {
    const el = root.getElementById(id);
    if (!el) throw new Error(`missing #${id}`);
    return el;
  };
  return {
    grid: get("grid"),
    status: get("status"),
    errorBanner: get("error"),
    detail: get("detail"),
    showMore: get("show-more") as HTMLButtonElement,
  };
}

function card(doc: Document, result: SearchResult): HTMLElement {
  const figure = doc.createElement("figure");
  figure.className = "card";
  figure.dataset.id = result.id;

  const img = doc.createElement("img");
  img.src = result.file_url;
  img.alt = result.caption ?? result.display_name;
  img.loading = "lazy";
  figure.appendChild(img);

  const caption = doc.createElement("figcaption");
  const name = doc.createElement("strong");
  name.textContent = result.display_name;
  caption.appendChild(name);

  if (result.tags.length > 0) {
    const tags = doc.createElement("span");
    tags.className = "tags";
    tags.textContent = result.tags.join(", ");
    caption.appendChild(tags);
  }

  const score = doc.createElement("span");
  score.className = "score";
  score.textContent = `score ${result.score}`;
  caption.appendChild(score);

  figure.appendChild(caption);
  return figure;
}

export function render(state: SearchViewState, refs: ViewRefs): void {
  const doc = refs.grid.ownerDocument;

  refs.errorBanner.textContent = state.error ?? "";
  refs.errorBanner.hidden = state.error === null;

  if (state.queryText.trim() === "") {
    refs.status.textContent = "Type keywords to search the catalog.";
  } else if (state.inFlight) {
    refs.status.textContent = "Searching…";
  } else if (state.error !== null) {
    refs.status.textContent = "";
  } else {
    refs.status.textContent =
      state.total === 0
        ? "No matches."
        : `${state.results.length} of ${state.total} match${state.total === 1 ? "" : "es"}`;
  }

  refs.grid.replaceChildren(...state.results.map((result) => card(doc, result)));
  refs.showMore.hidden = state.results.length >= state.total;

  renderDetail(state, refs, doc);
}

function renderDetail(state: SearchViewState, refs: ViewRefs, doc: Document): void {
  const detail = state.selected;
  refs.detail.hidden = detail === null;
  if (detail === null) {
    refs.detail.replaceChildren();
    return;
  }

  const close = doc.createElement("button");
  close.id = "detail-close";
  close.textContent = "×";

  const img = doc.createElement("img");
  img.src = `/api/images/${encodeURIComponent(detail.id)}/file`;
  img.alt = detail.caption ?? detail.display_name;

  const rows: Array<[string, string]> = [
    ["Caption", detail.caption ?? "(never captioned)"],
    ["Display name", detail.display_name],
    ["Original name", detail.original_name],
    ["Tags", detail.tags.length > 0 ? detail.tags.join(", ") : "(none)"],
    ["Ingested", detail.ingested_at],
    ["Caption source", detail.caption_source],
  ];
  const list = doc.createElement("dl");
  for (const [label, value] of rows) {
    const dt = doc.createElement("dt");
    dt.textContent = label;
    const dd = doc.createElement("dd");
    dd.textContent = value;
    list.append(dt, dd);
  }

  refs.detail.replaceChildren(close, img, list);
}
