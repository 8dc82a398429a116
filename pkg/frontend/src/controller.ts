// Search view state machine: debounced input, last-write-wins fetches.
//
// Every dispatched request carries a sequence number; a response only lands
// if its number still matches the latest one, so out-of-order arrivals can
// never paint stale results over a newer query.

import {
  ApiError,
  FetchLike,
  ImageDetail,
  SearchResult,
  fetchRecord,
  searchImages,
} from "./api.js";

export interface SearchViewState {
  queryText: string;
  inFlight: boolean;
  results: SearchResult[];
  total: number;
  limit: number;
  selected: ImageDetail | null;
  error: string | null;
}

export interface ControllerOptions {
  fetchFn?: FetchLike;
  debounceMs?: number;
  limit?: number;
  onChange?: (state: SearchViewState) => void;
}

export const DEFAULT_DEBOUNCE_MS = 300;
export const DEFAULT_LIMIT = 24;
export const SHOW_MORE_STEP = 24;
export const MAX_LIMIT = 100;

export class SearchController {
  readonly state: SearchViewState;

  private readonly fetchFn: FetchLike;
  private readonly debounceMs: number;
  private readonly onChange: (state: SearchViewState) => void;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private searchSeq = 0;
  private detailSeq = 0;

  constructor(options: ControllerOptions = {}) {
    this.fetchFn = options.fetchFn ?? ((input) => fetch(input));
    this.debounceMs = options.debounceMs ?? DEFAULT_DEBOUNCE_MS;
    this.onChange = options.onChange ?? (() => {});
    this.state = {
      queryText: "",
      inFlight: false,
      results: [],
      total: 0,
      limit: options.limit ?? DEFAULT_LIMIT,
      selected: null,
      error: null,
    };
  }

  /** Handle a keystroke; empty input clears the grid without a request. */
  setQuery(text: string): void {
    this.state.queryText = text;
    this.cancelPending();
    if (text.trim() === "") {
      this.searchSeq += 1; // invalidate anything still in flight
      this.state.inFlight = false;
      this.state.results = [];
      this.state.total = 0;
      this.state.error = null;
      this.state.selected = null;
      this.state.limit = DEFAULT_LIMIT;
      this.emit();
      return;
    }
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.runSearch();
    }, this.debounceMs);
    this.emit();
  }

  /** Raise the result limit and refetch immediately. */
  showMore(): void {
    if (this.state.queryText.trim() === "") return;
    this.state.limit = Math.min(this.state.limit + SHOW_MORE_STEP, MAX_LIMIT);
    this.cancelPending();
    void this.runSearch();
  }

  async openDetail(id: string): Promise<void> {
    const seq = ++this.detailSeq;
    try {
      const detail = await fetchRecord(id, this.fetchFn);
      if (seq !== this.detailSeq) return;
      this.state.selected = detail;
      this.state.error = null;
    } catch (error) {
      if (seq !== this.detailSeq) return;
      this.state.selected = null;
      this.state.error = describe(error);
    }
    this.emit();
  }

  closeDetail(): void {
    this.detailSeq += 1;
    this.state.selected = null;
    this.emit();
  }

  private cancelPending(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }

  private async runSearch(): Promise<void> {
    const seq = ++this.searchSeq;
    this.state.inFlight = true;
    this.emit();
    try {
      const response = await searchImages(this.state.queryText, this.state.limit, this.fetchFn);
      if (seq !== this.searchSeq) return; // superseded by a newer keystroke
      this.state.results = response.results;
      this.state.total = response.total;
      this.state.error = null;
      if (
        this.state.selected !== null &&
        !response.results.some((r) => r.id === this.state.selected?.id)
      ) {
        this.state.selected = null;
      }
    } catch (error) {
      if (seq !== this.searchSeq) return;
      this.state.results = [];
      this.state.total = 0;
      this.state.error = describe(error);
    } finally {
      if (seq === this.searchSeq) {
        this.state.inFlight = false;
        this.emit();
      }
    }
  }

  private emit(): void {
    this.onChange(this.state);
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return error.message;
  if (error instanceof Error) return error.message;
  return String(error);
}
