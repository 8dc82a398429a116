// Typed client for the three read-only gallery endpoints.

export interface SearchResult {
  id: string;
  display_name: string;
  caption: string | null;
  tags: string[];
  matched: string[];
  score: number;
  file_url: string;
}

export interface SearchResponse {
  query: string[];
  total: number;
  results: SearchResult[];
}

export interface ImageDetail {
  id: string;
  path: string;
  original_name: string;
  display_name: string;
  caption?: string;
  caption_source: string;
  tags: string[];
  readable_original: boolean;
  ingested_at: string;
}

export interface Stats {
  images: number;
  terms: number;
  tagged: number;
}

export type FetchLike = (input: string) => Promise<Response>;

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
    this.name = "ApiError";
  }
}

async function getJson<T>(fetchFn: FetchLike, url: string): Promise<T> {
  const response = await fetchFn(url);
  if (!response.ok) {
    let message = `HTTP ${response.status}`;
    try {
      const body = (await response.json()) as { error?: string };
      if (body.error) message = body.error;
    } catch {
      // non-JSON error body; keep the status message
    }
    throw new ApiError(message, response.status);
  }
  return (await response.json()) as T;
}

export function searchImages(
  query: string,
  limit: number,
  fetchFn: FetchLike = fetch,
): Promise<SearchResponse> {
  const params = new URLSearchParams({ q: query, limit: String(limit) });
  return getJson<SearchResponse>(fetchFn, `/api/search?${params.toString()}`);
}

export function fetchRecord(id: string, fetchFn: FetchLike = fetch): Promise<ImageDetail> {
  return getJson<ImageDetail>(fetchFn, `/api/images/${encodeURIComponent(id)}`);
}

export function fetchStats(fetchFn: FetchLike = fetch): Promise<Stats> {
  return getJson<Stats>(fetchFn, "/api/stats");
}
