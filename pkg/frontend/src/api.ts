/**
 * Typed client for the analysis service. All strategy text shown in the
 * UI comes from these responses; nothing is computed client-side.
 */

export interface Recommendation {
  move: string;
  display: string;
}

export interface Detection {
  quad: [number, number][];
  label: string;
  role: string;
  neighbor_distances: number[];
}

export interface AnalysisResponse {
  detections: Detection[];
  player_hand: string[];
  dealer_upcard: string | null;
  recommendation: Recommendation | null;
  timings_ms: Record<string, number>;
}

export interface HealthResponse {
  status: string;
  model: { examples: number; k: number };
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly fetchFn: FetchLike;

  constructor(
    fetchFn?: FetchLike,
    private readonly base = "",
  ) {
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.base + path, init);
    } catch (err) {
      throw new ApiError(0, `service unreachable: ${String(err)}`);
    }
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      // tolerated: error statuses may carry no body
    }
    if (!response.ok) {
      const detail =
        body && typeof body === "object" && "error" in body
          ? String((body as { error: unknown }).error)
          : response.statusText;
      throw new ApiError(response.status, detail);
    }
    return body as T;
  }

  recommend(player: string[], dealer: string): Promise<Recommendation> {
    return this.request<Recommendation>("/api/recommend", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ player, dealer }),
    });
  }

  analyze(image: Blob, filename = "upload.png"): Promise<AnalysisResponse> {
    const form = new FormData();
    form.append("image", image, filename);
    return this.request<AnalysisResponse>("/api/analyze", { method: "POST", body: form });
  }

  async labels(): Promise<string[]> {
    const body = await this.request<{ labels: string[] }>("/api/labels");
    return body.labels;
  }

  health(): Promise<HealthResponse> {
    return this.request<HealthResponse>("/api/health");
  }
}
