/**
 * Typed client for the knnloop session service.
 *
 * Every value shown in the UI comes from these responses verbatim; there
 * is no translation logic on the client side.
 */

export interface SessionConfig {
  mode?: "adaptive" | "constant" | "base";
  lam?: number;
  k?: number;
  temperature?: number;
  policy_temperature?: number;
  fallback_lambda?: number;
}

export interface TokenDiagnostics {
  token: string;
  lambda: number;
  p_nmt_top: [string, number][];
  p_knn_top: [string, number][];
  neighbor_distances: number[];
}

export interface TranslateResponse {
  tokens: string[];
  text: string;
  diagnostics: TokenDiagnostics[];
  oov: string[];
  latency_ms: number;
}

export interface CorrectResponse {
  token_entries_added: number;
  policy_entries_added: number;
  oov: { source: string[]; corrected: string[] };
}

export interface LambdaBucket {
  low: number;
  high: number;
  count: number;
  mean_lambda: number | null;
}

export interface StatsResponse {
  datastore: { token_entries: number; policy_entries: number };
  adapted_sentences: number;
  running: { bleu?: number; ter_noshift?: number };
  lambda_buckets: { total: number; buckets: LambdaBucket[] };
  config: Record<string, unknown>;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function parseError(response: Response): Promise<never> {
  let detail = `${response.status}`;
  try {
    const body = (await response.json()) as { error?: string; detail?: string };
    detail = body.error ?? body.detail ?? detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, detail);
}

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    if (!response.ok) {
      await parseError(response);
    }
    return (await response.json()) as T;
  }

  health(): Promise<{ status: string }> {
    return this.request("/healthz");
  }

  async createSession(config: SessionConfig = {}): Promise<string> {
    const payload = await this.request<{ session_id: string }>("/sessions", {
      method: "POST",
      body: JSON.stringify(config),
    });
    return payload.session_id;
  }

  translate(sessionId: string, source: string): Promise<TranslateResponse> {
    return this.request(`/sessions/${sessionId}/translate`, {
      method: "POST",
      body: JSON.stringify({ source }),
    });
  }

  correct(sessionId: string, source: string, corrected: string): Promise<CorrectResponse> {
    return this.request(`/sessions/${sessionId}/correct`, {
      method: "POST",
      body: JSON.stringify({ source, corrected }),
    });
  }

  stats(sessionId: string): Promise<StatsResponse> {
    return this.request(`/sessions/${sessionId}/stats`);
  }

  clear(sessionId: string): Promise<{ cleared: boolean }> {
    return this.request(`/sessions/${sessionId}/clear`, { method: "POST" });
  }
}
