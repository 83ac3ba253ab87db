import type {
  HandoffResponse,
  MessageResponse,
  SessionResponse,
  TranscriptResponse,
} from "./types.js";

export class ApiError extends Error {
  status: number;
  detail: string;

  constructor(status: number, detail: string) {
    super(`HTTP ${status}: ${detail}`);
    this.status = status;
    this.detail = detail;
  }
}

async function raiseForStatus(response: Response): Promise<void> {
  if (response.ok) {
    return;
  }
  let detail = response.statusText;
  try {
    const body = await response.json();
    if (body && typeof body.detail === "string") {
      detail = body.detail;
    }
  } catch {
    // non-JSON error body: keep the status text
  }
  throw new ApiError(response.status, detail);
}

export class ApiClient {
  baseUrl: string;
  private fetchFn: typeof fetch;

  constructor(baseUrl: string, fetchFn: typeof fetch = fetch) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchFn = fetchFn;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const options: RequestInit = { method };
    if (body !== undefined) {
      options.headers = { "Content-Type": "application/json" };
      options.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(`${this.baseUrl}${path}`, options);
    await raiseForStatus(response);
    return (await response.json()) as T;
  }

  createSession(): Promise<SessionResponse> {
    return this.request<SessionResponse>("POST", "/v1/sessions");
  }

  sendMessage(sessionId: string, text: string): Promise<MessageResponse> {
    return this.request<MessageResponse>(
      "POST", `/v1/sessions/${sessionId}/messages`, { text });
  }

  getTranscript(sessionId: string): Promise<TranscriptResponse> {
    return this.request<TranscriptResponse>(
      "GET", `/v1/sessions/${sessionId}/transcript`);
  }

  requestHandoff(sessionId: string): Promise<HandoffResponse> {
    return this.request<HandoffResponse>(
      "POST", `/v1/sessions/${sessionId}/handoff`);
  }
}
