import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

function fakeFetch(status: number, body: unknown) {
  const calls: { url: string; options: RequestInit }[] = [];
  const fn = (async (url: string, options: RequestInit = {}) => {
    calls.push({ url, options });
    return {
      ok: status >= 200 && status < 300,
      status,
      statusText: `status ${status}`,
      json: async () => {
        if (body instanceof Error) throw body;
        return body;
      },
    } as Response;
  }) as typeof fetch;
  return { fn, calls };
}

describe("ApiClient", () => {
  it("creates a session", async () => {
    const { fn, calls } = fakeFetch(201, { session_id: "abc" });
    const client = new ApiClient("http://localhost:8710/", fn);
    const session = await client.createSession();
    expect(session.session_id).toBe("abc");
    expect(calls[0].url).toBe("http://localhost:8710/v1/sessions");
    expect(calls[0].options.method).toBe("POST");
  });

  it("sends a message with a JSON body", async () => {
    const { fn, calls } = fakeFetch(200, { replies: ["hi"], debug: {} });
    const client = new ApiClient("http://localhost:8710", fn);
    const response = await client.sendMessage("abc", "hello there");
    expect(response.replies).toEqual(["hi"]);
    expect(calls[0].url).toBe("http://localhost:8710/v1/sessions/abc/messages");
    expect(JSON.parse(calls[0].options.body as string)).toEqual({
      text: "hello there",
    });
    expect((calls[0].options.headers as Record<string, string>)[
      "Content-Type"]).toBe("application/json");
  });

  it("fetches the transcript with GET", async () => {
    const { fn, calls } = fakeFetch(200, {
      session_id: "abc", handed_off: false, turns: [],
    });
    const client = new ApiClient("http://localhost:8710", fn);
    const transcript = await client.getTranscript("abc");
    expect(transcript.handed_off).toBe(false);
    expect(calls[0].url).toBe(
      "http://localhost:8710/v1/sessions/abc/transcript");
    expect(calls[0].options.method).toBe("GET");
  });

  it("raises ApiError with the service detail", async () => {
    const { fn } = fakeFetch(409, { detail: "session already handed off" });
    const client = new ApiClient("http://localhost:8710", fn);
    const error = await client.requestHandoff("abc").catch((e) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect(error.status).toBe(409);
    expect(error.detail).toBe("session already handed off");
  });

  it("falls back to the status text for non-JSON error bodies", async () => {
    const { fn } = fakeFetch(500, new Error("not json"));
    const client = new ApiClient("http://localhost:8710", fn);
    const error = await client.createSession().catch((e) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect(error.detail).toBe("status 500");
  });
});
