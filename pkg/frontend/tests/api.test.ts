import { describe, expect, it, vi } from "vitest";

import {
  buildTransferRequest,
  ServiceError,
  submitTransfer,
  TransferClient,
} from "../src/api.js";
import { createSession } from "../src/session.js";

const EXPORTS = { sourceB64: "c291cmNl", targetB64: "dGFyZ2V0" };

function sessionWithStyle() {
  const session = createSession(16, 16);
  session.styleImageB64 = "c3R5bGU=";
  return session;
}

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

describe("buildTransferRequest", () => {
  it("carries the three payloads", () => {
    const body = buildTransferRequest(sessionWithStyle(), EXPORTS);
    expect(body.source_style).toBe("c3R5bGU=");
    expect(body.source_sem).toBe("c291cmNl");
    expect(body.target_sem).toBe("dGFyZ2V0");
    expect(body.config).toBeUndefined();
  });

  it("zeroed sliders produce explicit omega overrides of 0", () => {
    const body = buildTransferRequest(sessionWithStyle(), EXPORTS, {
      omega1: 0,
      omega2: 0,
    });
    expect(body.config).toEqual({ omega1: 0, omega2: 0 });
  });

  it("requires a style image", () => {
    expect(() => buildTransferRequest(createSession(8, 8), EXPORTS)).toThrow(/style/);
  });
});

describe("TransferClient", () => {
  it("posts JSON and parses the response", async () => {
    const fetchMock = vi.fn(async (url: RequestInfo | URL, init?: RequestInit) => {
      expect(String(url)).toBe("http://svc/v1/transfer");
      const parsed = JSON.parse(String(init?.body));
      expect(parsed.source_style).toBe("c3R5bGU=");
      return jsonResponse(200, { image: "aW1n", timings: { stage1: 0.5 } });
    });
    const client = new TransferClient("http://svc", fetchMock as unknown as typeof fetch);
    const result = await client.transfer(
      buildTransferRequest(sessionWithStyle(), EXPORTS),
    );
    expect(result.image).toBe("aW1n");
    expect(fetchMock).toHaveBeenCalledOnce();
  });

  it("maps 422 to a stage-named error", async () => {
    const fetchMock = vi.fn(async () =>
      jsonResponse(422, { error: "dims disagree", stage: "I" }),
    );
    const client = new TransferClient("http://svc", fetchMock as unknown as typeof fetch);
    await expect(
      client.transfer(buildTransferRequest(sessionWithStyle(), EXPORTS)),
    ).rejects.toMatchObject({ status: 422, stage: "I" });
  });

  it("maps network failure to a retryable error preserving the session", async () => {
    const session = sessionWithStyle();
    const fetchMock = vi.fn(async () => {
      throw new Error("connection refused");
    });
    const client = new TransferClient("http://svc", fetchMock as unknown as typeof fetch);
    await expect(submitTransfer(session, client, EXPORTS)).rejects.toMatchObject({
      retryable: true,
    });
    expect(session.transferInFlight).toBe(false);
    expect(session.lastResult).toBeNull();
    expect(session.styleImageB64).toBe("c3R5bGU=");
  });
});

describe("submitTransfer", () => {
  it("stores the result and clears the in-flight flag", async () => {
    const session = sessionWithStyle();
    const fetchMock = vi.fn(async () =>
      jsonResponse(200, { image: "aW1n", timings: { stage1: 1.0, stage2: 2.0 } }),
    );
    const client = new TransferClient("http://svc", fetchMock as unknown as typeof fetch);
    await submitTransfer(session, client, EXPORTS);
    expect(session.lastResult?.imageB64).toBe("aW1n");
    expect(session.lastResult?.timings.stage2).toBe(2.0);
    expect(session.transferInFlight).toBe(false);
  });

  it("allows only one in-flight transfer per session", async () => {
    const session = sessionWithStyle();
    let release: (value: Response) => void = () => {};
    const gate = new Promise<Response>((resolve) => (release = resolve));
    const fetchMock = vi.fn(async () => gate);
    const client = new TransferClient("http://svc", fetchMock as unknown as typeof fetch);
    const first = submitTransfer(session, client, EXPORTS);
    await expect(submitTransfer(session, client, EXPORTS)).rejects.toThrow(/already running/);
    release(jsonResponse(200, { image: "aW1n", timings: {} }));
    await first;
    expect(session.transferInFlight).toBe(false);
  });
});
