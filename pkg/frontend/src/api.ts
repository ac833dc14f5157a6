import type { CanvasSession } from "./session.js";

export interface ConfigOverrides {
  omega1?: number;
  omega2?: number;
  fusion?: "concat" | "add" | "downsample";
  patch_size?: number;
  patch_size_global?: number;
  stride?: number;
  stages?: string[];
  blend1?: number;
  blend2?: number;
  se_scope?: "global" | "per-label";
}

export interface TransferRequestBody {
  source_style: string;
  source_sem: string;
  target_sem: string;
  config?: ConfigOverrides;
  trace?: boolean;
}

export interface TransferResponse {
  image: string;
  timings: Record<string, number>;
  trace?: Record<string, string>;
}

export class ServiceError extends Error {
  constructor(
    message: string,
    public status: number,
    public stage: string | null = null,
    public retryable = false,
  ) {
    super(message);
  }
}

export interface SemanticExports {
  sourceB64: string;
  targetB64: string;
}

/** Assemble the transfer payload from a session plus UI overrides. */
export function buildTransferRequest(
  session: CanvasSession,
  exports: SemanticExports,
  overrides: ConfigOverrides = {},
  trace = false,
): TransferRequestBody {
  if (!session.styleImageB64) {
    throw new Error("no style image loaded");
  }
  const body: TransferRequestBody = {
    source_style: session.styleImageB64,
    source_sem: exports.sourceB64,
    target_sem: exports.targetB64,
  };
  if (Object.keys(overrides).length > 0) body.config = overrides;
  if (trace) body.trace = true;
  return body;
}

export class TransferClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: typeof fetch = globalThis.fetch,
  ) {}

  async health(): Promise<{ status: string; weights_version: number }> {
    const resp = await this.fetchImpl(`${this.baseUrl}/v1/health`);
    if (!resp.ok) throw new ServiceError(`health check failed (${resp.status})`, resp.status);
    return resp.json();
  }

  async defaults(): Promise<Record<string, unknown>> {
    const resp = await this.fetchImpl(`${this.baseUrl}/v1/config/defaults`);
    if (!resp.ok) throw new ServiceError(`defaults failed (${resp.status})`, resp.status);
    return resp.json();
  }

  async transfer(body: TransferRequestBody): Promise<TransferResponse> {
    let resp: Response;
    try {
      resp = await this.fetchImpl(`${this.baseUrl}/v1/transfer`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
      });
    } catch (err) {
      throw new ServiceError(`service unreachable: ${err}`, 0, null, true);
    }
    if (resp.status === 422) {
      const detail = await resp.json().catch(() => ({}));
      throw new ServiceError(
        detail.error ?? "engine rejected the request",
        422,
        detail.stage ?? null,
      );
    }
    if (!resp.ok) {
      const detail = await resp.json().catch(() => ({}));
      throw new ServiceError(detail.error ?? `transfer failed (${resp.status})`, resp.status);
    }
    return resp.json();
  }
}

/** Run a transfer keeping the session consistent; painting stays usable. */
export async function submitTransfer(
  session: CanvasSession,
  client: TransferClient,
  exports: SemanticExports,
  overrides: ConfigOverrides = {},
): Promise<TransferResponse> {
  if (session.transferInFlight) {
    throw new ServiceError("a transfer is already running for this session", 0);
  }
  session.transferInFlight = true;
  try {
    const result = await client.transfer(buildTransferRequest(session, exports, overrides));
    session.lastResult = { imageB64: result.image, timings: result.timings };
    return result;
  } finally {
    session.transferInFlight = false;
  }
}
