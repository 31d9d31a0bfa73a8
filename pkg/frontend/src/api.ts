import type { ApiErrorPayload, ConfigPayload, LayoutPayload } from "./types";

export class ServiceError extends Error {
  readonly code: string;

  constructor(payload: ApiErrorPayload) {
    super(payload.detail || payload.error);
    this.code = payload.error;
  }
}

async function asJson<T>(response: Response): Promise<T> {
  const body = await response.json();
  if (!response.ok) {
    throw new ServiceError(body as ApiErrorPayload);
  }
  return body as T;
}

/** Thin typed client for the layout service; every number shown in the UI
 * comes from these payloads. */
export class ApiClient {
  constructor(private readonly base: string) {}

  async config(): Promise<ConfigPayload> {
    return asJson(await fetch(`${this.base}/api/config`));
  }

  async layout(node: string): Promise<LayoutPayload> {
    return asJson(await fetch(`${this.base}/api/layout?node=${encodeURIComponent(node)}`));
  }

  async measures(node: string): Promise<{ node: string; report: LayoutPayload["report"] }> {
    return asJson(await fetch(`${this.base}/api/measures?node=${encodeURIComponent(node)}`));
  }

  async zoom(node: string, cells: Array<[number, number]>): Promise<LayoutPayload> {
    return asJson(
      await fetch(`${this.base}/api/zoom`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ node, cells }),
      }),
    );
  }
}
