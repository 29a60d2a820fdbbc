// Thin typed client for the blockspeak session service.  All language and
// accuracy decisions live server-side; this module only moves JSON.

export interface TableData {
  width: number;
  depth: number;
}

export interface BlockData {
  id: string;
  pos: [number, number, number];
  color: string;
}

export interface SceneData {
  table: TableData;
  blocks: BlockData[];
}

export interface PlanStep {
  block: string;
  color?: string;
  to: [number, number, number];
}

export interface AlternativeData {
  surface: string;
  depth: number;
  props: number;
  cost: number;
  selectable: boolean;
}

export interface StepResponse {
  directive: string;
  alternatives: AlternativeData[];
  directiveId: string;
}

export interface ActionResponse {
  accurate: boolean;
  nextAvailable: boolean;
}

export interface SessionState {
  id: string;
  scene: SceneData;
  cursor: number;
  planLength: number;
  generator: string;
  done: boolean;
  pendingDirectiveId: string | null;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(`HTTP ${status}: ${message}`);
  }
}

export type FetchLike = typeof fetch;

export class Client {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = fetch,
  ) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
  }

  private async request(method: string, path: string, body?: unknown): Promise<any> {
    const res = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!res.ok) {
      let detail = res.statusText;
      try {
        detail = (await res.json()).detail ?? detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(res.status, detail);
    }
    return res.json();
  }

  async createSession(
    scene: SceneData,
    plan: { steps: PlanStep[] },
    generator: "egt" | "naive" = "egt",
  ): Promise<{ id: string; scene: SceneData }> {
    return this.request("POST", "/sessions", { scene, plan, generator });
  }

  async getSession(id: string): Promise<SessionState> {
    return this.request("GET", `/sessions/${id}`);
  }

  async step(id: string): Promise<StepResponse> {
    return this.request("POST", `/sessions/${id}/step`);
  }

  async action(
    id: string,
    directiveId: string,
    placedAt: [number, number, number],
    responseTimeMs: number,
    speechDurationMs?: number,
  ): Promise<ActionResponse> {
    const body: Record<string, unknown> = { directiveId, placedAt, responseTimeMs };
    if (speechDurationMs !== undefined) body.speechDurationMs = speechDurationMs;
    try {
      return await this.request("POST", `/sessions/${id}/action`, body);
    } catch (err) {
      if (err instanceof ApiError) throw err;
      // Network failure: the directiveId makes the report idempotent, so a
      // single blind retry is safe.
      return this.request("POST", `/sessions/${id}/action`, body);
    }
  }

  async getLog(id: string): Promise<{ entries: unknown[] }> {
    return this.request("GET", `/sessions/${id}/log`);
  }
}
