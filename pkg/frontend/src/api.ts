import type {
  QueryResult,
  ScoreTrajectory,
  VersionListing,
  VersionRow,
  WorldDiffPayload,
  WorldPayload,
} from "./types.js";

/**
 * Thin typed client over the HTTP API. Requests made under a panel key
 * cancel that panel's previous in-flight request, so a stale response can
 * never paint over a newer one.
 */
export class ApiClient {
  private inflight = new Map<string, AbortController>();

  constructor(
    private base = "",
    private fetchImpl: typeof fetch = (...args) => fetch(...args),
  ) {}

  private signalFor(panel?: string): AbortSignal | undefined {
    if (!panel) return undefined;
    this.inflight.get(panel)?.abort();
    const controller = new AbortController();
    this.inflight.set(panel, controller);
    return controller.signal;
  }

  private async request<T>(
    path: string,
    init?: RequestInit,
    panel?: string,
  ): Promise<T> {
    const response = await this.fetchImpl(this.base + path, {
      ...init,
      signal: this.signalFor(panel),
    });
    if (!response.ok) {
      const text = await response.text();
      throw new Error(`${response.status} ${path}: ${text}`);
    }
    return response.json() as Promise<T>;
  }

  private post<T>(path: string, payload: unknown, panel?: string): Promise<T> {
    return this.request<T>(
      path,
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(payload),
      },
      panel,
    );
  }

  listVersions(panel?: string): Promise<VersionListing> {
    return this.request("/versions", undefined, panel);
  }

  world(versionId: string, panel?: string): Promise<WorldPayload> {
    return this.request(`/worlds/${versionId}`, undefined, panel);
  }

  scores(
    params: {
      versionId?: string;
      scorer?: string;
      anchors?: number;
      focals?: string[];
    },
    panel?: string,
  ): Promise<ScoreTrajectory> {
    const qs = new URLSearchParams();
    if (params.versionId) qs.set("version_id", params.versionId);
    if (params.scorer) qs.set("scorer", params.scorer);
    if (params.anchors !== undefined) qs.set("anchors", String(params.anchors));
    if (params.focals?.length) qs.set("focals", params.focals.join(","));
    return this.request(`/scores?${qs}`, undefined, panel);
  }

  runQuery(payload: {
    query: unknown;
    version_id?: string;
    seed?: number;
    record?: boolean;
  }): Promise<QueryResult> {
    return this.post("/query", payload);
  }

  promote(versionId: string): Promise<{ version: VersionRow }> {
    return this.post(`/versions/${versionId}/promote`, {});
  }

  reparent(
    versionId: string,
    newParentId: string | null,
  ): Promise<{ version: VersionRow }> {
    return this.post(`/versions/${versionId}/reparent`, {
      new_parent_id: newParentId,
    });
  }

  remove(versionId: string): Promise<{ deleted: string; active_id: string | null }> {
    return this.request(`/versions/${versionId}`, { method: "DELETE" });
  }

  diff(a: string, b: string): Promise<WorldDiffPayload> {
    return this.request(`/versions/diff?a=${a}&b=${b}`);
  }
}
