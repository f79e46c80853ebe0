/** Typed client for the curation API. The UI never touches SPARQL or RDF
 * serializations; everything goes through these JSON endpoints. */

import type {
  AutocompleteHit,
  ClassInfo,
  DeletedEntry,
  DuplicateHit,
  EntityDetail,
  EntityPage,
  ErrorBody,
  FormSchema,
  HistoryResponse,
  LockGrant,
  MergeResult,
  Snapshot,
  Submission,
  Term,
  VersionResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: ErrorBody,
  ) {
    super(body?.error?.message ?? `HTTP ${status}`);
  }

  get code(): string {
    return this.body?.error?.code ?? "unknown";
  }
}

export interface ApiClientOptions {
  baseUrl?: string;
  authToken?: string;
  fetchImpl?: typeof fetch;
}

export class ApiClient {
  private baseUrl: string;
  private authToken: string | undefined;
  private fetchImpl: typeof fetch;

  constructor(options: ApiClientOptions = {}) {
    this.baseUrl = (options.baseUrl ?? "").replace(/\/$/, "");
    this.authToken = options.authToken;
    this.fetchImpl = options.fetchImpl ?? fetch;
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    editToken?: string,
  ): Promise<T> {
    const headers: Record<string, string> = { Accept: "application/json" };
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (this.authToken) headers["Authorization"] = `Bearer ${this.authToken}`;
    if (editToken) headers["X-Edit-Token"] = editToken;
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (response.status === 204) return undefined as T;
    const text = await response.text();
    const parsed = text ? JSON.parse(text) : undefined;
    if (!response.ok) {
      throw new ApiError(response.status, parsed as ErrorBody);
    }
    return parsed as T;
  }

  private entityPath(iri: string, suffix = ""): string {
    return `/api/entity/${encodeURIComponent(iri)}${suffix}`;
  }

  getClasses(): Promise<{ classes: ClassInfo[] }> {
    return this.request("GET", "/api/classes");
  }

  listEntities(params: {
    classIri?: string;
    shape?: string;
    page?: number;
    pageSize?: number;
  }): Promise<EntityPage> {
    const query = new URLSearchParams();
    if (params.classIri) query.set("class", params.classIri);
    if (params.shape) query.set("shape", params.shape);
    if (params.page) query.set("page", String(params.page));
    if (params.pageSize) query.set("pageSize", String(params.pageSize));
    return this.request("GET", `/api/entities?${query}`);
  }

  getSchema(shape: string): Promise<FormSchema> {
    return this.request("GET", `/api/schema/${encodeURIComponent(shape)}`);
  }

  getEntity(iri: string): Promise<EntityDetail> {
    return this.request("GET", this.entityPath(iri));
  }

  createEntity(submission: Submission): Promise<{ entity: string; snapshot: Snapshot }> {
    return this.request("POST", "/api/entity", submission);
  }

  updateEntity(
    iri: string,
    submission: Submission,
    editToken: string,
  ): Promise<{ snapshot: Snapshot }> {
    return this.request("PUT", this.entityPath(iri), submission, editToken);
  }

  deleteEntity(
    iri: string,
    editToken: string,
    orphanDecisions?: Record<string, "keep" | "delete">,
  ): Promise<{ snapshots: Snapshot[] }> {
    const body = orphanDecisions ? { orphanDecisions } : undefined;
    return this.request("DELETE", this.entityPath(iri), body, editToken);
  }

  history(iri: string): Promise<HistoryResponse> {
    return this.request("GET", this.entityPath(iri, "/history"));
  }

  version(iri: string, index: number): Promise<VersionResponse> {
    return this.request("GET", this.entityPath(iri, `/version/${index}`));
  }

  restore(iri: string, index: number, editToken: string): Promise<{ snapshot: Snapshot }> {
    return this.request("POST", this.entityPath(iri, `/restore/${index}`), undefined, editToken);
  }

  reorder(
    iri: string,
    path: string,
    order: string[],
    editToken: string,
  ): Promise<{ snapshots: Snapshot[] }> {
    return this.request("POST", this.entityPath(iri, "/reorder"), { path, order }, editToken);
  }

  merge(survivor: string, absorbed: string, editTokens: string): Promise<MergeResult> {
    return this.request("POST", "/api/merge", { survivor, absorbed }, editTokens);
  }

  autocomplete(shape: string, field: string, q: string): Promise<{ results: AutocompleteHit[] }> {
    const query = new URLSearchParams({ shape, field, q });
    return this.request("GET", `/api/autocomplete?${query}`);
  }

  duplicates(
    shape: string,
    values: Record<string, Term[]>,
    exclude?: string,
  ): Promise<{ duplicates: DuplicateHit[] }> {
    const body: Record<string, unknown> = { shape, values };
    if (exclude) body.exclude = exclude;
    return this.request("POST", "/api/duplicates", body);
  }

  deleted(): Promise<{ deleted: DeletedEntry[] }> {
    return this.request("GET", "/api/deleted");
  }

  acquireLock(iri: string): Promise<LockGrant> {
    return this.request("POST", `/api/lock/${encodeURIComponent(iri)}`);
  }

  releaseLock(iri: string, token: string): Promise<void> {
    return this.request("DELETE", `/api/lock/${encodeURIComponent(iri)}`, undefined, token);
  }
}

/** Tracks held locks so every mutating interaction acquires first and
 * everything is released on navigation or unload. */
export class LockSession {
  private held = new Map<string, string>();

  constructor(private api: ApiClient) {}

  async acquire(iri: string): Promise<string> {
    const existing = this.held.get(iri);
    if (existing) return existing;
    const grant = await this.api.acquireLock(iri);
    this.held.set(iri, grant.token);
    return grant.token;
  }

  token(iri: string): string | undefined {
    return this.held.get(iri);
  }

  tokensFor(iris: string[]): string {
    return iris
      .map((iri) => this.held.get(iri))
      .filter((t): t is string => Boolean(t))
      .join(",");
  }

  async releaseAll(): Promise<void> {
    const entries = [...this.held.entries()];
    this.held.clear();
    await Promise.allSettled(entries.map(([iri, token]) => this.api.releaseLock(iri, token)));
  }

  bindUnload(target: { addEventListener: Window["addEventListener"] }): void {
    target.addEventListener("beforeunload", () => {
      void this.releaseAll();
    });
  }
}
