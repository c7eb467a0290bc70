import type { Article, DatasetDocument, Draft, DraftEntry, EntityClass, Verdict } from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export class ConflictError extends ApiError {}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, init);
  if (!response.ok) {
    let code = "http-error";
    let message = `${response.status} ${response.statusText}`;
    try {
      const body = (await response.json()) as { code?: string; message?: string };
      if (body.code) code = body.code;
      if (body.message) message = body.message;
    } catch {
      // non-JSON error body; keep the status line
    }
    if (response.status === 409 && code === "version-conflict") {
      throw new ConflictError(response.status, code, message);
    }
    throw new ApiError(response.status, code, message);
  }
  return response.json() as Promise<T>;
}

function jsonInit(method: string, body: unknown): RequestInit {
  return {
    method,
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  };
}

/** Typed client for the annotation service; all gold data round-trips
 * through the server, nothing is constructed client-side. */
export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  listArticles(): Promise<Article[]> {
    return request<Article[]>(`${this.baseUrl}/articles`);
  }

  getArticle(id: string): Promise<Article> {
    return request<Article>(`${this.baseUrl}/articles/${encodeURIComponent(id)}`);
  }

  getDraft(id: string, entityClass: EntityClass): Promise<Draft> {
    return request<Draft>(
      `${this.baseUrl}/articles/${encodeURIComponent(id)}/draft/${entityClass}`,
    );
  }

  putDraft(
    id: string,
    entityClass: EntityClass,
    version: number,
    entries: DraftEntry[],
  ): Promise<{ version: number }> {
    return request<{ version: number }>(
      `${this.baseUrl}/articles/${encodeURIComponent(id)}/draft/${entityClass}`,
      jsonInit("PUT", { version, entries }),
    );
  }

  verify(id: string, entityClass: EntityClass): Promise<{ verdicts: Verdict[] }> {
    return request<{ verdicts: Verdict[] }>(
      `${this.baseUrl}/articles/${encodeURIComponent(id)}/verify/${entityClass}`,
      { method: "POST" },
    );
  }

  exportDataset(name: string): Promise<DatasetDocument> {
    return request<DatasetDocument>(
      `${this.baseUrl}/export`,
      jsonInit("POST", { dataset_name: name }),
    );
  }
}
