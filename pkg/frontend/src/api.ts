/** Thin typed client for the six template-service endpoints. */

import type {
  ChangeReportDoc,
  FetchResponse,
  PreviewResponse,
  RoiSpecDoc,
  SaveResponse,
  TemplateSummary,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function call<T>(base: string, method: string, path: string, body?: unknown): Promise<T> {
  const response = await fetch(base + path, {
    method,
    headers: body === undefined ? {} : { "Content-Type": "application/json" },
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  const text = await response.text();
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch {
    throw new ApiError(response.status, "internal", `bad response body: ${text.slice(0, 120)}`);
  }
  if (!response.ok) {
    const err = doc as { code?: string; message?: string };
    throw new ApiError(response.status, err.code ?? "internal", err.message ?? text);
  }
  return doc as T;
}

export class ServiceClient {
  constructor(private base: string = "") {}

  fetchPage(url: string): Promise<FetchResponse> {
    return call(this.base, "POST", "/api/fetch", { url });
  }

  preview(sourceRef: string, roiSpec: RoiSpecDoc): Promise<PreviewResponse> {
    return call(this.base, "POST", "/api/preview", { source_ref: sourceRef, roi_spec: roiSpec });
  }

  save(sourceRef: string, roiSpec: RoiSpecDoc): Promise<SaveResponse> {
    return call(this.base, "POST", "/api/templates", { source_ref: sourceRef, roi_spec: roiSpec });
  }

  list(): Promise<TemplateSummary[]> {
    return call(this.base, "GET", "/api/templates");
  }

  getTemplateText(id: string): Promise<string> {
    return fetch(`${this.base}/api/templates/${id}`).then(async (r) => {
      if (!r.ok) {
        throw new ApiError(r.status, "not_found", `no template ${id}`);
      }
      return r.text();
    });
  }

  check(id: string, pageRef?: string, autoReplace?: boolean): Promise<ChangeReportDoc> {
    const body: Record<string, unknown> = {};
    if (pageRef) body.page_ref = pageRef;
    if (autoReplace !== undefined) body.auto_replace = autoReplace;
    return call(this.base, "POST", `/api/templates/${id}/check`, body);
  }
}
