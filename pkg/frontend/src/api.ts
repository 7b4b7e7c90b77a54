/** Typed client for the contractcheck service. */

import type {
  ContractDoc,
  ProblemPayload,
  ReportJson,
  TemplateLibrary,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly payload: ProblemPayload | null,
    message?: string,
  ) {
    super(message ?? payload?.error ?? `request failed with ${status}`);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = globalThis.fetch,
  ) {}

  private async request(method: string, path: string, body?: string): Promise<Response> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      body,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
    });
    if (!response.ok) {
      let payload: ProblemPayload | null = null;
      try {
        payload = (await response.json()) as ProblemPayload;
      } catch {
        payload = null;
      }
      throw new ApiError(response.status, payload);
    }
    return response;
  }

  async health(): Promise<boolean> {
    const response = await this.request("GET", "/health");
    return (await response.text()).trim() === "ok";
  }

  async listContracts(): Promise<string[]> {
    const response = await this.request("GET", "/contracts");
    return ((await response.json()) as { contracts: string[] }).contracts;
  }

  async getContract(id: string): Promise<ContractDoc> {
    const response = await this.request("GET", `/contracts/${id}`);
    return (await response.json()) as ContractDoc;
  }

  /** Stores the document; 422 validation problems surface as ApiError. */
  async putContract(id: string, doc: ContractDoc): Promise<void> {
    await this.request("PUT", `/contracts/${id}`, JSON.stringify(doc, null, 2));
  }

  async deleteContract(id: string): Promise<void> {
    await this.request("DELETE", `/contracts/${id}`);
  }

  async analyze(id: string, kinds?: string[]): Promise<ReportJson> {
    const query = kinds && kinds.length ? `?kinds=${kinds.join(",")}` : "";
    const response = await this.request("POST", `/contracts/${id}/analyze${query}`);
    return (await response.json()) as ReportJson;
  }

  async getReport(id: string): Promise<ReportJson | null> {
    try {
      const response = await this.request("GET", `/contracts/${id}/report`);
      return (await response.json()) as ReportJson;
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) return null;
      throw err;
    }
  }

  /** Mermaid text for the first trace of the given analysis selector. */
  async diagram(id: string, analysis: string, target?: string): Promise<string> {
    const query = target ? `?target=${encodeURIComponent(target)}` : "";
    const response = await this.request(
      "GET",
      `/contracts/${id}/diagram/${analysis}${query}`,
    );
    return response.text();
  }

  async libraryBlocks(): Promise<TemplateLibrary> {
    const response = await this.request("GET", "/library/blocks");
    return (await response.json()) as TemplateLibrary;
  }

  async libraryContracts(): Promise<string[]> {
    const response = await this.request("GET", "/library/contracts");
    return ((await response.json()) as { contracts: string[] }).contracts;
  }

  async libraryContract(name: string): Promise<ContractDoc> {
    const response = await this.request("GET", `/library/contracts/${name}`);
    return (await response.json()) as ContractDoc;
  }
}
