import type { ExperimentRecord, ExperimentRequest, FixtureMeta, WeightProposal } from './types.js';

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

async function parseError(response: Response): Promise<never> {
  let message = `request failed with status ${response.status}`;
  try {
    const body = await response.json();
    if (body && typeof body.error === 'string') message = body.error;
  } catch {
    // non-JSON error body: keep the generic message
  }
  throw new ApiError(response.status, message);
}

export class ApiClient {
  constructor(private readonly fetchFn: FetchLike = (input, init) => fetch(input, init)) {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(path, init);
    if (!response.ok) await parseError(response);
    return (await response.json()) as T;
  }

  proposeWeights(prompt: string, offline = false): Promise<WeightProposal> {
    return this.json('/api/reason', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ prompt, offline }),
    });
  }

  listFixtures(): Promise<{ fixtures: FixtureMeta[] }> {
    return this.json('/api/fixtures');
  }

  async createExperiment(request: ExperimentRequest): Promise<string> {
    // the body is serialized verbatim: edited weights reach the service
    // exactly as the sliders hold them
    const body = await this.json<{ id: string }>('/api/experiments', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(request),
    });
    return body.id;
  }

  getExperiment(id: string): Promise<ExperimentRecord> {
    return this.json(`/api/experiments/${id}`);
  }

  async getReportText(id: string): Promise<string> {
    const response = await this.fetchFn(`/api/experiments/${id}/report`);
    if (!response.ok) await parseError(response);
    return response.text();
  }
}
