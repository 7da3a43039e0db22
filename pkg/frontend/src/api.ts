/** Typed client for the stepping service. All semantics stay server-side:
 * the explorer only relays what these endpoints return. */

export interface Diagnostic {
  severity: string;
  line: number;
  column: number;
  length: number;
  message: string;
  code: string;
}

export interface BlockingEntry {
  horizon: 0 | 1;
  labels: string[];
}

export interface Prediction {
  h0: string[];
  h1: string[];
}

export interface TransitionEntry {
  index: number;
  action: string;
  blocking: BlockingEntry[];
  prediction: Prediction;
  target: number;
}

export interface LoadResult {
  programId: string;
  diagnostics: Diagnostic[];
}

export interface StepResult {
  newState: number;
  stateTerm: string;
}

export interface LtsState {
  id: number;
  term: string;
}

export interface LtsTransition extends Omit<TransitionEntry, "index"> {
  source: number;
}

export interface LtsJson {
  initial: number;
  complete: boolean;
  states: LtsState[];
  transitions: LtsTransition[];
}

export interface ViolationJson {
  kind: string;
  state: number;
  detail: string;
  pair: LtsTransition[];
}

export interface CoherenceJson {
  verdict: "coherent" | "incoherent" | "inconclusive";
  statesChecked: number;
  violations: ViolationJson[];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: unknown,
    message?: string,
  ) {
    super(message ?? `request failed with status ${status}`);
  }

  get diagnostics(): Diagnostic[] {
    const body = this.body as { diagnostics?: Diagnostic[] } | null;
    return body?.diagnostics ?? [];
  }
}

export class ApiClient {
  constructor(readonly base: string = "") {}

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const response = await fetch(this.base + path, init);
    const text = await response.text();
    let body: unknown = null;
    try {
      body = text ? JSON.parse(text) : null;
    } catch {
      body = text;
    }
    if (!response.ok) {
      throw new ApiError(response.status, body);
    }
    return body;
  }

  private post(path: string, payload: unknown): Promise<unknown> {
    return this.request(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  async loadProgram(source: string): Promise<LoadResult> {
    return (await this.post("/program", { source })) as LoadResult;
  }

  async transitions(programId: string, state: number): Promise<TransitionEntry[]> {
    return (await this.request(
      `/program/${programId}/state/${state}/transitions`,
    )) as TransitionEntry[];
  }

  async step(programId: string, from: number, index: number): Promise<StepResult> {
    return (await this.post(`/program/${programId}/step`, { from, index })) as StepResult;
  }

  async undo(programId: string): Promise<StepResult> {
    return (await this.post(`/program/${programId}/undo`, {})) as StepResult;
  }

  async lts(programId: string, bound?: number): Promise<LtsJson> {
    const query = bound === undefined ? "" : `?bound=${bound}`;
    return (await this.request(`/program/${programId}/lts${query}`)) as LtsJson;
  }

  async coherence(programId: string, bound?: number): Promise<CoherenceJson> {
    const query = bound === undefined ? "" : `?bound=${bound}`;
    return (await this.request(`/program/${programId}/coherence${query}`)) as CoherenceJson;
  }
}
