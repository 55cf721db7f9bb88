/*
 * api.ts: typed client for the aifml HTTP/WebSocket service.
 *
 * The studio talks only to this API; it never computes inference results
 * itself. All methods throw ApiError on non-2xx responses, carrying the
 * server's detail text and any structured violation list so panels can
 * render them inline.
 */

export interface InferenceResult {
  outputs: Record<string, number>;
  rule_activations: Record<string, number>;
  defaulted: Record<string, boolean>;
}

export interface Violation {
  path: string;
  message: string;
}

export interface TrainRequest {
  swarm_size?: number;
  max_evaluations?: number;
  seed?: number;
  velocity_clamp_fraction?: number;
  data_csv?: string;
}

export interface TrainStatus {
  job_id: string;
  status: "running" | "done" | "error";
  evaluations: number;
  best_fitness: number[];
  system?: string;
  error?: string;
}

export interface DeviceDescriptor {
  device_id: string;
  kind: string;
  transport: string;
  address: string;
  output_variable: string;
  expression_map: [number, number, string][];
}

export type ServiceEvent =
  | { type: "inference"; inputs: Record<string, number>; result: InferenceResult }
  | { type: "inference_dispatched"; device_id: string; message: Record<string, unknown> }
  | { type: "dispatch_failed"; device_id: string; error: string }
  | { type: "training_progress"; job_id: string; evaluation: number; best_fitness: number }
  | { type: "training_finished"; job_id: string; status: "done" | "error" }
  | { type: "system_replaced"; name: string };

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
    readonly violations: Violation[] = [],
  ) {
    super(`${status}: ${detail}`);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

interface WebSocketLike {
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev: unknown) => void) | null;
  onerror: ((ev: unknown) => void) | null;
  close(): void;
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
    private readonly wsFactory: (url: string) => WebSocketLike = (url) =>
      new WebSocket(url) as unknown as WebSocketLike,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      let detail = response.statusText;
      let violations: Violation[] = [];
      try {
        const body = (await response.json()) as { detail?: string; violations?: Violation[] };
        detail = body.detail ?? detail;
        violations = body.violations ?? [];
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail, violations);
    }
    return response;
  }

  async getSystemXml(): Promise<string> {
    return (await this.request("/system")).text();
  }

  async putSystemXml(xml: string): Promise<{ ok: boolean; name: string }> {
    const response = await this.request("/system", {
      method: "PUT",
      headers: { "content-type": "application/xml" },
      body: xml,
    });
    return response.json();
  }

  async infer(inputs: Record<string, number>): Promise<InferenceResult> {
    const response = await this.request("/infer", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(inputs),
    });
    return response.json();
  }

  async startTraining(config: TrainRequest): Promise<string> {
    const response = await this.request("/train", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(config),
    });
    return ((await response.json()) as { job_id: string }).job_id;
  }

  async getTraining(jobId: string): Promise<TrainStatus> {
    return (await this.request(`/train/${jobId}`)).json();
  }

  async getDevices(): Promise<DeviceDescriptor[]> {
    return (await this.request("/devices")).json();
  }

  async putDevice(descriptor: DeviceDescriptor): Promise<DeviceDescriptor> {
    const response = await this.request(`/devices/${descriptor.device_id}`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(descriptor),
    });
    return response.json();
  }

  /**
   * Subscribe to the /events stream. Reconnects with backoff until the
   * returned handle is closed; the caller sees one callback per event.
   */
  subscribeEvents(
    onEvent: (event: ServiceEvent) => void,
    onStatus?: (connected: boolean) => void,
  ): { close(): void } {
    const wsUrl = this.baseUrl.replace(/^http/, "ws") + "/events";
    let socket: WebSocketLike | null = null;
    let closed = false;
    let retryMs = 500;

    const connect = () => {
      if (closed) return;
      socket = this.wsFactory(wsUrl);
      onStatus?.(true);
      socket.onmessage = (ev) => {
        retryMs = 500;
        try {
          onEvent(JSON.parse(String(ev.data)) as ServiceEvent);
        } catch {
          // ignore malformed frames
        }
      };
      const retry = () => {
        if (closed) return;
        onStatus?.(false);
        setTimeout(connect, retryMs);
        retryMs = Math.min(retryMs * 2, 8000);
      };
      socket.onclose = retry;
      socket.onerror = () => socket?.close();
    };
    connect();
    return {
      close() {
        closed = true;
        socket?.close();
      },
    };
  }
}
