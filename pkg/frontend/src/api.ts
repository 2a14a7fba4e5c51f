// Typed client for the operator service. Every console interaction goes
// through here; nothing else in the bundle talks to the network.

export interface IfaceInfo {
  id: string;
  name: string;
  bands: string[];
  mode: "managed" | "monitor";
  channel: string;
}

export interface ScanRecordDto {
  index: number;
  bssid: string;
  channel: number;
  band: string;
  pwr: number;
  enc: string;
  essid: string;
  has_clients: boolean;
}

export interface FeedEventDto {
  seq: number;
  t: number;
  variant: "disconnect" | "stats" | "pursuit" | "warning";
  victim?: string;
  from?: string;
  channel?: number;
  packets_sent?: number;
  speed?: number;
  old_channel?: number;
  new_channel?: number;
  message?: string;
  text: string;
}

export interface AttackStatsDto {
  packets_sent: number;
  peak_speed: number;
  channel_switches: number;
  duration_ms: number;
}

export class ServiceError extends Error {
  constructor(public status: number, public code: string, message: string) {
    super(message);
  }
}

async function unwrap<T>(res: Response): Promise<T> {
  if (res.ok) return res.json() as Promise<T>;
  let code = "unknown";
  let message = `${res.status} ${res.statusText}`;
  try {
    const body = await res.json();
    if (body && typeof body.code === "string") {
      code = body.code;
      message = body.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the HTTP status text
  }
  throw new ServiceError(res.status, code, message);
}

export class ApiClient {
  constructor(private baseUrl: string = "") {}

  private url(path: string): string {
    return this.baseUrl + path;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return fetch(this.url(path), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    }).then((r) => unwrap<T>(r));
  }

  listInterfaces(): Promise<IfaceInfo[]> {
    return fetch(this.url("/api/interfaces")).then((r) => unwrap<IfaceInfo[]>(r));
  }

  setMode(ifaceId: string, mode: "managed" | "monitor"): Promise<IfaceInfo> {
    return this.post(`/api/interfaces/${ifaceId}/mode`, { mode });
  }

  async runScan(durationMs = 5000): Promise<ScanRecordDto[]> {
    const { scan_id } = await this.post<{ scan_id: string }>("/api/scans", {
      duration_ms: durationMs,
    });
    const res = await fetch(this.url(`/api/scans/${scan_id}`));
    const body = await unwrap<{ status: string; records: ScanRecordDto[] }>(res);
    return body.records;
  }

  startAttack(opts: {
    kind?: string;
    target_bssid?: string;
    pursuit?: boolean;
    client?: string;
  }): Promise<string> {
    return this.post<{ attack_id: string }>("/api/attacks", opts).then(
      (b) => b.attack_id,
    );
  }

  stopAttack(attackId: string): Promise<AttackStatsDto> {
    return fetch(this.url(`/api/attacks/${attackId}`), { method: "DELETE" }).then(
      (r) => unwrap<AttackStatsDto>(r),
    );
  }

  eventsSince(seq: number): Promise<FeedEventDto[]> {
    return fetch(this.url(`/api/events?since=${seq}`)).then((r) =>
      unwrap<{ events: FeedEventDto[] }>(r).then((b) => b.events),
    );
  }

  setPace(body: { mode: string; ms?: number; ratio?: number }): Promise<{ mode: string; t: number }> {
    return this.post("/api/sim/pace", body);
  }
}
