// Console state machine. Views follow the operator workflow in order:
// pick an interface, reach the main menu, open the DoS menu, scan, pick a
// target, answer the pursuit prompt, watch the live feed. Transitions that
// would skip a prerequisite throw, so the UI cannot wander off the rails.

import {
  ApiClient,
  FeedEventDto,
  IfaceInfo,
  ScanRecordDto,
  ServiceError,
} from "./api.js";
import { renderFeedLine } from "./render.js";

export type View =
  | "InterfaceSelect"
  | "MainMenu"
  | "DosMenu"
  | "ScanTable"
  | "PursuitPrompt"
  | "LiveFeed";

export class ConsoleController {
  view: View = "InterfaceSelect";
  interfaces: IfaceInfo[] = [];
  selected: IfaceInfo | null = null;
  records: ScanRecordDto[] = [];
  target: ScanRecordDto | null = null;
  attackId: string | null = null;
  feedLines: string[] = [];
  lastSeq = 0;
  error: { code: string; message: string } | null = null;

  constructor(private api: ApiClient) {}

  private fail(e: unknown): never {
    if (e instanceof ServiceError) {
      this.error = { code: e.code, message: e.message };
      if (e.code === "mode_required") {
        // the paper's workflow: monitor mode is the prerequisite, so a
        // refusal sends the operator back to the mode toggle
        this.view = "MainMenu";
      }
    }
    throw e;
  }

  async loadInterfaces(): Promise<void> {
    this.interfaces = await this.api.listInterfaces();
    this.view = "InterfaceSelect";
  }

  selectInterface(id: string): void {
    const iface = this.interfaces.find((i) => i.id === id);
    if (!iface) throw new Error(`no interface ${id} listed`);
    this.selected = iface;
    this.view = "MainMenu";
    this.error = null;
  }

  private needIface(): IfaceInfo {
    if (!this.selected) throw new Error("select an interface first");
    return this.selected;
  }

  async toggleMode(): Promise<void> {
    const iface = this.needIface();
    const next = iface.mode === "monitor" ? "managed" : "monitor";
    try {
      const updated = await this.api.setMode(iface.id, next);
      this.selected = { ...iface, mode: updated.mode, channel: updated.channel };
      this.error = null;
    } catch (e) {
      this.fail(e);
    }
  }

  openDosMenu(): void {
    this.needIface();
    this.view = "DosMenu";
  }

  async runScan(): Promise<void> {
    if (this.view !== "DosMenu") throw new Error("open the DoS menu first");
    try {
      this.records = await this.api.runScan();
      this.view = "ScanTable";
      this.error = null;
    } catch (e) {
      this.fail(e);
    }
  }

  selectTarget(index: number): void {
    if (this.view !== "ScanTable") throw new Error("run a scan first");
    const rec = this.records.find((r) => r.index === index);
    if (!rec) throw new Error(`no scan row ${index}`);
    this.target = rec;
    this.view = "PursuitPrompt";
  }

  canStartAttack(): boolean {
    return this.target !== null && this.view === "PursuitPrompt";
  }

  async answerPursuit(pursuit: boolean): Promise<void> {
    if (!this.canStartAttack()) throw new Error("select a target first");
    try {
      this.attackId = await this.api.startAttack({
        kind: "disassoc-amok",
        target_bssid: this.target!.bssid,
        pursuit,
      });
      this.view = "LiveFeed";
      this.error = null;
    } catch (e) {
      this.fail(e);
    }
  }

  /** One long-poll round; renders locally and cross-checks the canonical text. */
  async pollFeedOnce(): Promise<number> {
    const events = await this.api.eventsSince(this.lastSeq);
    for (const e of events) {
      if (e.seq !== this.lastSeq + 1) {
        throw new Error(`feed gap: got seq ${e.seq} after ${this.lastSeq}`);
      }
      const line = renderFeedLine(e);
      if (line !== e.text) {
        throw new Error(`feed render drift: ${JSON.stringify(line)} != ${JSON.stringify(e.text)}`);
      }
      this.feedLines.push(line);
      this.lastSeq = e.seq;
    }
    return events.length;
  }

  async stopAttack(): Promise<void> {
    if (!this.attackId) return;
    await this.api.stopAttack(this.attackId);
    this.attackId = null;
    this.view = "DosMenu";
  }
}

export type FeedEvent = FeedEventDto;
