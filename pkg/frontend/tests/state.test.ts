import { describe, expect, it } from "vitest";

import {
  ApiClient,
  FeedEventDto,
  IfaceInfo,
  ScanRecordDto,
  ServiceError,
} from "../src/api.js";
import { ConsoleController } from "../src/state.js";

const IFACE: IfaceInfo = {
  id: "if3",
  name: "wlan0",
  bands: ["5"],
  mode: "managed",
  channel: "5/36",
};

const RECORD: ScanRecordDto = {
  index: 1,
  bssid: "F8:C4:F3:0E:08:B9",
  channel: 36,
  band: "5",
  pwr: 64,
  enc: "WPA2",
  essid: "Ayush_Home_5G",
  has_clients: true,
};

// A scripted stand-in for the service: managed mode refuses scans/attacks
// with mode_required, mirroring the real contract.
class FakeApi extends ApiClient {
  mode: "managed" | "monitor" = "managed";
  feed: FeedEventDto[] = [];

  override listInterfaces() {
    return Promise.resolve([{ ...IFACE, mode: this.mode }]);
  }

  override setMode(_id: string, mode: "managed" | "monitor") {
    this.mode = mode;
    return Promise.resolve({ ...IFACE, mode });
  }

  override runScan() {
    if (this.mode !== "monitor") {
      return Promise.reject(
        new ServiceError(409, "mode_required", "scanning requires monitor mode"),
      );
    }
    return Promise.resolve([RECORD]);
  }

  override startAttack() {
    if (this.mode !== "monitor") {
      return Promise.reject(
        new ServiceError(409, "mode_required", "attacks require monitor mode"),
      );
    }
    return Promise.resolve("attack-1");
  }

  override stopAttack() {
    return Promise.resolve({
      packets_sent: 10,
      peak_speed: 4,
      channel_switches: 0,
      duration_ms: 1000,
    });
  }

  override eventsSince(seq: number) {
    return Promise.resolve(this.feed.filter((e) => e.seq > seq));
  }
}

async function reachPrompt(api: FakeApi): Promise<ConsoleController> {
  const ctl = new ConsoleController(api);
  await ctl.loadInterfaces();
  ctl.selectInterface("if3");
  await ctl.toggleMode(); // managed -> monitor
  ctl.openDosMenu();
  await ctl.runScan();
  ctl.selectTarget(1);
  return ctl;
}

describe("view ordering", () => {
  it("walks InterfaceSelect -> ... -> LiveFeed in order", async () => {
    const ctl = await reachPrompt(new FakeApi());
    expect(ctl.view).toBe("PursuitPrompt");
    expect(ctl.canStartAttack()).toBe(true);
    await ctl.answerPursuit(false);
    expect(ctl.view).toBe("LiveFeed");
    expect(ctl.attackId).toBe("attack-1");
  });

  it("cannot open the DoS menu without an interface", () => {
    const ctl = new ConsoleController(new FakeApi());
    expect(() => ctl.openDosMenu()).toThrow(/select an interface/);
  });

  it("cannot pick a target without a scan", async () => {
    const ctl = new ConsoleController(new FakeApi());
    await ctl.loadInterfaces();
    ctl.selectInterface("if3");
    expect(() => ctl.selectTarget(1)).toThrow(/run a scan first/);
    expect(ctl.canStartAttack()).toBe(false);
  });

  it("routes mode_required errors back to the mode toggle", async () => {
    const api = new FakeApi();
    const ctl = new ConsoleController(api);
    await ctl.loadInterfaces();
    ctl.selectInterface("if3");
    ctl.openDosMenu();
    await expect(ctl.runScan()).rejects.toThrow(/monitor mode/);
    expect(ctl.view).toBe("MainMenu");
    expect(ctl.error).toEqual({
      code: "mode_required",
      message: "scanning requires monitor mode",
    });
  });
});

describe("feed buffer", () => {
  function event(seq: number): FeedEventDto {
    return {
      seq,
      t: seq * 250,
      variant: "stats",
      packets_sent: seq,
      speed: 4,
      text: `Packets sent: ${seq} - Speed: 4 packets/sec`,
    };
  }

  it("consumes events exactly once across polls", async () => {
    const api = new FakeApi();
    const ctl = await reachPrompt(api);
    await ctl.answerPursuit(false);
    api.feed = [event(1), event(2)];
    expect(await ctl.pollFeedOnce()).toBe(2);
    expect(await ctl.pollFeedOnce()).toBe(0); // nothing new, nothing re-rendered
    api.feed.push(event(3));
    expect(await ctl.pollFeedOnce()).toBe(1);
    expect(ctl.feedLines).toHaveLength(3);
    expect(ctl.lastSeq).toBe(3);
  });

  it("rejects sequence gaps", async () => {
    const api = new FakeApi();
    const ctl = await reachPrompt(api);
    await ctl.answerPursuit(false);
    api.feed = [event(1), event(3)];
    await expect(ctl.pollFeedOnce()).rejects.toThrow(/feed gap/);
  });

  it("rejects lines that drift from the canonical text", async () => {
    const api = new FakeApi();
    const ctl = await reachPrompt(api);
    await ctl.answerPursuit(false);
    api.feed = [{ ...event(1), text: "Packets sent: 999 - Speed: 4 packets/sec" }];
    await expect(ctl.pollFeedOnce()).rejects.toThrow(/drift/);
  });
});
