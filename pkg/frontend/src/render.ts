// Plain-text renderers for the scan table and the live feed. The feed
// formats must stay byte-identical to the service's canonical `text`
// field; the golden tests compare the two.

import type { FeedEventDto, ScanRecordDto } from "./api.js";

export function renderScanRow(r: ScanRecordDto): string {
  const mark = r.has_clients ? "*" : " ";
  return `${r.index}) ${mark} ${r.bssid} ${r.channel} ${r.pwr}% ${r.enc} ${r.essid}`;
}

export function renderScanTable(records: ScanRecordDto[]): string {
  if (records.length === 0) return "";
  return records.map(renderScanRow).concat("(*) Network with clients").join("\n");
}

export function renderFeedLine(e: FeedEventDto): string {
  switch (e.variant) {
    case "disconnect":
      return `Disconnecting ${e.victim} from ${e.from} on channel ${e.channel}`;
    case "stats":
      return `Packets sent: ${e.packets_sent} - Speed: ${e.speed} packets/sec`;
    case "pursuit":
      return `Target reacquired on channel ${e.new_channel} (was on channel ${e.old_channel})`;
    case "warning":
      return `Warning: ${e.message}`;
    default:
      throw new Error(`unknown feed variant ${(e as FeedEventDto).variant}`);
  }
}
