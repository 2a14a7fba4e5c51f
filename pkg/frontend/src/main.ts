// Browser glue: renders the current ConsoleController view into #app and
// wires the buttons. All behavior lives in state.ts/render.ts; this file
// is DOM-only and intentionally thin.

import { ApiClient, ServiceError } from "./api.js";
import { renderScanTable } from "./render.js";
import { ConsoleController } from "./state.js";

const api = new ApiClient("");
const ctl = new ConsoleController(api);
const app = document.getElementById("app")!;

let polling: number | null = null;

function esc(s: string): string {
  const d = document.createElement("div");
  d.textContent = s;
  return d.innerHTML;
}

function button(label: string, onClick: () => void | Promise<void>): string {
  const id = `btn-${Math.random().toString(36).slice(2)}`;
  queueMicrotask(() => {
    document.getElementById(id)?.addEventListener("click", () => {
      Promise.resolve()
        .then(onClick)
        .catch(() => render()) // errors are surfaced via ctl.error
        .then(render);
    });
  });
  return `<button id="${id}">${esc(label)}</button>`;
}

function errorBanner(): string {
  if (!ctl.error) return "";
  return `<p class="error">[${esc(ctl.error.code)}] ${esc(ctl.error.message)}</p>`;
}

function render(): void {
  let html = `<h1>jamrange console</h1>` + errorBanner();
  switch (ctl.view) {
    case "InterfaceSelect": {
      html += `<p>Select a wireless interface:</p>`;
      for (const i of ctl.interfaces) {
        html += `<p>${button(
          `${i.name} [${i.mode}] ch ${i.channel}`,
          () => ctl.selectInterface(i.id),
        )}</p>`;
      }
      break;
    }
    case "MainMenu": {
      const iface = ctl.selected!;
      html += `<p>Interface ${esc(iface.name)} — mode: <b>${iface.mode}</b></p>`;
      html += `<p>${button(
        iface.mode === "monitor" ? "Switch to managed mode" : "Enable monitor mode",
        () => ctl.toggleMode(),
      )}</p>`;
      html += `<p>${button("DoS attacks menu", () => ctl.openDosMenu())}</p>`;
      break;
    }
    case "DosMenu": {
      html += `<p>DoS attacks menu</p>`;
      html += `<p>${button("Scan for networks", () => ctl.runScan())}</p>`;
      html += `<p>${button("Back", () => {
        ctl.view = "MainMenu";
      })}</p>`;
      break;
    }
    case "ScanTable": {
      html += `<pre>${esc(renderScanTable(ctl.records))}</pre>`;
      for (const r of ctl.records) {
        html += `<p>${button(`Attack ${r.index}) ${r.essid}`, () =>
          ctl.selectTarget(r.index),
        )}</p>`;
      }
      break;
    }
    case "PursuitPrompt": {
      html += `<p>Do you want to enable "DoS pursuit mode"?</p>`;
      html += `<p>${button("Yes", () => startFeed(true))} ${button("No", () =>
        startFeed(false),
      )}</p>`;
      break;
    }
    case "LiveFeed": {
      html += `<p>${button("Stop attack", async () => {
        if (polling !== null) window.clearInterval(polling);
        polling = null;
        await ctl.stopAttack();
      })}</p>`;
      html += `<pre class="feed">${esc(ctl.feedLines.slice(-200).join("\n"))}</pre>`;
      break;
    }
  }
  app.innerHTML = html;
}

async function startFeed(pursuit: boolean): Promise<void> {
  await ctl.answerPursuit(pursuit);
  polling = window.setInterval(() => {
    ctl
      .pollFeedOnce()
      .then((n) => {
        if (n > 0) render();
      })
      .catch(() => undefined);
  }, 500);
}

ctl
  .loadInterfaces()
  .then(render)
  .catch((e) => {
    app.innerHTML = `<p class="error">service unreachable: ${esc(
      e instanceof ServiceError ? e.message : String(e),
    )}</p>`;
  });
