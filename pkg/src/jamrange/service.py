"""Local operator service: one simulation, one adapter, steered over
HTTP+JSON so a console client can walk the interface -> monitor -> scan ->
target -> attack -> live feed sequence interactively.

Commands are applied under a single lock in arrival order; the feed is an
append-only sequence that readers may consume concurrently.
"""
from __future__ import annotations

import os
import threading
import time
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .attack import (
    AttackConfig, AttackKind, AttackSession, ScanRecord, scan, start_attack,
)
from .frames import MacParseError, parse_mac
from .metrics import render_feed_line
from .scenario import load_scenario, new_simulation
from .simcore import Mode


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class OperatorSession:
    """Holds the simulation plus operator-visible state behind one lock."""

    def __init__(self, scenario_path: str, seed: Optional[int] = None):
        scenario = load_scenario(scenario_path)
        self.scenario = scenario
        (self.sim, self.world) = new_simulation(scenario, seed=seed)
        self.lock = threading.RLock()
        self.scans: dict[str, dict] = {}
        self.attacks: dict[str, AttackSession] = {}
        self._counter = 0
        self.events: list[dict] = []  # {"seq", "t", "kind", "data", "text"}
        self.pace_mode = "realtime"
        self.pace_ratio = 1.0
        self._anchor_wall = time.monotonic()
        self._anchor_sim = 0
        self._stop = threading.Event()
        self._thread = threading.Thread(target=self._pace_loop, daemon=True)
        self._thread.start()

    def close(self) -> None:
        self._stop.set()

    def _next_id(self, prefix: str) -> str:
        self._counter += 1
        return f"{prefix}-{self._counter}"

    def _push_feed(self, event) -> None:
        entry = {"seq": len(self.events) + 1, "t": event.t,
                 **event.to_dict(), "text": render_feed_line(event)}
        self.events.append(entry)

    # -- pacing -------------------------------------------------------------

    def _pace_loop(self) -> None:
        while not self._stop.is_set():
            time.sleep(0.05)
            with self.lock:
                if self.pace_mode != "realtime":
                    continue
                wall_ms = (time.monotonic() - self._anchor_wall) * 1000 * self.pace_ratio
                target = self._anchor_sim + int(wall_ms)
                if target > self.sim.clock:
                    self.sim.advance_until(target)

    def set_pace(self, body: dict) -> dict:
        mode = body.get("mode")
        with self.lock:
            if mode == "realtime":
                self.pace_mode = "realtime"
                self.pace_ratio = float(body.get("ratio", 1.0))
                self._anchor_wall = time.monotonic()
                self._anchor_sim = self.sim.clock
            elif mode == "paused":
                self.pace_mode = "paused"
            elif mode == "step":
                ms = body.get("ms")
                if not isinstance(ms, int) or ms < 0:
                    raise ApiError(400, "bad_request", "step mode needs integer 'ms' >= 0")
                self.pace_mode = "paused"
                self.sim.advance_until(self.sim.clock + ms)
            else:
                raise ApiError(400, "bad_request", f"unknown pace mode {mode!r}")
            return {"mode": self.pace_mode, "t": self.sim.clock}

    # -- interfaces ---------------------------------------------------------

    def _iface(self, iface_id: str):
        iface = self.sim.interfaces.get(iface_id)
        if iface is None or iface is not self.world.attacker:
            raise ApiError(404, "not_found", f"unknown interface {iface_id}")
        return iface

    def list_interfaces(self) -> list[dict]:
        with self.lock:
            iface = self.world.attacker
            return [{
                "id": iface.id, "name": iface.name,
                "bands": sorted(b.value for b in iface.bands),
                "mode": iface.mode.value, "channel": str(iface.tuned),
            }]

    def set_iface_mode(self, iface_id: str, body: dict) -> dict:
        mode_text = body.get("mode")
        if mode_text not in ("monitor", "managed"):
            raise ApiError(400, "bad_request", f"unknown mode {mode_text!r}")
        with self.lock:
            iface = self._iface(iface_id)
            if mode_text == "managed" and any(
                    s.cfg and s.state.value != "stopped" and s.iface is iface
                    for s in self.attacks.values()):
                raise ApiError(409, "conflict",
                               "an attack is active on this interface; stop it first")
            self.sim.set_mode(iface, Mode.MONITOR if mode_text == "monitor" else Mode.MANAGED)
            return {"id": iface.id, "mode": iface.mode.value, "channel": str(iface.tuned)}

    # -- scans --------------------------------------------------------------

    def start_scan(self, body: dict) -> dict:
        duration = body.get("duration_ms", 5000)
        if not isinstance(duration, int) or duration <= 0:
            raise ApiError(400, "bad_request", "duration_ms must be a positive integer")
        with self.lock:
            iface = self.world.attacker
            if iface.mode is not Mode.MONITOR:
                raise ApiError(409, "mode_required", "scanning requires monitor mode")
            scan_id = self._next_id("scan")
            records = scan(self.sim, iface, duration_ms=duration)
            self.scans[scan_id] = {
                "status": "complete",
                "records": [self._record_dict(r) for r in records],
                "by_bssid": {str(r.bssid): r for r in records},
            }
            return {"scan_id": scan_id}

    @staticmethod
    def _record_dict(r: ScanRecord) -> dict:
        return {"index": r.index, "bssid": str(r.bssid),
                "channel": r.channel.number, "band": r.channel.band.value,
                "pwr": r.pwr, "enc": r.enc.value, "essid": r.essid,
                "has_clients": r.has_clients}

    def get_scan(self, scan_id: str) -> dict:
        with self.lock:
            entry = self.scans.get(scan_id)
            if entry is None:
                raise ApiError(404, "not_found", f"unknown scan {scan_id}")
            return {"status": entry["status"], "records": entry["records"]}

    # -- attacks ------------------------------------------------------------

    def start_attack(self, body: dict) -> dict:
        kind_text = body.get("kind", "disassoc-amok")
        try:
            kind = AttackKind(kind_text)
        except ValueError:
            raise ApiError(400, "bad_request", f"unknown attack kind {kind_text!r}")
        with self.lock:
            iface = self.world.attacker
            if iface.mode is not Mode.MONITOR:
                raise ApiError(409, "mode_required", "attacks require monitor mode")
            target = None
            if kind is not AttackKind.BEACON_FLOOD:
                bssid_text = body.get("target_bssid")
                if not bssid_text:
                    raise ApiError(400, "bad_request", "target_bssid is required")
                try:
                    bssid = parse_mac(bssid_text)
                except MacParseError as e:
                    raise ApiError(400, "bad_request", str(e))
                target = self._find_target(bssid)
                if target is None:
                    raise ApiError(404, "not_found", f"unknown BSSID {bssid_text}")
            client = None
            if body.get("client"):
                try:
                    client = parse_mac(body["client"])
                except MacParseError as e:
                    raise ApiError(400, "bad_request", str(e))
            cfg = AttackConfig(kind=kind, target=target, client=client,
                               pursuit=bool(body.get("pursuit", False)),
                               reason=int(body.get("reason", 7)))
            session = start_attack(self.sim, iface, cfg)
            session.on_feed = self._push_feed
            attack_id = self._next_id("attack")
            self.attacks[attack_id] = session
            return {"attack_id": attack_id}

    def _find_target(self, bssid) -> Optional[ScanRecord]:
        for entry in self.scans.values():
            record = entry["by_bssid"].get(str(bssid))
            if record is not None:
                return record
        ap = next((a for a in self.scenario.aps if a.bssid == bssid), None)
        if ap is None:
            return None
        return ScanRecord(index=1, bssid=ap.bssid, channel=ap.channel,
                          pwr=self.sim.link_pwr(self.world.attacker, ap.bssid),
                          enc=ap.enc, essid=ap.essid, has_clients=True)

    def stop_attack(self, attack_id: str) -> dict:
        with self.lock:
            session = self.attacks.get(attack_id)
            if session is None:
                raise ApiError(404, "not_found", f"unknown attack {attack_id}")
            stats = session.stop()
            return {"packets_sent": stats.packets_sent,
                    "peak_speed": stats.peak_speed,
                    "channel_switches": stats.channel_switches,
                    "duration_ms": stats.duration_ms}

    # -- events -------------------------------------------------------------

    def events_since(self, since: int) -> list[dict]:
        with self.lock:
            return [dict(e) for e in self.events if e["seq"] > since]


def create_app(scenario_path: str, seed: Optional[int] = None,
               console_dir: Optional[str] = None) -> FastAPI:
    session = OperatorSession(scenario_path, seed=seed)
    app = FastAPI(title="jamrange operator service")
    app.state.session = session

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status,
                            content={"code": exc.code, "message": exc.message})

    @app.get("/api/interfaces")
    def interfaces():
        return session.list_interfaces()

    @app.post("/api/interfaces/{iface_id}/mode")
    async def set_mode(iface_id: str, request: Request):
        return session.set_iface_mode(iface_id, await request.json())

    @app.post("/api/scans", status_code=202)
    async def post_scan(request: Request):
        return session.start_scan(await request.json())

    @app.get("/api/scans/{scan_id}")
    def get_scan(scan_id: str):
        return session.get_scan(scan_id)

    @app.post("/api/attacks", status_code=201)
    async def post_attack(request: Request):
        return session.start_attack(await request.json())

    @app.delete("/api/attacks/{attack_id}")
    def delete_attack(attack_id: str):
        return session.stop_attack(attack_id)

    @app.get("/api/events")
    def events(since: int = 0):
        return {"events": session.events_since(since)}

    @app.post("/api/sim/pace")
    async def pace(request: Request):
        return session.set_pace(await request.json())

    console = console_dir or os.environ.get("JAMRANGE_CONSOLE_DIR")
    if console is None:
        # Serve the console bundle when a built frontend sits next to the repo.
        candidate = os.path.join(os.path.dirname(os.path.dirname(
            os.path.dirname(os.path.abspath(__file__)))), "frontend", "dist")
        if os.path.isdir(candidate):
            console = candidate
    if console and os.path.isdir(console):
        app.mount("/", StaticFiles(directory=console, html=True), name="console")
    return app
