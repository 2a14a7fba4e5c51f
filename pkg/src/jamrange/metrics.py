"""Event-log accounting: the live attack feed and post-run effectiveness
reports (downtime, denial rate, reacquisition latency).

Everything here is a pure function over immutable logs.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Union

from .frames import MacAddress


# ---------------------------------------------------------------------------
# Feed events
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Disconnect:
    t: int
    victim: MacAddress
    from_addr: MacAddress
    channel_number: int

    def to_dict(self) -> dict:
        return {"variant": "disconnect", "victim": str(self.victim),
                "from": str(self.from_addr), "channel": self.channel_number}


@dataclass(frozen=True)
class Stats:
    t: int
    packets_sent: int
    speed: int

    def to_dict(self) -> dict:
        return {"variant": "stats", "packets_sent": self.packets_sent,
                "speed": self.speed}


@dataclass(frozen=True)
class PursuitNote:
    t: int
    old_channel: int
    new_channel: int

    def to_dict(self) -> dict:
        return {"variant": "pursuit", "old_channel": self.old_channel,
                "new_channel": self.new_channel}


@dataclass(frozen=True)
class WarningNote:
    t: int
    text: str

    def to_dict(self) -> dict:
        # "message", not "text": the service layer adds a "text" key holding
        # the rendered line, and the raw message must survive next to it
        return {"variant": "warning", "message": self.text}


FeedEvent = Union[Disconnect, Stats, PursuitNote, WarningNote]


def render_feed_line(e: FeedEvent) -> str:
    """Render one live-feed line; the disconnect and stats formats are the
    operator-visible contract and must not drift."""
    if isinstance(e, Disconnect):
        return f"Disconnecting {e.victim} from {e.from_addr} on channel {e.channel_number}"
    if isinstance(e, Stats):
        return f"Packets sent: {e.packets_sent} - Speed: {e.speed} packets/sec"
    if isinstance(e, PursuitNote):
        return (f"Target reacquired on channel {e.new_channel} "
                f"(was on channel {e.old_channel})")
    if isinstance(e, WarningNote):
        return f"Warning: {e.text}"
    raise TypeError(f"unknown feed event {type(e).__name__}")


def feed_event_from_dict(t: int, data: dict) -> FeedEvent:
    """Rebuild a feed event from its event-log form."""
    from .frames import parse_mac
    variant = data["variant"]
    if variant == "disconnect":
        return Disconnect(t=t, victim=parse_mac(data["victim"]),
                          from_addr=parse_mac(data["from"]),
                          channel_number=data["channel"])
    if variant == "stats":
        return Stats(t=t, packets_sent=data["packets_sent"], speed=data["speed"])
    if variant == "pursuit":
        return PursuitNote(t=t, old_channel=data["old_channel"],
                           new_channel=data["new_channel"])
    if variant == "warning":
        return WarningNote(t=t, text=data["message"])
    raise ValueError(f"unknown feed variant {variant!r}")


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

ASSOC_DEADLINE_MS = 500  # attempts slower than this count as denied


@dataclass
class Report:
    downtime_fraction: dict[str, float]
    time_to_full_disconnect_ms: Optional[int]
    denial_rate: float
    denied_attempts: int
    total_attempts: int
    reacquisition_latencies_ms: list[int]
    packets_sent: int
    peak_speed: int

    def to_json(self) -> str:
        return json.dumps({
            "downtime_fraction": self.downtime_fraction,
            "time_to_full_disconnect_ms": self.time_to_full_disconnect_ms,
            "denial_rate": self.denial_rate,
            "denied_attempts": self.denied_attempts,
            "total_attempts": self.total_attempts,
            "reacquisition_latencies_ms": self.reacquisition_latencies_ms,
            "packets_sent": self.packets_sent,
            "peak_speed": self.peak_speed,
        }, indent=2)

    def to_text(self) -> str:
        lines = ["station             downtime"]
        for mac, frac in sorted(self.downtime_fraction.items()):
            lines.append(f"{mac}   {frac:7.4f}")
        ttfd = ("not reached" if self.time_to_full_disconnect_ms is None
                else f"{self.time_to_full_disconnect_ms} ms")
        lines.append(f"time to full disconnect: {ttfd}")
        lines.append(f"denial rate: {self.denial_rate:.4f} "
                     f"({self.denied_attempts}/{self.total_attempts} attempts)")
        lines.append("reacquisition latencies (ms): "
                     + (", ".join(map(str, self.reacquisition_latencies_ms)) or "none"))
        lines.append(f"packets sent: {self.packets_sent}")
        lines.append(f"peak speed: {self.peak_speed} packets/sec")
        return "\n".join(lines)


def stations_in_log(events: list[dict]) -> list[str]:
    return [e["data"]["station"] for e in events if e["kind"] == "spawn_station"]


def associated_intervals(events: list[dict], station: str,
                         t0: int, t1: int) -> list[tuple[int, int]]:
    """Half-open [start, end) intervals during which a station was associated,
    clipped to the window."""
    intervals: list[tuple[int, int]] = []
    since: Optional[int] = None
    for e in events:
        if e["kind"] == "assoc" and e["data"].get("station") == station:
            if since is None:
                since = e["t"]
        elif e["kind"] == "disconnect" and e["data"].get("station") == station:
            if since is not None:
                intervals.append((since, e["t"]))
                since = None
    if since is not None:
        intervals.append((since, t1))
    clipped = []
    for a, b in intervals:
        a, b = max(a, t0), min(b, t1)
        if b > a:
            clipped.append((a, b))
    return clipped


def compute_report(events: list[dict], window: tuple[int, int]) -> Report:
    t0, t1 = window
    if not t0 < t1:
        raise ValueError(f"empty report window {window}")
    length = t1 - t0

    downtime: dict[str, float] = {}
    for station in stations_in_log(events):
        up = sum(b - a for a, b in associated_intervals(events, station, t0, t1))
        downtime[station] = (length - up) / length

    ttfd = _time_to_full_disconnect(events, list(downtime), t0, t1)

    denied = 0
    attempts = 0
    by_station_assocs: dict[str, list[int]] = {}
    for e in events:
        if e["kind"] == "assoc":
            by_station_assocs.setdefault(e["data"]["station"], []).append(e["t"])
    for e in events:
        if e["kind"] != "assoc_attempt":
            continue
        t = e["t"]
        if not t0 <= t <= t1:
            continue
        attempts += 1
        times = by_station_assocs.get(e["data"]["station"], [])
        if not any(t <= at <= t + ASSOC_DEADLINE_MS for at in times):
            denied += 1

    latencies = [e["data"]["latency_ms"] for e in events
                 if e["kind"] == "reacquired" and t0 <= e["t"] <= t1]

    packets = 0
    peak = 0
    for e in events:
        if e["kind"] == "attack_stop":
            packets = max(packets, e["data"]["packets_sent"])
            peak = max(peak, e["data"]["peak_speed"])

    return Report(
        downtime_fraction=downtime,
        time_to_full_disconnect_ms=ttfd,
        denial_rate=denied / attempts if attempts else 0.0,
        denied_attempts=denied,
        total_attempts=attempts,
        reacquisition_latencies_ms=latencies,
        packets_sent=packets,
        peak_speed=peak,
    )


def _time_to_full_disconnect(events: list[dict], stations: list[str],
                             t0: int, t1: int) -> Optional[int]:
    """First instant within the window at which no station is associated."""
    if not stations:
        return None
    associated: set[str] = set()
    for e in events:  # establish state at t0
        if e["t"] > t0:
            break
        if e["kind"] == "assoc":
            associated.add(e["data"]["station"])
        elif e["kind"] == "disconnect":
            associated.discard(e["data"]["station"])
    if not associated:
        return 0
    for e in events:
        if e["t"] <= t0:
            continue
        if e["t"] > t1:
            break
        if e["kind"] == "assoc":
            associated.add(e["data"]["station"])
        elif e["kind"] == "disconnect":
            associated.discard(e["data"]["station"])
            if not associated:
                return e["t"] - t0
    return None
