"""Brute-force replay oracle for report checking.

Recomputes per-station association intervals and denial counts directly from
the raw event stream by stepping through it one event at a time, keeping
explicit per-station state.  Deliberately structured nothing like the
interval arithmetic in jamrange.metrics so the two can cross-check each
other.
"""
from __future__ import annotations


def replay_intervals(events: list[dict], station: str,
                     t0: int, t1: int) -> list[tuple[int, int]]:
    """Associated [start, end) intervals for one station, clipped to the window."""
    timeline: list[tuple[int, bool]] = []
    for e in events:
        data = e.get("data", {})
        if data.get("station") != station:
            continue
        if e["kind"] == "assoc":
            timeline.append((e["t"], True))
        elif e["kind"] == "disconnect":
            timeline.append((e["t"], False))

    intervals: list[tuple[int, int]] = []
    up_since = None
    state = False
    for t, up in timeline:
        if up and not state:
            up_since = t
        elif not up and state:
            intervals.append((up_since, t))
            up_since = None
        state = up
    if state:
        intervals.append((up_since, t1))

    out = []
    for a, b in intervals:
        a2, b2 = max(a, t0), min(b, t1)
        if b2 > a2:
            out.append((a2, b2))
    return out


def replay_denials(events: list[dict], t0: int, t1: int,
                   deadline_ms: int = 500) -> tuple[int, int]:
    """(denied, attempts) over the window, replayed attempt by attempt."""
    attempts = 0
    denied = 0
    for i, e in enumerate(events):
        if e["kind"] != "assoc_attempt" or not (t0 <= e["t"] <= t1):
            continue
        attempts += 1
        station = e["data"]["station"]
        ok = False
        for later in events[i:]:
            if later["t"] > e["t"] + deadline_ms:
                break
            if (later["kind"] == "assoc"
                    and later["data"]["station"] == station
                    and later["t"] >= e["t"]):
                ok = True
                break
        if not ok:
            denied += 1
    return denied, attempts


def replay_downtime_fraction(events: list[dict], station: str,
                             t0: int, t1: int) -> float:
    up = sum(b - a for a, b in replay_intervals(events, station, t0, t1))
    return (t1 - t0 - up) / (t1 - t0)
