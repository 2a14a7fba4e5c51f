"""Deterministic discrete-event engine and simulated RF medium.

One logical owner advances the clock; agents and attack sessions only run
inside scheduled events, so event execution order is a pure function of
(scenario, seed).
"""
from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .frames import (
    Band, BROADCAST, CapturedFrame, Channel, MacAddress, ManagementFrame,
    frame_dst, frame_src, frame_to_dict,
)


class SimError(Exception):
    pass


class ContractError(SimError):
    """A caller violated an engine precondition (e.g. advancing backwards)."""


class ModeError(SimError):
    """Operation requires monitor mode (spoofed injection, scanning)."""


class ConfigError(SimError):
    pass


class Mode(Enum):
    MANAGED = "managed"
    MONITOR = "monitor"


class RadioInterface:
    """Simulated wireless adapter.

    In managed mode the inbox only ever sees frames addressed to the
    interface or to broadcast; monitor mode captures everything delivered on
    the tuned channel and is the precondition for spoofed injection.
    """

    def __init__(self, iface_id: str, name: str, bands: frozenset[Band],
                 own_mac: MacAddress, tuned: Channel, mode: Mode = Mode.MANAGED):
        if tuned.band not in bands:
            raise ConfigError(f"interface {name}: tuned channel {tuned} outside supported bands")
        self.id = iface_id
        self.name = name
        self.bands = bands
        self.own_mac = own_mac
        self.tuned = tuned
        self.mode = mode
        self.inbox: list[CapturedFrame] = []
        self.on_capture: Optional[Callable[[CapturedFrame], None]] = None

    def supported_channels(self) -> tuple[Channel, ...]:
        from .frames import band_channels
        chans: list[Channel] = []
        for band in (Band.GHZ24, Band.GHZ5):
            if band in self.bands:
                chans.extend(band_channels(band))
        return tuple(chans)


class EventLog:
    """Append-only log; serializes to JSON lines with stable key order."""

    def __init__(self):
        self.events: list[dict] = []

    def append(self, t: int, kind: str, data: dict) -> None:
        self.events.append({"t": t, "kind": kind, "data": data})

    def to_jsonl(self) -> str:
        return "".join(json.dumps(e, separators=(", ", ": ")) + "\n" for e in self.events)

    def of_kind(self, *kinds: str) -> list[dict]:
        return [e for e in self.events if e["kind"] in kinds]


class Simulation:
    """Event queue, clock, seeded RNG and the per-channel medium."""

    def __init__(self, seed: int, propagation_delay_ms: int = 1, loss_rate: float = 0.0):
        self.clock = 0
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.propagation_delay_ms = propagation_delay_ms
        self.loss_rate = loss_rate
        self.log = EventLog()
        self.interfaces: dict[str, RadioInterface] = {}
        self._queue: list[tuple[int, int, Callable[[], None]]] = []
        self._insertions = 0
        self._frame_ids = 0
        self._macs_seen: set[MacAddress] = set()
        self._pwr: dict[tuple[str, MacAddress], int] = {}

    # -- interfaces ---------------------------------------------------------

    def add_interface(self, name: str, bands, own_mac: MacAddress,
                      tuned: Channel, mode: Mode = Mode.MANAGED) -> RadioInterface:
        if own_mac in self._macs_seen:
            raise ConfigError(f"duplicate MAC {own_mac} (interface {name})")
        iface_id = f"if{len(self.interfaces)}"
        iface = RadioInterface(iface_id, name, frozenset(bands), own_mac, tuned, mode)
        self.interfaces[iface_id] = iface
        self._macs_seen.add(own_mac)
        return iface

    def set_mode(self, iface: RadioInterface, mode: Mode) -> None:
        if iface.id not in self.interfaces:
            raise ConfigError(f"unknown interface {iface.id}")
        iface.mode = mode

    def tune(self, iface: RadioInterface, channel: Channel) -> None:
        if channel.band not in iface.bands:
            raise ConfigError(
                f"interface {iface.name} does not support the {channel.band.value} GHz band"
            )
        iface.tuned = channel

    def set_link_pwr(self, iface: RadioInterface, source: MacAddress, pwr: int) -> None:
        if not 0 <= pwr <= 100:
            raise ConfigError(f"pwr {pwr} outside 0..100")
        self._pwr[(iface.id, source)] = pwr

    def link_pwr(self, iface: RadioInterface, source: MacAddress) -> int:
        """Scenario-configured link strength; 50 where unconfigured."""
        return self._pwr.get((iface.id, source), 50)

    # -- scheduling ---------------------------------------------------------

    def schedule(self, delay_ms: int, fn: Callable[[], None]) -> None:
        self.schedule_at(self.clock + delay_ms, fn)

    def schedule_at(self, t: int, fn: Callable[[], None]) -> None:
        if t < self.clock:
            raise ContractError(f"cannot schedule at {t} before clock {self.clock}")
        heapq.heappush(self._queue, (t, self._insertions, fn))
        self._insertions += 1

    def advance_until(self, t: int) -> int:
        """Run all events with time <= t; returns the number executed."""
        if t < self.clock:
            raise ContractError(f"cannot advance to {t}, clock already at {self.clock}")
        count = 0
        while self._queue and self._queue[0][0] <= t:
            when, _, fn = heapq.heappop(self._queue)
            self.clock = when
            fn()
            count += 1
        self.clock = t
        return count

    def log_event(self, kind: str, data: dict) -> None:
        self.log.append(self.clock, kind, data)

    # -- medium -------------------------------------------------------------

    def inject(self, iface: RadioInterface, frame: ManagementFrame) -> int:
        """Put a frame on the air from this interface.

        Spoofing (src different from the adapter's own MAC) requires monitor
        mode, which is exactly why the attack workflow enables it first.
        Returns the frame id assigned to the transmission.
        """
        src = frame_src(frame)
        if src != iface.own_mac and iface.mode is not Mode.MONITOR:
            raise ModeError(
                f"interface {iface.name} is in managed mode; spoofed injection "
                f"(src {src}) requires monitor mode"
            )
        channel = iface.tuned
        frame_id = self._frame_ids
        self._frame_ids += 1
        self.log_event("inject", {
            "frame_id": frame_id, "iface": iface.name,
            "channel": str(channel), "frame": frame_to_dict(frame),
        })
        self.schedule(self.propagation_delay_ms,
                      lambda: self._deliver(frame_id, iface.id, channel, frame))
        return frame_id

    def _deliver(self, frame_id: int, sender_id: str, channel: Channel,
                 frame: ManagementFrame) -> None:
        dst = frame_dst(frame)
        receivers: list[str] = []
        hooks: list[tuple[RadioInterface, CapturedFrame]] = []
        for iface in self.interfaces.values():
            if iface.id == sender_id or iface.tuned != channel:
                continue
            if iface.mode is Mode.MANAGED and dst not in (iface.own_mac, BROADCAST):
                continue
            if self.loss_rate > 0.0 and self.rng.random() < self.loss_rate:
                continue
            pwr = self.link_pwr(iface, frame_src(frame))
            cf = CapturedFrame(frame=frame, channel=channel, pwr=pwr, t=self.clock)
            iface.inbox.append(cf)
            receivers.append(iface.name)
            hooks.append((iface, cf))
        self.log_event("deliver", {"frame_id": frame_id, "receivers": receivers})
        # Hooks run after the delivery record so responses sort later in the log.
        for iface, cf in hooks:
            if iface.on_capture is not None:
                iface.on_capture(cf)
