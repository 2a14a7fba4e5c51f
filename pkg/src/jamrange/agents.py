"""Access-point and station state machines — the victims the flood disrupts.

Agents run only inside the simulation event loop.  Each owns one radio
interface; AP radios capture promiscuously on their own channel so the AP can
notice frames spoofed in its name (it knows it never sent them), which is the
trigger for the channel-hop defense.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .frames import (
    AssociationRequest, AssociationResponse, Authentication, Band, Beacon,
    BROADCAST, CapturedFrame, Channel, Deauthentication, Disassociation,
    Encryption, MacAddress, NullData, ProbeRequest, ProbeResponse,
)
from .simcore import ConfigError, Mode, Simulation


@dataclass
class ApConfig:
    bssid: MacAddress
    essid: str
    channel: Channel
    enc: Encryption = Encryption.WPA2
    beacon_interval_ms: int = 100
    hop_enabled: bool = False
    hop_channels: tuple[Channel, ...] = ()
    hop_threshold: int = 30
    hop_window_ms: int = 2000
    hop_delay_ms: int = 500
    auth_table_capacity: int = 64

    def __post_init__(self):
        if self.hop_enabled and not self.hop_channels:
            raise ConfigError(f"AP {self.essid}: hop enabled but no hop channels")


@dataclass
class StationConfig:
    mac: MacAddress
    target_essid: str
    reconnect_backoff_initial_ms: int = 1000
    backoff_factor: int = 2
    backoff_cap_ms: int = 8000
    scan_dwell_ms: int = 250
    bands: tuple[Band, ...] = (Band.GHZ24, Band.GHZ5)
    keepalive_interval_ms: int = 500

    def __post_init__(self):
        if min(self.reconnect_backoff_initial_ms, self.backoff_cap_ms) <= 0:
            raise ConfigError(f"station {self.mac}: backoff values must be positive")


class AccessPoint:
    """Beacons, runs the auth/assoc lifecycle and the hop defense."""

    def __init__(self, sim: Simulation, cfg: ApConfig):
        self.sim = sim
        self.cfg = cfg
        # Promiscuous capture lets the AP count frames forged in its name.
        self.iface = sim.add_interface(
            name=f"ap:{cfg.essid}", bands=frozenset({cfg.channel.band} |
                                                    {c.band for c in cfg.hop_channels}),
            own_mac=cfg.bssid, tuned=cfg.channel, mode=Mode.MONITOR)
        self.iface.on_capture = self._handle
        self.associated: dict[MacAddress, int] = {}  # client -> assoc time
        self.authenticated: set[MacAddress] = set()
        self._spoof_times: list[int] = []
        self._hop_pending = False
        self._hop_index = (cfg.hop_channels.index(cfg.channel)
                           if cfg.channel in cfg.hop_channels else -1)
        self._seq = 0
        self._started = False

    @property
    def channel(self) -> Channel:
        return self.iface.tuned

    def start(self) -> None:
        assert not self._started
        self._started = True
        jitter = int(self.sim.rng.integers(0, self.cfg.beacon_interval_ms))
        self.sim.schedule(jitter, self._beacon)

    def association_table(self) -> list[MacAddress]:
        return sorted(self.associated)

    def _next_seq(self) -> int:
        self._seq = (self._seq + 1) & 0xFFFF
        return self._seq

    def _send(self, frame) -> None:
        self.sim.inject(self.iface, frame)

    def _beacon(self) -> None:
        self._send(Beacon(bssid=self.cfg.bssid, essid=self.cfg.essid.encode(),
                          channel=self.channel, enc=self.cfg.enc, seq=self._next_seq()))
        self.sim.schedule(self.cfg.beacon_interval_ms, self._beacon)

    def _handle(self, cf: CapturedFrame) -> None:
        f = cf.frame
        own = self.cfg.bssid
        if isinstance(f, ProbeRequest):
            self._send(ProbeResponse(bssid=own, essid=self.cfg.essid.encode(),
                                     channel=self.channel, enc=self.cfg.enc,
                                     dst=f.src, seq=self._next_seq()))
        elif isinstance(f, Authentication) and f.dst == own:
            ok = (len(self.authenticated) < self.cfg.auth_table_capacity
                  or f.src in self.authenticated)
            if ok:
                self.authenticated.add(f.src)
            self._send(Authentication(src=own, dst=f.src, success=ok, seq=self._next_seq()))
        elif isinstance(f, AssociationRequest) and f.bssid == own:
            ok = (f.src in self.authenticated
                  and len(self.associated) < self.cfg.auth_table_capacity)
            if ok:
                self.associated[f.src] = self.sim.clock
            self._send(AssociationResponse(bssid=own, dst=f.src, success=ok,
                                           seq=self._next_seq()))
        elif isinstance(f, (Deauthentication, Disassociation)):
            if f.src == own:
                # We never receive our own transmissions, so a frame claiming
                # to come from us is by definition forged.
                self._note_spoof(cf.t)
            elif f.dst == own and f.bssid == own and f.src in self.associated:
                del self.associated[f.src]
                self.authenticated.discard(f.src)
                self.sim.log_event("ap_client_removed",
                                   {"bssid": str(own), "client": str(f.src)})

    def _note_spoof(self, t: int) -> None:
        self.sim.log_event("disassoc_observed", {"bssid": str(self.cfg.bssid)})
        if not self.cfg.hop_enabled or self._hop_pending:
            return
        self._spoof_times.append(t)
        cutoff = t - self.cfg.hop_window_ms
        self._spoof_times = [s for s in self._spoof_times if s > cutoff]
        if len(self._spoof_times) >= self.cfg.hop_threshold:
            self._hop_pending = True
            self._spoof_times.clear()
            self.sim.schedule(self.cfg.hop_delay_ms, self._hop)

    def _hop(self) -> None:
        old = self.channel
        self._hop_index = (self._hop_index + 1) % len(self.cfg.hop_channels)
        new = self.cfg.hop_channels[self._hop_index]
        if new == old:  # single-entry hop list
            self._hop_pending = False
            return
        self.sim.tune(self.iface, new)
        self._hop_pending = False
        self.sim.log_event("hop", {"bssid": str(self.cfg.bssid),
                                   "from": str(old), "to": str(new)})


class Phase(Enum):
    DISCONNECTED = "disconnected"
    SCANNING = "scanning"
    AUTHENTICATING = "authenticating"
    ASSOCIATING = "associating"
    ASSOCIATED = "associated"


class Station:
    """Client that finds its network, associates and fights to stay on it."""

    HANDSHAKE_TIMEOUT_MS = 1000

    def __init__(self, sim: Simulation, cfg: StationConfig):
        self.sim = sim
        self.cfg = cfg
        channels: list[Channel] = []
        from .frames import band_channels
        for band in (Band.GHZ24, Band.GHZ5):
            if band in cfg.bands:
                channels.extend(band_channels(band))
        if not channels:
            raise ConfigError(f"station {cfg.mac}: no bands configured")
        self._channels = tuple(channels)
        self.iface = sim.add_interface(name=f"sta:{cfg.mac}", bands=frozenset(cfg.bands),
                                       own_mac=cfg.mac, tuned=channels[0])
        self.iface.on_capture = self._handle
        self.phase = Phase.DISCONNECTED
        self.ap_bssid: Optional[MacAddress] = None
        self._candidate: Optional[MacAddress] = None
        self.disconnect_count = 0
        self.connected_ms = 0
        self._assoc_since: Optional[int] = None
        self._backoff = cfg.reconnect_backoff_initial_ms
        self._scan_index = 0
        self._gen = 0  # invalidates stale timers on every phase change
        self._seq = 0
        self._started = False

    def start(self) -> None:
        assert not self._started
        self._started = True
        jitter = int(self.sim.rng.integers(0, 100))
        self.sim.schedule(jitter, self._begin_scan)

    # -- bookkeeping --------------------------------------------------------

    def connected_time(self) -> int:
        extra = self.sim.clock - self._assoc_since if self._assoc_since is not None else 0
        return self.connected_ms + extra

    def _next_seq(self) -> int:
        self._seq = (self._seq + 1) & 0xFFFF
        return self._seq

    def _send(self, frame) -> None:
        self.sim.inject(self.iface, frame)

    def _bump(self) -> int:
        self._gen += 1
        return self._gen

    def _guarded(self, gen: int, fn):
        def run():
            if self._gen == gen:
                fn()
        return run

    # -- scanning -----------------------------------------------------------

    def _begin_scan(self) -> None:
        self.phase = Phase.SCANNING
        gen = self._bump()
        self._dwell(gen)

    def _dwell(self, gen: int) -> None:
        if self._gen != gen:
            return
        self.sim.tune(self.iface, self._channels[self._scan_index])
        self.sim.schedule(self.cfg.scan_dwell_ms, self._guarded(gen, lambda: self._next_dwell(gen)))

    def _next_dwell(self, gen: int) -> None:
        self._scan_index = (self._scan_index + 1) % len(self._channels)
        self._dwell(gen)

    # -- handshake ----------------------------------------------------------

    def _begin_handshake(self, bssid: MacAddress) -> None:
        self.phase = Phase.AUTHENTICATING
        self._candidate = bssid
        gen = self._bump()
        self.sim.log_event("assoc_attempt", {"station": str(self.cfg.mac),
                                             "bssid": str(bssid)})
        self._send(Authentication(src=self.cfg.mac, dst=bssid, seq=self._next_seq()))
        self.sim.schedule(self.HANDSHAKE_TIMEOUT_MS,
                          self._guarded(gen, self._handshake_failed))

    def _handshake_failed(self) -> None:
        if self.phase in (Phase.AUTHENTICATING, Phase.ASSOCIATING):
            self._schedule_reconnect()

    def _schedule_reconnect(self) -> None:
        self.phase = Phase.DISCONNECTED
        self._candidate = None
        gen = self._bump()
        delay = self._backoff
        self._backoff = min(self._backoff * self.cfg.backoff_factor, self.cfg.backoff_cap_ms)
        self.sim.log_event("reconnect_scheduled",
                           {"station": str(self.cfg.mac), "delay_ms": delay})
        self.sim.schedule(delay, self._guarded(gen, self._begin_scan))

    # -- keepalives ---------------------------------------------------------

    def _keepalive(self, gen: int) -> None:
        if self._gen != gen or self.phase is not Phase.ASSOCIATED:
            return
        self._send(NullData(src=self.cfg.mac, bssid=self.ap_bssid, seq=self._next_seq()))
        jitter = int(self.sim.rng.integers(0, 100))
        self.sim.schedule(self.cfg.keepalive_interval_ms + jitter,
                          self._guarded(gen, lambda: self._keepalive(gen)))

    # -- frame handling -----------------------------------------------------

    def _handle(self, cf: CapturedFrame) -> None:
        f = cf.frame
        mac = self.cfg.mac
        if self.phase is Phase.SCANNING and isinstance(f, (Beacon, ProbeResponse)):
            if f.essid == self.cfg.target_essid.encode():
                self._scan_index = self._channels.index(cf.channel)
                self._begin_handshake(f.bssid)
            return
        if isinstance(f, Authentication) and self.phase is Phase.AUTHENTICATING:
            if f.dst == mac and f.src == self._candidate:
                if f.success:
                    self.phase = Phase.ASSOCIATING
                    self._send(AssociationRequest(src=mac, bssid=self._candidate,
                                                  seq=self._next_seq()))
                else:
                    self._schedule_reconnect()
            return
        if isinstance(f, AssociationResponse) and self.phase is Phase.ASSOCIATING:
            if f.dst == mac and f.bssid == self._candidate:
                if f.success:
                    self.phase = Phase.ASSOCIATED
                    self.ap_bssid = self._candidate
                    self._candidate = None
                    self._assoc_since = self.sim.clock
                    self._backoff = self.cfg.reconnect_backoff_initial_ms
                    gen = self._bump()
                    self.sim.log_event("assoc", {"station": str(mac),
                                                 "bssid": str(self.ap_bssid)})
                    jitter = int(self.sim.rng.integers(0, 100))
                    self.sim.schedule(self.cfg.keepalive_interval_ms + jitter,
                                      self._guarded(gen, lambda: self._keepalive(gen)))
                else:
                    self._schedule_reconnect()
            return
        if isinstance(f, (Deauthentication, Disassociation)):
            current = self.ap_bssid or self._candidate
            if current is None or f.bssid != current:
                return
            if f.dst not in (mac, BROADCAST):
                return
            if self.phase is Phase.ASSOCIATED:
                self.connected_ms += self.sim.clock - self._assoc_since
                self._assoc_since = None
                self.ap_bssid = None
                self.disconnect_count += 1
                self.sim.log_event("disconnect", {"station": str(mac),
                                                  "bssid": str(f.bssid),
                                                  "reason": f.reason})
                self._schedule_reconnect()
            elif self.phase in (Phase.AUTHENTICATING, Phase.ASSOCIATING):
                self._schedule_reconnect()
