"""Attacker side: passive scanner, disassociation/deauth amok flood with
filter lists, targeted deauth, beacon flood, auth DoS, and the pursuit
controller that re-acquires a channel-hopping target.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .frames import (
    AssociationRequest, AssociationResponse, Authentication, Band, Beacon,
    BROADCAST, CapturedFrame, Channel, Deauthentication, Disassociation,
    Encryption, MacAddress, MacParseError, NullData, ProbeResponse,
    DEFAULT_REASON, essid_text, forge, parse_mac,
)
from .metrics import Disconnect, FeedEvent, PursuitNote, Stats, WarningNote
from .simcore import ConfigError, Mode, ModeError, RadioInterface, Simulation

FILTER_RELOAD_MS = 3000  # blacklist/whitelist re-read period


@dataclass
class ScanRecord:
    index: int
    bssid: MacAddress
    channel: Channel
    pwr: int
    enc: Encryption
    essid: str
    has_clients: bool


def scan(sim: Simulation, iface: RadioInterface, dwell_ms: int = 250,
         duration_ms: int = 5000) -> list[ScanRecord]:
    """Sweep every supported channel round-robin and tabulate what was heard.

    A record is produced per distinct BSSID seen in beacons or probe
    responses; has_clients is set when any auth/assoc/data-direction frame
    between a non-AP MAC and that BSSID was observed.
    """
    if iface.mode is not Mode.MONITOR:
        raise ModeError("scanning requires monitor mode")
    channels = iface.supported_channels()
    start = sim.clock
    first_new = len(iface.inbox)
    idx = 0
    while sim.clock < start + duration_ms:
        sim.tune(iface, channels[idx])
        sim.log_event("scan_dwell", {"iface": iface.name, "channel": str(channels[idx])})
        sim.advance_until(min(sim.clock + dwell_ms, start + duration_ms))
        idx = (idx + 1) % len(channels)

    seen: dict[MacAddress, tuple[str, Channel, Encryption]] = {}
    with_clients: set[MacAddress] = set()
    for cf in iface.inbox[first_new:]:
        f = cf.frame
        if isinstance(f, (Beacon, ProbeResponse)):
            seen[f.bssid] = (essid_text(f.essid), cf.channel, f.enc)
        elif isinstance(f, (Authentication, AssociationRequest)):
            bssid = f.dst if isinstance(f, Authentication) else f.bssid
            with_clients.add(bssid)
        elif isinstance(f, AssociationResponse):
            with_clients.add(f.bssid)
        elif isinstance(f, NullData):
            with_clients.add(f.bssid)

    rows = [(bssid, essid, channel, enc, sim.link_pwr(iface, bssid))
            for bssid, (essid, channel, enc) in seen.items()]
    rows.sort(key=lambda r: (-r[4], r[0]))
    return [ScanRecord(index=i + 1, bssid=bssid, channel=channel, pwr=pwr,
                       enc=enc, essid=essid, has_clients=bssid in with_clients)
            for i, (bssid, essid, channel, enc, pwr) in enumerate(rows)]


def render_scan_table(records: list[ScanRecord]) -> str:
    """Operator-facing table, one line per AP plus the clients footnote."""
    if not records:
        return ""
    lines = []
    for r in records:
        mark = "*" if r.has_clients else " "
        lines.append(f"{r.index}) {mark} {r.bssid} {r.channel.number} "
                     f"{r.pwr}% {r.enc.value} {r.essid}")
    lines.append("(*) Network with clients")
    return "\n".join(lines)


class AttackKind(Enum):
    DISASSOC_AMOK = "disassoc-amok"
    TARGETED_DEAUTH = "deauth"
    BEACON_FLOOD = "beacon-flood"
    AUTH_DOS = "auth-dos"


class FilterMode(Enum):
    NONE = "none"
    WHITELIST = "whitelist"
    BLACKLIST = "blacklist"


@dataclass
class AttackConfig:
    kind: AttackKind
    target: Optional[ScanRecord] = None
    client: Optional[MacAddress] = None  # TargetedDeauth victim
    pursuit: bool = False
    cycle_interval_ms: int = 250
    broadcast_every: int = 4
    filter_mode: FilterMode = FilterMode.NONE
    filter_path: Optional[str] = None
    reason: int = DEFAULT_REASON
    loss_timeout_ms: int = 2000
    sweep_dwell_ms: int = 250

    def __post_init__(self):
        if self.cycle_interval_ms <= 0:
            raise ConfigError("cycle_interval must be positive")


class SessionState(Enum):
    LOCKED = "locked"
    SWEEPING = "sweeping"
    STOPPED = "stopped"


class PursuitStatus(Enum):
    LOCKED = "locked"
    LOST = "lost"
    REACQUIRED = "reacquired"


@dataclass
class AttackStats:
    packets_sent: int
    peak_speed: int
    channel_switches: int
    duration_ms: int


class AttackSession:
    """One running attack.  Owned by the simulation loop; observers read
    snapshots (state, counters, feed)."""

    def __init__(self, sim: Simulation, iface: RadioInterface, cfg: AttackConfig):
        if iface.mode is not Mode.MONITOR:
            raise ModeError("attacks require monitor mode")
        if cfg.kind is not AttackKind.BEACON_FLOOD:
            if cfg.target is None:
                raise ConfigError(f"{cfg.kind.value} attack needs a target")
            if cfg.target.channel.band not in iface.bands:
                raise ConfigError(
                    f"interface {iface.name} does not support the "
                    f"{cfg.target.channel.band.value} GHz band of the target")
        if cfg.kind is AttackKind.TARGETED_DEAUTH and cfg.client is None:
            raise ConfigError("targeted deauth needs a client MAC")
        self.sim = sim
        self.iface = iface
        self.cfg = cfg
        self.state = SessionState.LOCKED
        self.locked_channel: Optional[Channel] = None
        self.victims: set[MacAddress] = set()
        self.packets_sent = 0
        self.peak_speed = 0
        self.channel_switches = 0
        self.feed: list[FeedEvent] = []
        self.on_feed = None  # optional callback(event), used by the service
        self.filter_set: set[MacAddress] = set()
        self._inject_times: list[int] = []
        self._cycle_no = 0
        self._seq = 0
        self._started_at = sim.clock
        self._stats: Optional[AttackStats] = None
        self._last_beacon_seen = sim.clock
        self._silence_since: Optional[int] = None
        self._sweep_channels = tuple(iface.supported_channels())
        self._sweep_index = 0
        if cfg.target is not None:
            sim.tune(iface, cfg.target.channel)
            self.locked_channel = cfg.target.channel
        iface.on_capture = self._on_capture
        if cfg.filter_mode is not FilterMode.NONE:
            self.reload_filter_lists()
            sim.schedule(FILTER_RELOAD_MS, self._reload_tick)
        sim.log_event("attack_start", {
            "kind": cfg.kind.value,
            "target": str(cfg.target.bssid) if cfg.target else None,
            "pursuit": cfg.pursuit,
        })
        sim.schedule(cfg.cycle_interval_ms, self._cycle)

    # -- feed ---------------------------------------------------------------

    def _emit(self, event: FeedEvent) -> None:
        self.feed.append(event)
        self.sim.log_event("feed", event.to_dict())
        if self.on_feed is not None:
            self.on_feed(event)

    # -- filters ------------------------------------------------------------

    def reload_filter_lists(self) -> int:
        """Re-read the filter file; keeps the previous list if unreadable."""
        path = self.cfg.filter_path
        try:
            with open(path, "r", encoding="utf-8") as fh:
                lines = fh.readlines()
        except OSError as e:
            self._emit(WarningNote(t=self.sim.clock,
                               text=f"filter list {path}: {e.strerror or e}; keeping previous list"))
            return len(self.filter_set)
        loaded: set[MacAddress] = set()
        for lineno, raw in enumerate(lines, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                loaded.add(parse_mac(line))
            except MacParseError:
                self._emit(WarningNote(t=self.sim.clock,
                                   text=f"filter list {path}:{lineno}: skipping malformed MAC {line!r}"))
        self.filter_set = loaded
        return len(loaded)

    def _reload_tick(self) -> None:
        if self.state is SessionState.STOPPED:
            return
        self.reload_filter_lists()
        self.sim.schedule(FILTER_RELOAD_MS, self._reload_tick)

    def _allowed(self, mac: MacAddress) -> bool:
        if self.cfg.filter_mode is FilterMode.WHITELIST:
            return mac not in self.filter_set
        if self.cfg.filter_mode is FilterMode.BLACKLIST:
            return mac in self.filter_set
        return True

    # -- capture hook -------------------------------------------------------

    def _on_capture(self, cf: CapturedFrame) -> None:
        if self.state is SessionState.STOPPED or self.cfg.target is None:
            return
        f = cf.frame
        target = self.cfg.target.bssid
        if isinstance(f, (Beacon, ProbeResponse)) and f.bssid == target:
            if self.state is SessionState.SWEEPING:
                self._reacquire(cf.channel)
            elif cf.channel == self.locked_channel:
                self._last_beacon_seen = cf.t
            return
        if self.cfg.kind is not AttackKind.DISASSOC_AMOK:
            return
        other = self._counterpart(f, target)
        if other is not None and not other.is_broadcast and other != target:
            self.victims.add(other)
        # A re-association observed mid-flood is knocked straight back down,
        # which is what keeps measured uptime near zero.
        if (self.state is SessionState.LOCKED
                and isinstance(f, AssociationResponse)
                and f.bssid == target and f.success and self._allowed(f.dst)):
            self._kill_pair(Disassociation, f.dst, target)

    @staticmethod
    def _counterpart(f, target: MacAddress) -> Optional[MacAddress]:
        if isinstance(f, NullData) and f.bssid == target:
            return f.src
        if isinstance(f, Authentication):
            if f.dst == target:
                return f.src
            if f.src == target:
                return f.dst
        if isinstance(f, AssociationRequest) and f.bssid == target:
            return f.src
        if isinstance(f, AssociationResponse) and f.bssid == target:
            return f.dst
        return None

    # -- injection helpers --------------------------------------------------

    def _next_seq(self) -> int:
        self._seq = (self._seq + 1) & 0xFFFF
        return self._seq

    def _inject(self, frame) -> None:
        self.sim.inject(self.iface, frame)
        self.packets_sent += 1
        self._inject_times.append(self.sim.clock)

    def _kill_pair(self, frame_cls, victim: MacAddress, bssid: MacAddress) -> None:
        reason = self.cfg.reason
        self._inject(frame_cls(src=bssid, dst=victim, bssid=bssid,
                               reason=reason, seq=self._next_seq()))
        self._inject(frame_cls(src=victim, dst=bssid, bssid=bssid,
                               reason=reason, seq=self._next_seq()))
        self._emit(Disconnect(t=self.sim.clock, victim=victim, from_addr=bssid,
                              channel_number=self.iface.tuned.number))

    def speed(self) -> int:
        """Frames injected by this session in the trailing 1000 ms."""
        cutoff = self.sim.clock - 1000
        self._inject_times = [t for t in self._inject_times if t > cutoff]
        return len(self._inject_times)

    # -- the cycle ----------------------------------------------------------

    def _cycle(self) -> None:
        if self.state is SessionState.STOPPED:
            return
        self._cycle_no += 1
        if self.state is SessionState.LOCKED:
            dispatch = {
                AttackKind.DISASSOC_AMOK: self._amok_cycle,
                AttackKind.TARGETED_DEAUTH: self._targeted_cycle,
                AttackKind.BEACON_FLOOD: self._beacon_flood_cycle,
                AttackKind.AUTH_DOS: self._auth_dos_cycle,
            }
            dispatch[self.cfg.kind]()
            speed = self.speed()
            self.peak_speed = max(self.peak_speed, speed)
            self._emit(Stats(t=self.sim.clock, packets_sent=self.packets_sent, speed=speed))
        if self.cfg.target is not None:
            self.pursuit_check()
        if self.state is not SessionState.STOPPED:
            self.sim.schedule(self.cfg.cycle_interval_ms, self._cycle)

    def _amok_cycle(self) -> None:
        target = self.cfg.target.bssid
        targets = sorted(v for v in self.victims if self._allowed(v))
        for victim in targets:
            self._kill_pair(Disassociation, victim, target)
        if targets and self._cycle_no % self.cfg.broadcast_every == 0:
            self._inject(Deauthentication(src=target, dst=BROADCAST, bssid=target,
                                          reason=self.cfg.reason, seq=self._next_seq()))
            for victim in targets:
                self._emit(Disconnect(t=self.sim.clock, victim=victim,
                                      from_addr=BROADCAST,
                                      channel_number=self.iface.tuned.number))

    def _targeted_cycle(self) -> None:
        if self._allowed(self.cfg.client):
            self._kill_pair(Deauthentication, self.cfg.client, self.cfg.target.bssid)

    def _beacon_flood_cycle(self) -> None:
        bssid = MacAddress(bytes([0x02]) + bytes(int(x) for x in
                                                 self.sim.rng.integers(0, 256, size=5)))
        essid = "".join(chr(int(c)) for c in self.sim.rng.integers(65, 91, size=8))
        self._inject(Beacon(bssid=bssid, essid=essid.encode(),
                            channel=self.iface.tuned,
                            enc=Encryption.OPEN, seq=self._next_seq()))

    AUTH_DOS_BURST = 8

    def _auth_dos_cycle(self) -> None:
        target = self.cfg.target.bssid
        for _ in range(self.AUTH_DOS_BURST):
            src = MacAddress(bytes([0x02]) + bytes(int(x) for x in
                                                   self.sim.rng.integers(0, 256, size=5)))
            self._inject(Authentication(src=src, dst=target, seq=self._next_seq()))

    # -- pursuit ------------------------------------------------------------

    def pursuit_check(self) -> PursuitStatus:
        """Evaluated each cycle; drives loss detection and the channel sweep."""
        if self.state is SessionState.SWEEPING:
            return PursuitStatus.LOCKED  # sweep in progress, dwells run on their own
        if self.sim.clock - self._last_beacon_seen <= self.cfg.loss_timeout_ms:
            return PursuitStatus.LOCKED
        if not self.cfg.pursuit:
            self.sim.log_event("target_lost", {"target": str(self.cfg.target.bssid)})
            self.stop()
            return PursuitStatus.LOST
        self.state = SessionState.SWEEPING
        self._silence_since = self._last_beacon_seen
        self._sweep_index = 0
        self.sim.log_event("sweep_start", {"target": str(self.cfg.target.bssid),
                                           "silence_since": self._silence_since})
        self._sweep_dwell()
        return PursuitStatus.REACQUIRED if self.state is SessionState.LOCKED \
            else PursuitStatus.LOCKED

    def _sweep_dwell(self) -> None:
        if self.state is not SessionState.SWEEPING:
            return
        channel = self._sweep_channels[self._sweep_index]
        self._sweep_index = (self._sweep_index + 1) % len(self._sweep_channels)
        self.sim.tune(self.iface, channel)
        self.sim.schedule(self.cfg.sweep_dwell_ms, self._sweep_dwell)

    def _reacquire(self, channel: Channel) -> None:
        old = self.locked_channel
        self.locked_channel = channel
        self.sim.tune(self.iface, channel)
        self.state = SessionState.LOCKED
        self.channel_switches += 1
        self._last_beacon_seen = self.sim.clock
        latency = self.sim.clock - self._silence_since
        self._silence_since = None
        self.sim.log_event("reacquired", {"channel": str(channel),
                                          "latency_ms": latency})
        self._emit(PursuitNote(t=self.sim.clock, old_channel=old.number,
                               new_channel=channel.number))

    # -- teardown -----------------------------------------------------------

    def stop(self) -> AttackStats:
        """Idempotent; returns the final stats snapshot."""
        if self._stats is not None:
            return self._stats
        self.state = SessionState.STOPPED
        self._stats = AttackStats(
            packets_sent=self.packets_sent,
            peak_speed=self.peak_speed,
            channel_switches=self.channel_switches,
            duration_ms=self.sim.clock - self._started_at,
        )
        self.sim.log_event("attack_stop", {
            "packets_sent": self._stats.packets_sent,
            "peak_speed": self._stats.peak_speed,
            "channel_switches": self._stats.channel_switches,
            "duration_ms": self._stats.duration_ms,
        })
        return self._stats


def start_attack(sim: Simulation, iface: RadioInterface, cfg: AttackConfig) -> AttackSession:
    return AttackSession(sim, iface, cfg)


def stop_attack(session: AttackSession) -> AttackStats:
    return session.stop()
