"""Scenario files: the YAML description of a cell population, plus the
builder that turns one into a live simulation."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import yaml

from .agents import AccessPoint, ApConfig, Station, StationConfig
from .frames import Band, Channel, ChannelError, Encryption, MacAddress, MacParseError, parse_mac
from .simcore import ConfigError, Mode, RadioInterface, Simulation


class ScenarioError(Exception):
    pass


DEFAULT_ATTACKER_MAC = "02:00:DE:AD:BE:EF"


@dataclass
class MediumConfig:
    propagation_delay_ms: int = 1
    loss_rate: float = 0.0


@dataclass
class AttackerConfig:
    name: str = "wlan0"
    bands: tuple[Band, ...] = (Band.GHZ24, Band.GHZ5)
    mac: MacAddress = field(default_factory=lambda: parse_mac(DEFAULT_ATTACKER_MAC))
    links: dict[str, int] = field(default_factory=dict)  # bssid text -> pwr


@dataclass
class Scenario:
    aps: list[ApConfig]
    stations: list[StationConfig]
    attacker: AttackerConfig
    medium: MediumConfig
    seed: int
    horizon_ms: int
    warnings: list[str] = field(default_factory=list)


def _band(value, where: str) -> Band:
    try:
        return Band(str(value))
    except ValueError:
        raise ScenarioError(f"{where}: unknown band {value!r} (use '2.4' or '5')")


def _mac(value, where: str) -> MacAddress:
    try:
        return parse_mac(str(value))
    except MacParseError as e:
        raise ScenarioError(f"{where}: {e}")


def _channel(entry: dict, where: str) -> Channel:
    try:
        return Channel(_band(entry.get("band", "2.4"), where), int(entry["channel"]))
    except KeyError:
        raise ScenarioError(f"{where}: missing 'channel'")
    except ChannelError as e:
        raise ScenarioError(f"{where}: {e}")


def _ap_config(entry: dict, index: int) -> ApConfig:
    where = f"aps[{index}]"
    if not isinstance(entry, dict):
        raise ScenarioError(f"{where}: expected a mapping")
    for key in ("bssid", "essid"):
        if key not in entry:
            raise ScenarioError(f"{where}: missing '{key}'")
    channel = _channel(entry, where)
    try:
        enc = Encryption(entry.get("encryption", "WPA2"))
    except ValueError:
        raise ScenarioError(f"{where}: unknown encryption {entry.get('encryption')!r}")
    hop = entry.get("hop") or {}
    hop_channels = tuple(
        Channel(channel.band, int(n)) for n in hop.get("channels", ())
    )
    try:
        return ApConfig(
            bssid=_mac(entry["bssid"], where),
            essid=str(entry["essid"]),
            channel=channel,
            enc=enc,
            beacon_interval_ms=int(entry.get("beacon_interval_ms", 100)),
            hop_enabled=bool(hop.get("enabled", False)),
            hop_channels=hop_channels,
            hop_threshold=int(hop.get("threshold", 30)),
            hop_window_ms=int(hop.get("window_ms", 2000)),
            hop_delay_ms=int(hop.get("delay_ms", 500)),
            auth_table_capacity=int(entry.get("auth_table_capacity", 64)),
        )
    except (ConfigError, ChannelError) as e:
        raise ScenarioError(f"{where}: {e}")


def _station_config(entry: dict, index: int) -> StationConfig:
    where = f"stations[{index}]"
    if not isinstance(entry, dict):
        raise ScenarioError(f"{where}: expected a mapping")
    for key in ("mac", "target_essid"):
        if key not in entry:
            raise ScenarioError(f"{where}: missing '{key}'")
    bands = tuple(_band(b, where) for b in entry.get("bands", ("2.4", "5")))
    try:
        return StationConfig(
            mac=_mac(entry["mac"], where),
            target_essid=str(entry["target_essid"]),
            reconnect_backoff_initial_ms=int(entry.get("reconnect_backoff_initial_ms", 1000)),
            backoff_factor=int(entry.get("backoff_factor", 2)),
            backoff_cap_ms=int(entry.get("backoff_cap_ms", 8000)),
            scan_dwell_ms=int(entry.get("scan_dwell_ms", 250)),
            bands=bands,
            keepalive_interval_ms=int(entry.get("keepalive_interval_ms", 500)),
        )
    except ConfigError as e:
        raise ScenarioError(f"{where}: {e}")


def load_scenario(path: str) -> Scenario:
    """Parse and validate a scenario file, filling every default."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except OSError as e:
        raise ScenarioError(f"cannot read scenario {path}: {e.strerror or e}")
    except yaml.YAMLError as e:
        raise ScenarioError(f"scenario {path}: parse error: {e}")
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ScenarioError(f"scenario {path}: top level must be a mapping")

    aps = [_ap_config(e, i) for i, e in enumerate(doc.get("aps") or [])]
    stations = [_station_config(e, i) for i, e in enumerate(doc.get("stations") or [])]

    att = doc.get("attacker") or {}
    attacker = AttackerConfig(
        name=str(att.get("name", "wlan0")),
        bands=tuple(_band(b, "attacker") for b in att.get("bands", ("2.4", "5"))),
        mac=_mac(att.get("mac", DEFAULT_ATTACKER_MAC), "attacker"),
        links={str(k): int(v) for k, v in (att.get("links") or {}).items()},
    )
    med = doc.get("medium") or {}
    medium = MediumConfig(
        propagation_delay_ms=int(med.get("propagation_delay_ms", 1)),
        loss_rate=float(med.get("loss_rate", 0.0)),
    )

    seen: dict[MacAddress, str] = {}
    for cfg in aps:
        if cfg.bssid in seen:
            raise ScenarioError(f"duplicate MAC {cfg.bssid} (AP {cfg.essid} and {seen[cfg.bssid]})")
        seen[cfg.bssid] = f"AP {cfg.essid}"
    for cfg in stations:
        if cfg.mac in seen:
            raise ScenarioError(f"duplicate MAC {cfg.mac} (station and {seen[cfg.mac]})")
        seen[cfg.mac] = "station"
    if attacker.mac in seen:
        raise ScenarioError(f"duplicate MAC {attacker.mac} (attacker and {seen[attacker.mac]})")
    for bssid_text in attacker.links:
        _mac(bssid_text, "attacker.links")

    warnings = []
    essids = {a.essid for a in aps}
    for cfg in stations:
        if cfg.target_essid not in essids:
            warnings.append(f"station {cfg.mac}: target ESSID "
                            f"{cfg.target_essid!r} matches no AP")

    return Scenario(
        aps=aps, stations=stations, attacker=attacker, medium=medium,
        seed=int(doc.get("seed", 0)), horizon_ms=int(doc.get("horizon_ms", 60000)),
        warnings=warnings,
    )


@dataclass
class World:
    aps: list[AccessPoint]
    stations: list[Station]
    attacker: RadioInterface


def new_simulation(scenario: Scenario, seed: Optional[int] = None) -> tuple[Simulation, World]:
    """Instantiate every AP, station and the attacker adapter at clock 0.

    Agents spawn in scenario order so their jitter draws come out of the RNG
    deterministically.
    """
    sim = Simulation(seed=scenario.seed if seed is None else seed,
                     propagation_delay_ms=scenario.medium.propagation_delay_ms,
                     loss_rate=scenario.medium.loss_rate)
    aps = []
    for cfg in scenario.aps:
        ap = AccessPoint(sim, cfg)
        sim.log_event("spawn_ap", {"bssid": str(cfg.bssid), "essid": cfg.essid,
                                   "channel": str(cfg.channel)})
        ap.start()
        aps.append(ap)
    stations = []
    for cfg in scenario.stations:
        st = Station(sim, cfg)
        sim.log_event("spawn_station", {"station": str(cfg.mac),
                                        "target_essid": cfg.target_essid})
        st.start()
        stations.append(st)
    first = next(iter(Band(b.value) for b in scenario.attacker.bands))
    from .frames import band_channels
    attacker = sim.add_interface(
        name=scenario.attacker.name, bands=frozenset(scenario.attacker.bands),
        own_mac=scenario.attacker.mac, tuned=band_channels(first)[0])
    for bssid_text, pwr in scenario.attacker.links.items():
        sim.set_link_pwr(attacker, parse_mac(bssid_text), pwr)
    return sim, World(aps=aps, stations=stations, attacker=attacker)
