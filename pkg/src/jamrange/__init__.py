"""Software-defined 802.11 jamming range.

A deterministic discrete-event simulation of Wi-Fi cells plus an attack
engine (scan, disassociation/deauth floods, pursuit mode).  Everything is
simulated; no real wireless hardware is ever driven.
"""

from .frames import (
    Band, BROADCAST, Channel, Encryption, MacAddress,
    channel_center_mhz, decode_frame, encode_frame, forge, parse_mac,
    render_mac,
)
from .simcore import Mode, Simulation
from .agents import AccessPoint, ApConfig, Station, StationConfig
from .attack import (
    AttackConfig, AttackKind, AttackSession, FilterMode, ScanRecord,
    render_scan_table, scan, start_attack, stop_attack,
)
from .metrics import compute_report, render_feed_line
from .scenario import Scenario, load_scenario, new_simulation

__version__ = "0.1.0"
