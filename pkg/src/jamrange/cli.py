"""Batch front end: scenario-driven scan, attack, report and serve commands.

Exit codes: 0 success, 1 usage error, 2 scenario error, 3 runtime contract
violation.  Every error path prints a single line prefixed with `error:`.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .attack import (
    AttackConfig, AttackKind, FilterMode, ScanRecord, render_scan_table,
    scan, start_attack, stop_attack,
)
from .frames import MacParseError, parse_mac
from .metrics import compute_report, feed_event_from_dict, render_feed_line
from .scenario import Scenario, ScenarioError, load_scenario, new_simulation
from .simcore import ContractError, Mode, SimError

ATTACK_START_MS = 2000  # settle time before the attack begins

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SCENARIO = 2
EXIT_RUNTIME = 3


def _error(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jamrange",
        description="Simulated 802.11 jamming range (no real radios are driven).")
    sub = parser.add_subparsers(dest="command", required=True)

    p_scan = sub.add_parser("scan", help="sweep channels and print the AP table")
    p_scan.add_argument("--scenario", required=True)
    p_scan.add_argument("--duration", type=int, default=5000, metavar="MS")
    p_scan.add_argument("--dwell", type=int, default=250, metavar="MS")
    p_scan.add_argument("--seed", type=int, default=None)

    p_attack = sub.add_parser("attack", help="run an attack against a scenario")
    p_attack.add_argument("--scenario", required=True)
    p_attack.add_argument("--target", help="target BSSID (required except for beacon-flood)")
    p_attack.add_argument("--kind", required=True,
                          choices=[k.value for k in AttackKind])
    p_attack.add_argument("--client", help="client MAC for the targeted deauth kind")
    p_attack.add_argument("--pursuit", action="store_true")
    p_attack.add_argument("--duration", type=int, default=30000, metavar="MS")
    p_attack.add_argument("--seed", type=int, default=None)
    p_attack.add_argument("--log", metavar="OUT.jsonl")
    p_attack.add_argument("--feed", action="store_true",
                          help="print the live disconnect feed")
    p_attack.add_argument("--reason", type=int, default=7)
    p_attack.add_argument("--whitelist", metavar="PATH")
    p_attack.add_argument("--blacklist", metavar="PATH")
    p_attack.add_argument("--cycle-interval", type=int, default=250, metavar="MS")
    p_attack.add_argument("--loss-timeout", type=int, default=2000, metavar="MS")

    p_report = sub.add_parser("report", help="compute effectiveness metrics from a log")
    p_report.add_argument("log")
    p_report.add_argument("--window", required=True, metavar="T0:T1")
    p_report.add_argument("--format", choices=["json", "text"], default="json")

    p_serve = sub.add_parser("serve", help="start the operator session service")
    p_serve.add_argument("--scenario", required=True)
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.add_argument("--seed", type=int, default=None)
    return parser


def _load(path: str, seed: Optional[int]):
    scenario = load_scenario(path)
    for w in scenario.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return new_simulation(scenario, seed=seed), scenario


def _cmd_scan(args) -> int:
    (sim, world), _ = _load(args.scenario, args.seed)
    sim.set_mode(world.attacker, Mode.MONITOR)
    records = scan(sim, world.attacker, dwell_ms=args.dwell, duration_ms=args.duration)
    table = render_scan_table(records)
    if table:
        print(table)
    return EXIT_OK


def _cmd_attack(args) -> int:
    (sim, world), scenario = _load(args.scenario, args.seed)
    sim.set_mode(world.attacker, Mode.MONITOR)

    kind = AttackKind(args.kind)
    target = None
    if kind is not AttackKind.BEACON_FLOOD:
        if not args.target:
            _error(f"--target is required for kind {kind.value}")
            return EXIT_USAGE
        try:
            bssid = parse_mac(args.target)
        except MacParseError as e:
            _error(str(e))
            return EXIT_USAGE
        ap = next((a for a in scenario.aps if a.bssid == bssid), None)
        if ap is None:
            known = ", ".join(str(a.bssid) for a in scenario.aps) or "none"
            _error(f"unknown target BSSID {args.target}; scanned BSSIDs: {known}")
            return EXIT_SCENARIO
        target = ScanRecord(index=1, bssid=ap.bssid, channel=ap.channel,
                            pwr=sim.link_pwr(world.attacker, ap.bssid),
                            enc=ap.enc, essid=ap.essid, has_clients=True)

    filter_mode, filter_path = FilterMode.NONE, None
    if args.whitelist and args.blacklist:
        _error("--whitelist and --blacklist are mutually exclusive")
        return EXIT_USAGE
    if args.whitelist:
        filter_mode, filter_path = FilterMode.WHITELIST, args.whitelist
    elif args.blacklist:
        filter_mode, filter_path = FilterMode.BLACKLIST, args.blacklist

    client = None
    if args.client:
        try:
            client = parse_mac(args.client)
        except MacParseError as e:
            _error(str(e))
            return EXIT_USAGE

    cfg = AttackConfig(kind=kind, target=target, client=client,
                       pursuit=args.pursuit, reason=args.reason,
                       cycle_interval_ms=args.cycle_interval,
                       loss_timeout_ms=args.loss_timeout,
                       filter_mode=filter_mode, filter_path=filter_path)
    sim.advance_until(ATTACK_START_MS)
    session = start_attack(sim, world.attacker, cfg)
    sim.advance_until(ATTACK_START_MS + args.duration)
    stop_attack(session)

    if args.feed:
        for event in session.feed:
            print(render_feed_line(event))
    if args.log:
        with open(args.log, "w", encoding="utf-8") as fh:
            fh.write(sim.log.to_jsonl())
    return EXIT_OK


def _cmd_report(args) -> int:
    try:
        t0_text, t1_text = args.window.split(":", 1)
        window = (int(t0_text), int(t1_text))
    except ValueError:
        _error(f"bad --window {args.window!r}, expected T0:T1 in ms")
        return EXIT_USAGE
    try:
        with open(args.log, "r", encoding="utf-8") as fh:
            events = [json.loads(line) for line in fh if line.strip()]
    except OSError as e:
        _error(f"cannot read log {args.log}: {e.strerror or e}")
        return EXIT_SCENARIO
    try:
        report = compute_report(events, window)
    except ValueError as e:
        _error(str(e))
        return EXIT_USAGE
    print(report.to_json() if args.format == "json" else report.to_text())
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn
    from .service import create_app
    app = create_app(args.scenario, seed=args.seed)
    uvicorn.run(app, host="127.0.0.1", port=args.port, log_level="warning")
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    handlers = {"scan": _cmd_scan, "attack": _cmd_attack,
                "report": _cmd_report, "serve": _cmd_serve}
    try:
        return handlers[args.command](args)
    except ScenarioError as e:
        _error(str(e))
        return EXIT_SCENARIO
    except ContractError as e:
        _error(str(e))
        return EXIT_RUNTIME
    except SimError as e:
        _error(str(e))
        return EXIT_SCENARIO


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
