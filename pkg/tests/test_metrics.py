import json

import pytest
from hypothesis import given, strategies as st

from jamrange.attack import AttackKind, start_attack
from jamrange.frames import parse_mac
from jamrange.metrics import (
    Disconnect, PursuitNote, Stats, WarningNote, associated_intervals,
    compute_report, feed_event_from_dict, render_feed_line,
)
from jamrange.scenario import load_scenario, new_simulation
from jamrange.simcore import Mode

from oracle import replay_denials, replay_downtime_fraction, replay_intervals
from test_attack import amok_cfg

AP = parse_mac("F8:C4:F3:0E:08:B9")
STA1 = parse_mac("70:BB:E9:3E:0A:64")
BCAST = parse_mac("FF:FF:FF:FF:FF:FF")


class TestFeedLines:
    def test_disconnect_golden(self):
        e = Disconnect(t=0, victim=STA1, from_addr=AP, channel_number=36)
        assert render_feed_line(e) == \
            "Disconnecting 70:BB:E9:3E:0A:64 from F8:C4:F3:0E:08:B9 on channel 36"

    def test_disconnect_broadcast_source(self):
        e = Disconnect(t=0, victim=STA1, from_addr=BCAST, channel_number=36)
        assert render_feed_line(e) == \
            "Disconnecting 70:BB:E9:3E:0A:64 from FF:FF:FF:FF:FF:FF on channel 36"

    def test_stats_golden(self):
        e = Stats(t=0, packets_sent=129, speed=8)
        assert render_feed_line(e) == "Packets sent: 129 - Speed: 8 packets/sec"

    def test_pursuit_note(self):
        e = PursuitNote(t=0, old_channel=36, new_channel=40)
        assert render_feed_line(e) == \
            "Target reacquired on channel 40 (was on channel 36)"

    def test_warning_note(self):
        e = WarningNote(t=0, text="something odd")
        assert render_feed_line(e) == "Warning: something odd"

    @pytest.mark.parametrize("event", [
        Disconnect(t=5, victim=STA1, from_addr=AP, channel_number=36),
        Stats(t=5, packets_sent=12, speed=4),
        PursuitNote(t=5, old_channel=36, new_channel=44),
        WarningNote(t=5, text="x"),
    ])
    def test_dict_round_trip(self, event):
        assert feed_event_from_dict(5, event.to_dict()) == event

    def test_unknown_variant_rejected(self):
        with pytest.raises(ValueError, match="unknown feed variant"):
            feed_event_from_dict(0, {"variant": "nonsense"})


class TestIntervals:
    def events(self, *pairs):
        return [{"t": t, "kind": kind, "data": {"station": "S"}}
                for t, kind in pairs]

    def test_simple_up_down(self):
        evs = self.events((10, "assoc"), (30, "disconnect"))
        assert associated_intervals(evs, "S", 0, 100) == [(10, 30)]

    def test_open_interval_clipped_to_window_end(self):
        evs = self.events((10, "assoc"))
        assert associated_intervals(evs, "S", 0, 100) == [(10, 100)]

    def test_window_clipping_both_sides(self):
        evs = self.events((10, "assoc"), (90, "disconnect"))
        assert associated_intervals(evs, "S", 20, 50) == [(20, 50)]

    def test_duplicate_assoc_ignored(self):
        evs = self.events((10, "assoc"), (20, "assoc"), (30, "disconnect"))
        assert associated_intervals(evs, "S", 0, 100) == [(10, 30)]

    def test_matches_oracle_on_synthetic_timeline(self):
        evs = self.events((5, "assoc"), (8, "disconnect"), (12, "assoc"),
                          (40, "disconnect"), (60, "assoc"))
        for window in [(0, 100), (6, 30), (41, 59), (0, 7)]:
            assert associated_intervals(evs, "S", *window) == \
                replay_intervals(evs, "S", *window)


# Random up/down timelines; metrics interval arithmetic must agree with
# the event-by-event replay for any window.
timelines = st.lists(
    st.tuples(st.integers(0, 1000), st.sampled_from(["assoc", "disconnect"])),
    max_size=30,
).map(lambda ps: sorted(ps, key=lambda p: p[0]))


@given(timelines, st.integers(0, 500), st.integers(501, 1000))
def test_interval_property_vs_oracle(pairs, t0, t1):
    evs = [{"t": t, "kind": k, "data": {"station": "S"}} for t, k in pairs]
    assert associated_intervals(evs, "S", t0, t1) == \
        replay_intervals(evs, "S", t0, t1)


@pytest.fixture(scope="module")
def attacked_log(request):
    path = str(request.config.rootpath / "scenarios" / "paper.scenario")
    sim, world = new_simulation(load_scenario(path), seed=42)
    sim.advance_until(2000)
    sim.set_mode(world.attacker, Mode.MONITOR)
    session = start_attack(sim, world.attacker, amok_cfg())
    sim.advance_until(32000)
    session.stop()
    return sim.log.events


class TestReport:
    def test_downtime_matches_oracle(self, attacked_log):
        report = compute_report(attacked_log, (2000, 32000))
        for station, frac in report.downtime_fraction.items():
            assert frac == pytest.approx(
                replay_downtime_fraction(attacked_log, station, 2000, 32000))

    def test_denials_match_oracle(self, attacked_log):
        report = compute_report(attacked_log, (2000, 32000))
        denied, attempts = replay_denials(attacked_log, 2000, 32000)
        assert (report.denied_attempts, report.total_attempts) == (denied, attempts)

    def test_time_to_full_disconnect_is_first_empty_instant(self, attacked_log):
        report = compute_report(attacked_log, (2000, 32000))
        ttfd = report.time_to_full_disconnect_ms
        assert ttfd is not None and 0 < ttfd <= 5000
        # at 2000 + ttfd every station's oracle timeline is down
        t = 2000 + ttfd
        for station in report.downtime_fraction:
            ivs = replay_intervals(attacked_log, station, 2000, 32000)
            assert not any(a <= t < b for a, b in ivs)

    def test_packets_and_peak_come_from_stop_record(self, attacked_log):
        report = compute_report(attacked_log, (2000, 32000))
        stop = [e for e in attacked_log if e["kind"] == "attack_stop"][-1]
        assert report.packets_sent == stop["data"]["packets_sent"]
        assert report.peak_speed == stop["data"]["peak_speed"]
        assert report.packets_sent > 0

    def test_json_form_is_loadable_and_complete(self, attacked_log):
        report = compute_report(attacked_log, (2000, 32000))
        doc = json.loads(report.to_json())
        assert set(doc) == {
            "downtime_fraction", "time_to_full_disconnect_ms", "denial_rate",
            "denied_attempts", "total_attempts", "reacquisition_latencies_ms",
            "packets_sent", "peak_speed",
        }

    def test_text_form_mentions_every_station(self, attacked_log):
        report = compute_report(attacked_log, (2000, 32000))
        text = report.to_text()
        for station in report.downtime_fraction:
            assert station in text

    def test_empty_window_rejected(self, attacked_log):
        with pytest.raises(ValueError, match="window"):
            compute_report(attacked_log, (5000, 5000))

    def test_quiet_log_reports_zero_downtime(self, paper_scenario_path):
        sim, world = new_simulation(load_scenario(paper_scenario_path), seed=42)
        sim.advance_until(10000)
        report = compute_report(sim.log.events, (2000, 10000))
        assert all(f == 0.0 for f in report.downtime_fraction.values())
        assert report.time_to_full_disconnect_ms is None
        assert report.denial_rate == 0.0
