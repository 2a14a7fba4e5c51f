import pytest

from jamrange.frames import (
    Band, Beacon, BROADCAST, Channel, Disassociation, Encryption, NullData,
    parse_mac,
)
from jamrange.scenario import load_scenario, new_simulation
from jamrange.simcore import (
    ConfigError, ContractError, Mode, ModeError, Simulation,
)

CH36 = Channel(Band.GHZ5, 36)
CH40 = Channel(Band.GHZ5, 40)
CH1 = Channel(Band.GHZ24, 1)


def two_radios(mode_b=Mode.MANAGED):
    sim = Simulation(seed=1)
    a = sim.add_interface("a", {Band.GHZ5}, parse_mac("02:00:00:00:00:01"), CH36,
                          mode=Mode.MONITOR)
    b = sim.add_interface("b", {Band.GHZ5}, parse_mac("02:00:00:00:00:02"), CH36,
                          mode=mode_b)
    return sim, a, b


def beacon(bssid="02:00:00:00:00:01"):
    return Beacon(bssid=parse_mac(bssid), essid=b"net", channel=CH36,
                  enc=Encryption.OPEN)


class TestClockAndQueue:
    def test_advance_to_now_is_noop(self):
        sim = Simulation(seed=1)
        assert sim.advance_until(0) == 0
        assert sim.clock == 0

    def test_advance_backwards_rejected(self):
        sim = Simulation(seed=1)
        sim.advance_until(10)
        with pytest.raises(ContractError):
            sim.advance_until(5)

    def test_equal_time_events_run_in_insertion_order(self):
        sim = Simulation(seed=1)
        order = []
        for i in range(5):
            sim.schedule(10, lambda i=i: order.append(i))
        sim.advance_until(10)
        assert order == [0, 1, 2, 3, 4]


class TestInterfaces:
    def test_duplicate_mac_rejected(self):
        sim = Simulation(seed=1)
        sim.add_interface("a", {Band.GHZ5}, parse_mac("02:00:00:00:00:01"), CH36)
        with pytest.raises(ConfigError, match="duplicate MAC"):
            sim.add_interface("b", {Band.GHZ5}, parse_mac("02:00:00:00:00:01"), CH36)

    def test_tune_unsupported_band_names_band(self):
        sim = Simulation(seed=1)
        iface = sim.add_interface("a", {Band.GHZ24}, parse_mac("02:00:00:00:00:01"), CH1)
        with pytest.raises(ConfigError, match="5 GHz"):
            sim.tune(iface, CH36)

    def test_mode_change_is_idempotent_and_keeps_channel(self):
        sim, a, _ = two_radios()
        sim.tune(a, CH40)
        sim.set_mode(a, Mode.MONITOR)
        sim.set_mode(a, Mode.MONITOR)
        assert a.mode is Mode.MONITOR
        assert a.tuned == CH40


class TestMedium:
    def test_spoofed_injection_requires_monitor(self):
        sim, a, b = two_radios()
        sim.set_mode(a, Mode.MANAGED)
        with pytest.raises(ModeError):
            sim.inject(a, beacon(bssid="02:00:00:00:00:99"))

    def test_own_frames_ok_in_managed(self):
        sim, a, b = two_radios()
        sim.set_mode(a, Mode.MANAGED)
        sim.inject(a, beacon())  # src is a's own MAC
        sim.advance_until(10)
        assert len(b.inbox) == 1

    def test_sender_does_not_hear_itself(self):
        sim, a, b = two_radios()
        sim.inject(a, beacon())
        sim.advance_until(10)
        assert a.inbox == []

    def test_channel_scoping(self):
        sim, a, b = two_radios()
        sim.tune(b, CH40)
        sim.inject(a, beacon())
        sim.advance_until(10)
        assert b.inbox == []

    def test_managed_filters_foreign_unicast(self):
        sim, a, b = two_radios()
        frame = Disassociation(src=parse_mac("02:00:00:00:00:0A"),
                               dst=parse_mac("02:00:00:00:00:0B"),
                               bssid=parse_mac("02:00:00:00:00:0A"))
        sim.inject(a, frame)
        sim.advance_until(10)
        assert b.inbox == []

    def test_monitor_captures_foreign_unicast(self):
        sim, a, b = two_radios(mode_b=Mode.MONITOR)
        frame = Disassociation(src=parse_mac("02:00:00:00:00:0A"),
                               dst=parse_mac("02:00:00:00:00:0B"),
                               bssid=parse_mac("02:00:00:00:00:0A"))
        sim.inject(a, frame)
        sim.advance_until(10)
        assert len(b.inbox) == 1

    def test_propagation_delay_and_capture_metadata(self):
        sim, a, b = two_radios()
        sim.advance_until(100)
        sim.inject(a, beacon())
        sim.advance_until(200)
        cf = b.inbox[0]
        assert cf.t == 101
        assert cf.channel == CH36

    def test_retune_after_inject_does_not_move_frame(self):
        sim, a, b = two_radios()
        sim.inject(a, beacon())
        sim.tune(a, CH40)
        sim.advance_until(10)
        assert len(b.inbox) == 1
        assert b.inbox[0].channel == CH36

    def test_event_count_conservation(self):
        sim, a, b = two_radios()
        for i in range(7):
            sim.inject(a, beacon())
            sim.advance_until(sim.clock + 5)
        injects = sim.log.of_kind("inject")
        delivers = sim.log.of_kind("deliver")
        assert len(injects) == len(delivers) == 7
        assert {e["data"]["frame_id"] for e in injects} == \
               {e["data"]["frame_id"] for e in delivers}


class TestLinkPwr:
    def test_default_is_50(self):
        sim, a, b = two_radios()
        assert sim.link_pwr(b, a.own_mac) == 50

    def test_configured_value_echoed_into_captures(self):
        sim, a, b = two_radios()
        sim.set_link_pwr(b, a.own_mac, 64)
        sim.inject(a, beacon())
        sim.advance_until(10)
        assert b.inbox[0].pwr == 64


class TestDeterminism:
    def run_log(self, path, seed):
        scenario = load_scenario(path)
        sim, world = new_simulation(scenario, seed=seed)
        sim.advance_until(5000)
        return sim.log.to_jsonl()

    def test_same_seed_byte_identical(self, paper_scenario_path):
        log1 = self.run_log(paper_scenario_path, 42)
        log2 = self.run_log(paper_scenario_path, 42)
        assert log1 == log2

    def test_different_seed_differs(self, paper_scenario_path):
        assert self.run_log(paper_scenario_path, 42) != \
               self.run_log(paper_scenario_path, 43)

    def test_empty_scenario_runs_to_horizon(self, tmp_path):
        empty = tmp_path / "empty.scenario"
        empty.write_text("seed: 1\nhorizon_ms: 1000\n")
        sim, world = new_simulation(load_scenario(str(empty)))
        sim.advance_until(1000)
        assert sim.log.events == []
