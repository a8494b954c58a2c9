import dataclasses
import math
from collections import defaultdict

import numpy as np
import pytest

from beaconsim.cli import main
from beaconsim.config import build_config, dump_config, known_keys, load_config, parse_config
from beaconsim.core import read_trace
from beaconsim.errors import ConfigError
from beaconsim.metrics import (
    MetricsRow,
    compare_runs,
    format_metrics_csv,
    measure_delay,
    read_metrics_csv,
    write_metrics_csv,
)
from beaconsim.mobility import MobilityConfig
from beaconsim.sim import ANALYSIS_HEADER, SimConfig, Simulation, run, run_many

SMALL = MobilityConfig(n_vehicles=40, road_length_m=800.0)


def small_cfg(protocol="pbpc", seed=1, duration_s=3.0, **kw):
    return SimConfig(protocol=protocol, seed=seed, duration_s=duration_s, mobility=SMALL, **kw)


def row(epoch, delay, power=25.0):
    return MetricsRow(epoch, "pbpc", power, 0.1, delay, 10, 20)


# -- delay ------------------------------------------------------------------

def test_measure_delay_idle_medium():
    assert measure_delay(0, 64 + 696) == 760


def test_measure_delay_after_defer():
    assert measure_delay(1000, 1000 + 500 + 64 + 696) == 1260


def test_measure_delay_rejects_time_travel():
    with pytest.raises(ValueError):
        measure_delay(10, 5)


def test_undelivered_beacons_stay_out_of_delay():
    # a lone vehicle sends but nobody hears: counted as sent, no delay sample
    cfg = SimConfig(protocol="none", duration_s=1.0, mobility=MobilityConfig(n_vehicles=1))
    (r,) = run(cfg)
    assert r.beacons_sent == 10 and r.beacons_received == 0
    assert math.isnan(r.mean_beacon_delay_us)


# -- engine -----------------------------------------------------------------

@pytest.mark.parametrize("seed", range(3))
def test_two_vehicles_benign(seed):
    cfg = SimConfig(protocol="none", duration_s=2.0, seed=seed,
                    mobility=MobilityConfig(n_vehicles=2, road_length_m=100.0))
    sim = Simulation(cfg, keep_frames=True)
    rows = sim.run()
    assert len(rows) == 2
    for r in rows:
        assert r.beacons_received == r.beacons_sent == 20
        assert r.mean_collision_probability == pytest.approx(0.0)
    delays = [f.end_us - f.beacon.timestamp for f, _ in sim.frame_log]
    assert min(delays) >= 760
    assert all((d - 760) % 16 == 0 for d in delays)


def test_one_row_per_epoch():
    rows = run(small_cfg(duration_s=4.0))
    assert [r.epoch_index for r in rows] == [1, 2, 3, 4]


@pytest.mark.parametrize("protocol", ["pbpc", "dfpav", "none"])
def test_row_invariants(protocol):
    cfg = small_cfg(protocol)
    for r in run(cfg):
        assert 0.0 <= r.mean_collision_probability <= 1.0
        assert r.beacons_sent >= 0 and r.beacons_received >= 0
        assert r.beacons_received <= r.beacons_sent * (cfg.mobility.n_vehicles - 1)
        assert 10.0 <= r.mean_tx_power_dbm <= 33.0


@pytest.mark.parametrize("protocol", ["pbpc", "dfpav"])
def test_power_constant_within_epoch(protocol):
    cfg = small_cfg(protocol)
    sim = Simulation(cfg, keep_frames=True)
    sim.run()
    per = defaultdict(set)
    for f, _ in sim.frame_log:
        per[(f.sender_id, f.start_us // sim.epoch_us)].add(f.tx_power_dbm)
    assert all(len(p) == 1 for p in per.values())


def test_every_reception_maps_to_one_frame():
    sim = Simulation(small_cfg(), keep_trace=True, keep_frames=True)
    sim.run()
    frames = {(f.sender_id, f.beacon.seq): f for f, _ in sim.frame_log}
    assert len(frames) == len(sim.frame_log)
    seen = set()
    for rx_time, rid, sid, seq, *_ in sim.trace:
        assert frames[(sid, seq)].end_us == rx_time
        assert (rid, sid, seq) not in seen
        seen.add((rid, sid, seq))


def test_window_stays_bounded():
    sim = Simulation(small_cfg(duration_s=2.5))
    sim.run()
    for v in sim.vehicles:
        for nb in v.neighbors.values():
            assert len(nb.sequence_list) <= 10


def test_short_run_deterministic():
    a = format_metrics_csv(run(small_cfg()))
    b = format_metrics_csv(run(small_cfg()))
    assert a == b


def test_seed_changes_output():
    assert format_metrics_csv(run(small_cfg(seed=1))) != format_metrics_csv(run(small_cfg(seed=2)))


def test_run_many_matches_serial():
    cfgs = [small_cfg(p, duration_s=2.0) for p in ("pbpc", "none")]
    assert run_many(cfgs, workers=2) == [run(c) for c in cfgs]


def test_simulation_runs_once():
    sim = Simulation(small_cfg(duration_s=1.0))
    sim.run()
    with pytest.raises(RuntimeError):
        sim.run()


@pytest.mark.parametrize("kw", [{"protocol": "bogus"}, {"duration_s": 0}, {"fixed_power_dbm": 40}, {"seed": -1}])
def test_config_rejects(kw):
    with pytest.raises(ConfigError):
        SimConfig(**kw)


# -- CSV --------------------------------------------------------------------

def test_metrics_csv_shape(tmp_path):
    rows = run(small_cfg(duration_s=10.0, mobility_step_ms=100))
    path = tmp_path / "m.csv"
    write_metrics_csv(rows, path)
    lines = path.read_text().splitlines()
    assert len(lines) == 11
    assert lines[0] == "epoch,protocol,mean_tx_power_dbm,mean_cp,mean_delay_us,sent,received"
    for rec in read_metrics_csv(path):
        assert 0.0 <= rec["mean_cp"] <= 1.0


def test_metrics_csv_four_decimals():
    text = format_metrics_csv([row(1, 760.123456), row(2, math.nan)])
    assert text.splitlines()[1] == "1,pbpc,25.0000,0.1000,760.1235,10,20"
    assert ",nan," in text.splitlines()[2]


def test_write_metrics_empty(tmp_path):
    with pytest.raises(ValueError):
        write_metrics_csv([], tmp_path / "x.csv")


def test_compare_identical(tmp_path):
    p = tmp_path / "a.csv"
    write_metrics_csv([row(1, 800), row(2, 900)], p)
    summary = compare_runs(p, p)
    assert all(s["ratio"] == 1.0 for s in summary.values())


def test_compare_delay_ratio(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_metrics_csv([row(1, 100.0)], a)
    write_metrics_csv([row(1, 55.0)], b)
    assert compare_runs(a, b)["mean_delay_us"]["ratio"] == pytest.approx(0.55)


def test_compare_schema_mismatch(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_metrics_csv([row(1, 100.0)], a)
    b.write_text("epoch,delay\n1,100\n")
    with pytest.raises(ValueError):
        compare_runs(a, b)
    write_metrics_csv([row(1, 100.0), row(2, 100.0)], b)
    with pytest.raises(ValueError):
        compare_runs(a, b)


# -- config -----------------------------------------------------------------

def test_parse_config_comments_and_spaces():
    text = "# header\nsim.seed = 7   # trailing\n\nphy.snr_threshold_db=12\n"
    assert parse_config(text) == {"sim.seed": "7", "phy.snr_threshold_db": "12"}


def test_build_config_types():
    cfg = build_config({"sim.seed": "7", "sim.protocol": "dfpav", "dfpav.step_dbm": "1.0", "mobility.n_vehicles": "50"})
    assert cfg.seed == 7 and cfg.protocol == "dfpav"
    assert cfg.dfpav.step == 1.0 and cfg.mobility.n_vehicles == 50


@pytest.mark.parametrize("values", [
    {"sim.sede": "7"},
    {"phy.bogus": "1"},
    {"sim.seed": "seven"},
    {"phy.snr_threshold_db": "3"},
])
def test_build_config_errors(values):
    with pytest.raises(ConfigError):
        build_config(values)


def test_parse_config_rejects_malformed():
    with pytest.raises(ConfigError):
        parse_config("justtext\n")
    with pytest.raises(ConfigError):
        parse_config("seed = 3\n")


def test_config_round_trip(tmp_path):
    cfg = dataclasses.replace(small_cfg("dfpav", seed=9), metrics_out="out.csv")
    p = tmp_path / "c.cfg"
    p.write_text(dump_config(cfg))
    assert load_config(p) == cfg


def test_every_key_is_dumped():
    keys = {line.split(" = ")[0] for line in dump_config(SimConfig()).splitlines()}
    assert keys | {"output.metrics_csv", "output.trace_csv", "output.analysis_csv"} == set(known_keys())


# -- CLI --------------------------------------------------------------------

def test_cli_run_and_compare(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("mobility.n_vehicles = 30\nmobility.road_length_m = 600\n")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["run", "--protocol", "pbpc", "--config", str(cfg), "--seed", "3", "--duration-s", "2", "--out", str(a)]) == 0
    assert main(["run", "--protocol", "none", "--config", str(cfg), "--seed", "3", "--duration-s", "2", "--out", str(b)]) == 0
    assert len(a.read_text().splitlines()) == 3
    capsys.readouterr()
    assert main(["compare", str(a), str(b)]) == 0
    assert "mean_delay_us" in capsys.readouterr().out


def test_cli_stdout(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("mobility.n_vehicles = 10\n")
    assert main(["run", "--config", str(cfg), "--duration-s", "1"]) == 0
    assert capsys.readouterr().out.startswith("epoch,protocol,")


def test_cli_unknown_key_exit_2(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("sim.nonsense = 1\n")
    assert main(["run", "--config", str(cfg)]) == 2


def test_cli_missing_config_exit_3(tmp_path):
    assert main(["run", "--config", str(tmp_path / "absent.cfg")]) == 3


def test_cli_unwritable_output_exit_3(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("mobility.n_vehicles = 5\n")
    out = tmp_path / "no" / "such" / "dir.csv"
    assert main(["run", "--config", str(cfg), "--duration-s", "1", "--out", str(out)]) == 3


def test_cli_compare_missing_file_exit_3(tmp_path):
    assert main(["compare", str(tmp_path / "a.csv"), str(tmp_path / "b.csv")]) == 3


def test_cli_trace_and_analysis(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("mobility.n_vehicles = 20\nmobility.road_length_m = 400\n")
    tr, an, out = tmp_path / "t.csv", tmp_path / "an.csv", tmp_path / "m.csv"
    rc = main(["run", "--config", str(cfg), "--duration-s", "2", "--out", str(out), "--trace", str(tr), "--analysis", str(an)])
    assert rc == 0
    with open(tr) as fh:
        trace = read_trace(fh)
    assert trace and all(r["receiver_id"] != r["sender_id"] for r in trace)
    header, *body = an.read_text().splitlines()
    assert tuple(header.split(",")) == ANALYSIS_HEADER
    cps = np.array([float(line.split(",")[2]) for line in body])
    assert ((0 <= cps) & (cps <= 1)).all()
