"""Discrete-event engine tying mobility, MAC, PHY and the power controllers together."""

from __future__ import annotations

import heapq
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel_analysis import ChannelAnalysis, analyze, collision_probability
from .constants import BEACON_RATE, US_PER_S, clamp_power
from .core import make_beacon, record_beacon, reset_window, ring_distance, trace_row, write_trace
from .dfpav import DfpavParams, DfpavState, beaconing_load, dfpav_power_adjust, dfpav_select_power
from .errors import ConfigError
from .mac import (
    MacConfig,
    TransmissionEvent,
    decodable_mask,
    frame_airtime_us,
    rx_power_mw,
    schedule_transmission,
    sensed_busy_until,
)
from .metrics import MetricsRow
from .mobility import MobilityConfig, advance, init_vehicles
from .phy import PhyConfig, nakagami_gain
from .pso import PsoParams, extract_gbest, select_power

log = logging.getLogger(__name__)

PROTOCOLS = ("pbpc", "dfpav", "none")

ANALYSIS_HEADER = ("epoch", "vehicle_id", "cp", "F", "S", "minp", "maxp", "pd", "lbest_power")

# event kinds double as tie-break priority at equal timestamps
_END, _BOUNDARY, _MOBILITY, _GEN, _ATTEMPT = range(5)


@dataclass(frozen=True)
class SimConfig:
    protocol: str = "pbpc"
    duration_s: float = 10.0
    seed: int = 42
    fixed_power_dbm: float = 33.0
    epoch_s: float = 1.0
    mobility_step_ms: int = 100
    phy: PhyConfig = field(default_factory=PhyConfig)
    mac: MacConfig = field(default_factory=MacConfig)
    mobility: MobilityConfig = field(default_factory=MobilityConfig)
    pso: PsoParams = field(default_factory=PsoParams)
    dfpav: DfpavParams = field(default_factory=DfpavParams)
    metrics_out: str | None = None
    trace_out: str | None = None
    analysis_out: str | None = None

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ConfigError(f"unknown protocol {self.protocol!r}; expected one of {PROTOCOLS}")
        if self.duration_s <= 0:
            raise ConfigError("duration_s must be positive")
        if self.epoch_s <= 0 or self.mobility_step_ms <= 0:
            raise ConfigError("epoch_s and mobility_step_ms must be positive")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if clamp_power(self.fixed_power_dbm) != self.fixed_power_dbm:
            raise ConfigError("fixed_power_dbm outside the regulatory range")


@dataclass
class _EpochStats:
    sent: int = 0
    received: int = 0
    delays: list = field(default_factory=list)


class Simulation:
    """One scenario: a single-threaded event loop over a fixed config.

    After ``run()`` the per-epoch rows are in ``rows``, the optional
    reception trace in ``trace`` and per-vehicle analyses in ``analyses``.
    """

    def __init__(
        self,
        cfg: SimConfig,
        keep_trace: bool = False,
        keep_analyses: bool = False,
        keep_frames: bool = False,
    ):
        self.cfg = cfg
        self.keep_frames = keep_frames
        self.keep_trace = keep_trace or cfg.trace_out is not None
        self.keep_analyses = keep_analyses or cfg.analysis_out is not None

        ss = np.random.SeedSequence(cfg.seed)
        mob_ss, mac_ss, phy_ss, jitter_ss, pso_ss = ss.spawn(5)
        self.mac_rng = np.random.default_rng(mac_ss)
        self.phy_rng = np.random.default_rng(phy_ss)
        jitter_rng = np.random.default_rng(jitter_ss)

        self.vehicles = init_vehicles(cfg.mobility, np.random.default_rng(mob_ss))
        n = len(self.vehicles)
        self.pso_rngs = [np.random.default_rng(s) for s in pso_ss.spawn(n)]
        self.xs = np.array([v.position[0] for v in self.vehicles])
        self.lanes = np.array([v.position[1] for v in self.vehicles], dtype=float)

        p0 = {"pbpc": None, "dfpav": cfg.dfpav.p_start, "none": cfg.fixed_power_dbm}[cfg.protocol]
        self.dfpav_states = {}
        for v in self.vehicles:
            if p0 is not None:
                v.current_tx_power = p0
            if cfg.protocol == "dfpav":
                self.dfpav_states[v.id] = DfpavState(current_power=cfg.dfpav.p_start, neighbor_max_power=cfg.dfpav.p_start)

        self.airtime = frame_airtime_us(cfg.mac)
        self.duration_us = int(round(cfg.duration_s * US_PER_S))
        self.epoch_us = int(round(cfg.epoch_s * US_PER_S))
        self.window_rate = int(round(BEACON_RATE * cfg.epoch_s))
        self.gen_interval = US_PER_S // BEACON_RATE
        self.phases = jitter_rng.integers(0, self.gen_interval, n)

        self._heap: list = []
        self._counter = 0
        self.pending_gen: list[int | None] = [None] * n
        self.attempt_scheduled = [False] * n
        self.recent: list[TransmissionEvent] = []
        self.stats = _EpochStats()
        self.rows: list[MetricsRow] = []
        self.trace: list[tuple] = []
        self.analyses: list[tuple] = []
        self.dropped = 0
        self.frame_log: list[tuple[TransmissionEvent, np.ndarray]] = []

    # -- event plumbing ------------------------------------------------

    def _push(self, t: int, kind: int, arg=None) -> None:
        self._counter += 1
        heapq.heappush(self._heap, (t, kind, self._counter, arg))

    def _schedule_attempt(self, vid: int, now: int) -> None:
        busy = sensed_busy_until(vid, now, self.recent, self.cfg.mac)
        ev = schedule_transmission(self.vehicles[vid], now, busy, self.mac_rng, self.cfg.mac)
        self._push(ev.start_us, _ATTEMPT, vid)
        self.attempt_scheduled[vid] = True

    # -- handlers --------------------------------------------------------

    def _on_gen(self, t: int, vid: int) -> None:
        if self.pending_gen[vid] is not None:
            self.dropped += 1
        self.pending_gen[vid] = t
        if not self.attempt_scheduled[vid]:
            self._schedule_attempt(vid, t)
        if t + self.gen_interval <= self.duration_us:
            self._push(t + self.gen_interval, _GEN, vid)

    def _on_attempt(self, t: int, vid: int) -> None:
        self.attempt_scheduled[vid] = False
        gen = self.pending_gen[vid]
        if gen is None:
            return
        if sensed_busy_until(vid, t, self.recent, self.cfg.mac) > t:
            self._schedule_attempt(vid, t)
            return
        v = self.vehicles[vid]
        beacon = make_beacon(v, gen)
        gains = nakagami_gain(self.cfg.phy.nakagami_m, self.phy_rng, size=len(self.vehicles))
        rx = rx_power_mw(
            v.current_tx_power, v.position, self.xs, self.lanes, gains, self.cfg.phy,
            self.cfg.mobility.road_length_m, self.cfg.mobility.lane_width_m,
        )
        frame = TransmissionEvent(vid, t, t + self.airtime, v.current_tx_power, beacon, rx)
        self.pending_gen[vid] = None
        self.recent.append(frame)
        if self.keep_frames:
            self.frame_log.append((frame, gains))
        self._push(frame.end_us, _END, frame)

    def _on_end(self, t: int, frame: TransmissionEvent) -> None:
        concurrent = [g for g in self.recent if g is not frame and g.overlaps(frame)]
        n = len(self.vehicles)
        interf = np.array([g.rx_mw for g in concurrent]).reshape(len(concurrent), n)
        mask = decodable_mask(frame.rx_mw, interf, self.cfg.phy.noise_mw, self.cfg.phy.decode_threshold_db)
        mask[frame.sender_id] = False
        for g in concurrent:
            mask[g.sender_id] = False
        receivers = np.flatnonzero(mask)
        b = frame.beacon
        for r in receivers:
            record_beacon(self.vehicles[r], b, t)
        if self.keep_trace:
            self.trace.extend(trace_row(t, int(r), b) for r in receivers)
        self.stats.sent += 1
        self.stats.received += len(receivers)
        if len(receivers):
            self.stats.delays.append(t - b.timestamp)
        horizon = t - self.airtime
        self.recent = [g for g in self.recent if g.end_us > horizon]

    def _on_mobility(self, t: int) -> None:
        dt = self.cfg.mobility_step_ms / 1000.0
        advance(self.vehicles, dt, self.cfg.mobility.road_length_m)
        self.xs = np.array([v.position[0] for v in self.vehicles])
        nxt = t + self.cfg.mobility_step_ms * 1000
        if nxt <= self.duration_us:
            self._push(nxt, _MOBILITY)

    def _on_boundary(self, t: int) -> None:
        epoch = len(self.rows) + 1
        mean_power = float(np.mean([v.current_tx_power for v in self.vehicles]))
        cps = []
        for v in self.vehicles:
            if v.neighbors:
                total = sum(len(nb.sequence_list) for nb in v.neighbors.values())
                cps.append(collision_probability(total, len(v.neighbors), self.window_rate))
            self._update_power(v, epoch)
            reset_window(v, t)
        delays = self.stats.delays
        self.rows.append(MetricsRow(
            epoch_index=epoch,
            protocol=self.cfg.protocol,
            mean_tx_power_dbm=mean_power,
            mean_collision_probability=float(np.mean(cps)) if cps else 0.0,
            mean_beacon_delay_us=float(np.mean(delays)) if delays else math.nan,
            beacons_sent=self.stats.sent,
            beacons_received=self.stats.received,
        ))
        log.debug("epoch %d: %s", epoch, self.rows[-1])
        self.stats = _EpochStats()
        if t + self.epoch_us <= self.duration_us:
            self._push(t + self.epoch_us, _BOUNDARY)

    # -- power control -------------------------------------------------

    def _analysis(self, v) -> ChannelAnalysis:
        return analyze(v, self.window_rate, self.cfg.mobility.road_length_m, self.cfg.mobility.lane_width_m)

    def _update_power(self, v, epoch: int) -> None:
        proto = self.cfg.protocol
        if self.keep_analyses and v.neighbors:
            a = self._analysis(v)
            self.analyses.append((epoch, v.id, a.cp, a.overall_fault, a.success, a.min_p, a.max_p, a.power_diff, a.local_best_power))
        if proto == "none":
            return
        if proto == "pbpc":
            if not v.neighbors:
                return  # nothing to analyze, hold power
            a = self._analysis(v)
            v.pso.gbest = extract_gbest(v.neighbors.values())
            v.current_tx_power = select_power(a, v.pso, self.cfg.pso, self.pso_rngs[v.id])
            return
        params: DfpavParams = self.cfg.dfpav
        state = self.dfpav_states[v.id]
        heard = [
            nb for nb in v.neighbors.values()
            if nb.sequence_list and ring_distance(
                v.position, nb.last_position, self.cfg.mobility.road_length_m, self.cfg.mobility.lane_width_m
            ) <= params.cs_max
        ]
        load = beaconing_load(len(heard), BEACON_RATE, self.cfg.mac.msg_bytes * 8)
        if heard:
            density = len(heard) * 1000.0 / (2.0 * params.cs_max)
            state.last_adjustment = dfpav_power_adjust(params, density, load)
        v.current_tx_power = dfpav_select_power(state, load, [nb.last_pow_u for nb in heard], params)

    # -- driver ----------------------------------------------------------

    def run(self) -> list[MetricsRow]:
        if self.rows:
            raise RuntimeError("simulation already ran")
        for vid, phase in enumerate(self.phases):
            self._push(int(phase), _GEN, vid)
        self._push(self.cfg.mobility_step_ms * 1000, _MOBILITY)
        self._push(self.epoch_us, _BOUNDARY)
        while self._heap:
            t, kind, _, arg = heapq.heappop(self._heap)
            if t > self.duration_us:
                break
            if kind == _END:
                self._on_end(t, arg)
            elif kind == _BOUNDARY:
                self._on_boundary(t)
            elif kind == _MOBILITY:
                self._on_mobility(t)
            elif kind == _GEN:
                self._on_gen(t, arg)
            else:
                self._on_attempt(t, arg)
        return self.rows


def run(cfg: SimConfig) -> list[MetricsRow]:
    return Simulation(cfg).run()


def run_many(cfgs, workers: int | None = None) -> list[list[MetricsRow]]:
    """Run independent scenarios in worker processes; results keep input order."""
    cfgs = list(cfgs)
    if workers == 1 or len(cfgs) < 2:
        return [run(c) for c in cfgs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, cfgs))


def write_trace_csv(sim: Simulation, path) -> None:
    with open(path, "w", newline="") as fh:
        write_trace(sim.trace, fh)


def write_analysis_csv(sim: Simulation, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(ANALYSIS_HEADER) + "\n")
        for epoch, vid, *vals in sim.analyses:
            fh.write(f"{epoch},{vid}," + ",".join(f"{x:.4f}" for x in vals) + "\n")
