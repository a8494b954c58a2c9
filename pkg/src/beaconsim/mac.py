"""Simplified 802.11p broadcast MAC.

Broadcast frames are never acknowledged or retried, so the contention
window stays at ``cw_min``. A sender defers while it senses a frame above
the carrier-sense threshold and then waits DIFS plus a uniform backoff.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .constants import LANE_WIDTH_M
from .core import Beacon, VehicleState
from .phy import PhyConfig, dbm_to_mw, nakagami_gain, path_loss_db


@dataclass(frozen=True)
class MacConfig:
    slot_us: int = 16
    sifs_us: int = 32
    difs_us: int = 64
    cw_min: int = 15
    cw_max: int = 1023  # inert: broadcast never doubles the window
    plcp_us: int = 8
    symbol_us: int = 8
    data_rate_bps: int = 6_000_000
    msg_bytes: int = 512
    cs_threshold_dbm: float = -85.0
    # frames younger than this are not yet visible to carrier sense
    sense_delay_us: int = 8

    def __post_init__(self):
        if self.cw_min > self.cw_max:
            raise ValueError("cw_min must not exceed cw_max")
        for name in ("slot_us", "sifs_us", "difs_us", "plcp_us", "symbol_us", "data_rate_bps", "msg_bytes"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.sense_delay_us < 0:
            raise ValueError("sense_delay_us must be non-negative")


@dataclass
class TransmissionEvent:
    sender_id: int
    start_us: int
    end_us: int
    tx_power_dbm: float
    beacon: Beacon | None = None
    # received power (mW) at every vehicle, filled in by the engine
    rx_mw: np.ndarray | None = field(default=None, repr=False)

    def overlaps(self, other: "TransmissionEvent") -> bool:
        return self.start_us < other.end_us and other.start_us < self.end_us


class Reception(NamedTuple):
    receiver_id: int
    sender_id: int
    beacon: Beacon | None
    rx_time: int


def frame_airtime_us(cfg: MacConfig = MacConfig()) -> int:
    bits = cfg.msg_bytes * 8
    bits_per_symbol = cfg.data_rate_bps * cfg.symbol_us // 1_000_000
    n_symbols = -(-bits // bits_per_symbol)
    return cfg.plcp_us + n_symbols * cfg.symbol_us


def backoff_delay_us(rng: np.random.Generator, cfg: MacConfig = MacConfig()) -> int:
    return cfg.difs_us + int(rng.integers(0, cfg.cw_min + 1)) * cfg.slot_us


def schedule_transmission(
    v: VehicleState,
    now_us: int,
    medium_busy_until: int,
    rng: np.random.Generator,
    cfg: MacConfig = MacConfig(),
    beacon: Beacon | None = None,
) -> TransmissionEvent:
    start = max(now_us, medium_busy_until) + backoff_delay_us(rng, cfg)
    return TransmissionEvent(
        sender_id=v.id,
        start_us=start,
        end_us=start + frame_airtime_us(cfg),
        tx_power_dbm=v.current_tx_power,
        beacon=beacon,
    )


def sensed_busy_until(
    listener: int,
    now_us: int,
    frames: Sequence[TransmissionEvent],
    cfg: MacConfig = MacConfig(),
) -> int:
    """End of the last ongoing frame ``listener`` can hear, or ``now_us`` if idle.

    Frames must carry ``rx_mw``.
    """
    cs_mw = dbm_to_mw(cfg.cs_threshold_dbm)
    busy = now_us
    for f in frames:
        if f.start_us <= now_us - cfg.sense_delay_us and f.end_us > now_us and f.rx_mw[listener] >= cs_mw:
            busy = max(busy, f.end_us)
    return busy


def decodable_mask(signal_mw: np.ndarray, interferer_mw: np.ndarray, noise_mw: float, threshold_db: float) -> np.ndarray:
    """SINR test for one frame at many receivers.

    ``interferer_mw`` has one row per concurrent frame (possibly zero rows).
    """
    total = noise_mw + interferer_mw.sum(axis=0)
    return 10.0 * np.log10(signal_mw) - 10.0 * np.log10(total) >= threshold_db


def rx_power_mw(
    tx_dbm: float,
    sender_pos: tuple[float, int],
    xs: np.ndarray,
    lanes: np.ndarray,
    gains: np.ndarray,
    phy: PhyConfig,
    road_length: float | None = None,
    lane_width: float = LANE_WIDTH_M,
) -> np.ndarray:
    dx = np.abs(xs - sender_pos[0])
    if road_length is not None:
        dx = np.minimum(dx, road_length - dx)
    dy = (lanes - sender_pos[1]) * lane_width
    d = np.hypot(dx, dy)
    return dbm_to_mw(tx_dbm - path_loss_db(d, phy)) * gains


def resolve_receptions(
    events: Sequence[TransmissionEvent],
    receivers: Sequence[VehicleState],
    phy: PhyConfig = PhyConfig(),
    gains: np.ndarray | None = None,
    rng: np.random.Generator | None = None,
    road_length: float | None = None,
    lane_width: float = LANE_WIDTH_M,
    sender_positions: dict[int, tuple[float, int]] | None = None,
) -> list[Reception]:
    """Decide which receivers decode which frames.

    ``gains[e, r]`` is the fading power gain from event ``e`` to receiver
    ``r``; it is drawn from ``rng`` when omitted. A receiver decodes a frame
    when its SINR against every time-overlapping frame clears the
    threshold, and it is neither the sender nor transmitting itself during
    the frame. Sender positions come from ``sender_positions`` or, failing
    that, the beacon payload.
    """
    n_e, n_r = len(events), len(receivers)
    if n_e == 0 or n_r == 0:
        return []
    if gains is None:
        if rng is None:
            raise ValueError("need fading gains or an rng to draw them")
        gains = nakagami_gain(phy.nakagami_m, rng, size=(n_e, n_r))
    xs = np.array([r.position[0] for r in receivers], dtype=float)
    lanes = np.array([r.position[1] for r in receivers], dtype=float)
    ids = np.array([r.id for r in receivers])
    rx = np.empty((n_e, n_r))
    for i, e in enumerate(events):
        if sender_positions is not None and e.sender_id in sender_positions:
            pos = sender_positions[e.sender_id]
        else:
            pos = e.beacon.position
        rx[i] = rx_power_mw(e.tx_power_dbm, pos, xs, lanes, gains[i], phy, road_length, lane_width)

    order = sorted(range(n_e), key=lambda i: (events[i].start_us, i))
    out: list[Reception] = []
    active: list[int] = []
    for pos_i, i in enumerate(order):
        e = events[i]
        # frames starting later but before e ends
        later = []
        for j in order[pos_i + 1:]:
            if events[j].start_us >= e.end_us:
                break
            later.append(j)
        active = [j for j in active if events[j].end_us > e.start_us]
        concurrent = active + later
        mask = decodable_mask(rx[i], rx[concurrent], phy.noise_mw, phy.decode_threshold_db)
        busy_senders = {e.sender_id} | {events[j].sender_id for j in concurrent}
        mask &= ~np.isin(ids, list(busy_senders))
        for r in np.flatnonzero(mask):
            out.append(Reception(int(ids[r]), e.sender_id, e.beacon, e.end_us))
        active.append(i)
    out.sort(key=lambda rec: (rec.rx_time, rec.sender_id, rec.receiver_id))
    return out
