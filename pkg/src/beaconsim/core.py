"""Beacons, vehicle state and per-neighbor bookkeeping."""

from __future__ import annotations

import csv
import enum
import io
import struct
from dataclasses import dataclass, field
from typing import Iterable

from .constants import (
    BEACON_BYTES,
    BEACON_INTERVAL_MS,
    BEACON_RATE,
    LANE_WIDTH_M,
    P_INIT,
    STALE_TIMEOUT_US,
)
from .pso import PsoState


class Direction(enum.IntEnum):
    EAST = 0
    WEST = 1


@dataclass(frozen=True)
class Beacon:
    seq: int
    interval_ms: int
    timestamp: int  # µs, generation time
    sender_id: int
    position: tuple[float, int]  # (x along road, lane)
    speed: float
    direction: Direction
    pop_best: float
    pow_u: float

    # seq, interval, ts, sender, x, lane, speed, dir, pop_best, pow_u
    _WIRE = struct.Struct("<qiqqdhdBdd")

    def to_bytes(self) -> bytes:
        """Pack into the fixed 512-byte over-the-air frame (zero padded)."""
        x, lane = self.position
        body = self._WIRE.pack(
            self.seq, self.interval_ms, self.timestamp, self.sender_id,
            x, lane, self.speed, int(self.direction), self.pop_best, self.pow_u,
        )
        return body.ljust(BEACON_BYTES, b"\0")

    @classmethod
    def from_bytes(cls, data: bytes) -> "Beacon":
        if len(data) != BEACON_BYTES:
            raise ValueError(f"beacon frame must be {BEACON_BYTES} bytes, got {len(data)}")
        seq, interval, ts, sender, x, lane, speed, d, pop_best, pow_u = cls._WIRE.unpack_from(data)
        return cls(seq, interval, ts, sender, (x, lane), speed, Direction(d), pop_best, pow_u)


@dataclass
class NeighborState:
    id: int
    last_position: tuple[float, int]
    last_speed: float
    last_direction: Direction
    last_pop_best: float
    last_pow_u: float
    last_rx_time: int
    sequence_list: set[int] = field(default_factory=set)


@dataclass
class VehicleState:
    id: int
    position: tuple[float, int]
    speed: float
    direction: Direction = Direction.EAST
    current_tx_power: float = P_INIT
    pso: PsoState = field(default_factory=PsoState)
    neighbors: dict[int, NeighborState] = field(default_factory=dict)
    next_beacon_time: int = 0
    next_seq: int = 0
    window_start: int = 0

    @property
    def x(self) -> float:
        return self.position[0]

    @property
    def lane(self) -> int:
        return self.position[1]


def make_beacon(v: VehicleState, now: int) -> Beacon:
    seq = v.next_seq
    v.next_seq += 1
    return Beacon(
        seq=seq,
        interval_ms=BEACON_INTERVAL_MS,
        timestamp=now,
        sender_id=v.id,
        position=v.position,
        speed=v.speed,
        direction=v.direction,
        pop_best=v.pso.pbest,
        pow_u=v.current_tx_power,
    )


def record_beacon(v: VehicleState, b: Beacon, rx_time: int) -> None:
    """Insert a received beacon into ``v``'s neighbor table.

    Beacons generated before the current window opened still refresh the
    neighbor's position and power fields but are not counted in this
    window's sequence list, so a window never holds more than one second's
    worth of a sender's beacons.
    """
    if b.sender_id == v.id:
        raise ValueError("a vehicle cannot record its own beacon")
    nb = v.neighbors.get(b.sender_id)
    if nb is None:
        nb = NeighborState(
            id=b.sender_id,
            last_position=b.position,
            last_speed=b.speed,
            last_direction=b.direction,
            last_pop_best=b.pop_best,
            last_pow_u=b.pow_u,
            last_rx_time=rx_time,
        )
        v.neighbors[b.sender_id] = nb
    elif rx_time >= nb.last_rx_time:
        nb.last_position = b.position
        nb.last_speed = b.speed
        nb.last_direction = b.direction
        nb.last_pop_best = b.pop_best
        nb.last_pow_u = b.pow_u
        nb.last_rx_time = rx_time
    if b.timestamp >= v.window_start:
        nb.sequence_list.add(b.seq)


def reset_window(v: VehicleState, now: int | None = None, stale_timeout: int = STALE_TIMEOUT_US) -> None:
    """Start a new one-second window.

    Neighbors silent for longer than ``stale_timeout`` are dropped. With
    ``now=None`` only the sequence lists are cleared.
    """
    for nb in v.neighbors.values():
        nb.sequence_list.clear()
    if now is None:
        return
    stale = [i for i, nb in v.neighbors.items() if now - nb.last_rx_time > stale_timeout]
    for i in stale:
        del v.neighbors[i]
    v.window_start = now


def ring_distance(
    a: tuple[float, int],
    b: tuple[float, int],
    road_length: float | None = None,
    lane_width: float = LANE_WIDTH_M,
) -> float:
    """Euclidean distance between two (x, lane) positions, wrapping on a ring road.

    ``road_length=None`` treats the road as an open line.
    """
    dx = abs(a[0] - b[0])
    if road_length is not None:
        dx = min(dx, road_length - dx)
    dy = (a[1] - b[1]) * lane_width
    return (dx * dx + dy * dy) ** 0.5


def neighbors_by_distance(
    v: VehicleState, road_length: float | None = None, lane_width: float = LANE_WIDTH_M
) -> list[NeighborState]:
    """Neighbor rows closest-first, ties broken by id."""
    return sorted(
        v.neighbors.values(),
        key=lambda nb: (ring_distance(v.position, nb.last_position, road_length, lane_width), nb.id),
    )


def window_load(v: VehicleState) -> int:
    return sum(len(nb.sequence_list) for nb in v.neighbors.values())


def window_within_bounds(v: VehicleState, rate: int = BEACON_RATE) -> bool:
    return all(len(nb.sequence_list) <= rate for nb in v.neighbors.values())


# -- trace output ----------------------------------------------------------

TRACE_HEADER = (
    "rx_time_us", "receiver_id", "sender_id", "seq", "pos_x", "lane",
    "speed_kmh", "pop_best_dbm", "pow_u_dbm",
)


def trace_row(rx_time: int, receiver_id: int, b: Beacon) -> tuple:
    return (
        rx_time, receiver_id, b.sender_id, b.seq, repr(b.position[0]), b.position[1],
        repr(b.speed), repr(b.pop_best), repr(b.pow_u),
    )


def write_trace(rows: Iterable[tuple], fh: io.TextIOBase) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(TRACE_HEADER)
    w.writerows(rows)


def read_trace(fh: io.TextIOBase) -> list[dict]:
    out = []
    for rec in csv.DictReader(fh):
        out.append({
            "rx_time_us": int(rec["rx_time_us"]),
            "receiver_id": int(rec["receiver_id"]),
            "sender_id": int(rec["sender_id"]),
            "seq": int(rec["seq"]),
            "pos_x": float(rec["pos_x"]),
            "lane": int(rec["lane"]),
            "speed_kmh": float(rec["speed_kmh"]),
            "pop_best_dbm": float(rec["pop_best_dbm"]),
            "pow_u_dbm": float(rec["pow_u_dbm"]),
        })
    return out
