"""Per-epoch channel status analysis run by every vehicle.

The pipeline turns one second of received sequence numbers into a
collision probability, per-neighbor fail rates, a neighborhood success
fraction and the locally best transmit power, which feeds the PSO step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .constants import BEACON_RATE, D_FLOOR, LANE_WIDTH_M
from .core import VehicleState, neighbors_by_distance, ring_distance
from .errors import NoNeighbors


@dataclass(frozen=True)
class DistanceRow:
    id: int
    reception_percent: float
    distance: float
    fail_rate: float


@dataclass(frozen=True)
class ChannelAnalysis:
    cp: float
    rows: tuple[DistanceRow, ...]
    overall_fault: float
    mean_distance: float
    success: float
    min_p: float
    max_p: float
    power_diff: float
    local_best_power: float


def collision_probability(total_beacons_received: int, n_neighbors: int, rate: int = BEACON_RATE) -> float:
    """Fraction of expected beacons that never arrived in the window."""
    if n_neighbors < 1:
        raise NoNeighbors("collision probability needs at least one neighbor")
    expected = n_neighbors * rate
    if not 0 <= total_beacons_received <= expected:
        raise ValueError(f"received {total_beacons_received} beacons, expected at most {expected}")
    return 1.0 - total_beacons_received / expected


def fail_rate(p: float, d: float, d_floor: float = D_FLOOR) -> float:
    """Percentage points of reception lost per meter of separation."""
    return (100.0 - p) / max(d, d_floor)


def build_distance_table(
    v: VehicleState,
    rate: int = BEACON_RATE,
    road_length: float | None = None,
    lane_width: float = LANE_WIDTH_M,
    d_floor: float = D_FLOOR,
) -> list[DistanceRow]:
    rows = []
    for nb in neighbors_by_distance(v, road_length, lane_width):
        p = 100.0 * len(nb.sequence_list) / rate
        d = max(ring_distance(v.position, nb.last_position, road_length, lane_width), d_floor)
        rows.append(DistanceRow(nb.id, p, d, fail_rate(p, d, d_floor)))
    return rows


def power_difference(abl_powers: Sequence[float]) -> tuple[float, float, float]:
    if len(abl_powers) == 0:
        raise NoNeighbors("no advertised powers in the active beacon list")
    lo, hi = min(abl_powers), max(abl_powers)
    return lo, hi, hi - lo


def overall_fault(rows: Sequence[DistanceRow]) -> float:
    if not rows:
        raise NoNeighbors("empty distance table")
    return sum(r.fail_rate for r in rows) / len(rows)


def success_fraction(rows: Sequence[DistanceRow], f_overall: float) -> float:
    """Neighborhood reception success as a fraction, clamped to [0, 1]."""
    if not rows:
        raise NoNeighbors("empty distance table")
    mean_d = sum(r.distance for r in rows) / len(rows)
    s = (100.0 - mean_d * f_overall) / 100.0
    return min(max(s, 0.0), 1.0)


def local_best_power(min_p: float, pd: float, s: float) -> float:
    return min_p + pd * s


def analyze(
    v: VehicleState,
    rate: int = BEACON_RATE,
    road_length: float | None = None,
    lane_width: float = LANE_WIDTH_M,
) -> ChannelAnalysis:
    """Run the whole analysis on ``v``'s current window.

    Raises NoNeighbors when the neighbor table is empty.
    """
    if not v.neighbors:
        raise NoNeighbors(f"vehicle {v.id} has no neighbors this epoch")
    total = sum(len(nb.sequence_list) for nb in v.neighbors.values())
    cp = collision_probability(total, len(v.neighbors), rate)
    rows = build_distance_table(v, rate, road_length, lane_width)
    f = overall_fault(rows)
    s = success_fraction(rows, f)
    min_p, max_p, pd = power_difference([nb.last_pow_u for nb in v.neighbors.values()])
    return ChannelAnalysis(
        cp=cp,
        rows=tuple(rows),
        overall_fault=f,
        mean_distance=sum(r.distance for r in rows) / len(rows),
        success=s,
        min_p=min_p,
        max_p=max_p,
        power_diff=pd,
        local_best_power=local_best_power(min_p, pd, s),
    )
