"""Constant-speed traffic on a multi-lane ring highway."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Direction, VehicleState, ring_distance


@dataclass(frozen=True)
class MobilityConfig:
    n_vehicles: int = 200
    road_length_m: float = 2000.0
    lanes: int = 3
    lane_width_m: float = 3.5
    v_min_kmh: float = 20.0
    v_max_kmh: float = 120.0

    def __post_init__(self):
        if self.n_vehicles <= 0:
            raise ValueError("n_vehicles must be positive")
        if self.lanes < 1:
            raise ValueError("need at least one lane")
        if self.v_min_kmh > self.v_max_kmh:
            raise ValueError("v_min_kmh must not exceed v_max_kmh")
        if self.road_length_m <= 0:
            raise ValueError("road_length_m must be positive")


def init_vehicles(cfg: MobilityConfig, rng: np.random.Generator) -> list[VehicleState]:
    """Place vehicles uniformly at random; ids follow road order and lanes cycle."""
    xs = np.sort(rng.uniform(0.0, cfg.road_length_m, cfg.n_vehicles))
    speeds = rng.uniform(cfg.v_min_kmh, cfg.v_max_kmh, cfg.n_vehicles)
    return [
        VehicleState(id=i, position=(float(xs[i]), i % cfg.lanes), speed=float(speeds[i]), direction=Direction.EAST)
        for i in range(cfg.n_vehicles)
    ]


def kmh_to_mps(v: float) -> float:
    return v / 3.6


def advance(vehicles: Sequence[VehicleState], dt_s: float, road_length: float = 2000.0) -> None:
    if dt_s <= 0:
        raise ValueError("dt_s must be positive")
    for v in vehicles:
        x, lane = v.position
        v.position = ((x + kmh_to_mps(v.speed) * dt_s) % road_length, lane)


def distance(a: VehicleState, b: VehicleState, cfg: MobilityConfig = MobilityConfig()) -> float:
    return ring_distance(a.position, b.position, cfg.road_length_m, cfg.lane_width_m)
