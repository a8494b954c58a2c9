"""Fair-power baseline: a synchronized water-filling ramp capped by a beaconing load limit."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .constants import P_INIT, P_REG_MAX, P_REG_MIN, clamp_power
from .errors import DegenerateInput


@dataclass(frozen=True)
class DfpavParams:
    mbl: float = 2.5e6  # bits/s
    cs_max: float = 500.0  # m
    epsilon: float = 0.1
    step: float = 0.5
    p_start: float = P_INIT

    def __post_init__(self):
        if self.mbl <= 0 or self.cs_max <= 0:
            raise ValueError("mbl and cs_max must be positive")
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        if self.step <= 0:
            raise ValueError("step must be positive")


@dataclass
class DfpavState:
    current_power: float = P_INIT
    neighbor_max_power: float = P_INIT
    last_adjustment: float = 0.0  # closed-form adjustment, diagnostic only


def dfpav_power_adjust(params: DfpavParams, vehicle_density: float, load_vehicle: float) -> float:
    """Power adjustment value from the load cap, density and per-vehicle load.

    The result is not in dBm (the inputs don't combine into a power); the
    simulator reports it but never applies it.
    """
    if vehicle_density <= 0 or load_vehicle <= 0:
        raise DegenerateInput("vehicle density and load must both be positive")
    return params.mbl / (2.0 * params.cs_max * vehicle_density * load_vehicle) - params.epsilon


def beaconing_load(neighbors_in_cs: int, rate: float, msg_bits: int) -> float:
    return (neighbors_in_cs + 1) * rate * msg_bits


def water_filling_step(state: DfpavState, observed_load: float, params: DfpavParams) -> float:
    if observed_load < params.mbl:
        p = state.current_power + params.step
    else:
        p = state.current_power - params.step
    state.current_power = clamp_power(p, P_REG_MIN, P_REG_MAX)
    return state.current_power


def dfpav_select_power(
    state: DfpavState,
    observed_load: float,
    neighbor_powers: Sequence[float],
    params: DfpavParams,
) -> float:
    p = water_filling_step(state, observed_load, params)
    if neighbor_powers:
        state.neighbor_max_power = max(neighbor_powers)
        if observed_load < params.mbl:
            p = max(p, state.neighbor_max_power + params.step)
    state.current_power = clamp_power(p)
    return state.current_power
