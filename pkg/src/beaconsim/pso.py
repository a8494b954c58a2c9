"""Single-particle PSO power update run once per epoch by each vehicle.

The update works directly on dBm values: the inertia term multiplies the
current local best power, and the result is added to the previous local
best (pBest) to give the next transmit power.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .constants import P_INIT, P_REG_MAX, P_REG_MIN, clamp_power
from .errors import NoNeighbors


@dataclass(frozen=True)
class PsoParams:
    w_min: float = 0.1
    w_max: float = 0.5
    c1: float = 2.0
    c2: float = 2.0
    rand_min: float = 0.1
    rand_max: float = 1.0

    def __post_init__(self):
        if not 0 < self.w_min <= self.w_max:
            raise ValueError("need 0 < w_min <= w_max")
        if self.c1 <= 0 or self.c2 <= 0:
            raise ValueError("c1 and c2 must be positive")
        if not 0 < self.rand_min <= self.rand_max <= 1:
            raise ValueError("need 0 < rand_min <= rand_max <= 1")


@dataclass
class PsoState:
    pbest: float = P_INIT
    gbest: float = P_INIT
    initialized: bool = False


def extract_gbest(neighbors: Iterable) -> float:
    """Highest personal-best power advertised by the given neighbors."""
    pops = [nb.last_pop_best for nb in neighbors]
    if not pops:
        raise NoNeighbors("no neighbor advertised a personal best")
    return max(pops)


def pso_velocity(
    lbest_p: float,
    pbest_p: float,
    gbest_p: float,
    w: float,
    r1: float,
    r2: float,
    params: PsoParams = PsoParams(),
) -> float:
    return (
        lbest_p * w
        + params.c1 * r1 * (pbest_p - lbest_p)
        + params.c2 * r2 * (gbest_p - lbest_p)
    )


def optimal_power(pbest_p: float, sv: float, lo: float = P_REG_MIN, hi: float = P_REG_MAX) -> float:
    return clamp_power(pbest_p + sv, lo, hi)


def draw_coefficients(rng: np.random.Generator, params: PsoParams = PsoParams()) -> tuple[float, float, float]:
    w, r1, r2 = rng.uniform(
        [params.w_min, params.rand_min, params.rand_min],
        [params.w_max, params.rand_max, params.rand_max],
    )
    return float(w), float(r1), float(r2)


def select_power(
    analysis,
    state: PsoState,
    params: PsoParams = PsoParams(),
    rng: np.random.Generator | None = None,
    coefficients: tuple[float, float, float] | None = None,
) -> float:
    """Choose this epoch's transmit power and roll pBest forward.

    ``state.gbest`` must already hold this epoch's neighbor best. Pass
    ``coefficients=(w, r1, r2)`` to bypass the random draw.
    """
    lbest = analysis.local_best_power
    if not state.initialized:
        state.pbest = clamp_power(lbest)
        state.initialized = True
        return P_INIT
    if coefficients is None:
        if rng is None:
            raise ValueError("select_power needs an rng or explicit coefficients")
        coefficients = draw_coefficients(rng, params)
    w, r1, r2 = coefficients
    sv = pso_velocity(lbest, state.pbest, state.gbest, w, r1, r2, params)
    power = optimal_power(state.pbest, sv)
    state.pbest = clamp_power(lbest)
    return power
