"""Shared numeric conventions.

Times are integer microseconds, powers are dBm, distances are meters and
speeds are km/h unless a name says otherwise.
"""

P_REG_MIN = 10.0
P_REG_MAX = 33.0
P_INIT = 25.0

BEACON_RATE = 10  # beacons per second per vehicle
BEACON_INTERVAL_MS = 100
BEACON_BYTES = 512

US_PER_S = 1_000_000
STALE_TIMEOUT_US = 2 * US_PER_S

D_FLOOR = 1.0
LANE_WIDTH_M = 3.5


def clamp_power(p: float, lo: float = P_REG_MIN, hi: float = P_REG_MAX) -> float:
    return min(max(p, lo), hi)
