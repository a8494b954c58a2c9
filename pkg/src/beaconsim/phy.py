"""Link budget, Nakagami-m fading and SINR-threshold reception."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats


@dataclass(frozen=True)
class PhyConfig:
    nakagami_m: float = 3.0
    path_loss_exp: float = 2.8
    ref_loss_db: float = 47.0
    noise_floor_dbm: float = -99.0
    snr_threshold_db: float = 10.0
    capture_margin_db: float = 0.0

    def __post_init__(self):
        if self.nakagami_m < 0.5:
            raise ValueError("nakagami_m must be >= 0.5")
        if not 10.0 <= self.snr_threshold_db <= 40.0:
            raise ValueError("snr_threshold_db must lie in [10, 40]")
        if self.path_loss_exp <= 0:
            raise ValueError("path_loss_exp must be positive")

    @property
    def decode_threshold_db(self) -> float:
        return self.snr_threshold_db + self.capture_margin_db

    @property
    def noise_mw(self) -> float:
        return dbm_to_mw(self.noise_floor_dbm)


def dbm_to_mw(p):
    return np.power(10.0, np.divide(p, 10.0))


def mw_to_dbm(p):
    return 10.0 * np.log10(p)


def path_loss_db(d, cfg: PhyConfig = PhyConfig()):
    d = np.maximum(d, 1.0)
    return cfg.ref_loss_db + 10.0 * cfg.path_loss_exp * np.log10(d)


def nakagami_gain(m: float, rng: np.random.Generator, size=None):
    """Unit-mean power gain of a Nakagami-m channel, i.e. Gamma(m, 1/m)."""
    return rng.gamma(m, 1.0 / m, size=size)


def received_power_dbm(tx_dbm, d, gain=1.0, cfg: PhyConfig = PhyConfig()):
    return tx_dbm - path_loss_db(d, cfg) + 10.0 * np.log10(gain)


def sinr_db(signal_dbm: float, interferers_dbm: Sequence[float], cfg: PhyConfig = PhyConfig()) -> float:
    total = cfg.noise_mw + sum(10.0 ** (i / 10.0) for i in interferers_dbm)
    return signal_dbm - 10.0 * np.log10(total)


def is_decodable(signal_dbm: float, interferers_dbm: Sequence[float], cfg: PhyConfig = PhyConfig()) -> bool:
    return bool(sinr_db(signal_dbm, interferers_dbm, cfg) >= cfg.decode_threshold_db)


def reception_probability(tx_dbm: float, d, cfg: PhyConfig = PhyConfig()):
    """Probability a lone frame is decodable at distance ``d`` (no interference)."""
    mean_rx = received_power_dbm(tx_dbm, d, 1.0, cfg)
    needed_gain_db = cfg.noise_floor_dbm + cfg.decode_threshold_db - mean_rx
    return stats.gamma.sf(10.0 ** (needed_gain_db / 10.0), cfg.nakagami_m, scale=1.0 / cfg.nakagami_m)


def range_for(tx_dbm: float, rx_dbm: float, cfg: PhyConfig = PhyConfig()) -> float:
    """Distance at which the mean received power drops to ``rx_dbm``."""
    return 10.0 ** ((tx_dbm - cfg.ref_loss_db - rx_dbm) / (10.0 * cfg.path_loss_exp))
