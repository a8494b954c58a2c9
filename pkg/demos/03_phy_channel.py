# %% [markdown]
# # Fading and reception range
#
# Log-distance path loss plus Nakagami-m power fading. With m = 3 the fading
# gain has mean 1 and variance 1/3.

# %%
import numpy as np

from beaconsim.phy import PhyConfig, nakagami_gain, range_for, reception_probability

cfg = PhyConfig()
g = nakagami_gain(cfg.nakagami_m, np.random.default_rng(1), size=1_000_000)
print(f"mean {g.mean():.4f}  var {g.var():.4f}")

# %% [markdown]
# Mean decode range at the two ends of the power band, then the
# reception probability of a lone frame at a few distances.

# %%
decode_at = cfg.noise_floor_dbm + cfg.snr_threshold_db
for p in (10.0, 25.0, 33.0):
    print(f"{p:4.0f} dBm reaches {range_for(p, decode_at, cfg):6.1f} m on average")

# %%
for d in (50, 100, 200, 300, 400, 500):
    print(f"d={d:3d} m  P(rx | 25 dBm) = {reception_probability(25.0, d, cfg):.3f}")
