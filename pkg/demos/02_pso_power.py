# %% [markdown]
# # One particle, one update per second
#
# Each vehicle is a single particle. Its personal best is last epoch's local
# best power; the global best is the highest personal best advertised by a
# neighbor. The update moves power by a velocity built from both.

# %%
import numpy as np

from beaconsim.constants import P_REG_MAX, P_REG_MIN
from beaconsim.pso import optimal_power, pso_velocity

sv = pso_velocity(27.6, 26.0, 29.0, w=0.1, r1=0.7, r2=0.6)
print(f"velocity {sv:.2f} dB -> power {optimal_power(26.0, sv):.2f} dBm")

# %% [markdown]
# Sweeping the global best with the other inputs fixed: power rises with it
# until it hits the regulatory ceiling.

# %%
for gb in np.linspace(P_REG_MIN, P_REG_MAX, 8):
    print(f"gBest {gb:5.1f}  ->  {optimal_power(26.0, pso_velocity(27.6, 26.0, gb, 0.1, 0.7, 0.6)):6.2f}")

# %% [markdown]
# The inertia term multiplies the *power itself* (not a previous velocity),
# so even at consensus the update adds w*L, 1 to 16 dB. Iterating the update
# with pBest fed back from the last local best (here taken to be the power
# just used, a toy stand-in for the channel analysis) shows how far it swings.

# %%
rng = np.random.default_rng(0)
lbest, pbest = 25.0, 25.0
for epoch in range(8):
    w, r1, r2 = rng.uniform([0.1, 0.1, 0.1], [0.5, 1.0, 1.0])
    p = optimal_power(pbest, pso_velocity(lbest, pbest, pbest, w, r1, r2))
    print(f"epoch {epoch}: w={w:.2f}  power {p:.2f}")
    pbest, lbest = lbest, p
