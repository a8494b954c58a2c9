# %% [markdown]
# # Three arms on the default highway
#
# 200 vehicles, 2 km ring road, 3 lanes, 10 s. PBPC adjusts power with the
# swarm update, DFPAV ramps power fairly under a load cap, and "none" holds
# every vehicle at 33 dBm.

# %%
import math

from beaconsim.sim import SimConfig, run_many

protocols = ("pbpc", "dfpav", "none")
results = dict(zip(protocols, run_many([SimConfig(protocol=p, seed=1) for p in protocols])))

# %%
print("epoch " + "".join(f"{p:>22}" for p in protocols))
for i in range(len(results["pbpc"])):
    cells = []
    for p in protocols:
        r = results[p][i]
        cells.append(f"{r.mean_tx_power_dbm:6.1f}dBm {r.mean_collision_probability:5.2f} {r.mean_beacon_delay_us:6.0f}us")
    print(f"{i + 1:5d} " + "".join(f"{c:>22}" for c in cells))

# %% [markdown]
# Run-level means. The delay ratio PBPC/DFPAV is the headline number.

# %%
def mean(xs):
    xs = [x for x in xs if not math.isnan(x)]
    return sum(xs) / len(xs)

delay = {p: mean([r.mean_beacon_delay_us for r in rows]) for p, rows in results.items()}
cp = {p: mean([r.mean_collision_probability for r in rows]) for p, rows in results.items()}
for p in protocols:
    print(f"{p:6s} delay {delay[p]:7.1f} us   cp {cp[p]:.3f}")
print(f"delay ratio pbpc/dfpav = {delay['pbpc'] / delay['dfpav']:.3f}")
