# %% [markdown]
# # Reading the channel from one second of beacons
#
# Vehicle X hears five neighbors. Each neighbor should send 10 beacons a
# second; gaps in the sequence numbers are beacons lost to collisions or fading.
# From those counts, the neighbor distances and the advertised powers we get
# a collision estimate and a "local best" transmit power.

# %%
from beaconsim.channel_analysis import analyze, build_distance_table
from beaconsim.core import Beacon, Direction, VehicleState, record_beacon

heard = {
    1: ([15, 16, 17, 18, 20, 21, 23, 24], 13.0, 28.0, 25.0),
    2: ([71, 72, 75, 78, 79, 80], 18.0, 29.0, 28.0),
    3: ([89, 90, 96, 97], 23.0, 28.0, 29.0),
    4: ([22, 23, 24, 25, 26, 27, 29, 30], 18.0, 27.0, 28.0),
    5: ([61, 62, 63, 67, 69, 70], 15.0, 26.0, 28.0),
}

x = VehicleState(id=0, position=(0.0, 0), speed=60.0)
for sid, (seqs, d, pop_best, pow_u) in heard.items():
    for s in seqs:
        b = Beacon(s, 100, 0, sid, (d, 0), 60.0, Direction.EAST, pop_best, pow_u)
        record_beacon(x, b, rx_time=1000 * s)

# %% [markdown]
# Per-neighbor reception percentage and fail rate (percent lost per meter):

# %%
for row in build_distance_table(x):
    print(f"id={row.id}  p={row.reception_percent:5.1f}%  d={row.distance:4.1f} m  f={row.fail_rate:.3f}")

# %%
a = analyze(x)
print(f"collision probability  {a.cp:.2f}")
print(f"overall fault F        {a.overall_fault:.4f}")
print(f"success S              {a.success:.4f}")
print(f"power range            {a.min_p} .. {a.max_p} dBm")
print(f"local best power       {a.local_best_power:.2f} dBm")
