# %% [markdown]
# # Broadcast collisions
#
# Two vehicles pick the same backoff slot and transmit at once. The car in
# the middle hears both at equal strength and decodes neither; each sender is
# busy transmitting and is deaf to the other (half duplex).

# %%
import numpy as np

from beaconsim.core import Beacon, Direction, VehicleState
from beaconsim.mac import TransmissionEvent, frame_airtime_us, resolve_receptions
from beaconsim.phy import PhyConfig

air = frame_airtime_us()
cars = [VehicleState(id=i, position=(100.0 * i, 0), speed=50.0) for i in range(3)]


def frame(sender, start):
    b = Beacon(0, 100, start, sender, cars[sender].position, 50.0, Direction.EAST, 25.0, 25.0)
    return TransmissionEvent(sender, start, start + air, 25.0, b)


phy = PhyConfig()
print("overlap:", resolve_receptions([frame(0, 64), frame(2, 64)], cars, phy, gains=np.ones((2, 3))))

# %% [markdown]
# Stagger the second frame past the end of the first and both get through.

# %%
for r in resolve_receptions([frame(0, 64), frame(2, 64 + air + 16)], cars, phy, gains=np.ones((2, 3))):
    print(f"car {r.receiver_id} got car {r.sender_id}'s beacon at {r.rx_time} us")
