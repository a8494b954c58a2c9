"""Independent reference implementations used only by the tests."""

from beaconsim.core import ring_distance
from beaconsim.phy import is_decodable, received_power_dbm


def brute_force_receptions(events, receivers, phy, gains, road_length=None, lane_width=3.5):
    """Pairwise enumeration of every (frame, receiver) decision.

    No sweep and no vectorization: each pair is checked against every other
    frame for time overlap, and the SINR test is done in dBm per pair.
    """
    found = set()
    for ei, e in enumerate(events):
        others = [
            (gi, g) for gi, g in enumerate(events)
            if gi != ei and not (g.end_us <= e.start_us or g.start_us >= e.end_us)
        ]
        for ri, r in enumerate(receivers):
            if r.id == e.sender_id or any(g.sender_id == r.id for _, g in others):
                continue

            def dbm(k, ev):
                d = ring_distance(ev.beacon.position, r.position, road_length, lane_width)
                return received_power_dbm(ev.tx_power_dbm, d, gains[k][ri], phy)

            signal = dbm(ei, e)
            interferers = [dbm(gi, g) for gi, g in others]
            if is_decodable(signal, interferers, phy):
                found.add((r.id, e.sender_id, e.beacon.seq, e.end_us))
    return found



def random_mac_scenario(rng, horizon_us=2000, max_events=4, max_receivers=4):
    """Up to 4 frames and 4 receivers inside a 2 ms window.

    Some frames come from the receivers themselves so half-duplex losses
    get exercised; fading gains are drawn alongside.
    """
    from beaconsim.core import Beacon, Direction, VehicleState
    from beaconsim.mac import MacConfig, TransmissionEvent, frame_airtime_us
    from beaconsim.phy import nakagami_gain

    airtime = frame_airtime_us(MacConfig())
    n_r = int(rng.integers(1, max_receivers + 1))
    n_e = int(rng.integers(1, max_events + 1))
    receivers = [
        VehicleState(id=i, position=(float(rng.uniform(0, 600)), int(rng.integers(0, 3))), speed=60.0)
        for i in range(n_r)
    ]
    events = []
    for k in range(n_e):
        sender = int(rng.integers(0, n_r + 3))  # ids >= n_r are outside the receiver set
        pos = receivers[sender].position if sender < n_r else (float(rng.uniform(0, 600)), int(rng.integers(0, 3)))
        start = int(rng.integers(0, horizon_us - airtime))
        power = float(rng.uniform(10, 33))
        b = Beacon(k, 100, start, sender, pos, 60.0, Direction.EAST, 25.0, power)
        events.append(TransmissionEvent(sender, start, start + airtime, power, b))
    gains = nakagami_gain(3.0, rng, size=(n_e, n_r))
    return events, receivers, gains
