import pytest

from beaconsim.core import Beacon, Direction, VehicleState, record_beacon

# Five neighbors of vehicle X: sequence numbers heard in one second,
# distance to X (m), advertised personal best and used power (dBm).
WORKED_NEIGHBORS = {
    1: ("A", [15, 16, 17, 18, 20, 21, 23, 24], 13.0, 28.0, 25.0),
    2: ("B", [71, 72, 75, 78, 79, 80], 18.0, 29.0, 28.0),
    3: ("C", [89, 90, 96, 97], 23.0, 28.0, 29.0),
    4: ("D", [22, 23, 24, 25, 26, 27, 29, 30], 18.0, 27.0, 28.0),
    5: ("E", [61, 62, 63, 67, 69, 70], 15.0, 26.0, 28.0),
}


def beacon_from(sender_id, seq, x, pop_best=25.0, pow_u=25.0, lane=0, ts=0, speed=60.0):
    return Beacon(
        seq=seq, interval_ms=100, timestamp=ts, sender_id=sender_id, position=(x, lane),
        speed=speed, direction=Direction.EAST, pop_best=pop_best, pow_u=pow_u,
    )


@pytest.fixture
def vehicle_x():
    """Vehicle X at the origin holding the one-second window of the worked example."""
    x = VehicleState(id=0, position=(0.0, 0), speed=60.0)
    for sid, (_, seqs, d, pop_best, pow_u) in WORKED_NEIGHBORS.items():
        for s in seqs:
            record_beacon(x, beacon_from(sid, s, d, pop_best, pow_u), rx_time=1000 * s)
    return x


_RESULTS = []


def record_criterion(number: int, name: str, passed: bool, detail: str = "") -> None:
    _RESULTS.append((number, name, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(_RESULTS):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number}: {name}  {detail}")
