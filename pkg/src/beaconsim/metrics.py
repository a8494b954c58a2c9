"""Per-epoch metrics rows, CSV output and run comparison."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from typing import Sequence

CSV_HEADER = ("epoch", "protocol", "mean_tx_power_dbm", "mean_cp", "mean_delay_us", "sent", "received")
METRIC_COLUMNS = ("mean_tx_power_dbm", "mean_cp", "mean_delay_us", "sent", "received")


@dataclass(frozen=True)
class MetricsRow:
    epoch_index: int
    protocol: str
    mean_tx_power_dbm: float
    mean_collision_probability: float
    mean_beacon_delay_us: float
    beacons_sent: int
    beacons_received: int


def measure_delay(generation_time: int, first_rx_time: int) -> int:
    if first_rx_time < generation_time:
        raise ValueError("reception precedes generation")
    return first_rx_time - generation_time


def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else f"{x:.4f}"


def format_metrics_csv(rows: Sequence[MetricsRow]) -> str:
    lines = [",".join(CSV_HEADER)]
    for r in rows:
        lines.append(",".join((
            str(r.epoch_index), r.protocol, _fmt(r.mean_tx_power_dbm),
            _fmt(r.mean_collision_probability), _fmt(r.mean_beacon_delay_us),
            str(r.beacons_sent), str(r.beacons_received),
        )))
    return "\n".join(lines) + "\n"


def write_metrics_csv(rows: Sequence[MetricsRow], path: str | os.PathLike) -> None:
    if not rows:
        raise ValueError("no metrics rows to write")
    with open(path, "w", newline="") as fh:
        fh.write(format_metrics_csv(rows))


def read_metrics_csv(path: str | os.PathLike) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return [
            {"epoch": int(r["epoch"]), "protocol": r["protocol"],
             **{k: float(r[k]) for k in METRIC_COLUMNS}}
            for r in reader
        ]


def _nanmean(values):
    vals = [v for v in values if not math.isnan(v)]
    return sum(vals) / len(vals) if vals else math.nan


def compare_runs(csv_a, csv_b) -> dict:
    """Mean over epochs of every metric in both runs, plus b/a ratios."""
    a, b = read_metrics_csv(csv_a), read_metrics_csv(csv_b)
    if [r["epoch"] for r in a] != [r["epoch"] for r in b]:
        raise ValueError("runs cover different epochs")
    summary = {}
    for col in METRIC_COLUMNS:
        ma = _nanmean([r[col] for r in a])
        mb = _nanmean([r[col] for r in b])
        if ma == mb:
            ratio = 1.0
        elif ma == 0.0 or math.isnan(ma):
            ratio = math.nan
        else:
            ratio = mb / ma
        summary[col] = {"a": ma, "b": mb, "ratio": ratio}
    return summary


def format_comparison(summary: dict, label_a: str = "a", label_b: str = "b") -> str:
    lines = [f"{'metric':<20}{label_a:>14}{label_b:>14}{'b/a':>10}"]
    for col, s in summary.items():
        lines.append(f"{col:<20}{s['a']:>14.4f}{s['b']:>14.4f}{s['ratio']:>10.4f}")
    return "\n".join(lines)
