"""Performance metrics derived from round traces, aggregated across seeds.

Stability period runs until the first node death, network lifetime until
the last; the instability period is the gap between them. Runs that hit
the round cap with survivors are censored: their lifetime reads as the cap
and comparisons should usually exclude them.
"""

from __future__ import annotations

import csv
import statistics
from dataclasses import dataclass
from typing import Iterable, TextIO

from .engine import RoundMetrics, SimulationResult


def stability_period(trace: list[RoundMetrics]) -> int:
    """Rounds before the first death: index of the first round with dead > 0."""
    if not trace:
        raise ValueError("empty trace")
    for m in trace:
        if m.dead > 0:
            return m.round
    return len(trace)


def network_lifetime(trace: list[RoundMetrics], n_nodes: int) -> int:
    """Round index at which the last node died; trace length if censored."""
    if not trace:
        raise ValueError("empty trace")
    for m in trace:
        if m.dead == n_nodes:
            return m.round
    return len(trace)


def instability_period(trace: list[RoundMetrics], n_nodes: int) -> int:
    """Rounds between the first and the last death."""
    return network_lifetime(trace, n_nodes) - stability_period(trace)


@dataclass(frozen=True)
class MeanStd:
    mean: float
    std: float


@dataclass(frozen=True)
class SummaryStats:
    """Seed-aggregated metrics for one protocol (sample stddev; 0 for one run)."""

    protocol: str
    n_runs: int
    n_censored: int
    stability_period: MeanStd
    instability_period: MeanStd
    network_lifetime: MeanStd
    total_packets_to_bs: MeanStd
    mean_ch_count: MeanStd
    ch_count_stddev: MeanStd


def _mean_std(values: list[float]) -> MeanStd:
    if len(values) == 1:
        return MeanStd(mean=float(values[0]), std=0.0)
    return MeanStd(mean=statistics.fmean(values), std=statistics.stdev(values))


def run_metrics(result: SimulationResult) -> dict[str, float]:
    """Scalar metrics of one run, as consumed by `aggregate`."""
    trace = result.trace
    ch_counts = [m.ch_count for m in trace]
    return {
        "stability_period": stability_period(trace),
        "instability_period": instability_period(trace, result.n_nodes),
        "network_lifetime": network_lifetime(trace, result.n_nodes),
        "total_packets_to_bs": result.total_packets_to_bs,
        "mean_ch_count": statistics.fmean(ch_counts) if ch_counts else 0.0,
        "ch_count_stddev": statistics.stdev(ch_counts) if len(ch_counts) > 1 else 0.0,
    }


_METRIC_FIELDS = ("stability_period", "instability_period", "network_lifetime",
                  "total_packets_to_bs", "mean_ch_count", "ch_count_stddev")


def aggregate(results: Iterable[SimulationResult]) -> list[SummaryStats]:
    """Per-protocol mean and sample stddev of each run metric across seeds."""
    groups: dict[str, list[SimulationResult]] = {}
    for result in results:
        groups.setdefault(result.protocol, []).append(result)
    if not groups:
        raise ValueError("no results to aggregate")
    out = []
    for protocol, group in groups.items():
        if not group:
            raise ValueError(f"empty result group for {protocol!r}")
        per_run = [run_metrics(r) for r in group]
        stats = {name: _mean_std([row[name] for row in per_run])
                 for name in _METRIC_FIELDS}
        out.append(SummaryStats(
            protocol=protocol,
            n_runs=len(group),
            n_censored=sum(1 for r in group if r.censored),
            stability_period=stats["stability_period"],
            instability_period=stats["instability_period"],
            network_lifetime=stats["network_lifetime"],
            total_packets_to_bs=stats["total_packets_to_bs"],
            mean_ch_count=stats["mean_ch_count"],
            ch_count_stddev=stats["ch_count_stddev"],
        ))
    return out


def write_summary_stats_csv(stats: list[SummaryStats], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    header = ["protocol", "n_runs", "n_censored"]
    for name in _METRIC_FIELDS:
        header += [f"{name}_mean", f"{name}_std"]
    writer.writerow(header)
    for s in stats:
        row = [s.protocol, s.n_runs, s.n_censored]
        for name in _METRIC_FIELDS:
            ms: MeanStd = getattr(s, name)
            row += [repr(ms.mean), repr(ms.std)]
        writer.writerow(row)
