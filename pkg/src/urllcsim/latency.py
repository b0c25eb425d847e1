"""Five-component physical-layer latency budget and per-packet accounting.

A packet's air-interface latency decomposes into time-to-transmit,
propagation, processing, retransmission, and signaling time.  The
simulator accumulates realized per-packet latencies (and failures) in a
:class:`LatencyRecorder`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class LatencyError(ValueError):
    pass


@dataclass(frozen=True)
class LatencyBudget:
    """Latency components in microseconds; total is their exact sum."""

    t_ttt: float = 0.0
    t_prop: float = 0.0
    t_proc: float = 0.0
    t_retx: float = 0.0
    t_sig: float = 0.0

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not math.isfinite(value) or value < 0:
                raise LatencyError(f"{name} must be finite and >= 0, got {value}")

    @property
    def total(self) -> float:
        return self.t_ttt + self.t_prop + self.t_proc + self.t_retx + self.t_sig


def total_latency(budget: LatencyBudget) -> float:
    return budget.total


def retransmission_time(n_retx: int, t_ttt_us: float, turnaround_us: float) -> float:
    """Latency added by `n_retx` retransmissions with a fixed turnaround."""
    if n_retx < 0:
        raise LatencyError("n_retx must be >= 0")
    return n_retx * (t_ttt_us + turnaround_us)


def record_packet_latency(arrival_time_us: float, success_time_us: float) -> float:
    """Delivery latency of one packet: success minus arrival time."""
    if success_time_us < arrival_time_us:
        raise LatencyError("success_time must be >= arrival_time")
    return success_time_us - arrival_time_us


class LatencyRecorder:
    """Per-service latency statistics.

    Successfully delivered packets contribute to the latency mean and
    percentiles; packets dropped after exhausting their retransmission
    budget count only toward the error rate.
    """

    def __init__(self):
        self.samples_us: list[float] = []
        self.failures: int = 0

    def record_success(self, arrival_time_us: float, success_time_us: float) -> float:
        latency = record_packet_latency(arrival_time_us, success_time_us)
        self.samples_us.append(latency)
        return latency

    def record_failure(self) -> None:
        self.failures += 1

    @property
    def n_delivered(self) -> int:
        return len(self.samples_us)

    @property
    def n_packets(self) -> int:
        return self.n_delivered + self.failures

    @property
    def error_rate(self) -> float:
        return self.failures / self.n_packets if self.n_packets else 0.0

    def mean_us(self) -> float:
        return sum(self.samples_us) / len(self.samples_us) if self.samples_us else math.nan

    def percentile_us(self, q: float) -> float:
        """Empirical percentile; NaN when the sample count cannot resolve it.

        Resolving the (100 - q) tail needs at least 100 / (100 - q) samples.
        """
        if not 0 <= q <= 100:
            raise LatencyError("percentile must be in [0, 100]")
        n = len(self.samples_us)
        if n == 0 or (q > 50 and n < 100.0 / (100.0 - q)):
            return math.nan
        ordered = sorted(self.samples_us)
        idx = min(n - 1, max(0, math.ceil(q / 100.0 * n) - 1))
        return ordered[idx]

    def summary(self) -> dict[str, float]:
        return {
            "mean_us": self.mean_us(),
            "p50_us": self.percentile_us(50),
            "p99_us": self.percentile_us(99),
            "p99p999_us": self.percentile_us(99.999),
            "error_rate": self.error_rate,
            "delivered": float(self.n_delivered),
            "failed": float(self.failures),
        }
