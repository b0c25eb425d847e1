"""Block-fading channel, DMRS-based MMSE channel estimation, scalar MMSE
equalization, and the effective-SNR -> BLER table that links the
link-level and system-level tiers.

The mobile channel is abstracted as independent Rayleigh gains per
coherence tile (default 25 RBs wide, one slot long), unit mean power.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

BLER_SCHEMA = "bler-table-v1"


class ChannelConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CoherenceConfig:
    """Tile structure of the block-fading abstraction."""

    n_rbs: int = 100
    coherence_bandwidth_rbs: float = 25.0
    coherence_time_slots: int = 1
    normalize_power: bool = False

    @property
    def n_tiles(self) -> int:
        if math.isinf(self.coherence_bandwidth_rbs):
            return 1
        return max(1, math.ceil(self.n_rbs / self.coherence_bandwidth_rbs))

    def tile_of_rb(self, rb: int) -> int:
        if math.isinf(self.coherence_bandwidth_rbs):
            return 0
        return min(self.n_tiles - 1, int(rb // self.coherence_bandwidth_rbs))


@dataclass
class ChannelRealization:
    """Per-tile complex gains plus the noise variance for one packet."""

    tile_gains: np.ndarray
    noise_variance: float
    seed: int

    def gain_for_rb(self, rb: int, config: CoherenceConfig) -> complex:
        return self.tile_gains[config.tile_of_rb(rb)]


def realize_channel(
    seed: int, geometry_snr_db: float, coherence: CoherenceConfig
) -> ChannelRealization:
    """Draw one block-fading realization, deterministic in the seed.

    Gains are unit-mean-power Rayleigh (complex normal); with
    `normalize_power` the realization is rescaled to exactly unit average
    power across tiles (short-term power constraint).
    """
    rng = np.random.default_rng(seed)
    t = coherence.n_tiles
    gains = (rng.standard_normal(t) + 1j * rng.standard_normal(t)) / math.sqrt(2.0)
    if coherence.normalize_power:
        power = float(np.mean(np.abs(gains) ** 2))
        if power > 0:
            gains /= math.sqrt(power)
    noise_variance = 10.0 ** (-geometry_snr_db / 10.0)
    return ChannelRealization(tile_gains=gains, noise_variance=noise_variance, seed=seed)


def pilots_per_tile(dmrs_density: int, rbs_per_tile: float) -> int:
    """Pilot observations available for one tile's estimate.

    DMRS density is 12 or 24 resource elements per RB; one grid cell is
    12 REs, so the density buys 1 or 2 pilot cells per RB.
    """
    if dmrs_density not in (12, 24):
        raise ChannelConfigError(f"dmrs_density must be 12 or 24, got {dmrs_density}")
    return max(1, int(round(dmrs_density / 12.0 * rbs_per_tile)))


def estimate_channel(
    observed_dmrs: np.ndarray, noise_variance: float
) -> tuple[np.ndarray, float]:
    """Linear MMSE estimate of unit-power gains from noisy unit pilots.

    `observed_dmrs` has shape (..., n_pilots): y_i = h + n_i per tile.
    Returns the per-tile estimates and the (common) estimation error
    variance 1 / (1 + n_pilots / noise_variance).
    """
    observed_dmrs = np.asarray(observed_dmrs, dtype=np.complex128)
    if observed_dmrs.shape[-1] < 1:
        raise ChannelConfigError("at least one pilot observation required")
    n_p = observed_dmrs.shape[-1]
    estimate = observed_dmrs.sum(axis=-1) / (n_p + noise_variance)
    err_var = noise_variance / (n_p + noise_variance)
    return estimate, float(err_var)


def observe_dmrs(
    channel: ChannelRealization, n_pilots: int, rng: np.random.Generator
) -> np.ndarray:
    """Noisy unit-pilot observations, shape (n_tiles, n_pilots)."""
    t = channel.tile_gains.size
    sigma = math.sqrt(channel.noise_variance / 2.0)
    noise = rng.standard_normal((t, n_pilots)) + 1j * rng.standard_normal((t, n_pilots))
    return channel.tile_gains[:, None] + sigma * noise


def mmse_equalize(
    received_symbols: np.ndarray,
    channel_estimate: np.ndarray,
    noise_variance: float,
    estimation_error_variance: float = 0.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-symbol scalar MMSE equalization.

    Returns soft symbol estimates and the post-equalization SNR (linear)
    per symbol.  With a perfect estimate and zero noise the output equals
    the transmitted symbols; estimation error strictly lowers the
    reported post-SNR below the genie-aided value.
    """
    y = np.asarray(received_symbols, dtype=np.complex128)
    h = np.broadcast_to(np.asarray(channel_estimate, dtype=np.complex128), y.shape)
    gain2 = np.abs(h) ** 2
    eff_noise = noise_variance + estimation_error_variance
    weight = np.conj(h) / (gain2 + eff_noise)
    soft = weight * y
    post_snr = gain2 / eff_noise if eff_noise > 0 else np.full_like(gain2, math.inf)
    return soft, post_snr


class BlerTable:
    """Monotone per-(mcs, codeblock length) mapping from effective SNR to
    block error probability, linearly interpolated in log-BLER."""

    def __init__(self):
        # (mcs, cb_len) -> (snr_db ascending, bler)
        self._curves: dict[tuple[str, int], tuple[np.ndarray, np.ndarray]] = {}
        self._logb: dict[tuple[str, int], np.ndarray] = {}
        self._lens: dict[str, list[int]] = {}
        self._nearest: dict[tuple[str, int], int] = {}

    def add_curve(self, mcs: str, cb_len: int, snr_db, bler) -> None:
        snr_db = np.asarray(snr_db, dtype=np.float64)
        bler = np.asarray(bler, dtype=np.float64)
        if snr_db.ndim != 1 or snr_db.size != bler.size or snr_db.size < 2:
            raise ChannelConfigError("curve needs matching 1-D arrays of >= 2 points")
        if np.any(np.diff(snr_db) <= 0):
            raise ChannelConfigError("snr grid must be strictly increasing")
        bler = np.clip(monotonize_nonincreasing(bler), 0.0, 1.0)
        key = (mcs, int(cb_len))
        self._curves[key] = (snr_db, bler)
        self._logb[key] = np.log10(np.maximum(bler, 1e-12))
        self._lens.setdefault(mcs, [])
        if int(cb_len) not in self._lens[mcs]:
            self._lens[mcs].append(int(cb_len))
            self._lens[mcs].sort()
        self._nearest.clear()

    @property
    def entries(self) -> list[tuple[str, int]]:
        return sorted(self._curves)

    def cb_lens(self, mcs: str) -> list[int]:
        return list(self._lens.get(mcs, []))

    def _nearest_cb(self, mcs: str, cb_len: int) -> int:
        got = self._nearest.get((mcs, cb_len))
        if got is not None:
            return got
        lens = self._lens.get(mcs)
        if not lens:
            raise ChannelConfigError(f"no BLER curves for mcs {mcs!r}")
        best = min(lens, key=lambda c: (abs(c - cb_len), c))
        self._nearest[(mcs, cb_len)] = best
        return best

    def bler(self, effective_snr_db: float, mcs: str, cb_len: int) -> float:
        """Interpolated block error probability, clamped to [0, 1].

        Beyond the calibrated grid the last log-linear slope is extended,
        so the probability tends to 0 as SNR grows and to 1 as it falls.
        """
        key = (mcs, self._nearest_cb(mcs, cb_len))
        snr, bler = self._curves[key]
        logb = self._logb[key]
        if effective_snr_db <= snr[0]:
            slope = min((logb[1] - logb[0]) / (snr[1] - snr[0]), 0.0)
            value = logb[0] if slope == 0.0 else logb[0] + slope * (effective_snr_db - snr[0])
        elif effective_snr_db >= snr[-1]:
            slope = (logb[-1] - logb[-2]) / (snr[-1] - snr[-2])
            value = logb[-1] + min(slope, -1e-3) * (effective_snr_db - snr[-1])
        else:
            value = float(np.interp(effective_snr_db, snr, logb))
        if value == -math.inf:
            return 0.0
        return float(min(1.0, 10.0**value))

    def bler_many(self, effective_snr_db, mcs: str, cb_len: int) -> np.ndarray:
        """Vectorized :meth:`bler` over an array of effective SNRs."""
        snr_in = np.asarray(effective_snr_db, dtype=np.float64)
        key = (mcs, self._nearest_cb(mcs, cb_len))
        snr, _bler = self._curves[key]
        logb = self._logb[key]
        value = np.interp(snr_in, snr, logb)
        lo = snr_in <= snr[0]
        if np.any(lo):
            slope = min((logb[1] - logb[0]) / (snr[1] - snr[0]), 0.0)
            value = np.where(lo, logb[0] + slope * (snr_in - snr[0]), value)
        hi = snr_in >= snr[-1]
        if np.any(hi):
            slope = min((logb[-1] - logb[-2]) / (snr[-1] - snr[-2]), -1e-3)
            value = np.where(hi, logb[-1] + slope * (snr_in - snr[-1]), value)
        return np.minimum(1.0, 10.0 ** value)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# schema: {BLER_SCHEMA}\n")
        buf.write("mcs,cb_len,snr_db,bler\n")
        for (mcs, cb_len) in self.entries:
            snr, bler = self._curves[(mcs, cb_len)]
            for s, b in zip(snr, bler):
                buf.write(f"{mcs},{cb_len},{float(s)!r},{float(b)!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "BlerTable":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith(f"# schema: {BLER_SCHEMA}"):
            raise ChannelConfigError(f"missing or wrong schema header; expected {BLER_SCHEMA}")
        if lines[1] != "mcs,cb_len,snr_db,bler":
            raise ChannelConfigError("unexpected BLER csv columns")
        rows: dict[tuple[str, int], list[tuple[float, float]]] = {}
        for ln in lines[2:]:
            mcs, cb_len, snr_db, bler = ln.split(",")
            rows.setdefault((mcs, int(cb_len)), []).append((float(snr_db), float(bler)))
        table = cls()
        for (mcs, cb_len), pts in rows.items():
            pts.sort()
            table.add_curve(mcs, cb_len, [p[0] for p in pts], [p[1] for p in pts])
        return table


def monotonize_nonincreasing(values: np.ndarray) -> np.ndarray:
    """Isotonic regression (pool adjacent violators) onto non-increasing
    sequences, equal weights."""
    vals = list(np.asarray(values, dtype=np.float64))
    blocks: list[list[float]] = []  # [mean, count]
    for v in vals:
        blocks.append([v, 1])
        while len(blocks) > 1 and blocks[-2][0] < blocks[-1][0]:
            m2, c2 = blocks.pop()
            m1, c1 = blocks.pop()
            blocks.append([(m1 * c1 + m2 * c2) / (c1 + c2), c1 + c2])
    out = []
    for mean, count in blocks:
        out.extend([mean] * count)
    return np.array(out)
