"""Monte Carlo link-level harness.

Produces PER-vs-SNR curves for the three control-channel codecs over the
block-fading abstraction, and calibrates the AWGN effective-SNR -> BLER
tables the system simulator consumes.

Determinism: every (snr point, trial block) derives its own random
stream from the campaign seed, all randomness is drawn up front as
arrays, and blocks are consumed in index order, so results are
byte-identical regardless of worker count or numba availability.

Trial blocks run as numba kernels (pure-numpy fallback via
``URLLCSIM_NO_NUMBA=1``); per-trial work stays inside the kernel.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from ._jit import njit
from .channel import BlerTable, monotonize_nonincreasing
from .codecs.convolutional import _NEXT_STATE, _OUTPUTS, _PUNCTURE_PATTERNS, _tbcc_encode_kernel, _wava_decode_kernel
from .codecs.crc import crc16_remainder
from .codecs.polar import PolarCodec, _scl_kernel, polar_transform
from .codecs.svc import SvcParams, omp_support

LINK_SCHEMA = "link-sim-v1"

_SQRT2 = math.sqrt(2.0)

CODECS = ("svc", "cc", "polar")


class CampaignError(ValueError):
    pass


@dataclass(frozen=True)
class LinkCampaign:
    """One PER-vs-SNR campaign for a single codec."""

    codec: str = "svc"
    snr_grid_db: tuple[float, ...] = tuple(float(s) for s in range(4, 17))
    max_trials: int = 200_000
    target_errors: int = 200
    seed: int = 1
    block_size: int = 2_000
    # block-fading channel
    n_rbs: int = 100
    coherence_bandwidth_rbs: float = 25.0
    normalize_channel_power: bool = False
    dmrs_density: int = 12
    estimator: str = "mmse"  # or "genie"
    awgn: bool = False  # AWGN conditional mode (calibration)
    # codec parameters
    svc: SvcParams = field(default_factory=SvcParams)
    cc_rate_matched_bits: int = 144  # LTE PDCCH fills one CCE (72 REs)
    cc_crs_pilots: int = 25  # cell reference signals, per coherence tile
    polar_list_size: int = 8
    polar_design_snr_db: float = -5.0

    def __post_init__(self):
        if self.codec not in CODECS:
            raise CampaignError(f"unknown codec {self.codec!r}; options {CODECS}")
        grid = np.asarray(self.snr_grid_db, dtype=np.float64)
        if grid.size < 1 or np.any(np.diff(grid) <= 0):
            raise CampaignError("snr grid must be non-empty and strictly increasing")
        if self.max_trials < self.target_errors:
            raise CampaignError("max_trials must be >= target_errors")
        if self.block_size < 1:
            raise CampaignError("block_size must be positive")
        if self.estimator not in ("mmse", "genie"):
            raise CampaignError("estimator must be 'mmse' or 'genie'")

    @property
    def n_tiles(self) -> int:
        if self.awgn:
            return 1
        return max(1, math.ceil(self.n_rbs / self.coherence_bandwidth_rbs))

    @property
    def packet_pilots_per_tile(self) -> int:
        """In-packet DMRS budget of a one-symbol short packet.

        Density 12/24 REs per RB per slot prorated to the packet's single
        symbol over one coherence tile.
        """
        if self.dmrs_density not in (12, 24):
            raise CampaignError("dmrs_density must be 12 or 24")
        rbs_per_tile = self.n_rbs / self.n_tiles
        return max(1, round(self.dmrs_density / 12.0 * rbs_per_tile / 14.0))


@dataclass
class PerPoint:
    snr_db: float
    trials: int
    errors: int

    @property
    def per(self) -> float:
        return self.errors / self.trials if self.trials else math.nan

    @property
    def ci_halfwidth(self) -> float:
        if not self.trials:
            return math.nan
        p = self.per
        return 1.96 * math.sqrt(max(p * (1.0 - p), 0.0) / self.trials)


@dataclass
class PerCurve:
    codec: str
    points: list[PerPoint]

    @property
    def snr_db(self) -> np.ndarray:
        return np.array([p.snr_db for p in self.points])

    @property
    def per(self) -> np.ndarray:
        return np.array([p.per for p in self.points])

    def monotone_per(self) -> np.ndarray:
        return monotonize_nonincreasing(self.per)

    def undersampled(self, target_errors: int) -> list[float]:
        return [p.snr_db for p in self.points if p.errors < target_errors]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# schema: {LINK_SCHEMA}\n")
        buf.write("codec,snr_db,trials,errors,per,ci_halfwidth\n")
        for p in self.points:
            buf.write(
                f"{self.codec},{p.snr_db!r},{p.trials},{p.errors},{p.per!r},{p.ci_halfwidth!r}\n"
            )
        return buf.getvalue()


def snr_at_per(curve: PerCurve, target_per: float) -> float:
    """SNR where the monotonized curve crosses `target_per`, by log-linear
    interpolation.  Refuses to extrapolate outside the measured range."""
    if target_per <= 0:
        raise CampaignError("target_per must be positive")
    snr = curve.snr_db
    per = np.maximum(curve.monotone_per(), 1e-12)
    logt = math.log10(target_per)
    logp = np.log10(per)
    if logt > logp[0] or logt < logp[-1]:
        raise CampaignError(
            f"target PER {target_per} outside measured range [{per[-1]:.3g}, {per[0]:.3g}]"
        )
    for i in range(len(snr) - 1):
        hi, lo = logp[i], logp[i + 1]
        if hi >= logt >= lo:
            if hi == lo:
                return float(snr[i])
            frac = (hi - logt) / (hi - lo)
            return float(snr[i] + frac * (snr[i + 1] - snr[i]))
    return float(snr[-1])


# --------------------------------------------------------------------------
# trial-block kernels
# --------------------------------------------------------------------------


@njit
def _estimate_tiles(gains, pilot_raw, sigma2, n_pilots, genie, hhat):
    t = gains.shape[0]
    if genie:
        for i in range(t):
            hhat[i] = gains[i]
        return 0.0
    scale = math.sqrt(sigma2 / (2.0 * n_pilots))
    shrink = n_pilots / (n_pilots + sigma2)
    for i in range(t):
        hhat[i] = (gains[i] + scale * pilot_raw[i]) * shrink
    return sigma2 / (n_pilots + sigma2)


@njit
def _svc_block_kernel(
    payload_idx,
    support_table,
    dict_scaled,
    tile_map,
    gains,
    pilot_raw,
    noise,
    sigma2,
    n_pilots,
    genie,
):
    """One block of SVC trials; returns the error count."""
    n_trials = payload_idx.shape[0]
    m, n = dict_scaled.shape
    k = support_table.shape[1]
    nscale = math.sqrt(sigma2 / 2.0)
    y = np.empty(m, dtype=np.complex128)
    eff = np.empty((m, n), dtype=np.complex128)
    hhat = np.empty(gains.shape[1], dtype=np.complex128)
    found = np.empty(k, dtype=np.int64)
    errors = 0
    for tr in range(n_trials):
        idx = payload_idx[tr]
        _estimate_tiles(gains[tr], pilot_raw[tr], sigma2, n_pilots, genie, hhat)
        for i in range(m):
            x = complex(0.0, 0.0)
            for j in range(k):
                x += dict_scaled[i, support_table[idx, j]]
            h = gains[tr, tile_map[i]]
            y[i] = h * x + nscale * noise[tr, i]
        for i in range(m):
            hh = hhat[tile_map[i]]
            for j in range(n):
                eff[i, j] = hh * dict_scaled[i, j]
        omp_support(y, eff, k, found)
        # insertion sort the found support (k is tiny)
        for a in range(1, k):
            v = found[a]
            b = a - 1
            while b >= 0 and found[b] > v:
                found[b + 1] = found[b]
                b -= 1
            found[b + 1] = v
        for j in range(k):
            if found[j] != support_table[idx, j]:
                errors += 1
                break
    return errors


@njit
def _equalize_llr_qpsk(syms_tx, tile_map, gains_row, hhat, noise_row, sigma2, err_var, llr_out):
    n_sym = syms_tx.shape[0]
    nscale = math.sqrt(sigma2 / 2.0)
    for j in range(n_sym):
        h = gains_row[tile_map[j]]
        y = h * syms_tx[j] + nscale * noise_row[j]
        hh = hhat[tile_map[j]]
        g2 = hh.real * hh.real + hh.imag * hh.imag
        if g2 < 1e-12:
            g2 = 1e-12
        z = (hh.conjugate() * y) / g2
        nv = (sigma2 + err_var) / g2
        scale = 2.0 * _SQRT2 / nv
        llr_out[2 * j] = scale * z.real
        llr_out[2 * j + 1] = scale * z.imag


@njit
def _cc_block_kernel(
    payloads,
    next_state,
    outputs,
    tile_map,
    gains,
    pilot_raw,
    noise,
    sigma2,
    n_pilots,
    genie,
    rm_bits,
    n_wraps,
):
    """Block of LTE control-channel trials: CRC-16, TBCC 1/3, circular
    rate matching onto `rm_bits` bits, QPSK, soft WAVA decode."""
    n_trials = payloads.shape[0]
    n_payload = payloads.shape[1]
    n_info = n_payload + 16
    n_coded = 3 * n_info
    n_sym = rm_bits // 2
    word = np.empty(n_info, dtype=np.uint8)
    coded = np.empty(n_coded, dtype=np.uint8)
    syms = np.empty(n_sym, dtype=np.complex128)
    llr = np.empty(rm_bits)
    comb = np.empty(n_coded)
    decoded = np.empty(n_info, dtype=np.uint8)
    hhat = np.empty(gains.shape[1], dtype=np.complex128)
    errors = 0
    for tr in range(n_trials):
        for i in range(n_payload):
            word[i] = payloads[tr, i]
        reg = crc16_remainder(payloads[tr])
        for i in range(16):
            word[n_payload + i] = (reg >> (15 - i)) & 1
        _tbcc_encode_kernel(word, next_state, outputs, coded)
        for j in range(n_sym):
            b0 = coded[(2 * j) % n_coded]
            b1 = coded[(2 * j + 1) % n_coded]
            syms[j] = complex((1.0 - 2.0 * b0) / _SQRT2, (1.0 - 2.0 * b1) / _SQRT2)
        err_var = _estimate_tiles(gains[tr], pilot_raw[tr], sigma2, n_pilots, genie, hhat)
        _equalize_llr_qpsk(syms, tile_map, gains[tr], hhat, noise[tr], sigma2, err_var, llr)
        for i in range(n_coded):
            comb[i] = 0.0
        for i in range(rm_bits):
            comb[i % n_coded] += llr[i]
        _wava_decode_kernel(comb, next_state, outputs, n_info, n_wraps, decoded)
        if crc16_remainder(decoded) != 0:
            errors += 1
            continue
        for i in range(n_payload):
            if decoded[i] != payloads[tr, i]:
                errors += 1
                break
    return errors


@njit
def _polar_block_kernel(
    payloads,
    frozen,
    schedule,
    info_positions,
    list_size,
    n_punctured,
    tile_map,
    gains,
    pilot_raw,
    noise,
    sigma2,
    n_pilots,
    genie,
):
    """Block of polar control-channel trials with CRC-aided SCL decoding."""
    n_trials = payloads.shape[0]
    n_payload = payloads.shape[1]
    n_mother = frozen.shape[0]
    n_info = info_positions.shape[0]
    coded_len = n_mother - n_punctured
    n_sym = coded_len // 2
    u = np.empty(n_mother, dtype=np.uint8)
    word = np.empty(n_info, dtype=np.uint8)
    syms = np.empty(n_sym, dtype=np.complex128)
    llr = np.empty(coded_len)
    chan = np.empty(n_mother)
    hhat = np.empty(gains.shape[1], dtype=np.complex128)
    udec = np.empty((list_size, n_mother), dtype=np.uint8)
    pm = np.empty(list_size)
    errors = 0
    for tr in range(n_trials):
        for i in range(n_payload):
            word[i] = payloads[tr, i]
        reg = crc16_remainder(payloads[tr])
        for i in range(16):
            word[n_payload + i] = (reg >> (15 - i)) & 1
        for i in range(n_mother):
            u[i] = 0
        for i in range(n_info):
            u[info_positions[i]] = word[i]
        polar_transform(u)
        for j in range(n_sym):
            b0 = u[n_punctured + 2 * j]
            b1 = u[n_punctured + 2 * j + 1]
            syms[j] = complex((1.0 - 2.0 * b0) / _SQRT2, (1.0 - 2.0 * b1) / _SQRT2)
        err_var = _estimate_tiles(gains[tr], pilot_raw[tr], sigma2, n_pilots, genie, hhat)
        _equalize_llr_qpsk(syms, tile_map, gains[tr], hhat, noise[tr], sigma2, err_var, llr)
        for i in range(n_punctured):
            chan[i] = 0.0
        for i in range(coded_len):
            chan[n_punctured + i] = llr[i]
        active = _scl_kernel(chan, frozen, schedule, list_size, udec, pm)
        best = -1
        best_pm = 1e300
        for p in range(active):
            for i in range(n_info):
                word[i] = udec[p, info_positions[i]]
            if crc16_remainder(word) == 0 and pm[p] < best_pm:
                best_pm = pm[p]
                best = p
        if best < 0:
            errors += 1
            continue
        for i in range(n_payload):
            if udec[best, info_positions[i]] != payloads[tr, i]:
                errors += 1
                break
    return errors


# eMBB data-channel calibration: punctured TBCC + QAM over AWGN


@njit
def _mcs_block_kernel(
    payloads,
    next_state,
    outputs,
    keep_mask,
    bits_per_sym,
    noise,
    sigma2,
    n_wraps,
):
    """AWGN block-error trials for one (modulation, rate, length) entry."""
    n_trials = payloads.shape[0]
    n_info = payloads.shape[1]
    n_coded = 3 * n_info
    n_kept = 0
    for i in range(n_coded):
        if keep_mask[i]:
            n_kept += 1
    n_sym = (n_kept + bits_per_sym - 1) // bits_per_sym
    coded = np.empty(n_coded, dtype=np.uint8)
    kept = np.zeros(n_sym * bits_per_sym, dtype=np.uint8)
    llr_kept = np.empty(n_sym * bits_per_sym)
    comb = np.empty(n_coded)
    decoded = np.empty(n_info, dtype=np.uint8)
    nscale = math.sqrt(sigma2 / 2.0)
    lv0 = 3.0 / math.sqrt(10.0)
    lv1 = 1.0 / math.sqrt(10.0)
    errors = 0
    for tr in range(n_trials):
        _tbcc_encode_kernel(payloads[tr], next_state, outputs, coded)
        pos = 0
        for i in range(n_coded):
            if keep_mask[i]:
                kept[pos] = coded[i]
                pos += 1
        for i in range(pos, n_sym * bits_per_sym):
            kept[i] = 0
        for j in range(n_sym):
            if bits_per_sym == 2:
                s = complex(
                    (1.0 - 2.0 * kept[2 * j]) / _SQRT2, (1.0 - 2.0 * kept[2 * j + 1]) / _SQRT2
                )
            else:
                si = 1.0 - 2.0 * kept[4 * j]
                sq = 1.0 - 2.0 * kept[4 * j + 1]
                mi = 3.0 - 2.0 * kept[4 * j + 2]
                mq = 3.0 - 2.0 * kept[4 * j + 3]
                s = complex(si * mi / math.sqrt(10.0), sq * mq / math.sqrt(10.0))
            y = s + nscale * noise[tr, j]
            if bits_per_sym == 2:
                scale = 2.0 * _SQRT2 / sigma2
                llr_kept[2 * j] = scale * y.real
                llr_kept[2 * j + 1] = scale * y.imag
            else:
                for comp in range(2):
                    z = y.real if comp == 0 else y.imag
                    d_p3 = (z - lv0) * (z - lv0)
                    d_p1 = (z - lv1) * (z - lv1)
                    d_m1 = (z + lv1) * (z + lv1)
                    d_m3 = (z + lv0) * (z + lv0)
                    m0 = d_p3 if d_p3 < d_p1 else d_p1
                    m1 = d_m1 if d_m1 < d_m3 else d_m3
                    llr_kept[4 * j + comp] = (m1 - m0) / sigma2
                    m0 = d_p3 if d_p3 < d_m3 else d_m3
                    m1 = d_p1 if d_p1 < d_m1 else d_m1
                    llr_kept[4 * j + 2 + comp] = (m1 - m0) / sigma2
        pos = 0
        for i in range(n_coded):
            if keep_mask[i]:
                comb[i] = llr_kept[pos]
                pos += 1
            else:
                comb[i] = 0.0
        _wava_decode_kernel(comb, next_state, outputs, n_info, n_wraps, decoded)
        for i in range(n_info):
            if decoded[i] != payloads[tr, i]:
                errors += 1
                break
    return errors


# --------------------------------------------------------------------------
# campaign driver
# --------------------------------------------------------------------------


@lru_cache(maxsize=8)
def _svc_assets(params: SvcParams):
    matrix = params.spreading_matrix() * math.sqrt(params.m / params.k)
    table = params.support_table().astype(np.int64)
    return np.ascontiguousarray(matrix), np.ascontiguousarray(table)


@lru_cache(maxsize=8)
def _polar_assets(list_size: int, design_snr_db: float):
    codec = PolarCodec(list_size=list_size, design_snr_db=design_snr_db)
    frozen, info_positions, schedule = codec._tables()
    return codec, frozen, info_positions, schedule


def _blocked_tile_map(n_sym: int, n_tiles: int) -> np.ndarray:
    """Consecutive mapping across the stretched band (NR short packet)."""
    return np.minimum((np.arange(n_sym) * n_tiles) // n_sym, n_tiles - 1).astype(np.int64)


def _interleaved_tile_map(n_sym: int, n_tiles: int) -> np.ndarray:
    """Distributed mapping (LTE control channel interleaving)."""
    return (np.arange(n_sym) % n_tiles).astype(np.int64)


def _block_rng(campaign_seed: int, snr_index: int, block_index: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=campaign_seed, spawn_key=(snr_index, block_index))
    )


def _run_block(campaign: LinkCampaign, snr_index: int, block_index: int) -> tuple[int, int]:
    """Run one trial block; returns (trials, errors)."""
    rng = _block_rng(campaign.seed, snr_index, block_index)
    snr_db = float(campaign.snr_grid_db[snr_index])
    sigma2 = 10.0 ** (-snr_db / 10.0)
    b = campaign.block_size
    t = campaign.n_tiles
    genie = campaign.estimator == "genie" or campaign.awgn

    if campaign.awgn:
        gains = np.ones((b, t), dtype=np.complex128)
    else:
        gains = (rng.standard_normal((b, t)) + 1j * rng.standard_normal((b, t))) / _SQRT2
        if campaign.normalize_channel_power:
            power = np.mean(np.abs(gains) ** 2, axis=1, keepdims=True)
            gains = gains / np.sqrt(np.maximum(power, 1e-30))
    pilot_raw = rng.standard_normal((b, t)) + 1j * rng.standard_normal((b, t))

    if campaign.codec == "svc":
        matrix, table = _svc_assets(campaign.svc)
        idx = rng.integers(0, table.shape[0], size=b).astype(np.int64)
        m = campaign.svc.m
        noise = rng.standard_normal((b, m)) + 1j * rng.standard_normal((b, m))
        tile_map = _blocked_tile_map(m, t)
        errors = _svc_block_kernel(
            idx, table, matrix, tile_map, gains, pilot_raw, noise, sigma2,
            campaign.packet_pilots_per_tile, genie,
        )
    elif campaign.codec == "cc":
        payloads = rng.integers(0, 2, size=(b, 12)).astype(np.uint8)
        n_sym = campaign.cc_rate_matched_bits // 2
        noise = rng.standard_normal((b, n_sym)) + 1j * rng.standard_normal((b, n_sym))
        tile_map = _interleaved_tile_map(n_sym, t)
        errors = _cc_block_kernel(
            payloads, _NEXT_STATE, _OUTPUTS, tile_map, gains, pilot_raw, noise, sigma2,
            campaign.cc_crs_pilots, genie, campaign.cc_rate_matched_bits, 3,
        )
    else:
        codec, frozen, info_positions, schedule = _polar_assets(
            campaign.polar_list_size, campaign.polar_design_snr_db
        )
        payloads = rng.integers(0, 2, size=(b, 12)).astype(np.uint8)
        n_sym = codec.coded_len // 2
        noise = rng.standard_normal((b, n_sym)) + 1j * rng.standard_normal((b, n_sym))
        tile_map = _blocked_tile_map(n_sym, t)
        errors = _polar_block_kernel(
            payloads, frozen, schedule, info_positions, codec.list_size, codec.n_punctured,
            tile_map, gains, pilot_raw, noise, sigma2,
            campaign.packet_pilots_per_tile, genie,
        )
    return b, int(errors)


def _point_worker(args) -> tuple[int, int, int, int]:
    campaign, snr_index, block_index = args
    trials, errors = _run_block(campaign, snr_index, block_index)
    return snr_index, block_index, trials, errors


def run_link_campaign(campaign: LinkCampaign, workers: int = 1) -> PerCurve:
    """PER curve over the campaign's SNR grid.

    Per point, trial blocks are consumed in index order until the error
    target or the trial budget is reached, so the outcome is independent
    of the worker count.
    """
    n_blocks = -(-campaign.max_trials // campaign.block_size)
    points: list[PerPoint] = []
    if workers <= 1:
        for si, snr in enumerate(campaign.snr_grid_db):
            trials = errors = 0
            for bi in range(n_blocks):
                bt, be = _run_block(campaign, si, bi)
                trials += bt
                errors += be
                if errors >= campaign.target_errors or trials >= campaign.max_trials:
                    break
            points.append(PerPoint(float(snr), trials, errors))
        return PerCurve(campaign.codec, points)

    with ProcessPoolExecutor(max_workers=workers) as pool:
        for si, snr in enumerate(campaign.snr_grid_db):
            trials = errors = 0
            next_submit = 0
            pending = {}
            next_consume = 0
            stop = False
            while not stop:
                while next_submit < n_blocks and len(pending) < 2 * workers:
                    fut = pool.submit(_point_worker, (campaign, si, next_submit))
                    pending[next_submit] = fut
                    next_submit += 1
                if next_consume >= n_blocks:
                    break
                fut = pending.pop(next_consume)
                _, _, bt, be = fut.result()
                next_consume += 1
                trials += bt
                errors += be
                if errors >= campaign.target_errors or trials >= campaign.max_trials:
                    stop = True
            for fut in pending.values():
                fut.cancel()
            points.append(PerPoint(float(snr), trials, errors))
    return PerCurve(campaign.codec, points)


# --------------------------------------------------------------------------
# BLER table calibration (AWGN, conditional on effective SNR)
# --------------------------------------------------------------------------

MCS_TABLE = {
    # name -> (modulation bits/symbol, cc rate string, info bits per RE)
    "qpsk13": (2, "1/3", 2.0 / 3.0),
    "qpsk23": (2, "2/3", 4.0 / 3.0),
    "qam16_12": (4, "1/2", 2.0),
    "qam16_34": (4, "3/4", 3.0),
}

SVC_MCS = "svc12"


def mcs_bits_per_re(mcs: str) -> float:
    if mcs == SVC_MCS:
        return 12.0 / 42.0
    return MCS_TABLE[mcs][2]


def _keep_mask(rate: str, n_info: int) -> np.ndarray:
    pattern = _PUNCTURE_PATTERNS[rate]
    reps = -(-3 * n_info // pattern.size)
    return np.tile(pattern, reps)[: 3 * n_info].astype(np.uint8)


def calibrate_bler_table(
    mcs_list,
    cb_lens,
    snr_grid_db,
    trials: int = 20_000,
    seed: int = 12345,
    target_errors: int = 200,
    block_size: int = 2_000,
    tail_stop_errors: int = 20,
) -> BlerTable:
    """Monte Carlo AWGN calibration of block error rate per MCS and
    codeblock length, monotonized before export.

    Each curve's SNR sweep stops once a point collects fewer than
    `tail_stop_errors` events at the full trial budget; lookups beyond
    the last point extrapolate the final log-linear slope.  The 'svc12'
    pseudo-MCS calibrates the 12-bit short-packet codec used for URLLC
    payloads (genie CSI, conditional on effective SNR).
    """
    table = BlerTable()
    n_blocks = -(-trials // block_size)
    for mi, mcs in enumerate(mcs_list):
        if mcs == SVC_MCS:
            campaign = LinkCampaign(
                codec="svc",
                snr_grid_db=tuple(float(s) for s in snr_grid_db),
                max_trials=trials,
                target_errors=target_errors,
                seed=seed + 7919 * mi,
                block_size=block_size,
                awgn=True,
            )
            curve = run_link_campaign(campaign)
            keep = _tail_cut(np.array([p.errors for p in curve.points]), tail_stop_errors)
            table.add_curve(SVC_MCS, 12, curve.snr_db[:keep], curve.per[:keep])
            continue
        bits_per_sym, rate, _ = MCS_TABLE[mcs]
        for ci, cb_len in enumerate(cb_lens):
            mask = _keep_mask(rate, cb_len)
            n_sym = -(-int(mask.sum()) // bits_per_sym)
            snrs, blers = [], []
            for si, snr in enumerate(snr_grid_db):
                sigma2 = 10.0 ** (-float(snr) / 10.0)
                t_count = e_count = 0
                for bi in range(n_blocks):
                    rng = np.random.default_rng(
                        np.random.SeedSequence(
                            entropy=seed, spawn_key=(1000 + mi, ci, si, bi)
                        )
                    )
                    payloads = rng.integers(0, 2, size=(block_size, cb_len)).astype(np.uint8)
                    noise = rng.standard_normal((block_size, n_sym)) + 1j * rng.standard_normal(
                        (block_size, n_sym)
                    )
                    errs = _mcs_block_kernel(
                        payloads, _NEXT_STATE, _OUTPUTS, mask, bits_per_sym, noise, sigma2, 3
                    )
                    t_count += block_size
                    e_count += int(errs)
                    if e_count >= target_errors or t_count >= trials:
                        break
                snrs.append(float(snr))
                blers.append(e_count / t_count)
                if len(snrs) >= 2 and e_count < tail_stop_errors:
                    break
            table.add_curve(mcs, cb_len, snrs, blers)
    return table


def _tail_cut(errors: np.ndarray, tail_stop_errors: int) -> int:
    """Index after the first under-resolved tail point (keep >= 2)."""
    for i in range(errors.size):
        if i >= 1 and errors[i] < tail_stop_errors:
            return i + 1
    return errors.size
