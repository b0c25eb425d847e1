"""Polar code with CRC-aided successive cancellation list decoding.

Mother code of length 128 punctured to 112 transmitted bits (rate 1/4
for the 12+16 bit control payload).  Bit-channel reliabilities come from
Gaussian-approximation density evolution run with the punctured
positions at zero mean, at a configurable design SNR.  The list decoder
works in the LLR domain with min-sum node updates and the standard
absolute-value path metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .._jit import njit
from .crc import CRC_LEN, crc16_attach, crc16_check
from .result import CodecResult

OP_F, OP_G, OP_C, OP_LEAF = 0, 1, 2, 3


def _phi(x: float) -> float:
    """GA phi function (Chung et al. approximation)."""
    if x <= 0:
        return 1.0
    if x < 10.0:
        return math.exp(-0.4527 * x**0.859 + 0.0218)
    return math.sqrt(math.pi / x) * math.exp(-x / 4.0) * (1.0 - 10.0 / (7.0 * x))


def _phi_inv(y: float) -> float:
    if y >= 1.0:
        return 0.0
    lo, hi = 0.0, 1e4
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _phi(mid) > y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _ga_means(channel_means: np.ndarray) -> np.ndarray:
    """Bit-channel LLR means via density evolution over the polar tree."""
    n = channel_means.size
    if n == 1:
        return channel_means.copy()
    half = n // 2
    a = channel_means[:half]
    b = channel_means[half:]
    upper = np.empty(half)
    lower = np.empty(half)
    for i in range(half):
        upper[i] = _phi_inv(1.0 - (1.0 - _phi(a[i])) * (1.0 - _phi(b[i])))
        lower[i] = a[i] + b[i]
    return np.concatenate([_ga_means(upper), _ga_means(lower)])


def _schedule(n_mother: int) -> np.ndarray:
    """Flat SC traversal schedule: rows of (op, depth, offset, half)."""
    ops: list[tuple[int, int, int, int]] = []

    def visit(depth: int, offset: int, length: int) -> None:
        if length == 1:
            ops.append((OP_LEAF, depth, offset, 0))
            return
        half = length // 2
        ops.append((OP_F, depth, offset, half))
        visit(depth + 1, offset, half)
        ops.append((OP_G, depth, offset, half))
        visit(depth + 1, offset + half, half)
        ops.append((OP_C, depth, offset, half))

    visit(0, 0, n_mother)
    return np.array(ops, dtype=np.int32)


@njit
def polar_transform(u: np.ndarray) -> np.ndarray:
    """In-place butterfly x = u F^(xn) in natural bit order."""
    n = u.shape[0]
    step = 1
    while step < n:
        for start in range(0, n, 2 * step):
            for i in range(start, start + step):
                u[i] ^= u[i + step]
        step *= 2
    return u


@njit
def _scl_kernel(chan_llr, frozen, schedule, list_size, udec_out, pm_out):
    """List decode over the flat schedule.

    Active paths always occupy rows 0..active-1.  Fills per-path u-domain
    decisions and path metrics; returns the number of active paths.
    """
    n_mother = chan_llr.shape[0]
    depth_max = 0
    while (1 << depth_max) < n_mother:
        depth_max += 1

    llr = np.zeros((list_size, depth_max + 1, n_mother))
    bits = np.zeros((list_size, depth_max + 1, n_mother), dtype=np.uint8)
    pm = np.zeros(list_size)
    for i in range(n_mother):
        llr[0, 0, i] = chan_llr[i]
    active = 1

    cand_metric = np.empty(2 * list_size)
    cand_src = np.empty(2 * list_size, dtype=np.int64)
    cand_bit = np.empty(2 * list_size, dtype=np.uint8)
    order = np.empty(2 * list_size, dtype=np.int64)
    assigned_row = np.empty(list_size, dtype=np.int64)
    pm_new = np.empty(list_size)
    row_taken = np.empty(list_size, dtype=np.uint8)
    src_used = np.empty(list_size, dtype=np.uint8)

    for row in range(schedule.shape[0]):
        op = schedule[row, 0]
        d = schedule[row, 1]
        a = schedule[row, 2]
        h = schedule[row, 3]
        if op == OP_F:
            for p in range(active):
                for i in range(h):
                    x = llr[p, d, a + i]
                    y = llr[p, d, a + h + i]
                    s = 1.0
                    if x < 0:
                        s = -s
                        x = -x
                    if y < 0:
                        s = -s
                        y = -y
                    llr[p, d + 1, a + i] = s * (x if x < y else y)
        elif op == OP_G:
            for p in range(active):
                for i in range(h):
                    x = llr[p, d, a + i]
                    y = llr[p, d, a + h + i]
                    if bits[p, d + 1, a + i]:
                        llr[p, d + 1, a + h + i] = y - x
                    else:
                        llr[p, d + 1, a + h + i] = y + x
        elif op == OP_C:
            for p in range(active):
                for i in range(h):
                    bits[p, d, a + i] = bits[p, d + 1, a + i] ^ bits[p, d + 1, a + h + i]
                    bits[p, d, a + h + i] = bits[p, d + 1, a + h + i]
        else:  # leaf at u-index a
            if frozen[a]:
                for p in range(active):
                    v = llr[p, depth_max, a]
                    bits[p, depth_max, a] = 0
                    udec_out[p, a] = 0
                    if v < 0:
                        pm[p] -= v
            else:
                n_cand = 2 * active
                for p in range(active):
                    v = llr[p, depth_max, a]
                    pen0 = -v if v < 0 else 0.0
                    pen1 = v if v > 0 else 0.0
                    cand_metric[p] = pm[p] + pen0
                    cand_src[p] = p
                    cand_bit[p] = 0
                    cand_metric[active + p] = pm[p] + pen1
                    cand_src[active + p] = p
                    cand_bit[active + p] = 1
                keep = n_cand if n_cand < list_size else list_size
                for i in range(n_cand):
                    order[i] = i
                for i in range(1, n_cand):
                    key = order[i]
                    km = cand_metric[key]
                    j = i - 1
                    while j >= 0 and cand_metric[order[j]] > km:
                        order[j + 1] = order[j]
                        j -= 1
                    order[j + 1] = key
                for p in range(list_size):
                    row_taken[p] = 0
                    src_used[p] = 0
                # survivors whose source row is still free stay in place
                for ci in range(keep):
                    src = cand_src[order[ci]]
                    if src_used[src] == 0:
                        src_used[src] = 1
                        row_taken[src] = 1
                        assigned_row[ci] = src
                    else:
                        assigned_row[ci] = -1
                # remaining survivors copy their state into free rows
                free_ptr = 0
                for ci in range(keep):
                    if assigned_row[ci] >= 0:
                        continue
                    while row_taken[free_ptr]:
                        free_ptr += 1
                    dst = free_ptr
                    assigned_row[ci] = dst
                    row_taken[dst] = 1
                    src = cand_src[order[ci]]
                    for dd in range(depth_max + 1):
                        for ii in range(n_mother):
                            llr[dst, dd, ii] = llr[src, dd, ii]
                            bits[dst, dd, ii] = bits[src, dd, ii]
                    for ii in range(n_mother):
                        udec_out[dst, ii] = udec_out[src, ii]
                for ci in range(keep):
                    c = order[ci]
                    dst = assigned_row[ci]
                    pm_new[dst] = cand_metric[c]
                    bits[dst, depth_max, a] = cand_bit[c]
                    udec_out[dst, a] = cand_bit[c]
                for ci in range(keep):
                    dst = assigned_row[ci]
                    pm[dst] = pm_new[dst]
                active = keep
    for p in range(active):
        pm_out[p] = pm[p]
    return active


@lru_cache(maxsize=8)
def _construction(mother_len: int, coded_len: int, info_len: int, design_snr_db: float):
    """(frozen mask, sorted info positions, flat schedule) for one config."""
    n_punct = mother_len - coded_len
    snr_lin = 10.0 ** (design_snr_db / 10.0)
    means = np.full(mother_len, 2.0 * snr_lin)
    means[:n_punct] = 0.0
    reliab = _ga_means(means)
    info_positions = np.sort(np.argsort(reliab, kind="stable")[::-1][:info_len])
    frozen = np.ones(mother_len, dtype=np.uint8)
    frozen[info_positions] = 0
    return frozen, info_positions.astype(np.int64), _schedule(mother_len)


@dataclass(frozen=True)
class PolarCodec:
    payload_bits: int = 12
    crc_len: int = CRC_LEN
    mother_len: int = 128
    coded_len: int = 112
    list_size: int = 8
    design_snr_db: float = -5.0

    def __post_init__(self):
        if self.mother_len & (self.mother_len - 1):
            raise ValueError("mother length must be a power of two")
        if not 0 < self.coded_len <= self.mother_len:
            raise ValueError("coded length must be in (0, mother_len]")
        if self.info_len > self.coded_len:
            raise ValueError("info+CRC exceeds transmitted length")

    @property
    def info_len(self) -> int:
        return self.payload_bits + self.crc_len

    @property
    def n_punctured(self) -> int:
        return self.mother_len - self.coded_len

    def _tables(self):
        return _construction(self.mother_len, self.coded_len, self.info_len, self.design_snr_db)

    def encode(self, payload_bits: np.ndarray) -> np.ndarray:
        payload_bits = np.asarray(payload_bits, dtype=np.uint8)
        if payload_bits.size != self.payload_bits:
            raise ValueError(f"payload must be {self.payload_bits} bits")
        frozen, info_positions, _ = self._tables()
        u = np.zeros(self.mother_len, dtype=np.uint8)
        u[info_positions] = crc16_attach(payload_bits)
        coded = polar_transform(u)
        return coded[self.n_punctured :]

    def decode(self, llrs: np.ndarray) -> CodecResult:
        """CRC-aided list decode; failure when no path passes the CRC."""
        llrs = np.asarray(llrs, dtype=np.float64)
        if llrs.size != self.coded_len:
            raise ValueError(f"expected {self.coded_len} LLRs, got {llrs.size}")
        frozen, info_positions, schedule = self._tables()
        chan = np.zeros(self.mother_len, dtype=np.float64)
        chan[self.n_punctured :] = llrs
        udec = np.zeros((self.list_size, self.mother_len), dtype=np.uint8)
        pm = np.zeros(self.list_size, dtype=np.float64)
        active = _scl_kernel(chan, frozen, schedule, self.list_size, udec, pm)
        best_bits = None
        best_metric = math.inf
        for p in range(active):
            word = udec[p, info_positions]
            if crc16_check(word) and pm[p] < best_metric:
                best_metric = pm[p]
                best_bits = word[: self.payload_bits].copy()
        if best_bits is None:
            return CodecResult(decoded_bits=None, success=False, diagnostic=float(pm[:active].min()))
        return CodecResult(decoded_bits=best_bits, success=True, diagnostic=float(best_metric))


_DEFAULT = PolarCodec()


def polar_encode(payload_bits: np.ndarray) -> np.ndarray:
    """12-bit payload + CRC-16 onto the rate-1/4 length-112 polar code."""
    return _DEFAULT.encode(payload_bits)


def polar_decode(llrs: np.ndarray) -> CodecResult:
    return _DEFAULT.decode(llrs)
