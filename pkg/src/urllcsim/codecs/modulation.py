"""Gray-mapped QPSK / 16QAM modulation and max-log LLR demapping.

LLR convention: positive favors bit 0.
"""

from __future__ import annotations

import numpy as np

from .._jit import njit

_SQRT2 = np.sqrt(2.0)
_SQRT10 = np.sqrt(10.0)

BITS_PER_SYMBOL = {"qpsk": 2, "16qam": 4}


@njit
def qpsk_modulate(bits, out):
    n = bits.shape[0] // 2
    for i in range(n):
        re = 1.0 - 2.0 * bits[2 * i]
        im = 1.0 - 2.0 * bits[2 * i + 1]
        out[i] = complex(re / _SQRT2, im / _SQRT2)
    return out


@njit
def qpsk_llr(symbols, noise_var, out):
    """Max-log LLRs for Gray QPSK; two LLRs per symbol."""
    n = symbols.shape[0]
    for i in range(n):
        scale = 2.0 * _SQRT2 / noise_var[i]
        out[2 * i] = scale * symbols[i].real
        out[2 * i + 1] = scale * symbols[i].imag
    return out


# Gray 4-PAM component used by 16QAM: bits (b_sign, b_mag) -> level
# 00 -> +3, 01 -> +1, 11 -> -1, 10 -> -3 (over sqrt(10))
_PAM_LEVELS = np.array([3.0, 1.0, -1.0, -3.0]) / _SQRT10
_PAM_BITS = np.array([[0, 0], [0, 1], [1, 1], [1, 0]], dtype=np.uint8)


@njit
def qam16_modulate(bits, out):
    n = bits.shape[0] // 4
    for i in range(n):
        b0, b1, b2, b3 = bits[4 * i], bits[4 * i + 1], bits[4 * i + 2], bits[4 * i + 3]
        # (b0, b2) -> I component, (b1, b3) -> Q component
        si = 1.0 - 2.0 * b0
        sq = 1.0 - 2.0 * b1
        mi = 3.0 - 2.0 * b2
        mq = 3.0 - 2.0 * b3
        out[i] = complex(si * mi / _SQRT10, sq * mq / _SQRT10)
    return out


@njit
def qam16_llr(symbols, noise_var, out):
    """Max-log LLRs for Gray 16QAM via 4-point search per component."""
    n = symbols.shape[0]
    lv0 = 3.0 / _SQRT10
    lv1 = 1.0 / _SQRT10
    for i in range(n):
        for comp in range(2):
            z = symbols[i].real if comp == 0 else symbols[i].imag
            # distances to the four PAM levels (+3, +1, -1, -3)/sqrt(10)
            d_p3 = (z - lv0) * (z - lv0)
            d_p1 = (z - lv1) * (z - lv1)
            d_m1 = (z + lv1) * (z + lv1)
            d_m3 = (z + lv0) * (z + lv0)
            # sign bit: 0 on {+3,+1}, 1 on {-1,-3}
            m0 = d_p3 if d_p3 < d_p1 else d_p1
            m1 = d_m1 if d_m1 < d_m3 else d_m3
            llr_sign = (m1 - m0) / noise_var[i]
            # magnitude bit: 0 on {+3,-3}, 1 on {+1,-1}
            m0 = d_p3 if d_p3 < d_m3 else d_m3
            m1 = d_p1 if d_p1 < d_m1 else d_m1
            llr_mag = (m1 - m0) / noise_var[i]
            out[4 * i + comp] = llr_sign
            out[4 * i + 2 + comp] = llr_mag
    return out


def modulate(bits: np.ndarray, scheme: str) -> np.ndarray:
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    bps = BITS_PER_SYMBOL[scheme]
    if bits.size % bps:
        raise ValueError(f"bit count {bits.size} not a multiple of {bps}")
    out = np.empty(bits.size // bps, dtype=np.complex128)
    if scheme == "qpsk":
        return qpsk_modulate(bits, out)
    return qam16_modulate(bits, out)


def demodulate_llr(symbols: np.ndarray, noise_var, scheme: str) -> np.ndarray:
    symbols = np.ascontiguousarray(symbols, dtype=np.complex128)
    noise_var = np.broadcast_to(np.asarray(noise_var, dtype=np.float64), symbols.shape)
    noise_var = np.ascontiguousarray(noise_var)
    bps = BITS_PER_SYMBOL[scheme]
    out = np.empty(symbols.size * bps, dtype=np.float64)
    if scheme == "qpsk":
        return qpsk_llr(symbols, noise_var, out)
    return qam16_llr(symbols, noise_var, out)
