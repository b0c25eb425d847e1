"""CRC-16 (CCITT polynomial 0x1021) over bit arrays."""

from __future__ import annotations

import numpy as np

from .._jit import njit

CRC16_POLY = 0x1021
CRC_LEN = 16


@njit
def crc16_remainder(bits: np.ndarray) -> int:
    """Remainder of bits * x^16 modulo the CCITT polynomial (MSB-first)."""
    reg = 0
    for i in range(bits.shape[0]):
        top = ((reg >> 15) ^ bits[i]) & 1
        reg = (reg << 1) & 0xFFFF
        if top:
            reg ^= 0x1021
    return reg


def crc16_attach(payload_bits: np.ndarray) -> np.ndarray:
    """Append the 16 CRC bits so the whole word has zero remainder."""
    payload_bits = np.ascontiguousarray(payload_bits, dtype=np.uint8)
    reg = crc16_remainder(payload_bits)
    crc = np.array([(reg >> (15 - i)) & 1 for i in range(CRC_LEN)], dtype=np.uint8)
    return np.concatenate([payload_bits, crc])


def crc16_check(bits_with_crc: np.ndarray) -> bool:
    bits_with_crc = np.ascontiguousarray(bits_with_crc, dtype=np.uint8)
    return crc16_remainder(bits_with_crc) == 0
