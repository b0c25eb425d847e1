"""Tail-biting convolutional code, constraint length 7, base rate 1/3
(generators 133/171/165 octal), decoded with soft wrap-around Viterbi.

The control-channel baseline carries a 12-bit payload plus CRC-16 at
rate 1/3.  The same engine serves the data-channel MCS family through
puncturing to rates 1/2, 2/3 and 3/4.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._jit import njit
from .crc import CRC_LEN, crc16_attach, crc16_check
from .result import CodecResult

GENERATORS = (0o133, 0o171, 0o165)
CONSTRAINT_LEN = 7
N_STATES = 1 << (CONSTRAINT_LEN - 1)

# puncture period-6 keep masks over the serialized (d0,d1,d2) stream
_PUNCTURE_PATTERNS = {
    "1/3": np.ones(6, dtype=np.uint8),
    "1/2": np.array([1, 1, 0, 1, 1, 0], dtype=np.uint8),
    "2/3": np.array([1, 1, 0, 1, 0, 0], dtype=np.uint8),
    "3/4": np.array([1, 1, 0, 1, 0, 0, 1, 0, 0], dtype=np.uint8),
}


def _transition_tables():
    """next_state[s, b] and the 3 output bits out[s, b, i] for each branch."""
    next_state = np.empty((N_STATES, 2), dtype=np.int32)
    outputs = np.empty((N_STATES, 2, 3), dtype=np.int8)
    for s in range(N_STATES):
        for b in (0, 1):
            reg = (b << 6) | s
            for gi, g in enumerate(GENERATORS):
                outputs[s, b, gi] = bin(reg & g).count("1") & 1
            next_state[s, b] = (b << 5) | (s >> 1)
    return next_state, outputs


_NEXT_STATE, _OUTPUTS = _transition_tables()


@njit
def _tbcc_encode_kernel(bits, next_state, outputs, coded):
    n = bits.shape[0]
    # tail-biting: start in the state the encoder will end in
    state = 0
    for j in range(CONSTRAINT_LEN - 1):
        state |= bits[n - 1 - j] << (CONSTRAINT_LEN - 2 - j)
    for t in range(n):
        b = bits[t]
        for i in range(3):
            coded[3 * t + i] = outputs[state, b, i]
        state = next_state[state, b]
    return coded


@njit
def _wava_decode_kernel(llrs, next_state, outputs, n_bits, n_wraps, decoded):
    """Wrap-around Viterbi over the circular trellis; max-correlation metric.

    `llrs` holds 3 soft values per information bit (0 where punctured).
    Returns the best final path metric.
    """
    n_states = next_state.shape[0]
    metric = np.zeros(n_states)
    new_metric = np.empty(n_states)
    # survivors only need to be stored for the final wrap
    surv = np.empty((n_bits, n_states), dtype=np.int32)
    neg_inf = -1e300

    for wrap in range(n_wraps):
        last = wrap == n_wraps - 1
        for t in range(n_bits):
            for s in range(n_states):
                new_metric[s] = neg_inf
            for s in range(n_states):
                base = metric[s]
                for b in range(2):
                    gain = 0.0
                    for i in range(3):
                        llr = llrs[3 * t + i]
                        gain += -llr if outputs[s, b, i] else llr
                    cand = base + gain
                    ns = next_state[s, b]
                    if cand > new_metric[ns]:
                        new_metric[ns] = cand
                        if last:
                            surv[t, ns] = (s << 1) | b
            for s in range(n_states):
                metric[s] = new_metric[s]
        # keep metrics bounded across wraps
        mmax = metric[0]
        for s in range(1, n_states):
            if metric[s] > mmax:
                mmax = metric[s]
        for s in range(n_states):
            metric[s] -= mmax

    best_state = 0
    best = metric[0]
    for s in range(1, n_states):
        if metric[s] > best:
            best = metric[s]
            best_state = s
    state = best_state
    for t in range(n_bits - 1, -1, -1):
        packed = surv[t, state]
        decoded[t] = np.uint8(packed & 1)
        state = packed >> 1
    return best


@dataclass(frozen=True)
class ConvolutionalCodec:
    """Punctured TBCC codec over a fixed information block length."""

    info_bits: int
    rate: str = "1/3"
    n_wraps: int = 3

    def __post_init__(self):
        if self.rate not in _PUNCTURE_PATTERNS:
            raise ValueError(f"unsupported rate {self.rate}; options {sorted(_PUNCTURE_PATTERNS)}")
        if self.info_bits < CONSTRAINT_LEN - 1:
            raise ValueError("block must cover the encoder memory")

    @property
    def keep_mask(self) -> np.ndarray:
        pattern = _PUNCTURE_PATTERNS[self.rate]
        reps = -(-3 * self.info_bits // pattern.size)
        return np.tile(pattern, reps)[: 3 * self.info_bits]

    @property
    def coded_bits(self) -> int:
        return int(self.keep_mask.sum())

    def encode(self, bits: np.ndarray) -> np.ndarray:
        bits = np.ascontiguousarray(bits, dtype=np.uint8)
        if bits.size != self.info_bits:
            raise ValueError(f"expected {self.info_bits} bits, got {bits.size}")
        coded = np.empty(3 * self.info_bits, dtype=np.uint8)
        _tbcc_encode_kernel(bits, _NEXT_STATE, _OUTPUTS, coded)
        return coded[self.keep_mask.astype(bool)]

    def decode_soft(self, llrs: np.ndarray) -> tuple[np.ndarray, float]:
        """Decode from channel LLRs of the punctured stream."""
        llrs = np.asarray(llrs, dtype=np.float64)
        if llrs.size != self.coded_bits:
            raise ValueError(f"expected {self.coded_bits} LLRs, got {llrs.size}")
        full = np.zeros(3 * self.info_bits, dtype=np.float64)
        full[self.keep_mask.astype(bool)] = llrs
        decoded = np.empty(self.info_bits, dtype=np.uint8)
        metric = _wava_decode_kernel(full, _NEXT_STATE, _OUTPUTS, self.info_bits, self.n_wraps, decoded)
        return decoded, float(metric)


PAYLOAD_BITS = 12
_PDCCH = ConvolutionalCodec(info_bits=PAYLOAD_BITS + CRC_LEN, rate="1/3")


def cc_encode(payload_bits: np.ndarray) -> np.ndarray:
    """12-bit payload + CRC-16, tail-biting encoded at rate 1/3 (84 bits)."""
    payload_bits = np.asarray(payload_bits, dtype=np.uint8)
    if payload_bits.size != PAYLOAD_BITS:
        raise ValueError(f"payload must be {PAYLOAD_BITS} bits")
    return _PDCCH.encode(crc16_attach(payload_bits))


def cc_decode(llrs: np.ndarray) -> CodecResult:
    """Soft-decision decode; failure is a CRC mismatch."""
    decoded, metric = _PDCCH.decode_soft(llrs)
    ok = crc16_check(decoded)
    return CodecResult(
        decoded_bits=decoded[:PAYLOAD_BITS] if ok else None,
        success=bool(ok),
        diagnostic=metric,
    )
