import numpy as np
import pytest

from urllcsim.codecs import cc_decode, cc_encode
from urllcsim.codecs.convolutional import CONSTRAINT_LEN, ConvolutionalCodec, _tbcc_encode_kernel, _NEXT_STATE, _OUTPUTS
from urllcsim.codecs.crc import crc16_attach, crc16_check
from urllcsim.codecs import modulation as mod


def _llr(bits, confidence=20.0):
    return (1.0 - 2.0 * bits.astype(float)) * confidence


def test_crc16_roundtrip_and_detection():
    rng = np.random.default_rng(0)
    for _ in range(20):
        payload = rng.integers(0, 2, 12).astype(np.uint8)
        word = crc16_attach(payload)
        assert word.size == 28
        assert crc16_check(word)
        corrupted = word.copy()
        corrupted[rng.integers(0, 28)] ^= 1
        assert not crc16_check(corrupted)


def test_encoder_output_length_is_84():
    # rate arithmetic: 3 coded bits per each of the 12+16 input bits
    payload = np.zeros(12, dtype=np.uint8)
    assert cc_encode(payload).size == 3 * (12 + 16) == 84


def test_tail_biting_start_state_equals_end_state():
    rng = np.random.default_rng(1)
    bits = rng.integers(0, 2, 28).astype(np.uint8)
    coded = np.empty(84, dtype=np.uint8)
    _tbcc_encode_kernel(bits, _NEXT_STATE, _OUTPUTS, coded)
    # replaying the encoder from the tail-biting start state must end there
    state = 0
    for j in range(CONSTRAINT_LEN - 1):
        state |= int(bits[28 - 1 - j]) << (CONSTRAINT_LEN - 2 - j)
    start = state
    for t in range(28):
        state = int(_NEXT_STATE[state, bits[t]])
    assert state == start


def test_zero_noise_roundtrip_many_payloads():
    rng = np.random.default_rng(2)
    for _ in range(100):
        payload = rng.integers(0, 2, 12).astype(np.uint8)
        res = cc_decode(_llr(cc_encode(payload)))
        assert res.success
        assert np.array_equal(res.decoded_bits, payload)


def test_failure_is_crc_mismatch():
    payload = np.zeros(12, dtype=np.uint8)
    llr = _llr(cc_encode(payload))
    # obliterate half the observations with confident wrong values
    llr[::2] *= -1
    res = cc_decode(llr)
    if not res.success:
        assert res.decoded_bits is None


def test_punctured_rates_roundtrip_and_lengths():
    rng = np.random.default_rng(3)
    for rate, factor in (("1/2", 2.0), ("2/3", 1.5), ("3/4", 4.0 / 3.0)):
        codec = ConvolutionalCodec(info_bits=96, rate=rate)
        assert codec.coded_bits == pytest.approx(96 * factor, abs=1)
        bits = rng.integers(0, 2, 96).astype(np.uint8)
        decoded, _ = codec.decode_soft(_llr(codec.encode(bits)))
        assert np.array_equal(decoded, bits)


def test_unsupported_rate_rejected():
    with pytest.raises(ValueError):
        ConvolutionalCodec(info_bits=96, rate="1/5")


def test_soft_decoding_beats_erasures():
    # decoder recovers when a third of the LLRs are erased (set to zero)
    rng = np.random.default_rng(4)
    ok = 0
    for _ in range(50):
        payload = rng.integers(0, 2, 12).astype(np.uint8)
        llr = _llr(cc_encode(payload))
        erase = rng.choice(84, size=28, replace=False)
        llr[erase] = 0.0
        res = cc_decode(llr)
        ok += bool(res.success and np.array_equal(res.decoded_bits, payload))
    assert ok >= 45


def test_awgn_per_sanity_monotone():
    rng = np.random.default_rng(5)
    pers = []
    for snr_db in (0.0, 4.0):
        sigma2 = 10 ** (-snr_db / 10)
        errs = 0
        n = 400
        for _ in range(n):
            payload = rng.integers(0, 2, 12).astype(np.uint8)
            syms = mod.modulate(cc_encode(payload), "qpsk")
            noise = rng.standard_normal(syms.size) + 1j * rng.standard_normal(syms.size)
            y = syms + np.sqrt(sigma2 / 2) * noise
            res = cc_decode(mod.demodulate_llr(y, sigma2, "qpsk"))
            errs += not (res.success and np.array_equal(res.decoded_bits, payload))
        pers.append(errs / n)
    assert pers[1] < pers[0]
