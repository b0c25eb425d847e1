from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class CodecResult:
    """Outcome of one decode attempt.

    `success` means the decoder produced a well-formed payload (CRC pass
    for the coded baselines, in-range support for SVC); correctness is
    judged by the caller against the transmitted bits.  `diagnostic` is
    decoder-specific: residual norm for sparse recovery, best path metric
    for the trellis/list decoders.
    """

    decoded_bits: np.ndarray | None
    success: bool
    diagnostic: float = 0.0
