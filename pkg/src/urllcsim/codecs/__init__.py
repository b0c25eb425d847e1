"""Short-packet control-channel codecs.

Three 12-bit payload codecs share the CodecResult interface: sparse
vector coding decoded by orthogonal matching pursuit, a tail-biting
convolutional baseline with soft wrap-around Viterbi decoding, and a
CRC-aided successive-cancellation-list polar baseline.
"""

from .result import CodecResult
from .svc import (
    SvcParams,
    index_to_support,
    support_to_index,
    svc_capacity,
    svc_decode,
    svc_encode,
)
from .convolutional import ConvolutionalCodec, cc_decode, cc_encode
from .polar import PolarCodec, polar_decode, polar_encode

__all__ = [
    "CodecResult",
    "SvcParams",
    "svc_capacity",
    "index_to_support",
    "support_to_index",
    "svc_encode",
    "svc_decode",
    "ConvolutionalCodec",
    "cc_encode",
    "cc_decode",
    "PolarCodec",
    "polar_encode",
    "polar_decode",
]
