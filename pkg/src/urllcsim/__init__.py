"""Downlink URLLC physical-layer simulation suite.

Short-packet control-channel codecs (sparse vector coding, tail-biting
convolutional, CRC-aided polar), a Monte Carlo link-level harness, and a
slot-driven eMBB/URLLC coexistence simulator with scheduling and
recovery strategies.
"""

__version__ = "0.1.0"
