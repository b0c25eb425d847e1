"""Sparse vector coding: payload bits live in the support of a k-sparse
vector, spread by a seeded random dictionary and recovered with
orthogonal matching pursuit (sparsity known, exactly k iterations).

The payload-to-support mapping is the lexicographic combinatorial number
system, an exact bijection between [0, C(n, k)) and the k-subsets of
{0..n-1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .._jit import njit
from .result import CodecResult


def svc_capacity(n: int, k: int) -> int:
    """floor(log2(C(n, k))) payload bits; exact integer arithmetic."""
    if k < 0 or n < 0 or k > n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    c = math.comb(n, k)
    return c.bit_length() - 1


def index_to_support(index: int, n: int, k: int) -> tuple[int, ...]:
    """index in [0, C(n,k)) -> the index-th k-subset in lexicographic order."""
    total = math.comb(n, k)
    if not 0 <= index < total:
        raise ValueError(f"index {index} outside [0, {total})")
    support = []
    x = index
    v = 0
    for depth in range(k):
        remaining = k - depth
        while True:
            block = math.comb(n - 1 - v, remaining - 1)
            if x < block:
                break
            x -= block
            v += 1
        support.append(v)
        v += 1
    return tuple(support)


def support_to_index(support, n: int, k: int) -> int:
    """Inverse of :func:`index_to_support`."""
    positions = sorted(int(p) for p in support)
    if len(positions) != k or len(set(positions)) != k:
        raise ValueError(f"support must hold {k} distinct positions")
    if positions and not (0 <= positions[0] and positions[-1] < n):
        raise ValueError(f"support {positions} outside [0, {n})")
    index = 0
    prev = -1
    remaining = k
    for p in positions:
        for v in range(prev + 1, p):
            index += math.comb(n - 1 - v, remaining - 1)
        prev = p
        remaining -= 1
    return index


def bits_to_index(bits: np.ndarray) -> int:
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    return value


def index_to_bits(index: int, width: int) -> np.ndarray:
    return np.array([(index >> (width - 1 - i)) & 1 for i in range(width)], dtype=np.uint8)


@dataclass(frozen=True)
class SvcParams:
    """Dimensions and dictionary seed of one SVC configuration."""

    n: int = 92
    m: int = 42
    k: int = 2
    spreading_seed: int = 7

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not self.m < self.n:
            raise ValueError("spread length m must be smaller than dictionary size n")
        if svc_capacity(self.n, self.k) < 1:
            raise ValueError("configuration encodes no bits")

    @property
    def capacity_bits(self) -> int:
        return svc_capacity(self.n, self.k)

    def spreading_matrix(self) -> np.ndarray:
        """m x n complex Gaussian dictionary with unit-norm columns."""
        rng = np.random.default_rng(self.spreading_seed)
        mat = rng.standard_normal((self.m, self.n)) + 1j * rng.standard_normal((self.m, self.n))
        mat /= np.linalg.norm(mat, axis=0, keepdims=True)
        return mat

    def support_table(self) -> np.ndarray:
        """Supports of every encodable payload index, shape (2**B, k)."""
        table = np.empty((1 << self.capacity_bits, self.k), dtype=np.int32)
        for idx in range(table.shape[0]):
            table[idx] = index_to_support(idx, self.n, self.k)
        return table


def svc_encode(payload_bits: np.ndarray, params: SvcParams, matrix: np.ndarray | None = None) -> np.ndarray:
    """Codeword x = C s with s the unit-magnitude k-sparse support vector."""
    payload_bits = np.asarray(payload_bits, dtype=np.uint8)
    if payload_bits.size != params.capacity_bits:
        raise ValueError(
            f"payload must be {params.capacity_bits} bits, got {payload_bits.size}"
        )
    if matrix is None:
        matrix = params.spreading_matrix()
    support = index_to_support(bits_to_index(payload_bits), params.n, params.k)
    return matrix[:, list(support)].sum(axis=1)


@njit
def omp_support(received, dictionary, k, out_support):
    """OMP with exactly k iterations; returns the selected column set.

    Correlations are normalized by column norms so unequal per-symbol
    channel gains folded into the dictionary do not bias selection.
    """
    m, n = dictionary.shape
    norms = np.empty(n)
    for j in range(n):
        acc = 0.0
        for i in range(m):
            v = dictionary[i, j]
            acc += v.real * v.real + v.imag * v.imag
        norms[j] = np.sqrt(acc) if acc > 0 else 1e-300
    residual = received.copy()
    chosen = np.zeros(n, dtype=np.uint8)
    basis = np.empty((m, k), dtype=np.complex128)
    for it in range(k):
        best_j = -1
        best_v = -1.0
        for j in range(n):
            if chosen[j]:
                continue
            acc = complex(0.0, 0.0)
            for i in range(m):
                acc += np.conj(dictionary[i, j]) * residual[i]
            v = abs(acc) / norms[j]
            if v > best_v:
                best_v = v
                best_j = j
        chosen[best_j] = 1
        out_support[it] = best_j
        for i in range(m):
            basis[i, it] = dictionary[i, best_j]
        # least-squares refit on the selected columns, then new residual
        t = it + 1
        gram = np.empty((t, t), dtype=np.complex128)
        rhs = np.empty(t, dtype=np.complex128)
        for a in range(t):
            for b in range(t):
                acc = complex(0.0, 0.0)
                for i in range(m):
                    acc += np.conj(basis[i, a]) * basis[i, b]
                gram[a, b] = acc
            accr = complex(0.0, 0.0)
            for i in range(m):
                accr += np.conj(basis[i, a]) * received[i]
            rhs[a] = accr
        coef = np.linalg.solve(gram, rhs)
        for i in range(m):
            acc = complex(0.0, 0.0)
            for a in range(t):
                acc += basis[i, a] * coef[a]
            residual[i] = received[i] - acc
    res_norm = 0.0
    for i in range(m):
        res_norm += residual[i].real ** 2 + residual[i].imag ** 2
    return np.sqrt(res_norm)


def svc_decode(
    received: np.ndarray,
    channel_gain,
    noise_variance: float,
    params: SvcParams,
    matrix: np.ndarray | None = None,
) -> CodecResult:
    """Recover the payload from a noisy codeword.

    `channel_gain` (scalar or per-symbol vector) is folded into the
    dictionary so the selection step sees the effective columns.  Always
    returns a k-sparse guess; a support outside the encodable range is
    reported as `success=False`.
    """
    if matrix is None:
        matrix = params.spreading_matrix()
    received = np.ascontiguousarray(received, dtype=np.complex128)
    gain = np.asarray(channel_gain, dtype=np.complex128)
    dictionary = np.ascontiguousarray(matrix * gain.reshape(-1, 1) if gain.ndim else matrix * gain)
    support = np.empty(params.k, dtype=np.int64)
    residual = omp_support(received, dictionary, params.k, support)
    index = support_to_index(support.tolist(), params.n, params.k)
    width = params.capacity_bits
    if index >= (1 << width):
        return CodecResult(decoded_bits=None, success=False, diagnostic=residual)
    return CodecResult(decoded_bits=index_to_bits(index, width), success=True, diagnostic=residual)
