"""Hot inner loops for bitset Minkowski sums, in two interchangeable backends.

Bitsets are little-endian packed ``uint64`` arrays: element ``e`` is bit
``e & 63`` of word ``e >> 6``.  Every kernel mutates ``out`` in place and
assumes it is long enough to hold the result (callers allocate one spare
word for the carry of a shifted OR).

The numba backend is used when numba imports and ``SUMSET_ORDERS_NO_JIT``
is unset; the numpy backend is always available and must agree bit for bit.
"""

import numpy as np

from ._config import DISABLE_JIT

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_ONE = np.uint64(1)
_PAIR_CHUNK = 1 << 22


# --------------------------------------------------------------------------
# numpy backend
# --------------------------------------------------------------------------

def _or_shifted_np(out, src, shift):
    q, r = divmod(int(shift), 64)
    n = src.shape[0]
    if r == 0:
        out[q:q + n] |= src
        return
    out[q:q + n] |= src << np.uint64(r)
    m = min(n, out.shape[0] - q - 1)
    if m > 0:
        out[q + 1:q + 1 + m] |= src[:m] >> np.uint64(64 - r)


def _sum_elements_np(out, xs, src):
    for x in xs.tolist():
        _or_shifted_np(out, src, x)


def _sum_pairs_np(out, xs, ys):
    if xs.shape[0] == 0 or ys.shape[0] == 0:
        return
    rows = max(1, _PAIR_CHUNK // ys.shape[0])
    for i in range(0, xs.shape[0], rows):
        s = np.add.outer(xs[i:i + rows], ys).ravel()
        s = np.unique(s)
        np.bitwise_or.at(out, s >> 6, _ONE << (s & 63).astype(np.uint64))


def _modp_sum_pairs_np(out, xs, ys, p, t):
    if xs.shape[0] == 0 or ys.shape[0] == 0:
        return
    rows = max(1, _PAIR_CHUNK // ys.shape[0])
    for i in range(0, xs.shape[0], rows):
        xa = xs[i:i + rows, None]
        if p == 2:
            s = np.bitwise_xor(xa, ys[None, :])
        else:
            s = np.zeros((xa.shape[0], ys.shape[0]), dtype=np.int64)
            pw = 1
            for _ in range(t):
                s += ((xa // pw % p + ys[None, :] // pw % p) % p) * pw
                pw *= p
        out[s.ravel()] = 1


# --------------------------------------------------------------------------
# numba backend
# --------------------------------------------------------------------------

def _or_shifted_loop(out, src, shift):
    q = shift >> 6
    r = shift & 63
    n = src.shape[0]
    if r == 0:
        for i in range(n):
            out[q + i] |= src[i]
    else:
        rr = np.uint64(r)
        lr = np.uint64(64 - r)
        carry = np.uint64(0)
        for i in range(n):
            w = src[i]
            out[q + i] |= (w << rr) | carry
            carry = w >> lr
        if q + n < out.shape[0]:
            out[q + n] |= carry


def _sum_pairs_loop(out, xs, ys):
    one = np.uint64(1)
    for i in range(xs.shape[0]):
        x = xs[i]
        for j in range(ys.shape[0]):
            s = x + ys[j]
            out[s >> 6] |= one << np.uint64(s & 63)


def _modp_sum_pairs_loop(out, xs, ys, p, t):
    if p == 2:
        for i in range(xs.shape[0]):
            x = xs[i]
            for j in range(ys.shape[0]):
                out[x ^ ys[j]] = 1
        return
    # digits once per operand, so the pair loop only adds
    xd = np.empty((xs.shape[0], t), dtype=np.int64)
    yd = np.empty((ys.shape[0], t), dtype=np.int64)
    for src, dst in ((xs, xd), (ys, yd)):
        for i in range(src.shape[0]):
            a = src[i]
            for c in range(t):
                dst[i, c] = a % p
                a //= p
    for i in range(xs.shape[0]):
        for j in range(ys.shape[0]):
            s = 0
            pw = 1
            for c in range(t):
                d = xd[i, c] + yd[j, c]
                if d >= p:
                    d -= p
                s += d * pw
                pw *= p
            out[s] = 1


if numba is not None:
    _jit = numba.njit(cache=True, nogil=True)
    _or_shifted_nb = _jit(_or_shifted_loop)

    @_jit
    def _sum_elements_nb(out, xs, src):
        for i in range(xs.shape[0]):
            _or_shifted_nb(out, src, xs[i])

    _sum_pairs_nb = _jit(_sum_pairs_loop)
    _modp_sum_pairs_nb = _jit(_modp_sum_pairs_loop)


class Kernels:
    """One backend's set of kernels plus its cost constants.

    Costs are in rough "word operations"; ``loop_overhead`` is what one
    interpreted Python iteration costs relative to a compiled word op.
    """

    def __init__(self, name, or_shifted, sum_elements, sum_pairs, modp_sum_pairs,
                 pair_cost, loop_overhead):
        self.name = name
        self.or_shifted = or_shifted
        self.sum_elements = sum_elements
        self.sum_pairs = sum_pairs
        self.modp_sum_pairs = modp_sum_pairs
        self.pair_cost = pair_cost
        self.loop_overhead = loop_overhead

    def __repr__(self):
        return f"Kernels({self.name!r})"


NUMPY = Kernels("numpy", _or_shifted_np, _sum_elements_np, _sum_pairs_np,
                _modp_sum_pairs_np, pair_cost=40.0, loop_overhead=2000.0)

if numba is not None:
    NUMBA = Kernels("numba", _or_shifted_nb, _sum_elements_nb, _sum_pairs_nb,
                    _modp_sum_pairs_nb, pair_cost=2.0, loop_overhead=0.0)
else:  # pragma: no cover
    NUMBA = None

ACTIVE = NUMBA if (NUMBA is not None and not DISABLE_JIT) else NUMPY


def backends():
    """All importable backends, numpy first."""
    return [k for k in (NUMPY, NUMBA) if k is not None]


def get(name=None):
    if name is None:
        return ACTIVE
    for k in backends():
        if k.name == name:
            return k
    raise KeyError(f"unknown or unavailable kernel backend {name!r}")
