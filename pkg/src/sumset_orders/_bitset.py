"""Dense packed bitsets over ``[0, nbits)`` and the Minkowski-sum driver.

The driver picks, per sum, the cheapest of three exact strategies:

* pairs   -- set bit ``x + y`` for every pair of elements;
* shifts  -- OR a shifted copy of one bitset for every element of the other;
* runs    -- OR a shifted copy of ``Y + [0, L]`` for every maximal run
  ``[s, s + L]`` of ``X`` (dilations are built incrementally by length).

All three produce identical bits; only their cost differs.
"""

import math

import numpy as np

from . import _kernels

_WORD_CHUNK = 1 << 20


def nwords(nbits):
    return (nbits + 63) >> 6


class BitSet:
    """Packed subset of ``[0, nbits)``; ``nbits - 1`` is always a member."""

    __slots__ = ("words", "nbits", "_count", "_runs")

    def __init__(self, words, nbits):
        self.words = words
        self.nbits = nbits
        self._count = None
        self._runs = None

    @classmethod
    def from_elements(cls, elements):
        elements = np.asarray(elements, dtype=np.int64)
        nbits = int(elements[-1]) + 1
        words = np.zeros(nwords(nbits), dtype=np.uint64)
        np.bitwise_or.at(words, elements >> 6, np.uint64(1) << (elements & 63).astype(np.uint64))
        return cls(words, nbits)

    @classmethod
    def interval(cls, length):
        """The bitset of ``[0, length - 1]``."""
        words = np.full(nwords(length), np.uint64(0xFFFFFFFFFFFFFFFF), dtype=np.uint64)
        r = length & 63
        if r:
            words[-1] = (np.uint64(1) << np.uint64(r)) - np.uint64(1)
        return cls(words, length)

    def count(self):
        if self._count is None:
            self._count = int(np.bitwise_count(self.words).sum(dtype=np.int64))
        return self._count

    def to_elements(self):
        out = []
        for i in range(0, self.words.shape[0], _WORD_CHUNK):
            chunk = self.words[i:i + _WORD_CHUNK]
            bits = np.unpackbits(chunk.view(np.uint8), bitorder="little")
            out.append(np.flatnonzero(bits).astype(np.int64) + 64 * i)
        return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)

    def _masks(self):
        w = self.words
        prev_hi = np.zeros_like(w)
        prev_hi[1:] = w[:-1] >> np.uint64(63)
        next_lo = np.zeros_like(w)
        next_lo[:-1] = w[1:] & np.uint64(1)
        starts = w & ~((w << np.uint64(1)) | prev_hi)
        ends = w & ~((w >> np.uint64(1)) | (next_lo << np.uint64(63)))
        return starts, ends

    def run_count(self):
        if self._runs is not None:
            return self._runs[0].shape[0]
        starts, _ = self._masks()
        return int(np.bitwise_count(starts).sum(dtype=np.int64))

    def runs(self):
        """Arrays ``(starts, ends)`` of the maximal runs, ends inclusive."""
        if self._runs is None:
            s, e = self._masks()
            self._runs = (BitSet(s, self.nbits).to_elements(), BitSet(e, self.nbits).to_elements())
        return self._runs

    def __eq__(self, other):
        return (isinstance(other, BitSet) and self.nbits == other.nbits
                and np.array_equal(self.words, other.words))


def _dilation_costs(x, y, k):
    """Estimated cost of the runs strategy using the runs of ``x``."""
    starts, ends = x.runs()
    ny = nwords(y.nbits) + k.loop_overhead
    lengths = np.unique(ends - starts)
    longest = int(lengths[-1]) if lengths.shape[0] else 0
    build = lengths.shape[0] + math.log2(longest + 1)
    return starts.shape[0] * ny + 2 * build * ny


def _sum_pairs(x, y, out, k):
    k.sum_pairs(out, x.to_elements(), y.to_elements())


def _sum_shifts(x, y, out, k):
    k.sum_elements(out, x.to_elements(), y.words)


def _sum_runs(x, y, out, k):
    starts, ends = x.runs()
    lengths = ends - starts
    order = np.argsort(lengths, kind="stable")
    starts, lengths = starts[order], lengths[order]
    longest = int(lengths[-1])
    d = np.zeros(nwords(y.nbits + longest) + 1, dtype=np.uint64)
    d[:y.words.shape[0]] = y.words
    cur = 0
    bounds = np.flatnonzero(np.diff(lengths)) + 1
    for group in np.split(np.arange(lengths.shape[0]), bounds):
        target = int(lengths[group[0]])
        # grow d from Y + [0, cur] to Y + [0, target]
        cover = 1
        need = target - cur + 1
        while cover < need:
            step = min(cover, need - cover)
            tmp = d[:nwords(y.nbits + cur + cover - 1)].copy()
            k.or_shifted(d, tmp, step)
            cover += step
        cur = target
        k.sum_elements(out, starts[group], d[:nwords(y.nbits + cur)])


def minkowski(x, y, k=None):
    """Minkowski sum of two bitsets (both containing 0)."""
    k = k or _kernels.ACTIVE
    nbits = x.nbits + y.nbits - 1
    out = np.zeros(nwords(nbits) + 1, dtype=np.uint64)
    nx, ny = x.count(), y.count()
    options = [
        (nx * ny * k.pair_cost, _sum_pairs, x, y),
        (nx * (nwords(y.nbits) + k.loop_overhead), _sum_shifts, x, y),
        (ny * (nwords(x.nbits) + k.loop_overhead), _sum_shifts, y, x),
    ]
    # runs extraction is itself O(words); only consider it when runs are few
    for a, b in ((x, y), (y, x)):
        if a.run_count() * 4 <= a.count():
            options.append((_dilation_costs(a, b, k), _sum_runs, a, b))
    _, fn, a, b = min(options, key=lambda o: o[0])
    fn(a, b, out, k)
    return BitSet(out[:nwords(nbits)], nbits)


def _cost(x, y, k):
    nx, ny = x.count(), y.count()
    best = min(nx * ny * k.pair_cost,
               min(nx, ny) * (nwords(max(x.nbits, y.nbits)) + k.loop_overhead))
    for a, b in ((x, y), (y, x)):
        r = a.run_count()
        best = min(best, 3 * r * (nwords(b.nbits) + k.loop_overhead))
    return best


def hfold(a, h, k=None):
    """``h``-fold sumset of a bitset containing 0, by binary doubling.

    Each doubling step ``X -> X + X`` is replaced by ``m`` single additions
    of ``A`` when the cost model says that is cheaper (dense ``X`` with
    many runs and a small ``A``); the result is the same set either way.
    """
    k = k or _kernels.ACTIVE
    if h == 0:
        return BitSet.interval(1)
    x, m = a, 1
    for bit in bin(h)[3:]:
        if _cost(x, x, k) <= m * _cost(x, a, k):
            x = minkowski(x, x, k)
        else:
            for _ in range(m):
                x = minkowski(x, a, k)
        m *= 2
        if bit == "1":
            x = minkowski(x, a, k)
            m += 1
    return x
