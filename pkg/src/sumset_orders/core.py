"""Exact finite sets and their sumsets over the integers and over (Z/pZ)^t.

Sets are immutable.  Integer sets hold a sorted ``int64`` array; mod-p sets
hold the sorted mixed-radix indices of their vectors (coordinate 0 is the
most significant digit, so index order is lexicographic vector order).
Sizes are plain Python ints, which never overflow.
"""

from __future__ import annotations

import itertools
import json
from typing import Iterable, Sequence

import numpy as np

from . import _bitset, _config, _kernels
from .errors import BudgetExceeded, DomainError

# Largest element accepted in an IntegerSet; keeps every h-fold sum with
# h <= 2**8 inside int64.
MAX_ELEMENT = 1 << 54

OrderPattern = tuple  # tuple[int, ...] of dense ranks starting at 1


def _frozen(arr):
    arr.setflags(write=False)
    return arr


class IntegerSet:
    """A finite set of nonnegative integers."""

    __slots__ = ("_elements",)

    def __init__(self, elements: Iterable[int] = ()):
        if isinstance(elements, np.ndarray):
            arr = np.unique(elements.astype(np.int64, copy=False))
        else:
            values = sorted(set(int(e) for e in elements))
            if values and values[-1] > MAX_ELEMENT:
                raise DomainError(f"element {values[-1]} exceeds the supported maximum {MAX_ELEMENT}")
            arr = np.array(values, dtype=np.int64)
        if arr.shape[0] and arr[0] < 0:
            raise DomainError("integer sets must have nonnegative elements")
        self._elements = _frozen(arr)

    @classmethod
    def _trusted(cls, arr):
        obj = cls.__new__(cls)
        obj._elements = _frozen(arr)
        return obj

    @classmethod
    def interval(cls, lo: int, hi: int) -> "IntegerSet":
        """``[lo, hi]``, empty when ``hi < lo``."""
        return cls._trusted(np.arange(lo, hi + 1, dtype=np.int64))

    @property
    def elements(self) -> np.ndarray:
        return self._elements

    @property
    def min(self) -> int:
        self._require_nonempty()
        return int(self._elements[0])

    @property
    def max(self) -> int:
        self._require_nonempty()
        return int(self._elements[-1])

    def _require_nonempty(self):
        if self._elements.shape[0] == 0:
            raise DomainError("operation requires a nonempty set")

    def __len__(self):
        return int(self._elements.shape[0])

    def __iter__(self):
        return iter(self._elements.tolist())

    def __contains__(self, x):
        i = np.searchsorted(self._elements, x)
        return bool(i < self._elements.shape[0] and self._elements[i] == x)

    def __eq__(self, other):
        if not isinstance(other, IntegerSet):
            return NotImplemented
        return np.array_equal(self._elements, other._elements)

    def __hash__(self):
        return hash(self._elements.tobytes())

    def __le__(self, other):
        return bool(np.isin(self._elements, other._elements, assume_unique=True).all())

    def __repr__(self):
        if len(self) <= 12:
            return f"IntegerSet({self._elements.tolist()})"
        return f"IntegerSet(<{len(self)} elements in [{self.min}, {self.max}]>)"

    def shift(self, c: int) -> "IntegerSet":
        return IntegerSet._trusted(self._elements + c)

    def is_interval(self) -> bool:
        return len(self) > 0 and self.max - self.min + 1 == len(self)

    def to_json(self):
        return self._elements.tolist()

    def _to_bits(self):
        return _bitset.BitSet.from_elements(self._elements - self._elements[0])

    @classmethod
    def _from_bits(cls, bits, offset):
        return cls._trusted(bits.to_elements() + offset)


class ModpVectorSet:
    """A finite set of length-``t`` vectors over Z/pZ."""

    __slots__ = ("p", "t", "_index")

    def __init__(self, p: int, t: int, vectors: Iterable[Sequence[int]] = ()):
        if p < 2:
            raise DomainError(f"modulus must be at least 2, got {p}")
        self.p, self.t = int(p), int(t)
        idx = set()
        for v in vectors:
            if len(v) != t:
                raise DomainError(f"vector {tuple(v)} does not have length {t}")
            idx.add(self.encode(v))
        self._index = _frozen(np.array(sorted(idx), dtype=np.int64))

    @classmethod
    def from_indices(cls, p, t, indices):
        obj = cls.__new__(cls)
        obj.p, obj.t = int(p), int(t)
        obj._index = _frozen(np.unique(np.asarray(indices, dtype=np.int64)))
        return obj

    def encode(self, v) -> int:
        x = 0
        for c in v:
            x = x * self.p + int(c) % self.p
        return x

    def decode(self, x: int) -> tuple:
        out = []
        for _ in range(self.t):
            x, r = divmod(x, self.p)
            out.append(r)
        return tuple(reversed(out))

    @property
    def indices(self) -> np.ndarray:
        return self._index

    def vectors(self):
        return [self.decode(x) for x in self._index.tolist()]

    def __len__(self):
        return int(self._index.shape[0])

    def __iter__(self):
        return iter(self.vectors())

    def __contains__(self, v):
        x = self.encode(v)
        i = np.searchsorted(self._index, x)
        return bool(i < self._index.shape[0] and self._index[i] == x)

    def __eq__(self, other):
        if not isinstance(other, ModpVectorSet):
            return NotImplemented
        return (self.p, self.t) == (other.p, other.t) and np.array_equal(self._index, other._index)

    def __hash__(self):
        return hash((self.p, self.t, self._index.tobytes()))

    def __repr__(self):
        return f"ModpVectorSet(p={self.p}, t={self.t}, <{len(self)} vectors>)"

    def to_json(self):
        return {"p": self.p, "t": self.t, "elements": [list(v) for v in self.vectors()]}


class PointSet:
    """A finite set of points in Z^m, rows sorted lexicographically."""

    __slots__ = ("m", "_points")

    def __init__(self, m: int, points: Iterable[Sequence[int]] = ()):
        self.m = int(m)
        rows = sorted(set(tuple(int(c) for c in pt) for pt in points))
        for r in rows:
            if len(r) != m:
                raise DomainError(f"point {r} does not have dimension {m}")
        self._points = _frozen(np.array(rows, dtype=np.int64).reshape(len(rows), m))

    @property
    def points(self) -> np.ndarray:
        return self._points

    def __len__(self):
        return int(self._points.shape[0])

    def __iter__(self):
        return (tuple(r) for r in self._points.tolist())

    def __eq__(self, other):
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.m == other.m and np.array_equal(self._points, other._points)

    def __hash__(self):
        return hash((self.m, self._points.tobytes()))

    def __repr__(self):
        return f"PointSet(m={self.m}, <{len(self)} points>)"


# --------------------------------------------------------------------------
# sums
# --------------------------------------------------------------------------

def _check_bits(what, nbits, budget):
    budget = _config.budget_bits() if budget is None else budget
    if nbits > budget:
        raise BudgetExceeded(what, nbits, budget)


def minkowski_sum(a: IntegerSet, b: IntegerSet, *, budget=None, kernels=None) -> IntegerSet:
    """``{x + y : x in a, y in b}``."""
    if not len(a) or not len(b):
        raise DomainError("Minkowski sum of an empty set")
    _check_bits("minkowski_sum", (a.max - a.min) + (b.max - b.min) + 1, budget)
    bits = _bitset.minkowski(a._to_bits(), b._to_bits(), kernels)
    return IntegerSet._from_bits(bits, a.min + b.min)


def hfold_int(a: IntegerSet, h: int, *, budget=None, kernels=None) -> IntegerSet:
    """The h-fold sumset ``hA``, with ``0A = {0}``."""
    if h < 0:
        raise DomainError(f"fold must be nonnegative, got {h}")
    if not len(a):
        raise DomainError("h-fold sumset of an empty set")
    if h == 0:
        return IntegerSet([0])
    if h == 1:
        return a
    _check_bits("hfold_int", h * (a.max - a.min) + 1, budget)
    bits = _bitset.hfold(a._to_bits(), h, kernels)
    return IntegerSet._from_bits(bits, h * a.min)


def hfold_size(a: IntegerSet, h: int, **kw) -> int:
    return len(hfold_int(a, h, **kw))


def dilate(a: IntegerSet, lam: int) -> IntegerSet:
    """``lam . A = {lam * x : x in A}`` (not the lam-fold sumset)."""
    if lam < 1:
        raise DomainError(f"dilation factor must be positive, got {lam}")
    if len(a) and a.max * lam > MAX_ELEMENT:
        raise DomainError("dilation exceeds the supported element range")
    return IntegerSet._trusted(a.elements * lam)


def _modp_sum(x: ModpVectorSet, y: ModpVectorSet, kernels):
    if (x.p, x.t) != (y.p, y.t):
        raise DomainError(f"cannot add sets in (Z/{x.p})^{x.t} and (Z/{y.p})^{y.t}")
    k = kernels or _kernels.ACTIVE
    q = x.p ** x.t
    if len(x) + len(y) > q:
        # pigeonhole: g - Y meets X for every g
        return ModpVectorSet.from_indices(x.p, x.t, np.arange(q))
    out = np.zeros(q, dtype=np.uint8)
    k.modp_sum_pairs(out, x.indices, y.indices, x.p, x.t)
    return ModpVectorSet.from_indices(x.p, x.t, np.flatnonzero(out))


def minkowski_sum_modp(x: ModpVectorSet, y: ModpVectorSet, *, budget=None, kernels=None):
    _check_bits("minkowski_sum_modp", x.p ** x.t, budget)
    if not len(x) or not len(y):
        raise DomainError("Minkowski sum of an empty set")
    return _modp_sum(x, y, kernels)


def hfold_modp(a: ModpVectorSet, h: int, *, budget=None, kernels=None) -> ModpVectorSet:
    """h-fold sumset in (Z/pZ)^t, by binary doubling over the flat index space."""
    if h < 0:
        raise DomainError(f"fold must be nonnegative, got {h}")
    if not len(a):
        raise DomainError("h-fold sumset of an empty set")
    if h == 0:
        return ModpVectorSet.from_indices(a.p, a.t, [0])
    _check_bits("hfold_modp", a.p ** a.t, budget)
    x, m = a, 1
    for bit in bin(h)[3:]:
        # doubling costs |X|^2 pair sums versus m * |X| * |A| for stepping
        if len(x) <= m * len(a):
            x = _modp_sum(x, x, kernels)
        else:
            for _ in range(m):
                x = _modp_sum(x, a, kernels)
        m *= 2
        if bit == "1":
            x = _modp_sum(x, a, kernels)
            m += 1
    return x


def as_points(a) -> PointSet:
    if isinstance(a, PointSet):
        return a
    if isinstance(a, IntegerSet):
        return PointSet(1, ((x,) for x in a))
    raise DomainError(f"{type(a).__name__} is not an integer-coordinate set")


def cartesian_product(a, b):
    """``A x B``; mod-p sets stay mod-p, integer sets become point sets."""
    if isinstance(a, ModpVectorSet) or isinstance(b, ModpVectorSet):
        if not (isinstance(a, ModpVectorSet) and isinstance(b, ModpVectorSet)):
            raise DomainError("cannot take a product of a mod-p set with an integer set")
        if a.p != b.p:
            raise DomainError(f"moduli differ: {a.p} vs {b.p}")
        idx = np.add.outer(a.indices * (b.p ** b.t), b.indices).ravel()
        return ModpVectorSet.from_indices(a.p, a.t + b.t, idx)
    pa, pb = as_points(a), as_points(b)
    rows = [r + s for r in pa for s in pb]
    return PointSet(pa.m + pb.m, rows)


def hfold_points(a: PointSet, h: int, *, budget=None) -> PointSet:
    """h-fold sumset in Z^m via a carry-free base expansion into Z."""
    if not len(a):
        raise DomainError("h-fold sumset of an empty set")
    if h == 0:
        return PointSet(a.m, [(0,) * a.m])
    lo = a.points.min(axis=0)
    shifted = a.points - lo
    base = h * int(shifted.max(initial=0)) + 1
    weights = [base ** i for i in range(a.m)]
    flat = IntegerSet(int(sum(int(c) * w for c, w in zip(row, weights))) for row in shifted.tolist())
    s = hfold_int(flat, h, budget=budget)
    out = []
    for x in s:
        row = []
        for _ in range(a.m):
            x, r = divmod(x, base)
            row.append(r)
        out.append(tuple(c + h * int(l) for c, l in zip(row, lo)))
    return PointSet(a.m, out)


# --------------------------------------------------------------------------
# orders
# --------------------------------------------------------------------------

def relative_order(values: Sequence[int]) -> OrderPattern:
    """Dense ranks: equal values share a rank, ranks are 1..m."""
    if not len(values):
        raise DomainError("relative order of an empty list")
    ranks = {v: i + 1 for i, v in enumerate(sorted(set(values)))}
    return tuple(ranks[v] for v in values)


def is_permutation(pattern: Sequence[int]) -> bool:
    return sorted(pattern) == list(range(1, len(pattern) + 1))


def matches_pattern(values: Sequence[int], tau: Sequence[int]) -> bool:
    if len(values) != len(tau):
        raise DomainError(f"length mismatch: {len(values)} values, pattern of length {len(tau)}")
    return relative_order(values) == relative_order(tau)


def parse_pattern(text: str) -> OrderPattern:
    """``"3,1,2"`` -> ``(3, 1, 2)``."""
    try:
        return tuple(int(tok) for tok in text.replace(" ", "").split(",") if tok)
    except ValueError:
        raise DomainError(f"not a comma-separated integer tuple: {text!r}") from None


def all_permutations(n: int):
    return [tuple(p) for p in itertools.permutations(range(1, n + 1))]


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------

def set_to_json(s):
    if isinstance(s, (IntegerSet, ModpVectorSet)):
        return s.to_json()
    raise DomainError(f"cannot serialize {type(s).__name__}")


def set_from_json(obj):
    if isinstance(obj, list):
        if any(not isinstance(x, int) or isinstance(x, bool) for x in obj):
            raise DomainError("integer set must be a JSON array of integers")
        if obj != sorted(set(obj)):
            raise DomainError("integer set must be strictly increasing")
        return IntegerSet(obj)
    if isinstance(obj, dict) and {"p", "t", "elements"} <= obj.keys():
        return ModpVectorSet(obj["p"], obj["t"], obj["elements"])
    raise DomainError("unrecognized set serialization")


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
