"""Independent oracles, certification of prescribed orders, and growth probes.

The oracles deliberately share no code with the bitset kernels: they add
one copy of ``A`` at a time into a plain boolean marker array.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _config
from .assembly import Certificate
from .core import (IntegerSet, ModpVectorSet, hfold_int, hfold_modp, minkowski_sum,
                   minkowski_sum_modp, relative_order)
from .errors import BudgetExceeded, DomainError


def _oracle_cost(a, h):
    span = (a.max - a.min) if isinstance(a, IntegerSet) else a.p ** a.t
    return (h - 1) * len(a) * (h * span + 1)


def oracle_hfold(a: IntegerSet, h: int, *, budget=None) -> IntegerSet:
    """``hA`` by ``h - 1`` single additions of ``A``."""
    if h < 0:
        raise DomainError(f"fold must be nonnegative, got {h}")
    if not len(a):
        raise DomainError("h-fold sumset of an empty set")
    if h == 0:
        return IntegerSet([0])
    budget = _config.budget_bits() if budget is None else budget
    cost = _oracle_cost(a, h)
    if cost > budget:
        raise BudgetExceeded(f"oracle_hfold(h={h})", cost, budget)
    base = a.elements - a.min
    acc = base
    for i in range(2, h + 1):
        mark = np.zeros(i * int(base[-1]) + 1, dtype=bool)
        for x in base.tolist():
            mark[acc + x] = True
        acc = np.flatnonzero(mark)
    return IntegerSet(acc + h * a.min)


def oracle_hfold_modp(a: ModpVectorSet, h: int, *, budget=None) -> ModpVectorSet:
    """``hA`` in ``(Z/pZ)^t`` by single additions on digit vectors."""
    if h < 0:
        raise DomainError(f"fold must be nonnegative, got {h}")
    if not len(a):
        raise DomainError("h-fold sumset of an empty set")
    if h == 0:
        return ModpVectorSet.from_indices(a.p, a.t, [0])
    budget = _config.budget_bits() if budget is None else budget
    cost = _oracle_cost(a, h)
    if cost > budget:
        raise BudgetExceeded(f"oracle_hfold_modp(h={h})", cost, budget)
    p, t = a.p, a.t
    weights = p ** np.arange(t - 1, -1, -1, dtype=np.int64)
    digits = a.indices[:, None] // weights % p
    acc = digits
    for _ in range(h - 1):
        mark = np.zeros(p ** t, dtype=bool)
        for row in digits:
            mark[((acc + row) % p) @ weights] = True
        acc = np.flatnonzero(mark)[:, None] // weights % p
    return ModpVectorSet.from_indices(p, t, acc @ weights)


# --------------------------------------------------------------------------
# certification
# --------------------------------------------------------------------------

def _ambient(sets):
    first = sets[0]
    for s in sets:
        if isinstance(first, IntegerSet) and isinstance(s, IntegerSet):
            continue
        if (isinstance(first, ModpVectorSet) and isinstance(s, ModpVectorSet)
                and (s.p, s.t) == (first.p, first.t)):
            continue
        raise DomainError("all sets must live in a common ambient group")
    return "int" if isinstance(first, IntegerSet) else {"p": first.p, "t": first.t}


def _fold(a, h, kernel_budget, oracle_budget):
    if isinstance(a, IntegerSet):
        fast, slow = hfold_int, oracle_hfold
    else:
        fast, slow = hfold_modp, oracle_hfold_modp
    got = fast(a, h, budget=kernel_budget)
    if _oracle_cost(a, h) > oracle_budget:
        return len(got), None
    return len(got), got == slow(a, h, budget=oracle_budget)


def certify(sets, expectations, *, threads=1, budget=None, oracle_budget=None) -> Certificate:
    """Compute every ``|h A_k|`` exactly and compare with the expected orders.

    ``expectations`` is a list of ``(h, pattern)``.  Where the naive oracle
    fits in ``oracle_budget`` it recomputes each sumset and must agree with
    the kernel as a set, not only in size.
    """
    sets = list(sets)
    if not sets:
        raise DomainError("nothing to certify")
    ambient = _ambient(sets)
    n = len(sets)
    expected = {}
    for h, pattern in expectations:
        pattern = tuple(int(x) for x in pattern)
        if len(pattern) != n:
            raise DomainError(f"pattern {list(pattern)} at h={h} has length {len(pattern)}, not {n}")
        if int(h) < 1:
            raise DomainError(f"fold must be positive, got {h}")
        expected[int(h)] = pattern
    budget = _config.budget_bits() if budget is None else budget
    oracle_budget = min(budget, 1 << 26) if oracle_budget is None else oracle_budget
    jobs = [(h, k) for h in sorted(expected) for k in range(n)]
    with ThreadPoolExecutor(max_workers=max(1, int(threads))) as pool:
        results = list(pool.map(lambda job: _fold(sets[job[1]], job[0], budget, oracle_budget), jobs))
    sizes = {h: [0] * n for h in expected}
    oracled = {h: True for h in expected}
    checks = []
    for (h, k), (size, agree) in zip(jobs, results):
        sizes[h][k] = size
        oracled[h] &= agree is not None
        if agree is False:
            checks.append((f"oracle agreement h={h} k={k + 1}", False, "kernel and oracle sumsets differ"))
    methods = {h: "kernel+oracle" if oracled[h] else "kernel" for h in expected}
    return Certificate("certify", n, expected, sizes, methods, sets=sets,
                       generator={"ambient": ambient}, checks=checks)


# --------------------------------------------------------------------------
# growth probes
# --------------------------------------------------------------------------

def _differences(values, order):
    out = list(values)
    for _ in range(order):
        out = [b - a for a, b in zip(out, out[1:])]
    return out


@dataclass
class SizeSequence:
    """``|hA|`` for ``h = 1..h_max`` plus the detected eventual polynomial.

    ``stabilization_index`` is the least ``h0`` such that the degree
    ``degree`` polynomial through ``h0 .. h0 + degree`` reproduces every
    later size, confirmed on at least ``confirm`` further folds.
    """

    description: str
    sizes: list
    degree: int = 1
    confirm: int = 3
    stabilization_index: int | None = field(default=None)

    def __post_init__(self):
        if self.stabilization_index is None:
            self.stabilization_index = self._detect()

    @property
    def h_max(self):
        return len(self.sizes)

    def _detect(self):
        diffs = _differences(self.sizes, self.degree + 1)
        # diffs[i] == 0 means sizes at h = i+1 .. i+degree+2 fit one polynomial
        h0 = len(diffs) + 1
        while h0 > 1 and diffs[h0 - 2] == 0:
            h0 -= 1
        if self.h_max - (h0 + self.degree) < self.confirm:
            return None
        return h0

    @property
    def slope(self):
        """Leading finite difference of the eventual polynomial."""
        if self.stabilization_index is None:
            return None
        return _differences(self.sizes[self.stabilization_index - 1:], self.degree)[0]

    def to_json(self):
        return {
            "set": self.description,
            "h_max": self.h_max,
            "sizes": [str(s) for s in self.sizes],
            "degree": self.degree,
            "stabilization_index": self.stabilization_index,
            "slope": None if self.slope is None else str(self.slope),
        }

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["h", "size"])
        for h, s in enumerate(self.sizes, 1):
            w.writerow([h, s])
        return buf.getvalue()


def _describe(a):
    if isinstance(a, IntegerSet):
        els = a.elements.tolist()
        return str(els) if len(els) <= 16 else f"{len(els)} integers in [{a.min}, {a.max}]"
    return f"{len(a)} vectors in (Z/{a.p})^{a.t}"


def khovanskii_probe(a, h_max, *, confirm=3, budget=None) -> SizeSequence:
    """Sizes of ``hA`` for ``h <= h_max`` by successive addition, and their
    eventual polynomial (degree 1 over the integers, 0 in a finite group)."""
    if h_max < 1:
        raise DomainError(f"h_max must be positive, got {h_max}")
    if isinstance(a, IntegerSet):
        budget = _config.budget_bits() if budget is None else budget
        bits = h_max * (a.max - a.min) + 1
        if bits > budget:
            raise BudgetExceeded(f"khovanskii_probe(h_max={h_max})", bits, budget)
        step, degree = minkowski_sum, 0 if len(a) == 1 else 1
    elif isinstance(a, ModpVectorSet):
        step, degree = minkowski_sum_modp, 0
    else:
        raise DomainError(f"cannot probe {type(a).__name__}")
    sizes = []
    x = a
    for h in range(1, h_max + 1):
        if h > 1:
            x = step(x, a, budget=budget)
        sizes.append(len(x))
    return SizeSequence(_describe(a), sizes, degree=degree, confirm=confirm)


def order_sequence(sets, h_values, *, budget=None):
    """Relative order of ``|h A_1|, ..., |h A_n|`` for each ``h``."""
    out = {}
    for h in h_values:
        fold = hfold_int if isinstance(sets[0], IntegerSet) else hfold_modp
        out[h] = relative_order([len(fold(a, h, budget=budget)) for a in sets])
    return out
