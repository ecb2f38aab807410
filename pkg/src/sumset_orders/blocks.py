"""Building-block families whose size chains are strict at exactly one fold.

A family for fold ``h`` is ``n`` sets ``B_1, ..., B_n`` with

  (1) ``|hB_1| < ... < |hB_n|``, and
  (2) ``|h'B_1| = ... = |h'B_n|`` for every ``h' > h``.

Three kinds are provided.  ``X`` sets live in (Z/pZ)^t, ``Y`` and ``Z`` sets
in the nonnegative integers.  ``Z`` families additionally have equal sizes
at every fold below ``h`` and saturate to ``[0, jw]`` above it, which is
what the tie-aware construction needs.

A family member is a tuple of factors; the member's set is the Cartesian
product of its factors.  ``X`` and ``Y`` members have one factor.  ``Z``
members are products of two base sets (see :func:`choose_Z_family`).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import sympy

from . import _config
from .core import (IntegerSet, ModpVectorSet, hfold_int, hfold_modp)
from .errors import BudgetExceeded, DomainError


@dataclass(frozen=True)
class XBlockParams:
    s: int
    t: int
    p: int
    kind = "X"

    def __post_init__(self):
        if not 0 <= self.s <= self.t:
            raise DomainError(f"X(s,t) needs 0 <= s <= t, got s={self.s}, t={self.t}")
        if not sympy.isprime(self.p):
            raise DomainError(f"p={self.p} is not prime")

    @property
    def dim(self):
        return self.t

    def to_json(self):
        return {"s": self.s, "t": self.t, "p": self.p}


@dataclass(frozen=True)
class YBlockParams:
    u: int
    v: int
    kind = "Y"
    dim = 1

    def __post_init__(self):
        if not 0 <= self.u <= self.v:
            raise DomainError(f"Y(u,v) needs 0 <= u <= v, got u={self.u}, v={self.v}")

    def to_json(self):
        return {"u": self.u, "v": self.v}


@dataclass(frozen=True)
class ZBlockParams:
    u: int
    v: int
    w: int
    kind = "Z"
    dim = 1

    def __post_init__(self):
        if not 0 <= self.u <= self.v <= self.w:
            raise DomainError(f"Z(u,v,w) needs 0 <= u <= v <= w, got {self.u}, {self.v}, {self.w}")

    def to_json(self):
        return {"u": self.u, "v": self.v, "w": self.w}


_PARAM_TYPES = {"X": XBlockParams, "Y": YBlockParams, "Z": ZBlockParams}


@dataclass(frozen=True)
class BlockFamily:
    h: int
    kind: str
    params: tuple  # n members, each a tuple of factor params
    ambient: object = "int"  # "int" or {"p": prime}

    @property
    def n(self):
        return len(self.params)

    @property
    def dim(self):
        """Coordinates per member (shared by all members)."""
        return sum(f.dim for f in self.params[0])

    def sizes(self, j):
        """Exact ``|jB_i|`` for every member, from closed forms."""
        return [math.prod(block_size(j, f) for f in member) for member in self.params]

    def to_json(self):
        return {
            "h": self.h,
            "kind": self.kind,
            "params": [[f.to_json() for f in member] for member in self.params],
            "ambient": self.ambient,
        }

    @classmethod
    def from_json(cls, obj):
        kind = obj["kind"]
        if kind not in _PARAM_TYPES:
            raise DomainError(f"unknown block kind {kind!r}")
        typ = _PARAM_TYPES[kind]
        members = tuple(tuple(typ(**f) for f in member) for member in obj["params"])
        ambient = obj.get("ambient", "int")
        return cls(int(obj["h"]), kind, members, ambient)


# --------------------------------------------------------------------------
# X(s, t): vectors with at most s nonzero coordinates
# --------------------------------------------------------------------------

def x_size(s, t, p):
    return sum(math.comb(t, i) * (p - 1) ** i for i in range(min(s, t) + 1))


def materialize_X(params: XBlockParams, *, budget=None) -> ModpVectorSet:
    s, t, p = params.s, params.t, params.p
    budget = _config.budget_bits() if budget is None else budget
    if p ** t > budget:
        raise BudgetExceeded(f"materialize_X(s={s}, t={t}, p={p})", p ** t, budget)
    weights = np.array([p ** (t - 1 - c) for c in range(t)], dtype=np.int64)
    idx = [0]
    for i in range(1, s + 1):
        for pos in itertools.combinations(range(t), i):
            w = weights[list(pos)]
            for vals in itertools.product(range(1, p), repeat=i):
                idx.append(int(np.dot(w, vals)))
    return ModpVectorSet.from_indices(p, t, idx)


def size_X_hfold(j, params: XBlockParams) -> int:
    """``|jX(s,t)| = |X(min(js, t), t)|``."""
    if j < 0:
        raise DomainError(f"fold must be nonnegative, got {j}")
    return x_size(min(j * params.s, params.t), params.t, params.p)


def choose_X_family(n, h, p=2) -> BlockFamily:
    """``t = h(h+1)(n-1)``, ``s_i = h(n-1) + i - 1``; ``t = h(h+1)``, ``s = h`` for n = 1."""
    if n < 1 or h < 1:
        raise DomainError("choose_X_family needs n >= 1 and h >= 1")
    if n == 1:
        t = h * (h + 1)
        s_values = [h]
    else:
        t = h * (h + 1) * (n - 1)
        s_values = [h * (n - 1) + i for i in range(n)]
    assert t <= (h + 1) * s_values[0] and h * s_values[-1] <= t
    members = tuple((XBlockParams(s, t, p),) for s in s_values)
    return BlockFamily(h, "X", members, {"p": p})


# --------------------------------------------------------------------------
# Y(u, v) = [0, u] u [v - u, v]
# --------------------------------------------------------------------------

def merge_intervals(intervals):
    """Union of closed integer intervals as sorted disjoint ``(lo, hi)`` pairs.

    Intervals that touch (``hi + 1 == lo``) are merged.
    """
    out = []
    for lo, hi in sorted(intervals):
        if out and lo <= out[-1][1] + 1:
            if hi > out[-1][1]:
                out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return out


def union_size(intervals):
    return sum(hi - lo + 1 for lo, hi in merge_intervals(intervals))


def materialize_Y(params: YBlockParams) -> IntegerSet:
    u, v = params.u, params.v
    return IntegerSet(itertools.chain(range(0, u + 1), range(v - u, v + 1)))


def y_hfold_intervals(j, params: YBlockParams):
    u, v = params.u, params.v
    return merge_intervals((l * (v - u), l * (v - u) + j * u) for l in range(j + 1))


def size_Y_hfold(j, params: YBlockParams) -> int:
    if j < 0:
        raise DomainError(f"fold must be nonnegative, got {j}")
    return sum(hi - lo + 1 for lo, hi in y_hfold_intervals(j, params))


def _y_family_ok(v, us, h):
    return (v - 1) <= (h + 2) * us[0] and (h + 1) * us[-1] <= v and us[0] >= 1


def choose_Y_family(n, h) -> BlockFamily:
    """``u_i = c + i - 1``, ``v = (h+1)(c+n-1)``, smallest ``c >= 1`` with
    ``(v-1)/(h+2) <= u_1``."""
    if n < 1 or h < 1:
        raise DomainError("choose_Y_family needs n >= 1 and h >= 1")
    c = max(1, (h + 1) * (n - 1) - 1)
    while True:
        us = [c + i for i in range(n)]
        v = (h + 1) * (c + n - 1)
        if _y_family_ok(v, us, h):
            break
        c += 1
    members = tuple((YBlockParams(u, v),) for u in us)
    return BlockFamily(h, "Y", members, "int")


# --------------------------------------------------------------------------
# Z(u, v, w) = Y(u, v) + {0, w - v}
# --------------------------------------------------------------------------

def _check_Z_layout(params: ZBlockParams):
    u, v, w = params.u, params.v, params.w
    # inner arms may touch (v = 2u); the two copies of Y(u, v) may not meet
    if v < 2 * u or w <= 2 * v:
        raise DomainError(f"Z({u},{v},{w}) outside the supported regime v >= 2u, w > 2v")


def materialize_Z(params: ZBlockParams) -> IntegerSet:
    _check_Z_layout(params)
    u, v, w = params.u, params.v, params.w
    return IntegerSet(itertools.chain(range(0, u + 1), range(v - u, v + 1),
                                      range(w - v, w - v + u + 1), range(w - u, w + 1)))


def z_hfold_intervals(j, params: ZBlockParams):
    """``jZ = jY(u, v) + {0, w-v, ..., j(w-v)}`` as merged intervals."""
    y = y_hfold_intervals(j, YBlockParams(params.u, params.v))
    step = params.w - params.v
    return merge_intervals((lo + i * step, hi + i * step) for i in range(j + 1) for lo, hi in y)


def size_Z_hfold(j, params: ZBlockParams) -> int:
    if j < 0:
        raise DomainError(f"fold must be nonnegative, got {j}")
    return sum(hi - lo + 1 for lo, hi in z_hfold_intervals(j, params))


def z_arm_range(h, w):
    """Arm lengths ``u`` for which the pair ``Z(u, (h+1)u, w)``, ``Z(u, (h+1)u+1, w)``
    is a valid fold-``h`` pair: ``(h+1)^2 u + h + 2 <= w <= (h+1)(h+2) u + 1``."""
    lo = max(1, -(-(w - 1) // ((h + 1) * (h + 2))))
    hi = (w - h - 2) // ((h + 1) ** 2)
    return range(lo, hi + 1)


def z_total_dims(n, H):
    return H * max(1, n - 1)


def _w_inequality(n, H, w):
    b = w * H + 1
    big = b ** z_total_dims(n, H)
    # (1 + 1/H)(b^D - 1) > b^D + n, cleared of the fraction
    return (H + 1) * (big - 1) > H * (big + n)


def choose_w_extension(n, H) -> int:
    """Smallest common outer diameter ``w`` serving every fold ``1..H``."""
    if n < 1 or H < 1:
        raise DomainError("choose_w_extension needs n >= 1 and H >= 1")
    w = 1
    while not (all(len(z_arm_range(h, w)) for h in range(1, H + 1)) and _w_inequality(n, H, w)):
        w += 1
    return w


def choose_Z_family(n, h, H, w=None) -> BlockFamily:
    """A fold-``h`` Z family sharing the outer diameter ``w`` with folds ``1..H``.

    Within a window of ``v`` values with ``u`` and ``w`` fixed, ``|hZ(u,v,w)|``
    takes at most three distinct values, so a strict chain of ``n`` single
    Z sets does not exist in general.  Instead a two-set base pair
    ``Z_lo = Z(u, (h+1)u, w)`` (its h-fold arms overlap) and
    ``Z_hi = Z(u, (h+1)u + 1, w)`` is built, and member ``i`` is
    ``Z_lo^(n-i) x Z_hi^(i-1)``; sizes at folds other than ``h`` agree
    factor by factor, and at fold ``h`` they increase with ``i``.
    """
    if not 1 <= h <= H:
        raise DomainError(f"need 1 <= h <= H, got h={h}, H={H}")
    if w is None:
        w = choose_w_extension(n, H)
    arms = z_arm_range(h, w)
    if not len(arms):
        raise DomainError(f"no arm length u serves fold {h} with w={w}")
    u = arms[0]
    lo = ZBlockParams(u, (h + 1) * u, w)
    hi = ZBlockParams(u, (h + 1) * u + 1, w)
    if n == 1:
        members = ((hi,),)
    else:
        members = tuple((lo,) * (n - i) + (hi,) * (i - 1) for i in range(1, n + 1))
    return BlockFamily(h, "Z", members, "int")


# --------------------------------------------------------------------------
# generic dispatch
# --------------------------------------------------------------------------

def block_size(j, params) -> int:
    if isinstance(params, XBlockParams):
        return size_X_hfold(j, params)
    if isinstance(params, YBlockParams):
        return size_Y_hfold(j, params)
    if isinstance(params, ZBlockParams):
        return size_Z_hfold(j, params)
    raise DomainError(f"unknown block parameters {params!r}")


def materialize(params, *, budget=None):
    if isinstance(params, XBlockParams):
        return materialize_X(params, budget=budget)
    if isinstance(params, YBlockParams):
        return materialize_Y(params)
    if isinstance(params, ZBlockParams):
        return materialize_Z(params)
    raise DomainError(f"unknown block parameters {params!r}")


def block_max(params) -> int:
    """Largest element (integer blocks only)."""
    if isinstance(params, YBlockParams):
        return params.v
    if isinstance(params, ZBlockParams):
        return params.w
    raise DomainError("only integer blocks have a maximum")


def brute_block_size(j, params, *, budget=None) -> int:
    s = materialize(params, budget=budget)
    if isinstance(s, ModpVectorSet):
        return len(hfold_modp(s, j, budget=budget))
    return len(hfold_int(s, j, budget=budget))


# --------------------------------------------------------------------------
# verification
# --------------------------------------------------------------------------

@dataclass
class Violation:
    condition: str
    fold: int
    detail: str

    def to_json(self):
        return {"condition": self.condition, "fold": self.fold, "detail": self.detail}


@dataclass
class FamilyReport:
    h: int
    kind: str
    method: str
    sizes: dict = field(default_factory=dict)  # fold -> list of sizes
    violations: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.violations

    def to_json(self):
        return {
            "h": self.h,
            "kind": self.kind,
            "method": self.method,
            "passed": self.passed,
            "sizes": {str(j): [str(x) for x in s] for j, s in sorted(self.sizes.items())},
            "violations": [v.to_json() for v in self.violations],
        }


def verify_block_family(family: BlockFamily, H: int, *, method="closed-form", budget=None) -> FamilyReport:
    """Check conditions (1) and (2) on folds ``1..max(H, h+1)``.

    Z families are also checked for equal sizes below ``h`` and for
    ``jB_i = [0, jw]^dims`` above it.  ``method="brute-force"`` sizes every
    factor by materializing it and running the sumset kernels.
    """
    h = family.h
    report = FamilyReport(h, family.kind, method)
    top = max(H, h + 1)
    if method == "closed-form":
        size_of = block_size
    elif method == "brute-force":
        cache = {}

        def size_of(j, f):
            if (j, f) not in cache:
                cache[(j, f)] = brute_block_size(j, f, budget=budget)
            return cache[(j, f)]
    else:
        raise DomainError(f"unknown verification method {method!r}")

    for j in range(1, top + 1):
        report.sizes[j] = [math.prod(size_of(j, f) for f in m) for m in family.params]

    at_h = report.sizes[h]
    for i in range(len(at_h) - 1):
        if not at_h[i] < at_h[i + 1]:
            report.violations.append(Violation(
                "strict-chain", h, f"|hB_{i + 1}| = {at_h[i]} is not < |hB_{i + 2}| = {at_h[i + 1]}"))
    for j in range(h + 1, top + 1):
        if len(set(report.sizes[j])) > 1:
            report.violations.append(Violation("equal-above", j, f"sizes differ: {report.sizes[j]}"))
    if family.kind == "Z":
        for j in range(1, h):
            if len(set(report.sizes[j])) > 1:
                report.violations.append(Violation("equal-below", j, f"sizes differ: {report.sizes[j]}"))
        for j in range(h + 1, top + 1):
            for i, member in enumerate(family.params):
                for f in member:
                    if method == "brute-force":
                        full = hfold_int(materialize_Z(f), j, budget=budget).is_interval()
                    else:
                        full = z_hfold_intervals(j, f) == [(0, j * f.w)]
                    if not full:
                        report.violations.append(Violation(
                            "saturated-above", j, f"jB_{i + 1} is not the interval [0, {j * f.w}]"))
                        break
    return report
