"""Unions of dilated intervals at well-separated scales.

A set ``A = U_i M^{a_i} . [0, M]`` grows under ``h = M^g``-fold addition
like ``M^E`` with ``E`` computed from how the scales ``a_i`` clump at gap
width ``g``.  Choosing several widths ``g_1 < ... < g_R`` and scale rows
per set lets the exponents (and so the sumset sizes) take any prescribed
relative order at each width.

The exponent calculus is exact integer arithmetic: the canonical schedule
``g_r = (10n)^(10r)`` has hundreds of digits already for ``R = 3``, so
nothing here is ever materialized for it.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import _config
from .assembly import Certificate
from .core import IntegerSet, dilate, hfold_int, minkowski_sum, relative_order
from .errors import BudgetExceeded, DomainError, SumsetError


# --------------------------------------------------------------------------
# gap classes and exponents
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GapClass:
    first: int
    last: int
    c_min: int
    c_max: int

    @property
    def width(self):
        return self.c_max - self.c_min


@dataclass(frozen=True)
class GapPartition:
    gamma: int
    classes: tuple

    def __len__(self):
        return len(self.classes)

    def to_json(self):
        return {
            "gamma": str(self.gamma),
            "classes": [[c.first, c.last, str(c.c_min), str(c.c_max)] for c in self.classes],
        }


def _check_increasing(alpha):
    if not alpha:
        raise DomainError("scale row is empty")
    if any(b <= a for a, b in zip(alpha, alpha[1:])):
        raise DomainError(f"scale row must be strictly increasing: {list(alpha)}")


def gap_classes(alpha, gamma) -> GapPartition:
    """Clump an increasing row: a new class starts at each gap ``>= gamma + 2``.

    A consecutive gap of exactly ``gamma`` or ``gamma + 1`` is rejected.
    """
    alpha = [int(a) for a in alpha]
    gamma = int(gamma)
    if gamma < 1:
        raise DomainError(f"gap width must be >= 1, got {gamma}")
    _check_increasing(alpha)
    classes = []
    start = 0
    for i in range(1, len(alpha)):
        gap = alpha[i] - alpha[i - 1]
        if gap in (gamma, gamma + 1):
            raise DomainError(
                f"gap dichotomy violated: alpha[{i}] - alpha[{i - 1}] = {gap} "
                f"is neither <= {gamma - 1} nor >= {gamma + 2}")
        if gap >= gamma + 2:
            classes.append(GapClass(start, i - 1, alpha[start], alpha[i - 1]))
            start = i
    classes.append(GapClass(start, len(alpha) - 1, alpha[start], alpha[-1]))
    return GapPartition(gamma, tuple(classes))


def exponent_E(alpha, gamma) -> int:
    """``sum over classes C of (C_max - C_min + gamma + 1)``."""
    part = gap_classes(alpha, gamma)
    return sum(c.width + part.gamma + 1 for c in part.classes)


# --------------------------------------------------------------------------
# scale systems
# --------------------------------------------------------------------------

def _pairwise_violation(row, gamma):
    members = set(row)
    for a in row:
        for g in (gamma, gamma + 1):
            if a + g in members:
                return a, a + g
    return None


@dataclass(frozen=True)
class ScaleSystem:
    """Scale rows ``alpha[k]`` (one per set) and widths ``gamma[r]``."""

    alpha: tuple
    gamma: tuple

    def __post_init__(self):
        alpha = tuple(tuple(int(a) for a in row) for row in self.alpha)
        gamma = tuple(int(g) for g in self.gamma)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "gamma", gamma)
        if not alpha or not gamma:
            raise DomainError("scale system needs at least one row and one width")
        d = len(alpha[0]) - 1
        for k, row in enumerate(alpha):
            if len(row) != d + 1:
                raise DomainError("all scale rows must have the same length")
            _check_increasing(row)
            if row[0] != 0:
                raise DomainError(f"row {k + 1} must start at 0")
        if gamma[0] < 1 or any(b <= a for a, b in zip(gamma, gamma[1:])):
            raise DomainError(f"widths must be positive and strictly increasing: {list(gamma)}")
        for r, g in enumerate(gamma):
            for k, row in enumerate(alpha):
                bad = _pairwise_violation(row, g)
                if bad:
                    raise DomainError(
                        f"gap dichotomy violated in row {k + 1} at width gamma_{r + 1} = {g}: "
                        f"scales {bad[0]} and {bad[1]} differ by {bad[1] - bad[0]}")

    @property
    def n(self):
        return len(self.alpha)

    @property
    def R(self):
        return len(self.gamma)

    @property
    def d(self):
        return len(self.alpha[0]) - 1

    def partition(self, r, k) -> GapPartition:
        """Classes of row ``k`` at width ``gamma_r`` (both 1-based)."""
        return gap_classes(self.alpha[k - 1], self.gamma[r - 1])

    def E(self, r, k) -> int:
        return exponent_E(self.alpha[k - 1], self.gamma[r - 1])

    def exponents(self, r) -> list:
        return [self.E(r, k) for k in range(1, self.n + 1)]

    def to_json(self):
        return {
            "n": self.n,
            "R": self.R,
            "d": self.d,
            "alpha": [[str(a) for a in row] for row in self.alpha],
            "gamma": [str(g) for g in self.gamma],
        }

    @classmethod
    def from_json(cls, obj):
        return cls(tuple(tuple(int(a) for a in row) for row in obj["alpha"]),
                   tuple(int(g) for g in obj["gamma"]))


def canonical_gamma(n, R):
    return tuple((10 * n) ** (10 * r) for r in range(1, R + 1))


def _unit(n, gamma_s):
    q, rem = divmod(gamma_s, 10 * n)
    if rem:
        raise SumsetError(f"gamma {gamma_s} is not divisible by {10 * n}")
    return q


def _check_sigma_list(n, sigmas):
    out = []
    for s in sigmas:
        s = tuple(int(x) for x in s)
        if sorted(s) != list(range(1, n + 1)):
            raise DomainError(f"{list(s)} is not a permutation of 1..{n}")
        out.append(s)
    return out


def choose_scale_system(n, R, sigmas) -> ScaleSystem:
    """Rows are the subset sums of ``sigma_s(k) * gamma_s / (10n)``."""
    sigmas = _check_sigma_list(n, sigmas)
    if len(sigmas) != R:
        raise DomainError(f"need {R} permutations, got {len(sigmas)}")
    gamma = canonical_gamma(n, R)
    units = [_unit(n, g) for g in gamma]
    rows = []
    for k in range(n):
        steps = [sigmas[s][k] * units[s] for s in range(R)]
        sums = {sum(c) for c in itertools.product(*[(0, x) for x in steps])}
        rows.append(tuple(sorted(sums)))
    system = ScaleSystem(tuple(rows), gamma)
    for r in range(1, R + 1):
        for k in range(1, n + 1):
            got = len(system.partition(r, k))
            if got != 2 ** (R - r):
                raise SumsetError(f"row {k} has {got} classes at width r={r}, expected {2 ** (R - r)}")
    return system


def exponent_closed_form(n, R, sigmas, r, k) -> int:
    """``2^(R-r) (gamma_r + 1) + 2^(R-r)/(10n) * sum_{s<=r} sigma_s(k) gamma_s``."""
    gamma = canonical_gamma(n, R)
    mult = 2 ** (R - r)
    tail = sum(sigmas[s][k - 1] * _unit(n, gamma[s]) for s in range(r))
    return mult * (gamma[r - 1] + 1) + mult * tail


# --------------------------------------------------------------------------
# sets at scales
# --------------------------------------------------------------------------

def _check_power(what, M, e, budget):
    """Raise unless ``M^e + 1`` bits fit; never evaluates a huge power."""
    if M > 1 and e * (M.bit_length() - 1) > budget.bit_length():
        raise BudgetExceeded(what, f"{M}^{e}", budget)
    bits = M ** e + 1
    if bits > budget:
        raise BudgetExceeded(what, bits, budget)


def build_multiscale_set(M, alpha, *, budget=None) -> IntegerSet:
    """``U_i M^{alpha_i} . [0, M]``."""
    M = int(M)
    if M < 1:
        raise DomainError(f"base must be >= 1, got {M}")
    alpha = [int(a) for a in alpha]
    _check_increasing(alpha)
    budget = _config.budget_bits() if budget is None else budget
    _check_power(f"multiscale set with M={M}", M, alpha[-1] + 1, budget)
    base = np.arange(M + 1, dtype=np.int64)
    return IntegerSet(np.concatenate([base * M ** a for a in alpha]))


class Sandwich(NamedTuple):
    lower: int
    upper: int
    middle: int | None   # |h(A_1 U ... U A_l)| when it was computed

    @property
    def holds(self):
        return self.middle is None or self.lower <= self.middle <= self.upper


def union_sumset_bounds(sets, h, *, exact=True, budget=None) -> Sandwich:
    """Bounds on ``|h(A_1 U ... U A_l)|`` for sets that all contain 0.

    ``upper = prod |h A_i|`` and ``lower = |q A_1 + ... + q A_l|`` with
    ``q = h // l``.  With ``exact`` the union's sumset is also computed.
    """
    sets = list(sets)
    if not sets:
        raise DomainError("need at least one set")
    for i, a in enumerate(sets):
        if 0 not in a:
            raise DomainError(f"set {i + 1} does not contain 0")
    upper = 1
    for a in sets:
        upper *= len(hfold_int(a, h, budget=budget))
    q = h // len(sets)
    acc = hfold_int(sets[0], q, budget=budget)
    for a in sets[1:]:
        acc = minkowski_sum(acc, hfold_int(a, q, budget=budget), budget=budget)
    middle = None
    if exact:
        union = IntegerSet(np.concatenate([a.elements for a in sets]))
        middle = len(hfold_int(union, h, budget=budget))
    out = Sandwich(len(acc), upper, middle)
    if not out.holds:
        raise SumsetError(f"union sandwich failed: {out}")
    return out


def _difference_set(a: IntegerSet):
    flipped = IntegerSet._trusted(a.max - a.elements[::-1])
    return minkowski_sum(a, flipped).elements - a.max


def full_expansion_check(a: IntegerSet, b: IntegerSet) -> bool:
    """Whether ``(A-A) & (B-B) = {0}``; if so, confirm ``|A+B| = |A||B|``."""
    if not len(a) or not len(b):
        raise DomainError("full expansion check needs nonempty sets")
    common = np.intersect1d(_difference_set(a), _difference_set(b))
    if common.shape[0] != 1:
        return False
    size = len(minkowski_sum(a, b))
    if size != len(a) * len(b):
        raise SumsetError(f"|A+B| = {size} but |A||B| = {len(a) * len(b)} with trivial difference overlap")
    return True


# --------------------------------------------------------------------------
# empirical growth at one width
# --------------------------------------------------------------------------

@dataclass
class Lemma43Row:
    M: int
    h: int
    size: int
    predicted: int
    lower: int
    upper: int

    @property
    def ratio(self):
        return Fraction(self.size, self.predicted)


@dataclass
class Lemma43Report:
    alpha: tuple
    gamma: int
    partition: GapPartition
    rows: list = field(default_factory=list)
    note: str = "M floor of 4 is empirical; the hidden constants are not known"

    @property
    def spread(self):
        ratios = [r.ratio for r in self.rows]
        return max(ratios) / min(ratios)

    def bounded(self, factor=4):
        return self.spread <= factor

    def sandwiched(self):
        return all(r.lower <= r.size <= r.upper for r in self.rows)

    def to_json(self):
        return {
            "alpha": [str(a) for a in self.alpha],
            "gamma": str(self.gamma),
            "partition": self.partition.to_json(),
            "note": self.note,
            "spread": f"{float(self.spread):.12g}",
            "rows": [
                {"M": r.M, "h": str(r.h), "size": str(r.size), "predicted": str(r.predicted),
                 "lower": str(r.lower), "upper": str(r.upper),
                 "ratio": f"{float(r.ratio):.12g}"}
                for r in self.rows
            ],
        }

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["M", "h", "size", "predicted", "ratio", "lower", "upper"])
        for r in self.rows:
            w.writerow([r.M, r.h, r.size, r.predicted, f"{float(r.ratio):.12g}", r.lower, r.upper])
        return buf.getvalue()


def _check_sweep(what, M, alpha, gamma, budget):
    # bit-vector length of the M^gamma-fold sumset
    _check_power(what, M, gamma + max(alpha) + 1, budget)


def empirical_lemma43(alpha, gamma, M_values, *, budget=None) -> Lemma43Report:
    alpha = tuple(int(a) for a in alpha)
    part = gap_classes(alpha, gamma)
    budget = _config.budget_bits() if budget is None else budget
    for M in M_values:
        _check_sweep(f"lemma43 sweep at M={M}", M, alpha, gamma, budget)
    report = Lemma43Report(alpha, int(gamma), part)
    for M in M_values:
        h = M ** gamma
        pieces = [dilate(IntegerSet.interval(0, M), M ** a) for a in alpha]
        bounds = union_sumset_bounds(pieces, h, budget=budget)
        predicted = 1
        for c in part.classes:
            predicted *= M ** (c.width + gamma + 1)
        report.rows.append(Lemma43Row(M, h, bounds.middle, predicted, bounds.lower, bounds.upper))
    return report


# --------------------------------------------------------------------------
# the construction
# --------------------------------------------------------------------------

def construct_multiscale(n, R, sigmas, *, M=None, system=None, budget=None) -> Certificate:
    """Certify scale rows whose growth exponents follow ``sigmas``.

    Symbolic mode (``M is None``) compares the exact exponents ``E(r, k)``;
    fold ``r`` of the certificate stands for ``h_r = M^{gamma_r}`` and its
    sizes are exponents of ``M``.  Concrete mode also materializes
    ``A_k`` for the given ``M`` and computes every ``|h_r A_k|`` directly,
    which is only feasible for a small custom ``system``.
    """
    sigmas = _check_sigma_list(n, sigmas)
    if len(sigmas) != R:
        raise DomainError(f"need {R} permutations, got {len(sigmas)}")
    canonical = system is None
    if canonical:
        system = choose_scale_system(n, R, sigmas)
    elif system.n != n or system.R != R:
        raise DomainError(f"system has n={system.n}, R={system.R}; expected n={n}, R={R}")
    expected = {r: sigmas[r - 1] for r in range(1, R + 1)}
    exps = {r: system.exponents(r) for r in range(1, R + 1)}
    checks = []
    if canonical:
        ok = all(exps[r][k - 1] == exponent_closed_form(n, R, sigmas, r, k)
                 for r in exps for k in range(1, n + 1))
        checks.append(("exponents match closed form", ok, "ok" if ok else "mismatch"))
    generator = {"system": system.to_json(), "mode": "symbolic" if M is None else "concrete",
                 "fold_index": "r, with h_r = M^gamma_r"}
    if M is None:
        return Certificate("construct-multiscale", n, expected, exps, {r: "exponent" for r in exps},
                           generator=generator, checks=checks)

    budget = _config.budget_bits() if budget is None else budget
    why = ("the canonical schedule is far too large to materialize; pass a small custom system"
           if canonical else "system too large for this M")
    for row in system.alpha:
        _check_sweep(f"concrete multiscale construction ({why})", M, row, system.gamma[-1], budget)
    sets = [build_multiscale_set(M, row, budget=budget) for row in system.alpha]
    sizes = {r: [len(hfold_int(a, M ** system.gamma[r - 1], budget=budget)) for a in sets]
             for r in range(1, R + 1)}
    for r in exps:
        ok = relative_order(exps[r]) == relative_order(expected[r])
        checks.append((f"exponent order at r={r}", ok,
                       "ok" if ok else f"E = {[str(e) for e in exps[r]]}"))
    generator["M"] = M
    generator["h"] = [str(M ** g) for g in system.gamma]
    generator["exponents"] = {str(r): [str(e) for e in exps[r]] for r in exps}
    return Certificate("construct-multiscale", n, expected, sizes, {r: "brute-force" for r in sizes},
                       sets=sets, generator=generator, checks=checks)
