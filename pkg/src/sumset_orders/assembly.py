"""Product assembly of block families into sets with prescribed size orders.

For folds ``h = 1..H`` pick a family ``B_{h,1..n}``.  The set ``A_k`` is the
Cartesian product of ``mu_h`` copies of ``B_{h, sigma_h(k)}`` over all ``h``,
optionally embedded into Z by a carry-free base expansion.  At fold ``h``

    |hA_k| = prod_j |hB_{j, sigma_j(k)}| ** mu_j.

Families ``j < h`` are saturated at fold ``h`` and contribute equally for
every ``k``.  Families ``j > h`` are not, so their spread must be beaten by
the fold-``h`` chain: the multiplicities are chosen from the top fold down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import sympy

from . import _config
from .blocks import (block_max, choose_w_extension, choose_X_family,
                     choose_Y_family, choose_Z_family, materialize, verify_block_family,
                     z_total_dims)
from .core import (MAX_ELEMENT, IntegerSet, PointSet, cartesian_product,
                   hfold_int, hfold_modp, is_permutation, relative_order)
from .errors import BudgetExceeded, DomainError

# brute-force cross-checks run automatically below this many bits of sumset range
AUTO_BRUTE_BITS = 1 << 24


def _check_sigmas(n, H, sigmas):
    sigmas = [tuple(int(x) for x in s) for s in sigmas]
    if len(sigmas) != H:
        raise DomainError(f"expected {H} permutations, got {len(sigmas)}")
    for h, s in enumerate(sigmas, 1):
        if len(s) != n or not is_permutation(s):
            raise DomainError(f"sigma_{h} = {s} is not a permutation of 1..{n}")
    return sigmas


# --------------------------------------------------------------------------
# multiplicities and plans
# --------------------------------------------------------------------------

def _dominates(chain, mu, num, den):
    return all(chain[i + 1] ** mu * num > chain[i] ** mu * den for i in range(len(chain) - 1))


def select_multiplicities(families) -> list:
    """Minimal exponents ``mu_h`` so each fold's chain outweighs the others.

    ``mu_H = 1``.  Going down, ``mu_h`` is the least positive integer with

        (S_{i+1} / S_i) ** mu_h  >  prod_{j > h} (max_k |hB_{j,k}| / min_k |hB_{j,k}|) ** mu_j

    for every adjacent pair of the fold-``h`` chain ``S``, evaluated on
    integers by cross-multiplication.
    """
    H = len(families)
    for h in range(1, H + 1):
        for j in range(1, h):
            sizes = families[j - 1].sizes(h)
            if len(set(sizes)) > 1:
                raise DomainError(f"family {j} is not saturated at fold {h}: {sizes}")
    mu = [0] * H
    for h in range(H, 0, -1):
        chain = families[h - 1].sizes(h)
        num = den = 1
        for j in range(h + 1, H + 1):
            s = families[j - 1].sizes(h)
            num *= min(s) ** mu[j - 1]
            den *= max(s) ** mu[j - 1]
        if len(chain) < 2 or num >= den:
            mu[h - 1] = 1
            continue
        worst = min(chain[i + 1] / chain[i] for i in range(len(chain) - 1))
        guess = max(1, math.ceil((math.log(den) - math.log(num)) / math.log(worst)) - 1)
        while not _dominates(chain, guess, num, den):
            guess += 1
        while guess > 1 and _dominates(chain, guess - 1, num, den):
            guess -= 1
        mu[h - 1] = guess
    return mu


@dataclass
class AssemblyPlan:
    H: int
    n: int
    sigmas: list
    families: list
    mu: list

    @property
    def total_dim(self):
        return sum(m * f.dim for m, f in zip(self.mu, self.families))

    def factors(self, k):
        """Factor parameters of ``A_k`` (1-based ``k``), in coordinate order."""
        out = []
        for s, f, m in zip(self.sigmas, self.families, self.mu):
            out.extend(list(f.params[s[k - 1] - 1]) * m)
        return out

    def to_json(self):
        return {
            "H": self.H,
            "n": self.n,
            "sigmas": [list(s) for s in self.sigmas],
            "families": [f.to_json() for f in self.families],
            "mu": list(self.mu),
            "total_dim": self.total_dim,
        }


def make_plan(families, sigmas) -> AssemblyPlan:
    n = families[0].n
    H = len(families)
    sigmas = _check_sigmas(n, H, sigmas)
    return AssemblyPlan(H, n, sigmas, list(families), select_multiplicities(families))


def product_sizes(plan: AssemblyPlan, h: int) -> list:
    """``|hA_k|`` for every ``k`` from the block sizes; nothing is materialized."""
    if not 1 <= h <= plan.H:
        raise DomainError(f"fold {h} outside 1..{plan.H}")
    per_family = [f.sizes(h) for f in plan.families]
    return [math.prod(per_family[j][plan.sigmas[j][k] - 1] ** plan.mu[j] for j in range(plan.H))
            for k in range(plan.n)]


def materialize_product(plan: AssemblyPlan, k: int, *, budget=None):
    """``A_k`` as a literal product set (PointSet, or ModpVectorSet for X blocks)."""
    out = None
    for f in plan.factors(k):
        s = materialize(f, budget=budget)
        out = s if out is None else cartesian_product(out, s)
    if isinstance(out, IntegerSet):
        out = PointSet(1, ((x,) for x in out))
    return out


# --------------------------------------------------------------------------
# Freiman embedding
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FreimanMap:
    """``(x_0, ..., x_{m-1}) -> sum x_i * base**i``; carry free up to fold ``h_max``."""
    base: int
    arity: int
    h_max: int

    def __call__(self, point):
        return sum(int(c) * self.base ** i for i, c in enumerate(point))

    @property
    def coordinate_bound(self):
        return (self.base - 1) // self.h_max


def freiman_embed(points, base: int, h_max: int) -> IntegerSet:
    """Embed points with coordinates in ``[0, C]``, ``h_max * C < base``, into Z.

    The map is injective and ``|h phi(A)| = |hA|`` for every ``h <= h_max``.
    """
    if isinstance(points, PointSet):
        rows = points.points.tolist()
        m = points.m
    else:
        rows = [tuple(p) for p in points]
        m = len(rows[0]) if rows else 0
    if base < 2 or h_max < 1:
        raise DomainError("need base >= 2 and h_max >= 1")
    phi = FreimanMap(base, m, h_max)
    bound = phi.coordinate_bound
    for r in rows:
        if any(c < 0 or c > bound for c in r):
            raise DomainError(f"coordinate of {tuple(r)} outside [0, {bound}]: "
                              f"carries possible at fold {h_max}")
    return IntegerSet(phi(r) for r in rows)


def embed_factors(factor_sets, base: int) -> IntegerSet:
    """``phi(S_0 x S_1 x ...)`` computed digit by digit, without listing points."""
    acc = np.zeros(1, dtype=np.int64)
    top = 0
    for d, s in enumerate(factor_sets):
        top += s.max * base ** d
        if top > MAX_ELEMENT:
            raise DomainError("embedded set exceeds the supported element range")
        acc = np.add.outer(acc, s.elements * base ** d).ravel()
    return IntegerSet(acc)


# --------------------------------------------------------------------------
# certificates
# --------------------------------------------------------------------------

@dataclass
class Certificate:
    kind: str
    n: int
    expected: dict            # fold -> OrderPattern
    sizes: dict               # fold -> list of int
    methods: dict             # fold -> "closed-form" | "brute-force" | "closed-form+brute-force"
    sets: list = None         # constructed sets when materialized
    generator: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)   # (name, passed, detail)

    @property
    def observed(self):
        return {h: relative_order(s) for h, s in self.sizes.items()}

    def failures(self):
        out = []
        for h in sorted(self.expected):
            exp = relative_order(self.expected[h])
            obs = relative_order(self.sizes[h])
            if exp != obs:
                out.append(f"fold {h}: {_order_conflict(self.sizes[h], exp)}")
        out.extend(f"{name}: {detail}" for name, ok, detail in self.checks if not ok)
        return out

    @property
    def passed(self):
        return not self.failures()

    def to_json(self, cutoff=_config.DEFAULT_ELEMENT_CUTOFF):
        obj = {
            "kind": self.kind,
            "n": self.n,
            "passed": self.passed,
            "failures": self.failures(),
            "folds": [
                {
                    "h": h,
                    "sizes": [str(x) for x in self.sizes[h]],
                    "expected": list(self.expected[h]),
                    "observed": list(relative_order(self.sizes[h])),
                    "method": self.methods[h],
                }
                for h in sorted(self.sizes)
            ],
            "checks": [{"name": a, "passed": b, "detail": c} for a, b, c in self.checks],
            "generator": self.generator,
        }
        total = sum(len(s) for s in self.sets) if self.sets else None
        if self.sets is not None and total <= cutoff:
            obj["sets"] = [s.to_json() for s in self.sets]
        else:
            obj["sets"] = None
        return obj


def _order_conflict(sizes, expected):
    n = len(sizes)
    for a in range(n):
        for b in range(n):
            if expected[a] < expected[b] and not sizes[a] < sizes[b]:
                return f"expected |hA_{a + 1}| < |hA_{b + 1}| but got {sizes[a]} vs {sizes[b]}"
            if expected[a] == expected[b] and sizes[a] != sizes[b]:
                return f"expected |hA_{a + 1}| = |hA_{b + 1}| but got {sizes[a]} vs {sizes[b]}"
    return "order mismatch"


def _want_brute(brute, predicted_bits, budget, what):
    budget = _config.budget_bits() if budget is None else budget
    if brute is False:
        return False
    if brute is None:
        return predicted_bits <= min(budget, AUTO_BRUTE_BITS)
    if predicted_bits > budget:
        raise BudgetExceeded(what, predicted_bits, budget)
    return True


def _family_checks(families, H, budget):
    checks = []
    for f in families:
        rep = verify_block_family(f, H, budget=budget)
        detail = "; ".join(f"{v.condition} at fold {v.fold}: {v.detail}" for v in rep.violations) or "ok"
        checks.append((f"family h={f.h} ({f.kind}) conditions", rep.passed, detail))
    return checks


# --------------------------------------------------------------------------
# Z and (Z/pZ)^N constructions
# --------------------------------------------------------------------------

def integer_plan(n, H, sigmas=None):
    """Y-family plan and its embedding base ``H*C + 1``."""
    if sigmas is None:
        sigmas = [tuple(range(1, n + 1))] * H
    families = [choose_Y_family(n, h) for h in range(1, H + 1)]
    plan = make_plan(families, sigmas)
    base = H * max(block_max(f.params[0][0]) for f in families) + 1
    return plan, base


def integer_max_element(plan, base):
    """``max(A_k)``; identical for every ``k`` since each Y block has max ``v``."""
    return sum(block_max(f) * base ** d for d, f in enumerate(plan.factors(1)))


def construct_int(n, H, sigmas, *, brute=None, budget=None) -> Certificate:
    """Sets ``A_1..A_n`` in Z with ``|hA_k|`` ordered by ``sigma_h`` for ``h <= H``."""
    sigmas = _check_sigmas(n, H, sigmas)
    plan, base = integer_plan(n, H, sigmas)
    top = integer_max_element(plan, base)
    sizes = {h: product_sizes(plan, h) for h in range(1, H + 1)}
    cert = Certificate("construct-int", n, {h: sigmas[h - 1] for h in sizes}, sizes,
                       {h: "closed-form" for h in sizes})
    cert.generator = {"plan": plan.to_json(), "embedding_base": base, "max_element": str(top)}
    cert.checks = _family_checks(plan.families, H, budget)

    count = math.prod(len(materialize(f)) for f in plan.factors(1))
    if top <= MAX_ELEMENT and count * n <= _config.DEFAULT_ELEMENT_CUTOFF:
        cert.sets = [embed_factors([materialize(f) for f in plan.factors(k)], base)
                     for k in range(1, n + 1)]
    if cert.sets is not None and _want_brute(brute, H * top + 1, budget, "construct_int brute force"):
        for h in range(1, H + 1):
            direct = [len(hfold_int(a, h, budget=budget)) for a in cert.sets]
            cert.checks.append((f"fold {h} direct sumset sizes", direct == sizes[h],
                                f"closed form {sizes[h]} vs direct {direct}"))
            cert.methods[h] = "closed-form+brute-force"
    elif brute:
        raise BudgetExceeded("construct_int brute force", count * n, _config.DEFAULT_ELEMENT_CUTOFF)
    return cert


def modp_plan(n, H, p, sigmas=None):
    if sigmas is None:
        sigmas = [tuple(range(1, n + 1))] * H
    families = [choose_X_family(n, h, p) for h in range(1, H + 1)]
    return make_plan(families, sigmas)


def construct_modp(n, H, sigmas, p, *, brute=None, budget=None) -> Certificate:
    """Sets in (Z/pZ)^N_p; ``N_p`` is the plan's total dimension."""
    if not sympy.isprime(p):
        raise DomainError(f"p={p} is not prime")
    sigmas = _check_sigmas(n, H, sigmas)
    plan = modp_plan(n, H, p, sigmas)
    sizes = {h: product_sizes(plan, h) for h in range(1, H + 1)}
    cert = Certificate("construct-modp", n, {h: sigmas[h - 1] for h in sizes}, sizes,
                       {h: "closed-form" for h in sizes})
    cert.generator = {"plan": plan.to_json(), "p": p, "N_p": plan.total_dim}
    cert.checks = _family_checks(plan.families, H, budget)
    space = p ** plan.total_dim
    if _want_brute(brute, space, budget, "construct_modp enumeration"):
        cert.sets = [materialize_product(plan, k, budget=budget) for k in range(1, n + 1)]
        for h in range(1, H + 1):
            direct = [len(hfold_modp(a, h, budget=budget)) for a in cert.sets]
            cert.checks.append((f"fold {h} direct sumset sizes", direct == sizes[h],
                                f"closed form {sizes[h]} vs direct {direct}"))
            cert.methods[h] = "closed-form+brute-force"
    return cert


# --------------------------------------------------------------------------
# prescribed ties and limiting order
# --------------------------------------------------------------------------

def _normalize_taus(n, taus):
    out = []
    for tau in taus:
        tau = tuple(tau)
        if len(tau) != n:
            raise DomainError(f"tuple {tau} does not have length {n}")
        if any(not isinstance(x, (int, np.integer)) or x < 1 for x in tau):
            raise DomainError(f"tuple {tau} must contain positive integers")
        out.append(relative_order(tau))
    return out


def construct_extension(n, H, taus, tau_inf, *, delta=3, brute=None, budget=None) -> Certificate:
    """Sets in Z with ``|hA_k|`` ordered like ``tau_h`` (ties allowed) for ``h <= H``
    and like ``tau_inf`` for every ``h > H``.

    ``A_k = phi(prod_h B_{h, tau_h(k)}) + {0, b**D + tau_inf(k)}`` with
    ``b = wH + 1`` and ``D`` the total number of coordinates.  Sizes for
    ``h <= H`` are ``(h+1) * prod_j |hB_{j, tau_j(k)}|``; for ``h > H`` the
    sumset is ``[0, h * max(A_k)]``.  The certificate samples folds up to
    ``H + delta``.
    """
    if len(taus) != H:
        raise DomainError(f"expected {H} tuples, got {len(taus)}")
    taus = _normalize_taus(n, taus)
    (tau_inf,) = _normalize_taus(n, [tau_inf])
    w = choose_w_extension(n, H)
    families = [choose_Z_family(n, h, H, w) for h in range(1, H + 1)]
    b = w * H + 1
    dims = z_total_dims(n, H)
    shift = [b ** dims + tau_inf[k] for k in range(n)]
    phi_max = w * (b ** dims - 1) // (b - 1)
    maxima = [phi_max + s for s in shift]

    def factors(k):
        out = []
        for tau, f in zip(taus, families):
            out.extend(f.params[tau[k] - 1])
        return out

    sizes, methods, expected = {}, {}, {}
    for h in range(1, H + 1):
        per_family = [f.sizes(h) for f in families]
        sizes[h] = [(h + 1) * math.prod(per_family[j][taus[j][k] - 1] for j in range(H))
                    for k in range(n)]
        expected[h] = taus[h - 1]
    for h in range(H + 1, H + delta + 1):
        sizes[h] = [h * m + 1 for m in maxima]
        expected[h] = tau_inf
    methods = {h: "closed-form" for h in sizes}

    cert = Certificate("construct-extension", n, expected, sizes, methods)
    cert.generator = {
        "taus": [list(t) for t in taus],
        "tau_inf": list(tau_inf),
        "w": w,
        "embedding_base": b,
        "dims": dims,
        "shifts": [str(s) for s in shift],
        "families": [f.to_json() for f in families],
    }
    cert.checks = _family_checks(families, H, budget)
    ok = (H + 1) * (b ** dims - 1) >= H * (max(shift) - 1)
    cert.checks.append(("copies merge above H", ok, "fold H+1 interval covers every shift"))

    top = max(maxima)
    count = math.prod(len(materialize(f)) for f in factors(0)) * 2
    if top <= MAX_ELEMENT and count * n <= _config.DEFAULT_ELEMENT_CUTOFF:
        sets = []
        for k in range(n):
            base_set = embed_factors([materialize(f) for f in factors(k)], b)
            sets.append(IntegerSet(np.concatenate([base_set.elements, base_set.elements + shift[k]])))
        cert.sets = sets
    if cert.sets is not None and _want_brute(brute, (H + delta) * top + 1, budget,
                                             "construct_extension brute force"):
        for h in sorted(sizes):
            sums = [hfold_int(a, h, budget=budget) for a in cert.sets]
            direct = [len(s) for s in sums]
            cert.checks.append((f"fold {h} direct sumset sizes", direct == sizes[h],
                                f"closed form {sizes[h]} vs direct {direct}"))
            if h > H:
                single = all(s.is_interval() and s.min == 0 for s in sums)
                cert.checks.append((f"fold {h} single interval from 0", single, "hA_k = [0, h max A_k]"))
            methods[h] = "closed-form+brute-force"
    elif brute:
        raise BudgetExceeded("construct_extension brute force", count * n, _config.DEFAULT_ELEMENT_CUTOFF)
    return cert


# --------------------------------------------------------------------------
# reduction for finite abelian groups
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GroupSpec:
    kind: str                       # "infinite" (has an element of infinite order) or "finite"
    invariant_factors: tuple = ()

    def __post_init__(self):
        if self.kind not in ("infinite", "finite"):
            raise DomainError(f"group kind must be 'infinite' or 'finite', got {self.kind!r}")
        if self.kind == "finite" and (not self.invariant_factors
                                      or any(int(d) < 2 for d in self.invariant_factors)):
            raise DomainError("finite groups need cyclic orders >= 2")

    @property
    def order(self):
        return math.prod(self.invariant_factors)

    @property
    def exponent(self):
        return math.lcm(*self.invariant_factors)

    def p_rank(self, p):
        return sum(1 for d in self.invariant_factors if d % p == 0)


@dataclass
class GroupReduction:
    path: str                       # "cyclic" | "torsion" | "too-small"
    N_inf: int
    element_order: object = None    # order of the cyclic generator used (None = infinite)
    prime: int = None
    required_rank: int = None
    available_rank: int = None
    threshold_base: int = None
    threshold_exponent: int = None  # sum of N_p over primes p <= H N_inf, when computed
    detail: str = ""

    @property
    def threshold(self):
        if self.threshold_exponent is None:
            return None
        return self.threshold_base ** self.threshold_exponent

    def to_json(self):
        return {
            "path": self.path,
            "N_inf": str(self.N_inf),
            "element_order": None if self.element_order is None else str(self.element_order),
            "prime": self.prime,
            "required_rank": self.required_rank,
            "available_rank": self.available_rank,
            "threshold_base": None if self.threshold_base is None else str(self.threshold_base),
            "threshold_exponent": self.threshold_exponent,
            "detail": self.detail,
        }


THRESHOLD_PRIME_LIMIT = 10**5


def n_inf(n, H):
    plan, base = integer_plan(n, H)
    return integer_max_element(plan, base)


def n_p(n, H, p):
    return modp_plan(n, H, p).total_dim


def reduce_group(spec: GroupSpec, n, H) -> GroupReduction:
    """Pick where the sets live: multiples of a high-order element, or a
    p-torsion subgroup of sufficient rank.
    """
    N = n_inf(n, H)
    bound = H * N
    if spec.kind == "infinite":
        return GroupReduction("cyclic", N, detail=f"use {{0, x, ..., {N}x}} for x of infinite order")
    if spec.exponent > bound:
        return GroupReduction("cyclic", N, element_order=spec.exponent,
                              detail=f"an element of order {spec.exponent} > H*N_inf = {bound} exists")
    primes = sorted(sympy.factorint(spec.order))
    best = None
    for p in primes:
        need, have = n_p(n, H, p), spec.p_rank(p)
        if have >= need:
            return GroupReduction("torsion", N, prime=p, required_rank=need, available_rank=have,
                                  detail=f"(Z/{p}Z)^{have} contains (Z/{p}Z)^{need}")
        if best is None or have - need > best[2] - best[1]:
            best = (p, need, have)
    red = GroupReduction("too-small", N, threshold_base=bound)
    if best:
        red.prime, red.required_rank, red.available_rank = best
    if bound <= THRESHOLD_PRIME_LIMIT:
        red.threshold_exponent = sum(n_p(n, H, q) for q in sympy.primerange(2, bound + 1))
        red.detail = (f"no element of order > {bound} and no p-rank reaches N_p; "
                      f"groups of size >= {bound}^{red.threshold_exponent} always qualify")
    else:
        red.detail = (f"no element of order > {bound} and no p-rank reaches N_p; "
                      f"the size threshold has base {bound} and was not expanded")
    return red
