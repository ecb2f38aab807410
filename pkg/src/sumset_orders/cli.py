"""``sumset-orders``: build, certify and probe sets with prescribed sumset orders.

Exit status: 0 when every certification passes, 1 when one fails, 2 for a
malformed request or input file, 3 when a computation would exceed its
budget (the predicted cost is printed).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

import jsonschema

from . import schemas
from .assembly import GroupSpec, construct_extension, construct_int, construct_modp, reduce_group
from .blocks import choose_X_family, choose_Y_family, choose_Z_family, verify_block_family
from .core import IntegerSet, all_permutations, dumps, set_from_json
from .errors import BudgetExceeded, DomainError
from .multiscale import ScaleSystem, construct_multiscale, empirical_lemma43
from .verify import certify, khovanskii_probe, order_sequence

EXIT_PASS, EXIT_FAIL, EXIT_SCHEMA, EXIT_BUDGET = 0, 1, 2, 3


class RequestError(Exception):
    """A request that does not match its schema; ``field`` points at the culprit."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

def _ints(field, text):
    try:
        return [int(tok) for tok in text.replace(" ", "").split(",") if tok]
    except ValueError:
        raise RequestError(field, f"expected comma-separated integers, got {text!r}") from None


def _perms(field, text):
    """``"1,2,3;3,2,1"`` -> ``[[1, 2, 3], [3, 2, 1]]``."""
    return [_ints(f"{field}/{i}", part) for i, part in enumerate(text.split(";")) if part.strip()]


def _expect(text):
    """``"h=1:2,1"`` -> ``{"h": 1, "pattern": [2, 1]}``."""
    head, sep, tail = text.partition(":")
    if not sep or not head.strip().startswith("h="):
        raise RequestError("expect", f"expected 'h=<fold>:<pattern>', got {text!r}")
    try:
        h = int(head.strip()[2:])
    except ValueError:
        raise RequestError("expect", f"bad fold in {text!r}") from None
    return {"h": h, "pattern": _ints("expect", tail)}


def _factors(text):
    """``"2^3,5"`` -> ``[2, 2, 2, 5]``."""
    out = []
    for tok in text.replace(" ", "").split(","):
        if not tok:
            continue
        base, _, rep = tok.partition("^")
        try:
            out.extend([int(base)] * (int(rep) if rep else 1))
        except ValueError:
            raise RequestError("factors", f"bad cyclic factor {tok!r}") from None
    return out


def _common(p):
    p.add_argument("--seed", type=int, default=None, help="seed for any random sampling")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=None, help="write the JSON result here instead of stdout")
    p.add_argument("--csv", default=None, help="also write a CSV table (probe, lemma43)")
    p.add_argument("--budget-bits", type=int, default=None,
                   help="cap on dense bit-vector size (default: $SUMSET_ORDERS_BUDGET_BITS or 2^30)")


def build_parser():
    parser = argparse.ArgumentParser(prog="sumset-orders", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        _common(p)
        return p

    brute = dict(choices=["auto", "yes", "no"], default="auto",
                 help="also compute every sumset directly (auto: when cheap)")

    p = add("construct-int", "sets in Z with prescribed orders at folds 1..H")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--H", type=int, required=True)
    p.add_argument("--sigma", help="H permutations, e.g. '1,2,3;3,2,1' (random if omitted)")
    p.add_argument("--brute", **brute)

    p = add("construct-modp", "sets in (Z/pZ)^N with prescribed orders")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--H", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--sigma")
    p.add_argument("--brute", **brute)

    p = add("construct-extension", "orders with ties up to H and a limiting order beyond")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--H", type=int, required=True)
    p.add_argument("--tau", help="H tuples with entries in 1..n (ties allowed)")
    p.add_argument("--tau-inf", help="limiting tuple for every fold above H")
    p.add_argument("--delta", type=int, default=3, help="folds above H included in the certificate")
    p.add_argument("--brute", **brute)

    p = add("construct-multiscale", "scale-union sets whose exponents follow R permutations")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--R", type=int, required=True)
    p.add_argument("--sigma")
    p.add_argument("--symbolic", action="store_true", help="exponents only (the default without --M)")
    p.add_argument("--M", type=int, default=None, help="materialize with this base")
    p.add_argument("--system", default=None, help="JSON file with a custom scale system")

    p = add("certify", "check the orders of |hA_k| for given sets")
    p.add_argument("--sets", required=True, help="JSON file: array of sets")
    p.add_argument("--expect", action="append", required=True, help="'h=<fold>:<pattern>', repeatable")

    p = add("probe", "sizes |hA| for h <= h_max and their eventual linear growth")
    p.add_argument("--set", action="append", help="comma-separated integers, repeatable")
    p.add_argument("--sets", help="JSON file: array of integer sets")
    p.add_argument("--random", help="'count,max[,size]': random sets in [0,max] containing 0")
    p.add_argument("--h-max", type=int, required=True)

    p = add("lemma43", "growth of h-fold sums of a scale union over a sweep of M")
    p.add_argument("--alpha", required=True)
    p.add_argument("--gamma", type=int, required=True)
    p.add_argument("--M", required=True, help="comma-separated bases")
    p.add_argument("--factor", type=float, default=4.0, help="allowed ratio spread across the sweep")

    p = add("blocks", "choose and verify one building-block family")
    p.add_argument("--kind", choices=["X", "Y", "Z"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--H", type=int, default=None, help="top fold checked (default h+1; Z: required)")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--w", type=int, default=None)
    p.add_argument("--method", choices=["closed-form", "brute-force"], default="closed-form")

    p = add("reduce-group", "where the construction lives inside a given abelian group")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--H", type=int, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--infinite", action="store_true", help="the group has an element of infinite order")
    g.add_argument("--factors", help="cyclic orders, e.g. '2^1000' or '4,6'")

    p = sub.add_parser("schemas", help="write the JSON schemas to a directory")
    p.add_argument("--out", required=True)
    return parser


def to_request(ns) -> dict:
    """Namespace -> request document (validated against the command's schema)."""
    req = {"command": ns.command, "seed": ns.seed, "threads": ns.threads,
           "budget_bits": ns.budget_bits, "out": ns.out, "csv": ns.csv}
    c = ns.command
    if c in ("construct-int", "construct-modp"):
        req.update(n=ns.n, H=ns.H, brute=ns.brute,
                   sigma=_perms("sigma", ns.sigma) if ns.sigma else None)
        if c == "construct-modp":
            req["p"] = ns.p
    elif c == "construct-extension":
        req.update(n=ns.n, H=ns.H, delta=ns.delta, brute=ns.brute,
                   tau=_perms("tau", ns.tau) if ns.tau else None,
                   tau_inf=_ints("tau_inf", ns.tau_inf) if ns.tau_inf else None)
    elif c == "construct-multiscale":
        if ns.symbolic and ns.M is not None:
            raise RequestError("M", "--symbolic and --M are mutually exclusive")
        req.update(n=ns.n, R=ns.R, M=ns.M, system=ns.system,
                   sigma=_perms("sigma", ns.sigma) if ns.sigma else None)
    elif c == "certify":
        req.update(sets=ns.sets, expect=[_expect(e) for e in ns.expect])
    elif c == "probe":
        req.update(h_max=ns.h_max, sets=ns.sets,
                   set=[_ints(f"set/{i}", s) for i, s in enumerate(ns.set)] if ns.set else None,
                   random=_ints("random", ns.random) if ns.random else None)
    elif c == "lemma43":
        req.update(alpha=_ints("alpha", ns.alpha), gamma=ns.gamma, M=_ints("M", ns.M), factor=ns.factor)
    elif c == "blocks":
        req.update(kind=ns.kind, n=ns.n, h=ns.h, H=ns.H, p=ns.p, w=ns.w, method=ns.method)
    elif c == "reduce-group":
        req.update(n=ns.n, H=ns.H, infinite=bool(ns.infinite),
                   factors=_factors(ns.factors) if ns.factors else [])
    try:
        schemas.validate(req, schemas.REQUESTS[c])
    except jsonschema.ValidationError as e:
        raise RequestError("request" + e.json_path[1:], e.message) from None
    return req


# --------------------------------------------------------------------------
# semantic checks on parsed requests
# --------------------------------------------------------------------------

def _check_lengths(field, rows, count, n):
    if len(rows) != count:
        raise RequestError(field, f"expected {count} tuples, got {len(rows)}")
    for i, row in enumerate(rows):
        if len(row) != n:
            raise RequestError(f"{field}/{i}", f"expected {n} entries, got {len(row)}")


def _check_perms(field, rows, count, n):
    _check_lengths(field, rows, count, n)
    for i, row in enumerate(rows):
        if sorted(row) != list(range(1, n + 1)):
            raise RequestError(f"{field}/{i}", f"{row} is not a permutation of 1..{n}")


def _check_range(field, rows, n):
    for i, row in enumerate(rows):
        bad = [x for x in row if not 1 <= x <= n]
        if bad:
            raise RequestError(f"{field}/{i}", f"entries must lie in 1..{n}, got {bad}")


def _sigmas(req, count, rng):
    if req["sigma"] is None:
        perms = all_permutations(req["n"])
        return [list(rng.choice(perms)) for _ in range(count)]
    _check_perms("sigma", req["sigma"], count, req["n"])
    return req["sigma"]


def _load_json(field, path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as e:
        raise RequestError(field, f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise RequestError(field, f"{path} is not valid JSON: {e}") from None


def _load_sets(field, path):
    obj = _load_json(field, path)
    try:
        schemas.validate(obj, schemas.SETS_FILE)
    except jsonschema.ValidationError as e:
        raise RequestError(f"{field}{e.json_path[1:]}", e.message) from None
    try:
        return [set_from_json(s) for s in obj]
    except DomainError as e:
        raise RequestError(field, str(e)) from None


_BRUTE = {"auto": None, "yes": True, "no": False}


# --------------------------------------------------------------------------
# commands: each returns (document, schema, passed, csv text or None)
# --------------------------------------------------------------------------

def _cert_result(cert):
    return cert.to_json(), schemas.CERTIFICATE, cert.passed, None


def cmd_construct_int(req, rng):
    sig = _sigmas(req, req["H"], rng)
    return _cert_result(construct_int(req["n"], req["H"], sig, brute=_BRUTE[req["brute"]],
                                      budget=req["budget_bits"]))


def cmd_construct_modp(req, rng):
    sig = _sigmas(req, req["H"], rng)
    return _cert_result(construct_modp(req["n"], req["H"], sig, req["p"], brute=_BRUTE[req["brute"]],
                                       budget=req["budget_bits"]))


def cmd_construct_extension(req, rng):
    n, H = req["n"], req["H"]
    tau = req["tau"] or [[rng.randint(1, n) for _ in range(n)] for _ in range(H)]
    tau_inf = req["tau_inf"] or [rng.randint(1, n) for _ in range(n)]
    _check_lengths("tau", tau, H, n)
    _check_range("tau", tau, n)
    _check_lengths("tau_inf", [tau_inf], 1, n)
    _check_range("tau_inf", [tau_inf], n)
    return _cert_result(construct_extension(n, H, tau, tau_inf, delta=req["delta"],
                                            brute=_BRUTE[req["brute"]], budget=req["budget_bits"]))


def cmd_construct_multiscale(req, rng):
    sig = _sigmas(req, req["R"], rng)
    system = None
    if req["system"]:
        obj = _load_json("system", req["system"])
        try:
            schemas.validate(obj, schemas.SCALE_SYSTEM)
        except jsonschema.ValidationError as e:
            raise RequestError(f"system{e.json_path[1:]}", e.message) from None
        system = ScaleSystem.from_json(obj)
        if req["M"] is None:
            raise RequestError("M", "a custom system is only used in concrete mode; pass --M")
    cert = construct_multiscale(req["n"], req["R"], sig, M=req["M"], system=system,
                                budget=req["budget_bits"])
    return _cert_result(cert)


def cmd_certify(req, rng):
    sets = _load_sets("sets", req["sets"])
    exp = [(e["h"], e["pattern"]) for e in req["expect"]]
    for i, (_, pat) in enumerate(exp):
        if len(pat) != len(sets):
            raise RequestError(f"expect/{i}", f"pattern has {len(pat)} entries for {len(sets)} sets")
    return _cert_result(certify(sets, exp, threads=req["threads"], budget=req["budget_bits"]))


def cmd_probe(req, rng):
    sets = []
    if req["set"]:
        sets.extend(IntegerSet(s) for s in req["set"])
    if req["sets"]:
        loaded = _load_sets("sets", req["sets"])
        if any(not isinstance(s, IntegerSet) for s in loaded):
            raise RequestError("sets", "probe takes integer sets only")
        sets.extend(loaded)
    if req["random"]:
        count, top, *size = req["random"]
        size = size[0] if size else None
        for _ in range(count):
            k = size or rng.randint(2, top + 1)
            if not 2 <= k <= top + 1:
                raise RequestError("random", f"set size {k} does not fit in [0, {top}]")
            sets.append(IntegerSet([0, *rng.sample(range(1, top + 1), k - 1)]))
    if not sets:
        raise RequestError("set", "give --set, --sets or --random")
    probes = [khovanskii_probe(a, req["h_max"], budget=req["budget_bits"]) for a in sets]
    orders = []
    if len(sets) > 1:
        table = order_sequence(sets, range(1, req["h_max"] + 1), budget=req["budget_bits"])
        orders = [{"h": h, "order": list(o)} for h, o in table.items()]
    doc = {"probes": [p.to_json() for p in probes], "orders": orders, "seed": req["seed"]}
    rows = ["set,h,size"]
    for i, p in enumerate(probes, 1):
        rows.extend(f"{i},{h},{s}" for h, s in enumerate(p.sizes, 1))
    return doc, schemas.PROBE, True, "\n".join(rows) + "\n"


def cmd_lemma43(req, rng):
    rep = empirical_lemma43(req["alpha"], req["gamma"], req["M"], budget=req["budget_bits"])
    doc = rep.to_json()
    doc["bounded"] = rep.bounded(req["factor"])
    doc["sandwiched"] = rep.sandwiched()
    return doc, schemas.LEMMA43, doc["bounded"] and doc["sandwiched"], rep.to_csv()


def cmd_blocks(req, rng):
    kind, n, h = req["kind"], req["n"], req["h"]
    H = req["H"]
    if kind == "X":
        fam = choose_X_family(n, h, req["p"])
    elif kind == "Y":
        fam = choose_Y_family(n, h)
    else:
        if H is None:
            raise RequestError("H", "Z families need the top fold --H")
        fam = choose_Z_family(n, h, H, req["w"])
    rep = verify_block_family(fam, H or h + 1, method=req["method"], budget=req["budget_bits"])
    return {"family": fam.to_json(), "report": rep.to_json()}, schemas.FAMILY_REPORT, rep.passed, None


def cmd_reduce_group(req, rng):
    spec = GroupSpec("infinite") if req["infinite"] else GroupSpec("finite", tuple(req["factors"]))
    red = reduce_group(spec, req["n"], req["H"])
    return red.to_json(), schemas.GROUP_REDUCTION, True, None


COMMANDS = {
    "construct-int": cmd_construct_int,
    "construct-modp": cmd_construct_modp,
    "construct-extension": cmd_construct_extension,
    "construct-multiscale": cmd_construct_multiscale,
    "certify": cmd_certify,
    "probe": cmd_probe,
    "lemma43": cmd_lemma43,
    "blocks": cmd_blocks,
    "reduce-group": cmd_reduce_group,
}


def run(req: dict):
    """Execute a validated request; returns ``(exit status, JSON text, CSV text)``."""
    rng = random.Random(req["seed"])
    doc, schema, passed, table = COMMANDS[req["command"]](req, rng)
    schemas.validate(doc, schema)
    return (EXIT_PASS if passed else EXIT_FAIL), dumps(doc), table


def _write_schemas(out):
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    for name, schema in sorted(schemas.all_schemas().items()):
        (path / f"{name}.schema.json").write_text(dumps(schema))


def main(argv=None):
    ns = build_parser().parse_args(argv)
    if ns.command == "schemas":
        _write_schemas(ns.out)
        return EXIT_PASS
    try:
        req = to_request(ns)
        status, text, table = run(req)
    except (RequestError, DomainError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    except BudgetExceeded as e:
        print(f"budget exceeded: {e.what}: predicted cost {e.predicted}, budget {e.budget}",
              file=sys.stderr)
        return EXIT_BUDGET
    if req["out"]:
        Path(req["out"]).write_text(text)
        print(f"{req['command']}: {'PASS' if status == EXIT_PASS else 'FAIL'} -> {req['out']}")
    else:
        sys.stdout.write(text)
    if req["csv"] and table is not None:
        Path(req["csv"]).write_text(table)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
