"""JSON Schemas for every document the command line reads or writes.

Big integers are decimal strings throughout.  ``docs/schemas`` holds the
same schemas as files, regenerated with ``sumset-orders schemas --out``.
"""

import jsonschema

_DRAFT = "https://json-schema.org/draft/2020-12/schema"
_BIG = {"type": "string", "pattern": "^-?[0-9]+$"}
_PATTERN = {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1}

INTEGER_SET = {"type": "array", "items": {"type": "integer", "minimum": 0}}
MODP_SET = {
    "type": "object",
    "required": ["p", "t", "elements"],
    "properties": {
        "p": {"type": "integer", "minimum": 2},
        "t": {"type": "integer", "minimum": 0},
        "elements": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
    },
    "additionalProperties": False,
}

SETS_FILE = {
    "$schema": _DRAFT,
    "title": "sets",
    "type": "array",
    "minItems": 1,
    "items": {"anyOf": [INTEGER_SET, MODP_SET]},
}

CERTIFICATE = {
    "$schema": _DRAFT,
    "title": "certificate",
    "type": "object",
    "required": ["kind", "n", "passed", "failures", "folds", "checks", "generator", "sets"],
    "properties": {
        "kind": {"enum": ["construct-int", "construct-modp", "construct-extension",
                          "construct-multiscale", "certify"]},
        "n": {"type": "integer", "minimum": 1},
        "passed": {"type": "boolean"},
        "failures": {"type": "array", "items": {"type": "string"}},
        "folds": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["h", "sizes", "expected", "observed", "method"],
                "properties": {
                    "h": {"type": "integer", "minimum": 1},
                    "sizes": {"type": "array", "items": _BIG},
                    "expected": _PATTERN,
                    "observed": _PATTERN,
                    "method": {"type": "string"},
                },
                "additionalProperties": False,
            },
        },
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "passed", "detail"],
                "properties": {"name": {"type": "string"}, "passed": {"type": "boolean"},
                               "detail": {"type": "string"}},
                "additionalProperties": False,
            },
        },
        "generator": {"type": "object"},
        "sets": {"anyOf": [{"type": "null"}, {"type": "array", "items": {"anyOf": [INTEGER_SET, MODP_SET]}}]},
    },
    "additionalProperties": False,
}

FAMILY_REPORT = {
    "$schema": _DRAFT,
    "title": "block family report",
    "type": "object",
    "required": ["family", "report"],
    "properties": {
        "family": {
            "type": "object",
            "required": ["h", "kind", "params", "ambient"],
            "properties": {
                "h": {"type": "integer", "minimum": 1},
                "kind": {"enum": ["X", "Y", "Z"]},
                "params": {"type": "array", "items": {"type": "array", "items": {"type": "object"}}},
                "ambient": {},
            },
        },
        "report": {
            "type": "object",
            "required": ["h", "kind", "method", "passed", "sizes", "violations"],
            "properties": {
                "passed": {"type": "boolean"},
                "sizes": {"type": "object", "additionalProperties": {"type": "array", "items": _BIG}},
                "violations": {"type": "array"},
            },
        },
    },
}

PROBE = {
    "$schema": _DRAFT,
    "title": "probe report",
    "type": "object",
    "required": ["probes", "orders"],
    "properties": {
        "probes": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["set", "h_max", "sizes", "degree", "stabilization_index", "slope"],
                "properties": {
                    "set": {"type": "string"},
                    "h_max": {"type": "integer", "minimum": 1},
                    "sizes": {"type": "array", "items": _BIG},
                    "degree": {"type": "integer", "minimum": 0},
                    "stabilization_index": {"type": ["integer", "null"]},
                    "slope": {"anyOf": [{"type": "null"}, _BIG]},
                },
                "additionalProperties": False,
            },
        },
        "orders": {
            "type": "array",
            "items": {"type": "object", "required": ["h", "order"],
                      "properties": {"h": {"type": "integer"}, "order": _PATTERN}},
        },
        "seed": {"type": ["integer", "null"]},
    },
    "additionalProperties": False,
}

LEMMA43 = {
    "$schema": _DRAFT,
    "title": "scale growth report",
    "type": "object",
    "required": ["alpha", "gamma", "partition", "note", "spread", "rows"],
    "properties": {
        "alpha": {"type": "array", "items": _BIG},
        "gamma": _BIG,
        "partition": {"type": "object"},
        "note": {"type": "string"},
        "spread": {"type": "string"},
        "bounded": {"type": "boolean"},
        "sandwiched": {"type": "boolean"},
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["M", "h", "size", "predicted", "lower", "upper", "ratio"],
                "properties": {"M": {"type": "integer", "minimum": 1}, "h": _BIG, "size": _BIG,
                               "predicted": _BIG, "lower": _BIG, "upper": _BIG,
                               "ratio": {"type": "string"}},
            },
        },
    },
}

SCALE_SYSTEM = {
    "$schema": _DRAFT,
    "title": "scale system",
    "type": "object",
    "required": ["alpha", "gamma"],
    "properties": {
        "n": {"type": "integer"},
        "R": {"type": "integer"},
        "d": {"type": "integer"},
        "alpha": {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": _BIG}},
        "gamma": {"type": "array", "minItems": 1, "items": _BIG},
    },
}

GROUP_REDUCTION = {
    "$schema": _DRAFT,
    "title": "group reduction",
    "type": "object",
    "required": ["path", "N_inf", "detail"],
    "properties": {
        "path": {"enum": ["cyclic", "torsion", "too-small"]},
        "N_inf": _BIG,
        "element_order": {"anyOf": [{"type": "null"}, _BIG]},
        "prime": {"type": ["integer", "null"]},
        "required_rank": {"type": ["integer", "null"]},
        "available_rank": {"type": ["integer", "null"]},
        "threshold_base": {"anyOf": [{"type": "null"}, _BIG]},
        "threshold_exponent": {"type": ["integer", "null"]},
        "detail": {"type": "string"},
    },
}

_PERMS = {"type": "array", "minItems": 1, "items": _PATTERN}
_COMMON = {
    "seed": {"type": ["integer", "null"]},
    "threads": {"type": "integer", "minimum": 1},
    "budget_bits": {"type": ["integer", "null"], "minimum": 1},
    "out": {"type": ["string", "null"]},
    "csv": {"type": ["string", "null"]},
}


def _request(command, required, **props):
    return {
        "$schema": _DRAFT,
        "title": f"{command} request",
        "type": "object",
        "required": ["command", *required],
        "properties": {"command": {"const": command}, **_COMMON, **props},
        "additionalProperties": False,
    }


_N = {"type": "integer", "minimum": 1}
_BRUTE = {"enum": ["auto", "yes", "no"]}

REQUESTS = {
    "construct-int": _request("construct-int", ["n", "H"], n=_N, H=_N,
                              sigma={"anyOf": [{"type": "null"}, _PERMS]}, brute=_BRUTE),
    "construct-modp": _request("construct-modp", ["n", "H", "p"], n=_N, H=_N,
                               p={"type": "integer", "minimum": 2},
                               sigma={"anyOf": [{"type": "null"}, _PERMS]}, brute=_BRUTE),
    "construct-extension": _request("construct-extension", ["n", "H"], n=_N, H=_N,
                                    tau={"anyOf": [{"type": "null"}, _PERMS]},
                                    tau_inf={"anyOf": [{"type": "null"}, _PATTERN]},
                                    delta={"type": "integer", "minimum": 1}, brute=_BRUTE),
    "construct-multiscale": _request("construct-multiscale", ["n", "R"], n=_N, R=_N,
                                     sigma={"anyOf": [{"type": "null"}, _PERMS]},
                                     M={"type": ["integer", "null"], "minimum": 1},
                                     system={"type": ["string", "null"]}),
    "certify": _request("certify", ["sets", "expect"], sets={"type": "string"},
                        expect={"type": "array", "minItems": 1,
                                "items": {"type": "object", "required": ["h", "pattern"],
                                          "properties": {"h": _N, "pattern": _PATTERN}}}),
    "probe": _request("probe", ["h_max"], h_max=_N,
                      set={"anyOf": [{"type": "null"}, {"type": "array", "items": INTEGER_SET}]},
                      sets={"type": ["string", "null"]},
                      random={"anyOf": [{"type": "null"},
                                        {"type": "array", "items": _N, "minItems": 2, "maxItems": 3}]}),
    "lemma43": _request("lemma43", ["alpha", "gamma", "M"],
                        alpha={"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 0}},
                        gamma=_N, M={"type": "array", "minItems": 1, "items": _N},
                        factor={"type": "number", "exclusiveMinimum": 1}),
    "blocks": _request("blocks", ["kind", "n", "h"], kind={"enum": ["X", "Y", "Z"]}, n=_N, h=_N,
                       H={"type": ["integer", "null"], "minimum": 1},
                       p={"type": "integer", "minimum": 2}, w={"type": ["integer", "null"]},
                       method={"enum": ["closed-form", "brute-force"]}),
    "reduce-group": _request("reduce-group", ["n", "H"], n=_N, H=_N, infinite={"type": "boolean"},
                             factors={"type": "array", "items": {"type": "integer", "minimum": 2}}),
}

DOCUMENTS = {
    "sets": SETS_FILE,
    "certificate": CERTIFICATE,
    "family_report": FAMILY_REPORT,
    "probe": PROBE,
    "lemma43": LEMMA43,
    "scale_system": SCALE_SYSTEM,
    "group_reduction": GROUP_REDUCTION,
}


def all_schemas():
    """``{file stem: schema}`` for every shipped schema."""
    out = dict(DOCUMENTS)
    out.update({f"request_{k.replace('-', '_')}": v for k, v in REQUESTS.items()})
    return out


def validate(obj, schema):
    """Raise ``jsonschema.ValidationError`` (with ``json_path``) on mismatch."""
    jsonschema.validate(obj, schema, cls=jsonschema.Draft202012Validator)
