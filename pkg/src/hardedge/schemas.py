"""JSON schemas (draft 2020-12) for every JSON document the CLI writes."""

_NUM = {"type": ["number", "null"]}

ERROR = {
    "type": "object",
    "required": ["error"],
    "properties": {
        "error": {
            "type": "object",
            "required": ["kind", "message"],
            "properties": {
                "kind": {"enum": ["validation", "domain", "numerical"]},
                "message": {"type": "string"},
                "residual": _NUM,
            },
        }
    },
}

CHECK_PARAMETRIX = {
    "type": "object",
    "required": ["alpha", "samples", "seed", "max_jump_residual", "max_det_deviation", "asymptotic_slope"],
    "properties": {
        "alpha": {"type": "number"},
        "samples": {"type": "integer"},
        "seed": {"type": "integer"},
        "max_jump_residual": {"type": "number"},
        "max_det_deviation": {"type": "number"},
        "asymptotic_slope": _NUM,
        "asymptotic_max_residual": {"type": "number"},
    },
    "additionalProperties": False,
}

GAP = {
    "type": "object",
    "required": ["log_det", "n_used"],
    "properties": {
        "log_det": {"type": "number"},
        "n_used": {"type": "integer"},
        "resolvent_diag": {"type": "number"},
        "gen_fn": {
            "type": "object",
            "required": ["x", "value", "n_used"],
            "properties": {"x": {"type": "number"}, "value": {"type": "number"},
                           "n_used": {"type": "integer"}},
        },
    },
    "additionalProperties": False,
}

SIMULATE = {
    "type": "object",
    "required": ["out", "n", "steps", "seed", "acceptance_rate", "attempts"],
    "properties": {
        "out": {"type": "string"},
        "n": {"type": "integer"},
        "steps": {"type": "integer"},
        "seed": {"type": "integer"},
        "acceptance_rate": {"type": "number"},
        "attempts": {"type": "integer"},
    },
}

SELFTEST = {
    "type": "object",
    "required": ["passed", "criteria"],
    "properties": {
        "passed": {"type": "boolean"},
        "criteria": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["number", "name", "passed", "runtime", "limit"],
                "properties": {
                    "number": {"type": "integer"},
                    "name": {"type": "string"},
                    "passed": {"type": "boolean"},
                    "runtime": {"type": "number"},
                    "limit": {"type": "number"},
                    "failures": {"type": "array", "items": {"type": "string"}},
                },
            },
        },
    },
}

SCHEMAS = {"error": ERROR, "check-parametrix": CHECK_PARAMETRIX, "gap": GAP,
           "simulate": SIMULATE, "selftest": SELFTEST}
