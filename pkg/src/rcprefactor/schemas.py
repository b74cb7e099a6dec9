"""JSON schemas for scenario files and CLI outputs."""

_NUM = {"type": "number"}
_MATRIX = {"type": "array", "minItems": 1,
           "items": {"type": "array", "minItems": 1, "items": _NUM}}
_NUM_OR_INF = {"anyOf": [_NUM, {"enum": ["inf", "-inf"]}]}

SCENARIO = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "scenario",
    "type": "object",
    "required": ["W", "q", "Q"],
    "additionalProperties": False,
    "properties": {
        "W": _MATRIX,
        "q": _MATRIX,
        "Q": {"type": "array", "minItems": 1, "items": _NUM},
        "R": {"type": "number", "minimum": 0},
        "labels_x": {"type": "array", "items": {"type": "string"}},
        "labels_y": {"type": "array", "items": {"type": "string"}},
    },
}

ANALYZE = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "analyze report",
    "type": "object",
    "required": ["rate", "e_r", "rho_hat", "s_star", "r_cr", "i_gmi", "regular",
                 "regime", "alpha_order", "y1", "v_s", "delta", "exponent_gap"],
    "properties": {
        "rate": _NUM, "e_r": _NUM, "rho_hat": {"type": "number", "minimum": 0, "maximum": 1},
        "s_star": {"type": "number", "minimum": 0}, "r_cr": _NUM, "i_gmi": _NUM,
        "regular": {"type": "boolean"},
        "regime": {"enum": ["REG_HIGH", "REG_LOW", "IRR_HIGH", "IRR_LOW"]},
        "alpha_order": _NUM,
        "y1": {"type": "array", "items": {"type": "integer"}},
        "v_s": {"anyOf": [_NUM, {"type": "null"}]},
        "delta": {"anyOf": [_NUM, {"type": "null"}]},
        "exponent_gap": {"anyOf": [_NUM_OR_INF, {"type": "null"}]},
        "y_star": {"anyOf": [{"type": "integer"}, {"type": "null"}]},
        "p_star": {"anyOf": [_MATRIX, {"type": "null"}]},
    },
}

PREFACTOR = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "prefactor fit",
    "type": "object",
    "required": ["slope", "intercept", "residual", "predicted_slope", "tolerance",
                 "status", "regime", "n_values", "log_bound", "e_r"],
    "properties": {
        "slope": _NUM, "intercept": _NUM, "residual": _NUM, "predicted_slope": _NUM,
        "deviation": _NUM, "tolerance": _NUM, "status": {"enum": ["PASS", "FAIL"]},
        "regime": {"enum": ["REG_HIGH", "REG_LOW", "IRR_HIGH", "IRR_LOW"]},
        "n_values": {"type": "array", "items": {"type": "integer"}},
        "log_bound": {"type": "array", "items": _NUM},
        "e_r": _NUM,
    },
}

SIMULATE = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "simulation estimate",
    "type": "object",
    "required": ["p_hat", "stderr", "trials", "seed", "n", "M"],
    "properties": {
        "p_hat": {"type": "number", "minimum": 0, "maximum": 1},
        "stderr": {"type": "number", "minimum": 0},
        "trials": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
        "n": {"type": "integer", "minimum": 1},
        "M": {"type": "integer", "minimum": 1},
    },
}
