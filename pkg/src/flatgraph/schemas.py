"""JSON schemas for the file formats read and the documents written by the CLI."""

SCHEMA_VERSION = 1

_edge = {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 2, "maxItems": 2}
_number = {"anyOf": [{"type": "number"}, {"type": "string"}]}
_point = {"type": "array", "items": _number}
_points = {"type": "array", "items": _point}

GRAPH = {
    "type": "object",
    "required": ["n", "edges"],
    "properties": {"n": {"type": "integer", "minimum": 0}, "edges": {"type": "array", "items": _edge}},
}

MATRIX = {
    "type": "object",
    "required": ["n", "entries"],
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "entries": {"type": "array", "items": {"type": "array", "items": {"anyOf": [{"type": "integer"},
                                                                                     {"type": "string"}]}}},
    },
}

LENGTHS = {
    "type": "object",
    "required": ["lengths"],
    "properties": {
        "lengths": {
            "type": "array",
            "items": {"type": "array", "prefixItems": [{"type": "integer"}, {"type": "integer"}, _number],
                      "minItems": 3, "maxItems": 3},
        }
    },
}


def _doc(command: str, properties: dict, required: list[str]) -> dict:
    return {
        "type": "object",
        "required": ["schema_version", "command", *required],
        "properties": {"schema_version": {"const": SCHEMA_VERSION}, "command": {"const": command},
                       **properties},
    }


_trail_step = {
    "type": "object",
    "required": ["rule", "outcome", "detail"],
    "properties": {"rule": {"type": "string"}, "outcome": {"enum": ["applied", "skipped", "inconclusive"]},
                   "detail": {"type": "string"}},
}

VERDICT = {
    "type": "object",
    "required": ["status", "rule", "witness", "trail"],
    "properties": {
        "status": {"enum": ["flattenable", "not_flattenable", "unknown"]},
        "rule": {"type": ["string", "null"]},
        "witness": {"type": ["object", "null"]},
        "trail": {"type": "array", "items": _trail_step},
    },
}

OUTPUT = {
    "minor": _doc("minor", {"has_minor": {"type": "boolean"}, "k4_minor_free": {"type": "boolean"},
                            "pattern": {"type": "string"}, "model": {"type": ["object", "null"]}}, []),
    "decide": _doc("decide", {"verdict": VERDICT, "X": {"type": "string"}, "Y": {"type": "string"}},
                   ["verdict", "X", "Y"]),
    "independent": _doc("independent", {"independent": {"type": "boolean"},
                                        "evidence": {"enum": ["certificate", "evidence"]},
                                        "trials": {"type": "integer"}, "best_rank": {"type": "integer"},
                                        "edges": {"type": "integer"},
                                        "witness": {"anyOf": [_points, {"type": "null"}]}},
                        ["independent", "evidence", "witness"]),
    "forests": _doc("forests", {"d": {"type": "integer"},
                                "partition": {"anyOf": [{"type": "array", "items": {"type": "array",
                                                                                    "items": _edge}},
                                                        {"type": "null"}]}}, ["d", "partition"]),
    "edm": _doc("edm", {"action": {"enum": ["check", "realize", "certificate"]}, "is_edm": {"type": "boolean"},
                        "schoenberg": MATRIX, "points": _points, "matrix": MATRIX, "graph": GRAPH,
                        "lengths": LENGTHS["properties"]["lengths"],
                        "completed_entries": {"type": "array", "items": _edge}}, ["action"]),
    "embed-frechet": _doc("embed-frechet", {"points": _points, "dim": {"type": "integer"}}, ["points"]),
    "norlander": _doc("norlander", {"p": _number, "eps": {"type": "number"}, "lo": {"type": "number"},
                                    "hi": {"type": "number"}, "reference": {"type": "number"}},
                      ["lo", "hi", "reference"]),
    "solve": _doc("solve", {"residual": {"type": "number"}, "realization": _points,
                            "space": {"type": "string"}, "evidence": {"type": "string"}},
                  ["residual", "realization", "evidence"]),
    "sweep": _doc("sweep", {"X": {"type": "string"},
                            "results": {"type": "array", "items": {
                                "type": "object", "required": ["p", "residual"],
                                "properties": {"p": _number, "residual": {"type": "number"}}}},
                            "evidence": {"type": "string"}},
                  ["results", "evidence"]),
    "explain": _doc("explain", {"text": {"type": "string"}, "verdict": VERDICT}, ["text"]),
    "error": {
        "type": "object",
        "required": ["schema_version", "error", "exit_code"],
        "properties": {"schema_version": {"const": SCHEMA_VERSION}, "error": {"type": "string"},
                       "exit_code": {"type": "integer"}},
    },
}
