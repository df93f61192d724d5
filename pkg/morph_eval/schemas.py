# Input line schemas and the report schema
from typing import Any, Dict

from morph_eval.models import MetricsReport

GOLD_LINE_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "properties": {
        "word": {"type": "string", "minLength": 1},
        "lemma": {"type": "string", "minLength": 1},
        "suffixes": {"type": "string"},
    },
    "required": ["word", "lemma", "suffixes"],
}

PRETOKENIZED_LINE_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "properties": {
        "word": {"type": "string", "minLength": 1},
        "tokens": {
            "type": "array",
            "items": {"type": "string", "minLength": 1},
            "minItems": 1,
        },
    },
    "required": ["word", "tokens"],
}

METRICS_REPORT_SCHEMA: Dict[str, Any] = MetricsReport.model_json_schema()
