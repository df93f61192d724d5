"""
Pre-tokenized segmentations

Segmentations produced by external morphological tokenizers are consumed as
JSON Lines data ({"word": ..., "tokens": [...]}) instead of being recomputed.
"""

from pathlib import Path
from typing import Dict, List, Tuple, Union
import json
import logging

from jsonschema import Draft7Validator
from pydantic import ValidationError

from morph_eval.errors import MissingSegmentationError
from morph_eval.models import DEFAULT_CONTINUATION_MARKER, LineIssue, TokenizedWord
from morph_eval.morphdata import normalize, read_lines
from morph_eval.schemas import PRETOKENIZED_LINE_SCHEMA
from morph_eval.tokenizers.base import Tokenizer, from_pieces, strip_marker

logger = logging.getLogger(__name__)

_pretokenized_validator = Draft7Validator(PRETOKENIZED_LINE_SCHEMA)


def _parse_line(raw: str, marker: str, lowercase: bool) -> TokenizedWord:
    record = json.loads(raw)
    errors = list(_pretokenized_validator.iter_errors(record))
    if errors:
        raise ValueError("; ".join(error.message for error in errors))

    word = normalize(record["word"].strip(), lowercase)
    pieces = [normalize(strip_marker(token.strip(), marker)[0], lowercase) for token in record["tokens"]]
    if "".join(pieces) != word:
        raise ValueError(f"tokens {record['tokens']} do not concatenate to '{word}'")
    return from_pieces(word, pieces)


def load_pretokenized_with_issues(
    path: Union[str, Path],
    marker: str = DEFAULT_CONTINUATION_MARKER,
    lowercase: bool = True,
) -> Tuple[Dict[str, TokenizedWord], List[LineIssue]]:
    """
    Load a pre-tokenized file into a word -> TokenizedWord map.

    Later lines for the same word override earlier ones. Lines whose tokens do
    not reconstruct the word are skipped and reported.
    """
    segmentations: Dict[str, TokenizedWord] = {}
    issues: List[LineIssue] = []
    overridden = 0

    for line_number, raw in enumerate(read_lines(path), 1):
        if not raw.strip():
            continue
        try:
            tokenized = _parse_line(raw, marker, lowercase)
        except (ValueError, ValidationError, TypeError, AttributeError) as e:
            message = str(e).splitlines()[0] if str(e) else type(e).__name__
            logger.warning(f"{path}:{line_number}: skipped pre-tokenized line ({message})")
            issues.append(LineIssue(path=str(path), line=line_number, message=message))
            continue
        if tokenized.word in segmentations:
            overridden += 1
        segmentations[tokenized.word] = tokenized

    if overridden:
        logger.warning(f"{path}: {overridden} duplicate words, later lines kept")
    logger.info(f"Loaded {len(segmentations)} pre-tokenized words from {path}, {len(issues)} skipped lines")
    return segmentations, issues


def pretokenized_adapter(
    path: Union[str, Path],
    marker: str = DEFAULT_CONTINUATION_MARKER,
    lowercase: bool = True,
) -> Dict[str, TokenizedWord]:
    segmentations, _ = load_pretokenized_with_issues(path, marker, lowercase)
    return segmentations


class PretokenizedTokenizer(Tokenizer):
    name = "pretokenized"

    def __init__(self, segmentations: Dict[str, TokenizedWord]):
        self._segmentations = segmentations

    def __len__(self) -> int:
        return len(self._segmentations)

    def tokenize(self, word: str) -> TokenizedWord:
        try:
            return self._segmentations[word]
        except KeyError:
            raise MissingSegmentationError(word) from None
