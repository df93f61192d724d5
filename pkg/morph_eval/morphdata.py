"""
Gold morphological analyses and raw text corpora

This module loads, normalizes and validates the gold JSON Lines files
(word / lemma / "+"-joined suffixes) and plain-text corpora, and derives the
gold segmentation (morph sequence and boundary offsets) of each analysis.
"""

from collections import Counter
from functools import lru_cache
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple, Union
import json
import logging
import unicodedata

from jsonschema import Draft7Validator
from pydantic import ValidationError

from morph_eval.errors import InputFileError
from morph_eval.models import BoundarySet, Corpus, GoldSegmentation, LineIssue, MorphAnalysis
from morph_eval.schemas import GOLD_LINE_SCHEMA

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
SUFFIX_SEPARATOR = "+"

_gold_validator = Draft7Validator(GOLD_LINE_SCHEMA)


@lru_cache(maxsize=1)
def _announce_casing() -> None:
    logger.info(
        "Lowercasing uses simple case mapping; Turkish dotted/dotless i is not special-cased"
    )


def normalize(text: str, lowercase: bool = True) -> str:
    """
    Bring text into canonical form: Unicode NFKC, then lowercasing.

    Args:
        text: Raw text
        lowercase: Apply locale-independent lowercasing after NFKC

    Returns:
        The normalized text
    """
    text = unicodedata.normalize("NFKC", text)
    if lowercase:
        _announce_casing()
        text = text.lower()
    return text


def read_lines(path: PathLike) -> List[str]:
    """Read a UTF-8 file as a list of lines; any I/O or decoding problem is fatal."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read().splitlines()
    except (OSError, UnicodeDecodeError) as e:
        raise InputFileError(f"Cannot read {path}: {str(e)}") from e


def _parse_gold_line(raw: str, lowercase: bool) -> MorphAnalysis:
    record = json.loads(raw)
    errors = sorted(_gold_validator.iter_errors(record), key=lambda e: list(e.path))
    if errors:
        raise ValueError("; ".join(error.message for error in errors))

    suffix_field = record["suffixes"].strip()
    suffixes = suffix_field.split(SUFFIX_SEPARATOR) if suffix_field else []
    suffixes = [normalize(suffix.strip(), lowercase) for suffix in suffixes]
    if any(not suffix for suffix in suffixes):
        raise ValueError(f"empty morph in suffix chain '{suffix_field}'")

    return MorphAnalysis(
        word=normalize(record["word"].strip(), lowercase),
        lemma=normalize(record["lemma"].strip(), lowercase),
        suffixes=tuple(suffixes),
    )


def load_gold_with_issues(
    path: PathLike, lowercase: bool = True
) -> Tuple[List[MorphAnalysis], List[LineIssue]]:
    """
    Load a gold analysis file and collect per-line problems.

    Args:
        path: JSON Lines file with word, lemma and suffixes fields
        lowercase: Lowercase during normalization

    Returns:
        The analyses in file order and the list of malformed lines
    """
    analyses: List[MorphAnalysis] = []
    issues: List[LineIssue] = []

    for line_number, raw in enumerate(read_lines(path), 1):
        if not raw.strip():
            continue
        try:
            analyses.append(_parse_gold_line(raw, lowercase))
        except (ValueError, ValidationError, TypeError, AttributeError) as e:
            message = str(e).splitlines()[0] if str(e) else type(e).__name__
            logger.warning(f"{path}:{line_number}: skipped malformed gold line ({message})")
            issues.append(LineIssue(path=str(path), line=line_number, message=message))

    logger.info(f"Loaded {len(analyses)} analyses from {path}, {len(issues)} malformed lines")
    return analyses, issues


def load_gold(path: PathLike, lowercase: bool = True) -> List[MorphAnalysis]:
    """Load a gold analysis file; malformed lines are logged and skipped."""
    analyses, _ = load_gold_with_issues(path, lowercase)
    return analyses


def dump_gold(analyses: Iterable[MorphAnalysis], path: PathLike) -> None:
    """Write analyses back out in the gold JSON Lines format."""
    with open(path, "w", encoding="utf-8") as handle:
        for analysis in analyses:
            record = {
                "word": analysis.word,
                "lemma": analysis.lemma,
                "suffixes": SUFFIX_SEPARATOR.join(analysis.suffixes),
            }
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")


def gold_segmentation(analysis: MorphAnalysis) -> GoldSegmentation:
    """
    Derive the gold morph sequence and its boundary offsets.

    Offsets are cumulative code-point lengths of the morphs. Items whose morphs
    do not concatenate to the surface word are flagged, not rejected.
    """
    morphs = analysis.morphs
    return GoldSegmentation(
        word=analysis.word,
        morphs=morphs,
        k=len(morphs),
        boundaries=BoundarySet.from_lengths([len(morph) for morph in morphs]),
        concatenative="".join(morphs) == analysis.word,
    )


def load_corpus(path: PathLike, lowercase: bool = True) -> Corpus:
    """
    Load a plain-text corpus, one document per line.

    Args:
        path: UTF-8 text file
        lowercase: Lowercase during normalization

    Returns:
        Corpus with the non-blank documents in order and whitespace-split word counts
    """
    documents: List[str] = []
    counts: Counter = Counter()

    for raw in read_lines(path):
        document = normalize(raw, lowercase).strip()
        if not document:
            continue
        documents.append(document)
        counts.update(document.split())

    logger.info(f"Loaded corpus {path}: {len(documents)} documents, {sum(counts.values())} tokens, {len(counts)} types")
    return Corpus(documents=tuple(documents), word_counts=dict(counts))


def corpus_from_texts(texts: Sequence[str], lowercase: bool = True) -> Corpus:
    """Build a corpus from in-memory documents, normalized like load_corpus."""
    documents = [normalize(text, lowercase).strip() for text in texts]
    documents = [document for document in documents if document]
    counts: Counter = Counter()
    for document in documents:
        counts.update(document.split())
    return Corpus(documents=tuple(documents), word_counts=dict(counts))


def top_suffixes(analyses: Iterable[MorphAnalysis], n: int = 200) -> List[str]:
    """The n most frequent suffix types, by count then lexicographically."""
    counts = Counter(suffix for analysis in analyses for suffix in analysis.suffixes)
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return [suffix for suffix, _ in ranked[:n]]


def split_name(path: PathLike) -> str:
    return Path(path).stem
