"""
vocab.txt reading and writing

One entry per line, specials first; continuation entries carry the literal
marker prefix. Compatible with the widespread BERT-style vocab.txt files.
"""

from pathlib import Path
from typing import Iterable, List, Optional, Union
import logging
import os
import re
import tempfile

from pydantic import ValidationError

from morph_eval.errors import VocabularyError
from morph_eval.models import DEFAULT_CONTINUATION_MARKER, UNK_TOKEN, Vocabulary
from morph_eval.morphdata import read_lines

logger = logging.getLogger(__name__)

SPECIAL_PATTERN = re.compile(r"^\[[A-Z_]+\]$")


def build_vocabulary(
    entries: Iterable[str],
    specials: Iterable[str] = (UNK_TOKEN,),
    continuation_marker: str = DEFAULT_CONTINUATION_MARKER,
) -> Vocabulary:
    """Construct a Vocabulary, turning validation problems into VocabularyError."""
    try:
        return Vocabulary(
            entries=tuple(entries),
            specials=tuple(specials),
            continuation_marker=continuation_marker,
        )
    except ValidationError as e:
        raise VocabularyError(f"Invalid vocabulary: {e.errors()[0]['msg']}") from e


def load_vocabulary(
    path: Union[str, Path],
    continuation_marker: str = DEFAULT_CONTINUATION_MARKER,
    special_tokens: Optional[Iterable[str]] = None,
) -> Vocabulary:
    """
    Load a vocab.txt file.

    Bracketed upper-case entries such as [PAD] are always special. Other
    special tokens are not recognizable in the file and must be passed in.

    Args:
        path: UTF-8 file, one entry per line
        continuation_marker: Prefix that marks continuation entries
        special_tokens: Additional entries to treat as special tokens

    Returns:
        The vocabulary, in file order
    """
    entries: List[str] = [line.strip() for line in read_lines(path)]
    entries = [entry for entry in entries if entry]

    seen = set()
    duplicates = [entry for entry in entries if entry in seen or seen.add(entry)]
    if duplicates:
        raise VocabularyError(f"{path}: duplicate entries {duplicates[:5]}")

    declared = set(special_tokens or ())
    absent = sorted(declared - seen)
    if absent:
        raise VocabularyError(f"{path}: special tokens {absent} are not vocabulary entries")
    specials = [entry for entry in entries if entry in declared or SPECIAL_PATTERN.match(entry)]
    vocabulary = build_vocabulary(entries, specials, continuation_marker)
    logger.info(f"Loaded vocabulary {path}: {len(vocabulary)} entries, {len(specials)} special tokens")
    return vocabulary


def write_text_atomic(path: Union[str, Path], text: str) -> None:
    """Write text through a temporary file in the target directory, then rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    handle, temp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(handle, "w", encoding="utf-8", newline="\n") as out:
            out.write(text)
        os.replace(temp_name, path)
    except BaseException:
        if os.path.exists(temp_name):
            os.unlink(temp_name)
        raise


def save_vocabulary(vocabulary: Vocabulary, path: Union[str, Path]) -> None:
    write_text_atomic(path, "".join(entry + "\n" for entry in vocabulary.entries))
    logger.info(f"Wrote {len(vocabulary)} vocabulary entries to {path}")
