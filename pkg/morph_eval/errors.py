"""
Errors for the morphology-aware tokenizer evaluation toolkit.

Fatal problems raise one of the MorphEvalError subclasses below. Per-line and
per-item problems are never raised; they are collected and counted instead.
"""


class MorphEvalError(Exception):
    """Base class for all fatal toolkit errors"""


class InputFileError(MorphEvalError):
    """An input file is missing, unreadable or not valid UTF-8"""


class VocabularyError(MorphEvalError):
    """A vocabulary is malformed (duplicate entries, missing [UNK], ...)"""


class TrainerError(MorphEvalError):
    """WordPiece training cannot proceed with the given corpus and config"""


class CoverageError(MorphEvalError):
    """Invalid coverage request (k out of range, empty ranking)"""


class ConfigError(MorphEvalError):
    """Invalid run or trainer configuration"""


class MissingSegmentationError(MorphEvalError):
    """A pre-tokenized segmentation was requested for a word that has none"""

    def __init__(self, word: str):
        super().__init__(f"No pre-tokenized segmentation for '{word}'")
        self.word = word
