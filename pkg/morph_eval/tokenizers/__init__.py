"""
Tokenization schemes

Character, word, WordPiece and pre-tokenized (external analyzer) schemes
behind one word-in / tokens-out interface.
"""

from pathlib import Path
from typing import Optional, Union

from morph_eval.errors import ConfigError
from morph_eval.models import DEFAULT_CONTINUATION_MARKER, Vocabulary
from morph_eval.tokenizers.base import Tokenizer, from_pieces, render, strip_marker, unknown_word
from morph_eval.tokenizers.char_tokenizer import CharTokenizer, char_tokenize
from morph_eval.tokenizers.word_tokenizer import WordTokenizer, word_tokenize
from morph_eval.tokenizers.wordpiece_tokenizer import WordPieceTokenizer, wordpiece_tokenize
from morph_eval.tokenizers.pretokenized import (
    PretokenizedTokenizer,
    load_pretokenized_with_issues,
    pretokenized_adapter,
)
from morph_eval.tokenizers.vocabulary import build_vocabulary, load_vocabulary, save_vocabulary

TOKENIZER_KINDS = ("char", "word", "wordpiece", "pretokenized")


def build_tokenizer(
    kind: str,
    vocab: Optional[Vocabulary] = None,
    pretokenized_path: Optional[Union[str, Path]] = None,
    continuation_marker: str = DEFAULT_CONTINUATION_MARKER,
    lowercase: bool = True,
) -> Tokenizer:
    """
    Create a tokenizer of the given kind.

    Args:
        kind: One of char, word, wordpiece, pretokenized
        vocab: Vocabulary for the word and wordpiece kinds
        pretokenized_path: JSON Lines segmentations for the pretokenized kind
        continuation_marker: Marker used in the pre-tokenized file
        lowercase: Lowercase pre-tokenized words during normalization

    Returns:
        The tokenizer
    """
    if kind == "char":
        return CharTokenizer()
    if kind in ("word", "wordpiece"):
        if vocab is None:
            raise ConfigError(f"The {kind} tokenizer needs a vocabulary")
        return WordTokenizer(vocab) if kind == "word" else WordPieceTokenizer(vocab)
    if kind == "pretokenized":
        if pretokenized_path is None:
            raise ConfigError("The pretokenized tokenizer needs a segmentation file")
        return PretokenizedTokenizer(pretokenized_adapter(pretokenized_path, continuation_marker, lowercase))
    raise ConfigError(f"Unknown tokenizer kind '{kind}', expected one of {', '.join(TOKENIZER_KINDS)}")


__all__ = [
    'Tokenizer',
    'TOKENIZER_KINDS',
    'build_tokenizer',
    'from_pieces',
    'render',
    'strip_marker',
    'unknown_word',
    'CharTokenizer',
    'char_tokenize',
    'WordTokenizer',
    'word_tokenize',
    'WordPieceTokenizer',
    'wordpiece_tokenize',
    'PretokenizedTokenizer',
    'pretokenized_adapter',
    'load_pretokenized_with_issues',
    'build_vocabulary',
    'load_vocabulary',
    'save_vocabulary',
]
