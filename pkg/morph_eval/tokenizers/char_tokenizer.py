"""
Character-level tokenization

The first character is a standalone token; every following character is a
continuation token (g ##i ##t ##t ##i ##m).
"""

from morph_eval.models import TokenizedWord
from morph_eval.tokenizers.base import Tokenizer, from_pieces


def char_tokenize(word: str) -> TokenizedWord:
    """Split a word into code points."""
    if not word:
        raise ValueError("cannot tokenize an empty word")
    return from_pieces(word, list(word))


class CharTokenizer(Tokenizer):
    name = "char"

    def tokenize(self, word: str) -> TokenizedWord:
        return char_tokenize(word)
