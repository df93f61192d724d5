"""
Common tokenizer interface

Every tokenization scheme maps one normalized word to a TokenizedWord. Inputs
are expected to be normalized already (see morph_eval.morphdata.normalize).
"""

from abc import ABC, abstractmethod
from typing import Iterable, List, Optional, Tuple

from morph_eval.models import DEFAULT_CONTINUATION_MARKER, UNK_TOKEN, Token, TokenizedWord, Vocabulary


def strip_marker(piece: str, marker: str = DEFAULT_CONTINUATION_MARKER) -> Tuple[str, bool]:
    """Split a piece into its text and whether it carried the continuation marker."""
    if marker and piece.startswith(marker) and len(piece) > len(marker):
        return piece[len(marker):], True
    return piece, False


def from_pieces(word: str, pieces: Iterable[str]) -> TokenizedWord:
    """Build a TokenizedWord from marker-free pieces; every piece after the first continues the word."""
    tokens = [Token(text=piece, is_continuation=index > 0) for index, piece in enumerate(pieces)]
    return TokenizedWord(word=word, tokens=tuple(tokens))


def unknown_word(word: str, unk_token: str = UNK_TOKEN) -> TokenizedWord:
    return TokenizedWord(word=word, tokens=(Token(text=unk_token, is_unknown=True),))


def render(tokenized: TokenizedWord, marker: str = DEFAULT_CONTINUATION_MARKER) -> List[str]:
    """Pieces as a vocabulary would spell them, continuation marker included."""
    return [marker + token.text if token.is_continuation else token.text for token in tokenized.tokens]


class Tokenizer(ABC):
    """A word-in / tokens-out tokenization scheme"""

    name: str = "tokenizer"

    @property
    def vocabulary(self) -> Optional[Vocabulary]:
        return None

    @abstractmethod
    def tokenize(self, word: str) -> TokenizedWord:
        """Tokenize a single non-empty normalized word"""
