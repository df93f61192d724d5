"""
WordPiece inference

Greedy longest-match-first segmentation: the first piece is matched against
plain entries, later pieces against continuation-marked entries. If some
position cannot be matched, the whole word becomes a single [UNK] token.

For example, with a vocabulary holding ev, ##lerimiz and ##den:
    evlerimizden -> [ev, ##lerimiz, ##den]
"""

from typing import Dict, List, Optional

from morph_eval.models import UNK_TOKEN, TokenizedWord, Vocabulary
from morph_eval.tokenizers.base import Tokenizer, from_pieces, unknown_word


def greedy_pieces(word: str, vocab: Vocabulary) -> Optional[List[str]]:
    """Marker-free pieces of the greedy segmentation, or None when some position has no match."""
    specials = set(vocab.specials)
    pieces: List[str] = []
    start = 0
    while start < len(word):
        end = len(word)
        match = None
        while start < end:
            candidate = word[start:end]
            if candidate not in specials and vocab.has_piece(candidate, continuation=start > 0):
                match = candidate
                break
            end -= 1
        if match is None:
            return None
        pieces.append(match)
        start = end
    return pieces


def wordpiece_tokenize(word: str, vocab: Vocabulary) -> TokenizedWord:
    """Tokenize one word with greedy longest-prefix matching."""
    if not word:
        raise ValueError("cannot tokenize an empty word")
    pieces = greedy_pieces(word, vocab)
    if pieces is None:
        return unknown_word(word, UNK_TOKEN)
    return from_pieces(word, pieces)


class WordPieceTokenizer(Tokenizer):
    name = "wordpiece"

    def __init__(self, vocab: Vocabulary):
        self._vocab = vocab
        self._cache: Dict[str, TokenizedWord] = {}

    @property
    def vocabulary(self) -> Vocabulary:
        return self._vocab

    def tokenize(self, word: str) -> TokenizedWord:
        cached = self._cache.get(word)
        if cached is None:
            cached = wordpiece_tokenize(word, self._vocab)
            self._cache[word] = cached
        return cached
