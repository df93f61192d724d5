"""
Word-level tokenization

Words stay intact. A word outside the vocabulary becomes a single [UNK] token.
"""

from morph_eval.models import UNK_TOKEN, Token, TokenizedWord, Vocabulary
from morph_eval.tokenizers.base import Tokenizer, unknown_word


def word_tokenize(word: str, vocab: Vocabulary) -> TokenizedWord:
    """Map a word to exactly one token, unknown iff it is not a vocabulary entry."""
    if not word:
        raise ValueError("cannot tokenize an empty word")
    if word in vocab and word not in vocab.specials:
        return TokenizedWord(word=word, tokens=(Token(text=word),))
    return unknown_word(word, UNK_TOKEN)


class WordTokenizer(Tokenizer):
    name = "word"

    def __init__(self, vocab: Vocabulary):
        self._vocab = vocab

    @property
    def vocabulary(self) -> Vocabulary:
        return self._vocab

    def tokenize(self, word: str) -> TokenizedWord:
        return word_tokenize(word, self._vocab)
