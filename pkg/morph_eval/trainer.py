"""
WordPiece vocabulary training and word-frequency rankings

The trainer starts from the special tokens and the observed alphabet (plain
form for word-initial characters, continuation form for the others) and then
merges adjacent pieces by the WordPiece score

    freq(pair) / (freq(left) * freq(right))

highest first, ties broken by higher pair frequency and then by the merged
string. Pieces never cross whitespace. Because the merge sequence is fully
determined, a vocabulary trained to a smaller target is a prefix of one
trained to a larger target on the same corpus and config.
"""

from collections import Counter, defaultdict
from typing import Dict, List, Set, Tuple
import heapq
import logging

from morph_eval.errors import CoverageError, TrainerError
from morph_eval.models import (
    UNK_TOKEN,
    Corpus,
    TrainerConfig,
    TrainingResult,
    Vocabulary,
    WordVocabRanking,
)

logger = logging.getLogger(__name__)

Pair = Tuple[str, str]


class WordPieceTrainer:
    """Trains a WordPiece vocabulary from corpus word counts"""

    def __init__(self, config: TrainerConfig):
        self.config = config
        self.marker = config.continuation_marker

    def _initial_pieces(self, word: str) -> List[str]:
        return [word[0]] + [self.marker + char for char in word[1:]]

    def _merged(self, left: str, right: str) -> str:
        return left + right[len(self.marker):]

    def train(self, corpus: Corpus) -> TrainingResult:
        """
        Train a vocabulary.

        Args:
            corpus: Training corpus (normalized word counts)

        Returns:
            The vocabulary, the merge list and whether training ran out of merges
        """
        if corpus.is_empty():
            raise TrainerError("Cannot train on an empty corpus")

        specials = list(self.config.special_tokens)
        words = sorted(corpus.word_counts.items())
        counts = [count for _, count in words]
        segmentations = [self._initial_pieces(word) for word, _ in words]

        initials = sorted({pieces[0] for pieces in segmentations})
        continuations = sorted({piece for pieces in segmentations for piece in pieces[1:]})
        entries: List[str] = list(specials)
        present = set(entries)
        for piece in initials + continuations:
            if piece not in present:
                entries.append(piece)
                present.add(piece)
        base_size = len(entries)

        target = self.config.target_vocab_size
        if target < base_size:
            raise TrainerError(
                f"Target vocabulary size {target} is smaller than specials + alphabet ({base_size})"
            )

        piece_freq: Counter = Counter()
        pair_freq: Counter = Counter()
        pair_words: Dict[Pair, Set[int]] = defaultdict(set)
        pairs_by_piece: Dict[str, Set[Pair]] = defaultdict(set)

        for index, pieces in enumerate(segmentations):
            count = counts[index]
            for piece in pieces:
                piece_freq[piece] += count
            for pair in zip(pieces, pieces[1:]):
                pair_freq[pair] += count
                pair_words[pair].add(index)
                pairs_by_piece[pair[0]].add(pair)
                pairs_by_piece[pair[1]].add(pair)

        heap: List[Tuple[float, int, str, str, str]] = []

        def score(pair: Pair) -> float:
            return pair_freq[pair] / (piece_freq[pair[0]] * piece_freq[pair[1]])

        def push(pair: Pair) -> None:
            freq = pair_freq.get(pair, 0)
            if freq >= self.config.min_pair_frequency:
                heapq.heappush(heap, (-score(pair), -freq, self._merged(*pair), pair[0], pair[1]))

        for pair in pair_freq:
            push(pair)

        merges: List[str] = []
        exhausted = False

        while len(entries) < target:
            best = None
            while heap:
                neg_score, neg_freq, merged, left, right = heapq.heappop(heap)
                pair = (left, right)
                freq = pair_freq.get(pair, 0)
                # stale entries are skipped; every change pushed a fresh one
                if freq == -neg_freq and freq >= self.config.min_pair_frequency and score(pair) == -neg_score:
                    best = (pair, merged)
                    break
            if best is None:
                exhausted = True
                break

            (left, right), merged = best
            touched_pairs: Set[Pair] = set()
            touched_pieces: Set[str] = {left, right, merged}

            for index in sorted(pair_words.get((left, right), ())):
                pieces = segmentations[index]
                count = counts[index]
                for pair in zip(pieces, pieces[1:]):
                    pair_freq[pair] -= count
                    pair_words[pair].discard(index)
                    touched_pairs.add(pair)

                rebuilt: List[str] = []
                position = 0
                while position < len(pieces):
                    if position + 1 < len(pieces) and pieces[position] == left and pieces[position + 1] == right:
                        rebuilt.append(merged)
                        piece_freq[left] -= count
                        piece_freq[right] -= count
                        piece_freq[merged] += count
                        position += 2
                    else:
                        rebuilt.append(pieces[position])
                        position += 1
                segmentations[index] = rebuilt

                for pair in zip(rebuilt, rebuilt[1:]):
                    pair_freq[pair] += count
                    pair_words[pair].add(index)
                    pairs_by_piece[pair[0]].add(pair)
                    pairs_by_piece[pair[1]].add(pair)
                    touched_pairs.add(pair)

            for pair in touched_pairs:
                if pair_freq.get(pair, 0) <= 0:
                    pair_freq.pop(pair, None)
                    pair_words.pop(pair, None)
                    pairs_by_piece[pair[0]].discard(pair)
                    pairs_by_piece[pair[1]].discard(pair)

            for piece in list(touched_pieces):
                if piece_freq.get(piece, 0) <= 0:
                    piece_freq.pop(piece, None)
                    touched_pieces.discard(piece)

            refresh = set(touched_pairs)
            for piece in touched_pieces:
                refresh.update(pairs_by_piece.get(piece, ()))
            for pair in sorted(refresh):
                if pair in pair_freq:
                    push(pair)

            if merged not in present:
                entries.append(merged)
                present.add(merged)
                merges.append(merged)
                if len(merges) % 1000 == 0:
                    logger.info(f"Trainer: {len(merges)} merges, vocabulary size {len(entries)}")

        if exhausted:
            logger.warning(
                f"Trainer stopped early at {len(entries)} entries (target {target}): "
                f"no pair reaches min_pair_frequency={self.config.min_pair_frequency}"
            )

        vocabulary = Vocabulary(
            entries=tuple(entries),
            specials=tuple(specials),
            continuation_marker=self.marker,
        )
        logger.info(f"Trained WordPiece vocabulary: {len(vocabulary)} entries ({base_size} base, {len(merges)} merges)")
        return TrainingResult(vocabulary=vocabulary, merges=tuple(merges), base_size=base_size, exhausted=exhausted)


def train_wordpiece(corpus: Corpus, config: TrainerConfig) -> Vocabulary:
    """Train a WordPiece vocabulary of at most config.target_vocab_size entries."""
    return WordPieceTrainer(config).train(corpus).vocabulary


def rank_words(corpus: Corpus) -> WordVocabRanking:
    """Rank word types by count (descending), ties broken lexicographically."""
    if corpus.is_empty():
        raise TrainerError("Cannot rank the words of an empty corpus")
    ranked = sorted(corpus.word_counts.items(), key=lambda item: (-item[1], item[0]))
    return WordVocabRanking(words=tuple(ranked))


def top_k_vocab(ranking: WordVocabRanking, k: int) -> Vocabulary:
    """Word-level vocabulary of the k most frequent words plus [UNK]."""
    if not 1 <= k <= len(ranking):
        raise CoverageError(f"k={k} is outside [1, {len(ranking)}]")
    words = [word for word, _ in ranking.words[:k] if word != UNK_TOKEN]
    return Vocabulary(entries=(UNK_TOKEN,) + tuple(words), specials=(UNK_TOKEN,))
