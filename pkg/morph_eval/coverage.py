"""
Top-K word-vocabulary coverage

The full word vocabulary of the training corpus is ranked by frequency; for a
retained prefix of K types we measure the fraction of training and test token
occurrences whose type is retained.
"""

from typing import List, Sequence, Tuple
import logging

import numpy as np

from morph_eval.errors import CoverageError
from morph_eval.models import Corpus, CoveragePoint, WordVocabRanking

logger = logging.getLogger(__name__)

# Guards float round-off when a cumulative share equals the requested target
COVERAGE_TOLERANCE = 1e-12


def _cumulative_mass(ranking: WordVocabRanking, corpus: Corpus) -> np.ndarray:
    counts = np.array([corpus.word_counts.get(word, 0) for word, _ in ranking.words], dtype=np.int64)
    return np.cumsum(counts)


def _check_ks(ks: Sequence[int], size: int) -> None:
    if not ks:
        raise CoverageError("At least one k is required")
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise CoverageError("ks must be sorted ascending without duplicates")
    out_of_range = [k for k in ks if not 1 <= k <= size]
    if out_of_range:
        raise CoverageError(f"k values {out_of_range} are outside [1, {size}]")


def coverage_curve(
    ranking: WordVocabRanking, train: Corpus, test: Corpus, ks: Sequence[int]
) -> List[CoveragePoint]:
    """
    Token-mass coverage of the top-k training types on train and test.

    Args:
        ranking: Frequency ranking built from the training corpus
        train: Training corpus
        test: Test corpus
        ks: Retained prefix sizes, ascending, each in [1, |V|]

    Returns:
        One CoveragePoint per k
    """
    size = len(ranking)
    if size == 0:
        raise CoverageError("The word ranking is empty")
    _check_ks(ks, size)

    train_mass = _cumulative_mass(ranking, train)
    test_mass = _cumulative_mass(ranking, test)
    test_types = np.cumsum([1 if word in test.word_counts else 0 for word, _ in ranking.words])
    train_total = train.total_tokens
    test_total = test.total_tokens
    test_type_total = len(test.word_counts)

    points: List[CoveragePoint] = []
    for k in ks:
        index = k - 1
        points.append(
            CoveragePoint(
                k=k,
                vocab_fraction=k / size,
                train_coverage=float(train_mass[index]) / train_total if train_total else 0.0,
                test_coverage=float(test_mass[index]) / test_total if test_total else 0.0,
                test_type_coverage=float(test_types[index]) / test_type_total if test_type_total else None,
            )
        )
    logger.info(f"Coverage curve: {len(points)} points over |V|={size}")
    return points


def default_ks(vocab_size: int, points: int = 20) -> List[int]:
    """Log-spaced k grid from 1% to 100% of the vocabulary, deduplicated and ascending."""
    if vocab_size < 1:
        raise CoverageError("Vocabulary size must be >= 1")
    start = max(1.0, vocab_size * 0.01)
    grid = np.ceil(np.geomspace(start, vocab_size, num=max(points, 1))).astype(np.int64)
    ks = sorted({int(min(max(k, 1), vocab_size)) for k in grid})
    if ks[-1] != vocab_size:
        ks.append(vocab_size)
    return ks


def smallest_k_for_coverage(
    ranking: WordVocabRanking, train: Corpus, targets: Sequence[float]
) -> List[Tuple[float, int]]:
    """
    For each target train coverage, the smallest k whose top-k prefix reaches it.

    Args:
        ranking: Frequency ranking built from the training corpus
        train: Training corpus
        targets: Coverage targets in (0, 1]

    Returns:
        (target, k) pairs in the order of the targets
    """
    bad = [target for target in targets if not 0.0 < target <= 1.0]
    if bad:
        raise CoverageError(f"Coverage targets {bad} are outside (0, 1]")
    if len(ranking) == 0 or train.total_tokens == 0:
        raise CoverageError("Coverage targets need a non-empty ranking and training corpus")

    shares = _cumulative_mass(ranking, train) / train.total_tokens
    result = []
    for target in targets:
        index = int(np.searchsorted(shares, target - COVERAGE_TOLERANCE, side="left"))
        result.append((target, min(index, len(ranking) - 1) + 1))
    return result


def oov_rate(ranking: WordVocabRanking, k: int, corpus: Corpus) -> float:
    """Token-weighted rate of words outside the top-k word vocabulary."""
    if not 1 <= k <= len(ranking):
        raise CoverageError(f"k={k} is outside [1, {len(ranking)}]")
    total = corpus.total_tokens
    if total == 0:
        return 0.0
    retained = {word for word, _ in ranking.words[:k]}
    covered = sum(count for word, count in corpus.word_counts.items() if word in retained)
    return 1.0 - covered / total


def coverage_points_for_targets(
    ranking: WordVocabRanking, train: Corpus, test: Corpus, targets: Sequence[float]
) -> List[CoveragePoint]:
    """Coverage points at the smallest k reaching each train-coverage target."""
    ks = sorted({k for _, k in smallest_k_for_coverage(ranking, train, targets)})
    return coverage_curve(ranking, train, test, ks)

