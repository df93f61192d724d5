"""
Morphology-aware tokenization diagnostics

Granularity (fertility, continuation rate, subwords per word), boundary
alignment (micro and macro precision/recall/F1 over character offsets),
lemma integrity (boundary hit, single-token lemma, lemma span), over- and
under-segmentation indices, sequence agreement (CER, WER, MER, WIL, WIP,
exact match), affix coverage and atomicity, and percentile bootstrap
intervals over item-level diagnostics.

Boundaries are 1-indexed code-point offsets of segment ends; the word-final
offset is part of both the gold and the predicted set.
"""

from typing import Callable, Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union
import logging
import math

import Levenshtein
import numpy as np

from morph_eval.errors import MissingSegmentationError
from morph_eval.models import (
    DEFAULT_EPSILON,
    BoundarySet,
    Corpus,
    GoldSegmentation,
    GranularityStats,
    ItemDiagnostics,
    MorphAnalysis,
    TokenizedWord,
    Vocabulary,
)
from morph_eval.morphdata import gold_segmentation
from morph_eval.tokenizers.base import Tokenizer

logger = logging.getLogger(__name__)

SEPARATOR = "+"
DEGENERATE_PRECISION = "degenerate_precision_denominator"
DEGENERATE_RECALL = "degenerate_recall_denominator"


# Granularity
def fertility(stream: Sequence[TokenizedWord]) -> float:
    """Average number of subword tokens per word."""
    if not stream:
        raise ValueError("fertility needs at least one word")
    return sum(tokenized.n for tokenized in stream) / len(stream)


def continuation_rate(stream: Sequence[TokenizedWord]) -> float:
    """Fraction of all tokens that continue a word."""
    total = sum(tokenized.n for tokenized in stream)
    if total == 0:
        raise ValueError("continuation rate needs at least one token")
    return sum(tokenized.continuation_count for tokenized in stream) / total


def granularity_band(fertility_value: float, continuation_value: float) -> str:
    """Interpretation band of a (fertility, continuation rate) pair."""
    if continuation_value >= 0.90:
        return "near_character"
    if 1.4 <= fertility_value <= 1.7 and 0.30 <= continuation_value <= 0.45:
        return "morpheme_visible"
    if fertility_value > 1.7:
        return "fragmented"
    if fertility_value < 1.4:
        return "over_merged"
    return "transitional"


def granularity_stats(corpus: Corpus, tokenizer: Tokenizer) -> GranularityStats:
    """
    Token-weighted fertility and continuation rate over a corpus.

    Each word type is tokenized once. Standard deviations are taken over the
    per-document values. Unknown words count as one token with no continuation.

    Args:
        corpus: Normalized corpus
        tokenizer: Tokenizer to measure

    Returns:
        GranularityStats for the corpus
    """
    if corpus.is_empty():
        raise ValueError("granularity statistics need a non-empty corpus")

    shapes: Dict[str, Tuple[int, int, int, bool]] = {}
    missing = 0
    for word in corpus.word_counts:
        try:
            tokenized = tokenizer.tokenize(word)
        except MissingSegmentationError:
            missing += 1
            continue
        known_chars = sum(len(token.text) for token in tokenized.tokens if not token.is_unknown)
        shapes[word] = (tokenized.n, tokenized.continuation_count, known_chars, tokenized.has_unknown)
    if missing:
        logger.warning(f"Granularity: {missing} corpus word types have no segmentation and are ignored")

    words = tokens = continuations = known_tokens = known_chars = unknown = 0
    for word, count in corpus.word_counts.items():
        shape = shapes.get(word)
        if shape is None:
            continue
        n, cont, chars, is_unknown = shape
        words += count
        tokens += n * count
        continuations += cont * count
        if is_unknown:
            unknown += count
        else:
            known_tokens += n * count
            known_chars += chars * count

    doc_fertility: List[float] = []
    doc_continuation: List[float] = []
    for document in corpus.documents:
        shaped = [shapes[word] for word in document.split() if word in shapes]
        if not shaped:
            continue
        doc_tokens = sum(shape[0] for shape in shaped)
        doc_fertility.append(doc_tokens / len(shaped))
        doc_continuation.append(sum(shape[1] for shape in shaped) / doc_tokens)

    fert = tokens / words if words else 0.0
    cont = continuations / tokens if tokens else 0.0
    return GranularityStats(
        fertility=fert,
        fertility_sd=float(np.std(doc_fertility)) if doc_fertility else 0.0,
        continuation_rate=cont,
        continuation_sd=float(np.std(doc_continuation)) if doc_continuation else 0.0,
        mean_token_length=known_chars / known_tokens if known_tokens else 0.0,
        unk_word_rate=unknown / words if words else 0.0,
        documents=len(doc_fertility),
        band=granularity_band(fert, cont),
    )


# Boundaries
def pred_boundaries(tokenized: TokenizedWord) -> Optional[BoundarySet]:
    """Cumulative marker-free token lengths; None when the word holds an unknown token."""
    if tokenized.has_unknown:
        return None
    return BoundarySet.from_lengths([len(token.text) for token in tokenized.tokens])


def boundary_counts(gold: BoundarySet, pred: BoundarySet) -> Tuple[int, int, int]:
    gold_set, pred_set = gold.as_set(), pred.as_set()
    tp = len(gold_set & pred_set)
    return tp, len(pred_set - gold_set), len(gold_set - pred_set)


def micro_scores(tp: int, fp: int, fn: int, flags: Optional[List[str]] = None) -> Tuple[float, float, float]:
    """Precision, recall and F1 from summed counts; empty denominators give 0 and a flag."""
    if tp + fp == 0:
        p = 0.0
        if flags is not None:
            flags.append(DEGENERATE_PRECISION)
    else:
        p = tp / (tp + fp)
    if tp + fn == 0:
        r = 0.0
        if flags is not None:
            flags.append(DEGENERATE_RECALL)
    else:
        r = tp / (tp + fn)
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f1


def boundary_prf_micro(
    items: Sequence[Tuple[BoundarySet, BoundarySet]], flags: Optional[List[str]] = None
) -> Tuple[float, float, float]:
    """
    Micro-averaged boundary precision, recall and F1.

    Args:
        items: (gold, predicted) boundary sets
        flags: Optional list that receives degenerate-denominator flags

    Returns:
        (precision, recall, f1)
    """
    tp = fp = fn = 0
    for gold, pred in items:
        item_tp, item_fp, item_fn = boundary_counts(gold, pred)
        tp += item_tp
        fp += item_fp
        fn += item_fn
    return micro_scores(tp, fp, fn, flags)


def item_prf(gold: BoundarySet, pred: BoundarySet, epsilon: float = DEFAULT_EPSILON) -> Tuple[float, float, float]:
    """Per-item precision, recall and F1 with epsilon-guarded denominators."""
    tp, _, _ = boundary_counts(gold, pred)
    p = tp / (len(pred) + epsilon)
    r = tp / (len(gold) + epsilon)
    f1 = 2 * p * r / (p + r + epsilon)
    return p, r, f1


def boundary_f1_macro(
    items: Sequence[Tuple[BoundarySet, BoundarySet]], epsilon: float = DEFAULT_EPSILON
) -> float:
    """Mean of per-item boundary F1."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if not items:
        return 0.0
    return sum(item_prf(gold, pred, epsilon)[2] for gold, pred in items) / len(items)


# Lemma integrity
def lemma_hit(gold: GoldSegmentation, pred: BoundarySet) -> bool:
    """Whether some predicted boundary falls exactly at the end of the lemma."""
    return len(gold.lemma) in pred


def lemma_span(gold: GoldSegmentation, pred: BoundarySet) -> bool:
    """Whether the first predicted subword covers exactly the lemma surface."""
    return bool(pred.offsets) and pred.offsets[0] == len(gold.lemma)


class LemmaSingleCounts(NamedTuple):
    single: int
    unknown: int
    total: int
    missing: int


def lemma_single_counts(analyses: Iterable[MorphAnalysis], tokenizer: Tokenizer) -> LemmaSingleCounts:
    single = unknown = total = missing = 0
    for analysis in analyses:
        try:
            tokenized = tokenizer.tokenize(analysis.lemma)
        except MissingSegmentationError:
            missing += 1
            continue
        total += 1
        if tokenized.n == 1:
            single += 1
        if tokenized.has_unknown:
            unknown += 1
    return LemmaSingleCounts(single, unknown, total, missing)


def lemma_single_rate(analyses: Sequence[MorphAnalysis], tokenizer: Tokenizer) -> float:
    """
    Fraction of lemmas that, tokenized on their own, yield exactly one token.

    An unknown lemma counts as one token; lemma_single_counts reports how many
    of those there were.
    """
    counts = lemma_single_counts(analyses, tokenizer)
    return counts.single / counts.total if counts.total else 0.0


# Over/under-segmentation
def over_under_seg(items: Sequence[Tuple[int, int]], epsilon: float = DEFAULT_EPSILON) -> Tuple[float, float]:
    """OverSeg = mean(n / (k + eps)), UnderSeg = mean(k / (n + eps)) over (n, k) pairs."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if not items:
        return 0.0, 0.0
    over = sum(n / (k + epsilon) for n, k in items) / len(items)
    under = sum(k / (n + epsilon) for n, k in items) / len(items)
    return over, under


# Sequence agreement
def edit_distance(a: Sequence, b: Sequence) -> int:
    """Levenshtein distance over characters (strings) or units (lists)."""
    if isinstance(a, str) and isinstance(b, str):
        return Levenshtein.distance(a, b)
    return Levenshtein.distance(list(a), list(b))


class AlignmentCounts(NamedTuple):
    hits: int
    substitutions: int
    deletions: int
    insertions: int


def align_counts(ref: Sequence, hyp: Sequence) -> AlignmentCounts:
    """
    Hit/substitution/deletion/insertion counts of a minimum-edit alignment.

    Among co-optimal alignments the backtrace prefers the diagonal (hit or
    substitution), then deletion, then insertion.
    """
    rows, cols = len(ref), len(hyp)
    table = [[0] * (cols + 1) for _ in range(rows + 1)]
    for i in range(1, rows + 1):
        table[i][0] = i
    for j in range(1, cols + 1):
        table[0][j] = j
    for i in range(1, rows + 1):
        for j in range(1, cols + 1):
            cost = 0 if ref[i - 1] == hyp[j - 1] else 1
            table[i][j] = min(table[i - 1][j - 1] + cost, table[i - 1][j] + 1, table[i][j - 1] + 1)

    hits = substitutions = deletions = insertions = 0
    i, j = rows, cols
    while i > 0 or j > 0:
        if i > 0 and j > 0:
            cost = 0 if ref[i - 1] == hyp[j - 1] else 1
            if table[i][j] == table[i - 1][j - 1] + cost:
                if cost:
                    substitutions += 1
                else:
                    hits += 1
                i, j = i - 1, j - 1
                continue
        if i > 0 and table[i][j] == table[i - 1][j] + 1:
            deletions += 1
            i -= 1
        else:
            insertions += 1
            j -= 1
    return AlignmentCounts(hits, substitutions, deletions, insertions)


class SequenceAgreement(NamedTuple):
    cer: float
    wer: float
    mer: float
    wil: float
    wip: float
    exact_match_rate: float


def _agreement_from_sums(sums: Mapping[str, float], count: float) -> SequenceAgreement:
    gold_chars, gold_units, pred_units = sums["gold_chars"], sums["gold_units"], sums["pred_units"]
    hits = sums["hits"]
    errors = sums["substitutions"] + sums["deletions"] + sums["insertions"]
    cer = sums["char_edit"] / gold_chars if gold_chars else 0.0
    wer = sums["token_edit"] / gold_units if gold_units else 0.0
    mer = errors / (errors + hits) if errors + hits else 0.0
    wip = (hits / gold_units) * (hits / pred_units) if gold_units and pred_units else 0.0
    wil = 1.0 - wip if gold_units and pred_units else 0.0
    exact = sums["exact_match"] / count if count else 0.0
    return SequenceAgreement(cer, wer, mer, wil, wip, exact)


def _sequence_columns(gold_morphs: Sequence[str], pred_pieces: Sequence[str]) -> Dict[str, int]:
    gold_string = SEPARATOR.join(gold_morphs)
    pred_string = SEPARATOR.join(pred_pieces)
    token_edit = edit_distance(list(gold_morphs), list(pred_pieces))
    alignment = align_counts(list(gold_morphs), list(pred_pieces))
    return {
        "char_edit": edit_distance(gold_string, pred_string),
        "token_edit": token_edit,
        "gold_chars": len(gold_string),
        "gold_units": len(gold_morphs),
        "pred_units": len(pred_pieces),
        "hits": alignment.hits,
        "substitutions": alignment.substitutions,
        "deletions": alignment.deletions,
        "insertions": alignment.insertions,
        "exact_match": int(token_edit == 0),
    }


def sequence_agreement(items: Sequence[Tuple[Sequence[str], Sequence[str]]]) -> SequenceAgreement:
    """
    CER, WER, MER, WIL, WIP and exact-match rate over (gold morphs, predicted pieces) pairs.

    CER compares the "+"-joined strings character by character, WER compares
    the "+"-separated units; both are normalized by the gold length summed
    over items. MER, WIL and WIP use the alignment counts.
    """
    sums: Dict[str, float] = {}
    for gold_morphs, pred_pieces in items:
        for key, value in _sequence_columns(gold_morphs, pred_pieces).items():
            sums[key] = sums.get(key, 0) + value
    if not items:
        return SequenceAgreement(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    return _agreement_from_sums(sums, len(items))


# Affixes
def affix_metrics(
    analyses: Sequence[MorphAnalysis],
    preds: Sequence[Optional[TokenizedWord]],
    affix_set: Iterable[str],
    vocabulary: Optional[Vocabulary] = None,
) -> Tuple[float, float]:
    """
    Affix type coverage and occurrence-level atomicity.

    Coverage is the fraction of affix types that exist verbatim as a subword
    type (of the vocabulary when given, and of the predictions). An occurrence
    is atomic when the predicted boundaries enclose exactly its span, with no
    predicted boundary inside it. Occurrences in words tokenized to [UNK] count
    as non-atomic; words without a prediction are left out.

    Args:
        analyses: Gold analyses
        preds: Predicted tokenization per analysis (None when unavailable)
        affix_set: Affix types to score
        vocabulary: Optional vocabulary whose entries also count as subword types

    Returns:
        (coverage, atomicity)
    """
    requested = list(dict.fromkeys(affix_set))
    if not requested:
        raise ValueError("affix set must be non-empty")

    gold_types = {suffix for analysis in analyses for suffix in analysis.suffixes}
    absent = [affix for affix in requested if affix not in gold_types]
    if absent:
        logger.warning(f"Excluding {len(absent)} affix types absent from the gold data: {absent[:10]}")
    affixes = [affix for affix in requested if affix in gold_types]
    if not affixes:
        return 0.0, 0.0

    subword_types = set(vocabulary.piece_types()) if vocabulary is not None else set()
    for tokenized in preds:
        if tokenized is not None and not tokenized.has_unknown:
            subword_types.update(tokenized.pieces)
    coverage = sum(1 for affix in affixes if affix in subword_types) / len(affixes)

    wanted = set(affixes)
    occurrences = atomic = 0
    for analysis, tokenized in zip(analyses, preds):
        if tokenized is None:
            continue
        if not gold_segmentation(analysis).concatenative:
            continue
        # An unknown word realizes none of its affixes
        pred = pred_boundaries(tokenized)
        offsets = pred.as_set() if pred is not None else None
        start = len(analysis.lemma)
        for suffix in analysis.suffixes:
            end = start + len(suffix)
            if suffix in wanted:
                occurrences += 1
                if offsets is not None and start in offsets and end in offsets and not any(start < b < end for b in offsets):
                    atomic += 1
            start = end

    return coverage, (atomic / occurrences if occurrences else 0.0)


# Item diagnostics and aggregates
def item_diagnostics(
    gold: GoldSegmentation, tokenized: TokenizedWord, epsilon: float = DEFAULT_EPSILON
) -> ItemDiagnostics:
    """All per-item quantities for a concatenative gold item and a known tokenization."""
    pred = pred_boundaries(tokenized)
    if pred is None:
        raise ValueError(f"'{tokenized.word}' holds an unknown token and has no boundaries")
    tp, fp, fn = boundary_counts(gold.boundaries, pred)
    p, r, f1 = item_prf(gold.boundaries, pred, epsilon)
    columns = _sequence_columns(gold.morphs, tokenized.pieces)
    return ItemDiagnostics(
        word=gold.word,
        n=tokenized.n,
        k=gold.k,
        tp=tp,
        fp=fp,
        fn=fn,
        p=min(p, 1.0),
        r=min(r, 1.0),
        f1=min(f1, 1.0),
        lemma_hit=lemma_hit(gold, pred),
        lemma_span=lemma_span(gold, pred),
        exact_match=bool(columns["exact_match"]),
        char_edit=columns["char_edit"],
        token_edit=columns["token_edit"],
        gold_chars=columns["gold_chars"],
        gold_units=columns["gold_units"],
        pred_units=columns["pred_units"],
        hits=columns["hits"],
        substitutions=columns["substitutions"],
        deletions=columns["deletions"],
        insertions=columns["insertions"],
    )


ITEM_COLUMNS = (
    "n", "k", "tp", "fp", "fn", "p", "r", "f1", "lemma_hit", "lemma_span", "exact_match",
    "char_edit", "token_edit", "gold_chars", "gold_units", "pred_units",
    "hits", "substitutions", "deletions", "insertions", "over", "under",
)

Aggregate = Callable[[Mapping[str, float], float], float]


def _micro(index: int) -> Aggregate:
    return lambda sums, count: micro_scores(int(sums["tp"]), int(sums["fp"]), int(sums["fn"]))[index]


def _mean(column: str) -> Aggregate:
    return lambda sums, count: sums[column] / count if count else 0.0


def _agreement(field: str) -> Aggregate:
    return lambda sums, count: getattr(_agreement_from_sums(sums, count), field)


# Every aggregate is a function of column sums, so resamples only re-sum columns
AGGREGATES: Dict[str, Aggregate] = {
    "subwords_per_word": _mean("n"),
    "micro_p": _micro(0),
    "micro_r": _micro(1),
    "micro_f1": _micro(2),
    "macro_p": _mean("p"),
    "macro_r": _mean("r"),
    "macro_f1": _mean("f1"),
    "lemma_hit_rate": _mean("lemma_hit"),
    "lemma_span_rate": _mean("lemma_span"),
    "overseg": _mean("over"),
    "underseg": _mean("under"),
    "cer": _agreement("cer"),
    "wer": _agreement("wer"),
    "mer": _agreement("mer"),
    "wil": _agreement("wil"),
    "wip": _agreement("wip"),
    "exact_match_rate": _agreement("exact_match_rate"),
}


def _item_matrix(items: Sequence[ItemDiagnostics], epsilon: float) -> np.ndarray:
    rows = []
    for item in items:
        row = [float(getattr(item, column)) for column in ITEM_COLUMNS[:-2]]
        row.append(item.n / (item.k + epsilon))
        row.append(item.k / (item.n + epsilon))
        rows.append(row)
    return np.array(rows, dtype=np.float64).reshape(len(items), len(ITEM_COLUMNS))


def _sums(matrix: np.ndarray) -> Dict[str, float]:
    totals = matrix.sum(axis=0)
    return {column: float(total) for column, total in zip(ITEM_COLUMNS, totals)}


def aggregate(items: Sequence[ItemDiagnostics], metric: str, epsilon: float = DEFAULT_EPSILON) -> float:
    """Point estimate of a named aggregate over item diagnostics."""
    if metric not in AGGREGATES:
        raise KeyError(f"Unknown aggregate '{metric}'")
    if not items:
        return 0.0
    return AGGREGATES[metric](_sums(_item_matrix(items, epsilon)), len(items))


def bootstrap_ci(
    items: Sequence[ItemDiagnostics],
    metric: Union[str, Callable[[Sequence[ItemDiagnostics]], float]],
    resamples: int = 1000,
    seed: int = 0,
    confidence: float = 0.95,
    epsilon: float = DEFAULT_EPSILON,
) -> Tuple[float, float]:
    """
    Percentile bootstrap interval from item-level resampling with replacement.

    Args:
        items: Item diagnostics to resample
        metric: Name from AGGREGATES, or a callable over a list of items
        resamples: Number of resamples
        seed: Seed of the numpy generator
        confidence: Interval mass

    Returns:
        (low, high), both values observed among the resampled statistics
    """
    if resamples < 1:
        raise ValueError("resamples must be >= 1")
    if not items:
        raise ValueError("bootstrap needs at least one item")

    rng = np.random.default_rng(seed)
    size = len(items)
    statistics = np.empty(resamples, dtype=np.float64)

    if isinstance(metric, str):
        if metric not in AGGREGATES:
            raise KeyError(f"Unknown aggregate '{metric}'")
        function = AGGREGATES[metric]
        matrix = _item_matrix(items, epsilon)
        for index in range(resamples):
            sample = matrix[rng.integers(0, size, size=size)]
            statistics[index] = function(_sums(sample), size)
    else:
        for index in range(resamples):
            picks = rng.integers(0, size, size=size)
            statistics[index] = metric([items[pick] for pick in picks])

    alpha = (1.0 - confidence) / 2 * 100
    low, high = np.percentile(statistics, [alpha, 100 - alpha], method="nearest")
    return float(low), float(high)


# Consistency checks on report rows
RATE_FIELDS = (
    "micro_p", "micro_r", "micro_f1", "macro_p", "macro_r", "macro_f1",
    "lemma_hit_rate", "lemma_single_rate", "lemma_span_rate", "exact_match_rate",
    "affix_coverage", "affix_atomicity", "continuation_rate", "wip", "wil", "mer",
)


def check_report_consistency(row: Mapping[str, float], tolerance: float = 0.01) -> List[str]:
    """
    Internal-consistency violations of a report row (missing fields are skipped).

    Checks that rates lie in [0, 1], that micro F1 is the harmonic mean of
    micro precision and recall, that OverSeg * UnderSeg >= 1, and that
    WIL = 1 - WIP.
    """
    violations: List[str] = []

    def present(*names: str) -> bool:
        return all(row.get(name) is not None and not math.isnan(row[name]) for name in names)

    for name in RATE_FIELDS:
        if present(name) and not -tolerance <= row[name] <= 1 + tolerance:
            violations.append(f"{name}={row[name]} outside [0, 1]")

    if present("micro_p", "micro_r", "micro_f1"):
        p, r = row["micro_p"], row["micro_r"]
        expected = 2 * p * r / (p + r) if p + r > 0 else 0.0
        if abs(expected - row["micro_f1"]) > tolerance:
            violations.append(f"micro_f1={row['micro_f1']} is not the harmonic mean of P={p}, R={r} ({expected:.4f})")

    if present("overseg", "underseg") and row["overseg"] > 0 and row["underseg"] > 0:
        product = row["overseg"] * row["underseg"]
        if product < 1 - tolerance:
            violations.append(f"overseg*underseg={product:.4f} < 1")

    if present("wil", "wip") and (row["wil"] or row["wip"]):
        if abs(row["wil"] + row["wip"] - 1) > tolerance:
            violations.append(f"wil={row['wil']} and wip={row['wip']} do not sum to 1")

    return violations
