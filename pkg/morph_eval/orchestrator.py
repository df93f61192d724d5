"""
Evaluation Orchestrator for the morphology-aware diagnostics

This module runs one (tokenizer, gold split) evaluation as an ordered series of
steps and assembles the MetricsReport.
"""

from typing import List, Optional, Sequence, Tuple
import logging

from pydantic import BaseModel, Field

from morph_eval.errors import MissingSegmentationError
from morph_eval.metrics import (
    AGGREGATES,
    affix_metrics,
    aggregate,
    boundary_f1_macro,
    boundary_prf_micro,
    bootstrap_ci,
    check_report_consistency,
    continuation_rate,
    fertility,
    granularity_band,
    item_diagnostics,
    lemma_single_counts,
    over_under_seg,
    pred_boundaries,
    sequence_agreement,
)
from morph_eval.models import (
    DEFAULT_EPSILON,
    LONG_WORD_CHARS,
    ConfidenceInterval,
    ItemDiagnostics,
    LineIssue,
    MetricsReport,
    MorphAnalysis,
    TokenizedWord,
)
from morph_eval.morphdata import gold_segmentation, top_suffixes
from morph_eval.tokenizers.base import Tokenizer

logger = logging.getLogger(__name__)

DEFAULT_AFFIX_TOP = 200
DEFAULT_RESAMPLES = 1000


class EvaluationResult(BaseModel):
    report: MetricsReport
    items: List[ItemDiagnostics] = Field(default_factory=list)


class EvaluationOrchestrator:
    """
    Runs the full diagnostic suite for one tokenizer on one gold split.
    """

    def __init__(
        self,
        tokenizer: Tokenizer,
        affix_top: int = DEFAULT_AFFIX_TOP,
        bootstrap_resamples: int = 0,
        seed: int = 0,
        epsilon: float = DEFAULT_EPSILON,
    ):
        """
        Initialize the evaluation orchestrator.

        Args:
            tokenizer: The tokenizer under evaluation
            affix_top: Size of the default affix set (most frequent gold suffixes)
            bootstrap_resamples: Number of bootstrap resamples; 0 disables intervals
            seed: Seed for the bootstrap generator
            epsilon: Denominator guard of the per-item ratios
        """
        self.tokenizer = tokenizer
        self.affix_top = affix_top
        self.bootstrap_resamples = bootstrap_resamples
        self.seed = seed
        self.epsilon = epsilon

    def evaluate(
        self,
        analyses: Sequence[MorphAnalysis],
        split: str,
        issues: Sequence[LineIssue] = (),
        affix_set: Optional[Sequence[str]] = None,
        vocab_size: Optional[int] = None,
    ) -> EvaluationResult:
        """
        Evaluate the tokenizer on a gold split.

        Args:
            analyses: Normalized gold analyses
            split: Split label used in the report
            issues: Malformed lines met while loading the split
            affix_set: Affix types to score; defaults to the most frequent gold suffixes
            vocab_size: Vocabulary size recorded in the report

        Returns:
            The report and the per-item diagnostics
        """
        name = self.tokenizer.name
        report = MetricsReport(
            tokenizer=name,
            split=split,
            vocab_size=vocab_size if vocab_size is not None else self._vocab_size(),
            word_count=len(analyses),
            malformed_lines=len(issues),
        )
        logger.info(f"Evaluating {name} on {split}: {len(analyses)} analyses")

        # Step 1: Tokenize every gold word
        logger.info("Step 1: Tokenizing gold words...")
        predictions: List[Optional[TokenizedWord]] = []
        for analysis in analyses:
            try:
                predictions.append(self.tokenizer.tokenize(analysis.word))
            except MissingSegmentationError:
                predictions.append(None)
        report.missing_count = sum(1 for prediction in predictions if prediction is None)
        report.long_word_count = sum(1 for analysis in analyses if len(analysis.word) > LONG_WORD_CHARS)
        if report.missing_count:
            logger.warning(f"{report.missing_count} gold words have no segmentation in the pre-tokenized input")

        stream = [prediction for prediction in predictions if prediction is not None]
        if not stream:
            logger.warning(f"No tokenized words for {split}; report is empty")
            report.flags.append("empty_split")
            return EvaluationResult(report=report)

        # Step 2: Granularity over the gold words
        logger.info("Step 2: Measuring granularity...")
        report.fertility = fertility(stream)
        report.continuation_rate = continuation_rate(stream)
        report.unk_word_rate = sum(1 for tokenized in stream if tokenized.has_unknown) / len(stream)
        known_tokens = [token for tokenized in stream for token in tokenized.tokens if not token.is_unknown]
        report.mean_token_length = (
            sum(len(token.text) for token in known_tokens) / len(known_tokens) if known_tokens else 0.0
        )
        report.granularity_band = granularity_band(report.fertility, report.continuation_rate)

        # Step 3: Build the evaluation pool
        logger.info("Step 3: Aligning gold segmentations...")
        pool: List[Tuple[MorphAnalysis, TokenizedWord]] = []
        for analysis, prediction in zip(analyses, predictions):
            if prediction is None:
                continue
            if not gold_segmentation(analysis).concatenative:
                report.skipped_nonconcatenative += 1
                continue
            if prediction.has_unknown:
                report.skipped_unknown += 1
                continue
            pool.append((analysis, prediction))
        if report.skipped_nonconcatenative:
            logger.warning(f"Skipped {report.skipped_nonconcatenative} non-concatenative items in {split}")
        report.item_count = len(pool)

        # Step 4: Per-item diagnostics
        logger.info("Step 4: Computing item diagnostics...")
        items = [item_diagnostics(gold_segmentation(analysis), prediction, self.epsilon) for analysis, prediction in pool]
        pairs = [(gold_segmentation(analysis).boundaries, pred_boundaries(prediction)) for analysis, prediction in pool]

        # Step 5: Boundary alignment
        logger.info("Step 5: Scoring boundary alignment...")
        if pairs:
            report.micro_p, report.micro_r, report.micro_f1 = boundary_prf_micro(pairs, report.flags)
            report.macro_f1 = boundary_f1_macro(pairs, self.epsilon)
            report.macro_p = aggregate(items, "macro_p", self.epsilon)
            report.macro_r = aggregate(items, "macro_r", self.epsilon)
            report.subwords_per_word = aggregate(items, "subwords_per_word", self.epsilon)
        else:
            report.flags.append("no_evaluable_items")

        # Step 6: Lemma integrity
        logger.info("Step 6: Checking lemma integrity...")
        lemma_counts = lemma_single_counts(analyses, self.tokenizer)
        report.lemma_single_rate = lemma_counts.single / lemma_counts.total if lemma_counts.total else 0.0
        report.lemma_unk_count = lemma_counts.unknown
        if items:
            report.lemma_hit_rate = aggregate(items, "lemma_hit_rate", self.epsilon)
            report.lemma_span_rate = aggregate(items, "lemma_span_rate", self.epsilon)

        # Step 7: Over/under-segmentation
        logger.info("Step 7: Measuring over- and under-segmentation...")
        report.overseg, report.underseg = over_under_seg([(item.n, item.k) for item in items], self.epsilon)

        # Step 8: Sequence agreement
        logger.info("Step 8: Computing sequence agreement...")
        agreement = sequence_agreement([(gold_segmentation(analysis).morphs, prediction.pieces) for analysis, prediction in pool])
        report.cer, report.wer, report.mer, report.wil, report.wip, report.exact_match_rate = agreement

        # Step 9: Affix correspondence
        logger.info("Step 9: Scoring affix correspondence...")
        affixes = list(affix_set) if affix_set is not None else top_suffixes(analyses, self.affix_top)
        report.affix_types = len(affixes)
        if affixes:
            report.affix_coverage, report.affix_atomicity = affix_metrics(
                analyses, predictions, affixes, self.tokenizer.vocabulary
            )
        else:
            report.flags.append("no_affixes")

        # Step 10: Bootstrap intervals
        if self.bootstrap_resamples > 0 and items:
            logger.info(f"Step 10: Bootstrapping {self.bootstrap_resamples} resamples...")
            for metric in AGGREGATES:
                low, high = bootstrap_ci(items, metric, self.bootstrap_resamples, self.seed, epsilon=self.epsilon)
                report.cis[metric] = ConfidenceInterval(low=low, high=high)

        violations = check_report_consistency(report.model_dump(), tolerance=1e-6)
        for violation in violations:
            logger.warning(f"Report consistency ({name}, {split}): {violation}")
        if violations:
            report.flags.append("consistency_violation")

        logger.info(
            f"{name} on {split}: F1mu={report.micro_f1:.3f} F1M={report.macro_f1:.3f} "
            f"fertility={report.fertility:.3f} items={report.item_count}"
        )
        return EvaluationResult(report=report, items=items)

    def _vocab_size(self) -> Optional[int]:
        vocabulary = self.tokenizer.vocabulary
        return len(vocabulary) if vocabulary is not None else None
