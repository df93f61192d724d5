from pathlib import Path
from typing import List, Optional, Sequence
import logging

from morph_eval.config import RunConfig
from morph_eval.errors import ConfigError
from morph_eval.models import MetricsReport, MorphAnalysis, Vocabulary
from morph_eval.morphdata import load_corpus, load_gold_with_issues, split_name
from morph_eval.orchestrator import EvaluationOrchestrator, EvaluationResult
from morph_eval.tokenizers import Tokenizer, build_tokenizer, load_vocabulary
from morph_eval.trainer import rank_words, top_k_vocab

logger = logging.getLogger(__name__)


class EvaluationService:
    """
    Service for evaluating tokenizers against gold morphological analyses
    """

    @staticmethod
    def resolve_vocabulary(config: RunConfig) -> Optional[Vocabulary]:
        """
        Vocabulary for the configured tokenizer

        A word tokenizer without --vocab uses the top-k words of --corpus.
        """
        if config.vocab is not None:
            return load_vocabulary(config.vocab, config.continuation_marker, config.special_tokens)
        if config.tokenizer == "word" and config.corpus is not None and config.top_k:
            ranking = rank_words(load_corpus(config.corpus, config.lowercase))
            return top_k_vocab(ranking, config.top_k[0])
        return None

    @staticmethod
    def build_tokenizer(config: RunConfig, vocabulary: Optional[Vocabulary] = None) -> Tokenizer:
        if vocabulary is None:
            vocabulary = EvaluationService.resolve_vocabulary(config)
        return build_tokenizer(
            config.tokenizer,
            vocab=vocabulary,
            pretokenized_path=config.pretokenized,
            continuation_marker=config.continuation_marker,
            lowercase=config.lowercase,
        )

    @staticmethod
    def evaluate_analyses(
        tokenizer: Tokenizer,
        analyses: Sequence[MorphAnalysis],
        split: str,
        config: RunConfig,
        malformed: int = 0,
        vocab_size: Optional[int] = None,
    ) -> EvaluationResult:
        orchestrator = EvaluationOrchestrator(
            tokenizer,
            affix_top=config.affix_top,
            bootstrap_resamples=config.bootstrap,
            seed=config.seed,
        )
        result = orchestrator.evaluate(analyses, split, vocab_size=vocab_size)
        result.report.malformed_lines = malformed
        return result

    @staticmethod
    def evaluate_gold_file(
        tokenizer: Tokenizer, gold_path: Path, config: RunConfig, vocab_size: Optional[int] = None
    ) -> EvaluationResult:
        """
        Evaluate a tokenizer on one gold split file

        Args:
            tokenizer: Tokenizer under evaluation
            gold_path: Gold JSON Lines file
            config: Run configuration (bootstrap, seed, affix set size, normalization)
            vocab_size: Vocabulary size recorded in the report

        Returns:
            The evaluation result for the split
        """
        analyses, issues = load_gold_with_issues(gold_path, config.lowercase)
        return EvaluationService.evaluate_analyses(
            tokenizer, analyses, split_name(gold_path), config, malformed=len(issues), vocab_size=vocab_size
        )

    @staticmethod
    def run_evaluate(config: RunConfig) -> List[MetricsReport]:
        """
        Evaluate the configured tokenizer on every gold split

        Args:
            config: Run configuration in eval mode

        Returns:
            One report per gold split, in the order of the --gold flags
        """
        if config.mode != "eval":
            raise ConfigError(f"run_evaluate needs eval mode, got {config.mode}")
        tokenizer = EvaluationService.build_tokenizer(config)
        logger.info(f"Evaluating tokenizer {tokenizer.name} on {len(config.gold)} gold splits")

        reports = []
        for gold_path in config.gold:
            result = EvaluationService.evaluate_gold_file(tokenizer, gold_path, config)
            reports.append(result.report)
        return reports
