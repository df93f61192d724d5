from pathlib import Path
from typing import Dict, List, Optional, Tuple
import asyncio
import logging

from morph_eval.config import RunConfig
from morph_eval.errors import ConfigError
from morph_eval.metrics import granularity_stats
from morph_eval.models import Corpus, LineIssue, MorphAnalysis, SweepRow, Vocabulary
from morph_eval.morphdata import load_corpus, load_gold_with_issues, split_name
from morph_eval.tokenizers import WordPieceTokenizer
from services.evaluation_service import EvaluationService
from services.report_service import ReportService
from services.training_service import TrainingService

logger = logging.getLogger(__name__)

CORPUS_SPLIT = "corpus"
NEAR_CHARACTER = "near_character"
EXHAUSTED = "exhausted"
# Mean subword length below which a row counts as character-level
NEAR_CHARACTER_TOKEN_LENGTH = 1.1


class SweepService:
    """
    Service for evaluating WordPiece vocabularies across target sizes
    """

    @staticmethod
    def evaluate_row(
        size: int,
        vocabulary: Vocabulary,
        split: str,
        analyses: List[MorphAnalysis],
        issues: List[LineIssue],
        config: RunConfig,
    ) -> SweepRow:
        exhausted = len(vocabulary) < size
        try:
            tokenizer = WordPieceTokenizer(vocabulary)
            result = EvaluationService.evaluate_analyses(
                tokenizer, analyses, split, config, malformed=len(issues), vocab_size=size
            )
            report = result.report
            if exhausted:
                report.flags.append(EXHAUSTED)
            return SweepRow(
                vocab_size=size,
                split=split,
                degenerate=(
                    report.granularity_band == NEAR_CHARACTER
                    or 0 < report.mean_token_length < NEAR_CHARACTER_TOKEN_LENGTH
                ),
                vocab_entries=len(vocabulary),
                exhausted=exhausted,
                report=report,
            )
        except Exception as e:
            logger.exception(f"Sweep row {size}/{split} failed")
            return SweepRow(vocab_size=size, split=split, status="failed", error=str(e))

    @staticmethod
    def granularity_row(size: int, vocabulary: Vocabulary, corpus: Corpus) -> SweepRow:
        try:
            stats = granularity_stats(corpus, WordPieceTokenizer(vocabulary))
            return SweepRow(
                vocab_size=size,
                split=CORPUS_SPLIT,
                degenerate=stats.band == NEAR_CHARACTER or 0 < stats.mean_token_length < NEAR_CHARACTER_TOKEN_LENGTH,
                vocab_entries=len(vocabulary),
                exhausted=len(vocabulary) < size,
                granularity=stats,
            )
        except Exception as e:
            logger.exception(f"Granularity row {size} failed")
            return SweepRow(vocab_size=size, split=CORPUS_SPLIT, status="failed", error=str(e))

    @staticmethod
    async def run_sweep(config: RunConfig) -> List[SweepRow]:
        """
        Train (or reuse) one vocabulary per size and evaluate every gold split

        Rows run concurrently in worker threads; the result is sorted by
        (vocab_size, split). A failing size becomes a failed row.

        Args:
            config: Run configuration in sweep mode

        Returns:
            Sorted sweep rows, including one corpus granularity row per size
        """
        if config.mode != "sweep":
            raise ConfigError(f"run_sweep needs sweep mode, got {config.mode}")
        if not config.vocab_sizes:
            raise ConfigError("The sweep needs at least one vocabulary size")

        print(f"Starting sweep over {len(config.vocab_sizes)} vocabulary sizes...")

        # Step 1: Load corpora and gold splits
        print("Step 1: Loading corpora and gold splits...")
        corpus = load_corpus(config.corpus, config.lowercase)
        granularity_corpus = load_corpus(config.test_corpus, config.lowercase) if config.test_corpus else corpus
        splits: List[Tuple[str, List[MorphAnalysis], List[LineIssue]]] = []
        for gold_path in config.gold:
            analyses, issues = load_gold_with_issues(gold_path, config.lowercase)
            splits.append((split_name(gold_path), analyses, issues))

        # Step 2: Train once, slice every size
        print("Step 2: Training vocabularies...")
        sizes = sorted(set(config.vocab_sizes))
        vocabularies: Dict[int, Vocabulary] = await asyncio.to_thread(
            TrainingService.load_or_train, corpus, config, sizes
        )

        # Step 3: Evaluate rows concurrently
        print("Step 3: Evaluating rows...")
        tasks = []
        failed: List[SweepRow] = []
        for size in sizes:
            vocabulary: Optional[Vocabulary] = vocabularies.get(size)
            if vocabulary is None:
                message = f"vocabulary size {size} is below specials + alphabet"
                logger.error(f"Sweep size {size} failed: {message}")
                failed.append(SweepRow(vocab_size=size, split=CORPUS_SPLIT, status="failed", error=message))
                continue
            for split, analyses, issues in splits:
                tasks.append(asyncio.to_thread(SweepService.evaluate_row, size, vocabulary, split, analyses, issues, config))
            tasks.append(asyncio.to_thread(SweepService.granularity_row, size, vocabulary, granularity_corpus))
        rows = list(await asyncio.gather(*tasks)) + failed

        rows.sort(key=lambda row: (row.vocab_size, row.split))
        degenerate = sum(1 for row in rows if row.degenerate)
        if degenerate:
            logger.warning(f"{degenerate} sweep rows have near-character granularity")
        exhausted = sorted({row.vocab_size for row in rows if row.exhausted})
        if exhausted:
            logger.warning(f"Training ran out of merges before sizes {exhausted}; those rows are flagged {EXHAUSTED}")
        print(f"Sweep complete: {len(rows)} rows, {sum(1 for row in rows if row.status != 'ok')} failed")
        return rows

    @staticmethod
    def write_sweep(rows: List[SweepRow], config: RunConfig) -> List[Path]:
        written = [
            ReportService.write_text(config.out / "sweep.csv", ReportService.sweep_long_csv(rows)),
            ReportService.write_text(config.out / "sweep.md", ReportService.sweep_markdown(rows)),
        ]
        reports = [row.report for row in rows if row.report is not None]
        written += ReportService.write_reports(reports, config.out / "reports", config.formats)
        return written
