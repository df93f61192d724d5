from pathlib import Path
from typing import List, Optional, Sequence
import argparse
import asyncio
import logging
import os
import sys
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

from morph_eval.config import RunConfig, env_int, read_trainer_file
from morph_eval.errors import MorphEvalError
from morph_eval.models import DEFAULT_CONTINUATION_MARKER
from morph_eval.tokenizers import TOKENIZER_KINDS
from services.coverage_service import CoverageService
from services.evaluation_service import EvaluationService
from services.report_service import ReportService
from services.sweep_service import SweepService
from services.training_service import TrainingService

logger = logging.getLogger("morph_eval")

# The vocabulary sizes of the reference experiments
DEFAULT_SWEEP_SIZES = "2000,5000,10000,20000,32000,52000,128000"


def int_list(text: str) -> List[int]:
    try:
        return [int(part.lower().replace("k", "000")) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got '{text}'")


def token_list(text: str) -> List[str]:
    return [token.strip() for token in text.split(",") if token.strip()]


def float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got '{text}'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="morph-eval",
        description="Morphology-aware evaluation of subword tokenizers",
    )
    sub = parser.add_subparsers(dest="mode", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, default=None, help="Output directory (default: $MORPH_EVAL_OUT or out)")
    common.add_argument("--no-lowercase", action="store_true", help="Apply NFKC only, keep case")
    common.add_argument("--log-level", default=None, help="Logging level (default: $MORPH_EVAL_LOG_LEVEL or INFO)")
    common.add_argument("--continuation-marker", default=DEFAULT_CONTINUATION_MARKER)

    trainer = argparse.ArgumentParser(add_help=False)
    trainer.add_argument("--corpus", type=Path, help="Training corpus, one document per line")
    trainer.add_argument("--vocab-sizes", type=int_list, default=None, help="Comma-separated target sizes, e.g. 2k,5k")
    trainer.add_argument("--trainer-config", type=Path, help="Flat key=value trainer settings")
    trainer.add_argument("--min-pair-frequency", type=int)
    trainer.add_argument("--special-tokens", type=token_list)
    trainer.add_argument("--reuse-vocab", action="store_true", help="Reuse vocab-<size>.txt files found in --out")

    evaluation = argparse.ArgumentParser(add_help=False)
    evaluation.add_argument("--gold", type=Path, action="append", default=[], help="Gold JSON Lines split (repeatable)")
    evaluation.add_argument("--affix-top", type=int, default=200, help="Size of the default affix set")
    evaluation.add_argument("--bootstrap", type=int, default=None, help="Bootstrap resamples, 0 disables (default: $MORPH_EVAL_BOOTSTRAP or 0)")
    evaluation.add_argument("--seed", type=int, default=None, help="Bootstrap seed (default: $MORPH_EVAL_SEED or 0)")
    evaluation.add_argument("--format", dest="formats", action="append", choices=["json", "csv", "md"], help="Report format (repeatable; default all)")

    sub.add_parser("train", parents=[common, trainer], help="Train WordPiece vocabularies")

    eval_parser = sub.add_parser("eval", parents=[common, evaluation], help="Evaluate a tokenizer on gold splits")
    eval_parser.add_argument("--tokenizer", choices=TOKENIZER_KINDS, default="wordpiece")
    eval_parser.add_argument("--vocab", type=Path, help="vocab.txt for the word and wordpiece tokenizers")
    eval_parser.add_argument("--special-tokens", type=token_list, help="Special tokens of --vocab beyond the bracketed ones")
    eval_parser.add_argument("--pretokenized", type=Path, help="JSON Lines segmentations for the pretokenized tokenizer")
    eval_parser.add_argument("--corpus", type=Path, help="Corpus for a top-k word vocabulary")
    eval_parser.add_argument("--top-k", type=int_list, default=None, help="k of the top-k word vocabulary")

    sweep_parser = sub.add_parser("sweep", parents=[common, trainer, evaluation], help="Train and evaluate across vocabulary sizes")
    sweep_parser.add_argument("--test-corpus", type=Path, help="Corpus for the granularity rows (default: training corpus)")

    coverage_parser = sub.add_parser("coverage", parents=[common], help="Top-K word coverage curve")
    coverage_parser.add_argument("--corpus", type=Path, help="Training corpus")
    coverage_parser.add_argument("--test-corpus", type=Path, help="Test corpus")
    coverage_parser.add_argument("--top-k", type=int_list, default=None, help="Explicit k grid")
    coverage_parser.add_argument("--coverage-targets", type=float_list, default=None, help="Train coverage targets, e.g. 0.5,0.9")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Build the RunConfig from parsed flags, falling back to the environment."""
    values = {
        "mode": args.mode,
        "out": args.out or Path(os.getenv("MORPH_EVAL_OUT", "out")),
        "lowercase": not args.no_lowercase,
        "continuation_marker": args.continuation_marker,
    }
    for name in ("corpus", "test_corpus", "vocab", "pretokenized", "trainer_config", "min_pair_frequency", "special_tokens"):
        if getattr(args, name, None) is not None:
            values[name] = getattr(args, name)
    for name in ("top_k", "coverage_targets"):
        if getattr(args, name, None):
            values[name] = getattr(args, name)
    if hasattr(args, "tokenizer"):
        values["tokenizer"] = args.tokenizer
    if hasattr(args, "reuse_vocab"):
        values["reuse_vocab"] = args.reuse_vocab

    if hasattr(args, "vocab_sizes"):
        sizes = args.vocab_sizes
        if sizes is None and args.trainer_config is not None and args.trainer_config.is_file():
            target = read_trainer_file(args.trainer_config).get("target_vocab_size")
            sizes = [int(target)] if target else None
        if sizes is None and args.mode == "sweep":
            sizes = int_list(DEFAULT_SWEEP_SIZES)
        values["vocab_sizes"] = sizes or []

    if hasattr(args, "gold"):
        values["gold"] = args.gold
        values["affix_top"] = args.affix_top
        values["bootstrap"] = args.bootstrap if args.bootstrap is not None else env_int("MORPH_EVAL_BOOTSTRAP", 0)
        values["seed"] = args.seed if args.seed is not None else env_int("MORPH_EVAL_SEED", 0)
        if args.formats:
            values["formats"] = list(dict.fromkeys(args.formats))
    return RunConfig.build(**values)


def run(config: RunConfig) -> None:
    if config.mode == "train":
        written = TrainingService.run_train(config)
        print(f"Wrote {len(written)} files to {config.out}")
    elif config.mode == "eval":
        reports = EvaluationService.run_evaluate(config)
        ReportService.write_reports(reports, config.out, config.formats)
        print(ReportService.console_summary(reports))
    elif config.mode == "sweep":
        rows = asyncio.run(SweepService.run_sweep(config))
        SweepService.write_sweep(rows, config)
        reports = [row.report for row in rows if row.report is not None]
        print(ReportService.console_summary(reports))
    elif config.mode == "coverage":
        points = CoverageService.run_coverage(config)
        ReportService.write_text(config.out / "coverage.csv", ReportService.coverage_csv(points))
        for point in points:
            print(f"k={point.k:<8} V%={point.vocab_fraction:6.2%}  train={point.train_coverage:.4f}  test={point.test_coverage:.4f}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    level = (args.log_level or os.getenv("MORPH_EVAL_LOG_LEVEL") or "INFO").upper()
    if not isinstance(logging.getLevelName(level), int):
        print(f"Error: unknown log level '{level}'", file=sys.stderr)
        return 1
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    try:
        config = config_from_args(args)
        run(config)
    except MorphEvalError as e:
        print(f"Error: {str(e)}", file=sys.stderr)
        return 1
    except Exception as e:
        logger.exception("Unexpected failure")
        print(f"Error: {str(e)}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
