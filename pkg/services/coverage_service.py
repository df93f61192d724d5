from typing import List
import logging

from morph_eval.config import RunConfig
from morph_eval.coverage import coverage_curve, coverage_points_for_targets, default_ks, oov_rate
from morph_eval.errors import ConfigError
from morph_eval.models import CoveragePoint
from morph_eval.morphdata import load_corpus
from morph_eval.trainer import rank_words

logger = logging.getLogger(__name__)


class CoverageService:
    """
    Service for the top-K word-vocabulary coverage protocol
    """

    @staticmethod
    def run_coverage(config: RunConfig) -> List[CoveragePoint]:
        """
        Coverage curve of the training word ranking on train and test

        The k grid is --top-k when given; else, with --coverage-targets, the
        smallest k reaching each train coverage; else the default log grid.

        Args:
            config: Run configuration in coverage mode

        Returns:
            Coverage points in ascending k
        """
        if config.mode != "coverage":
            raise ConfigError(f"run_coverage needs coverage mode, got {config.mode}")
        train = load_corpus(config.corpus, config.lowercase)
        test = load_corpus(config.test_corpus, config.lowercase)
        ranking = rank_words(train)

        if config.top_k:
            points = coverage_curve(ranking, train, test, sorted(set(config.top_k)))
        elif config.coverage_targets:
            points = coverage_points_for_targets(ranking, train, test, config.coverage_targets)
            for point in points:
                logger.info(f"k={point.k} reaches train coverage {point.train_coverage:.2%}")
        else:
            points = coverage_curve(ranking, train, test, default_ks(len(ranking)))

        logger.info(f"Test OOV token rate at |V|={len(ranking)}: {oov_rate(ranking, len(ranking), test):.4f}")
        return points
