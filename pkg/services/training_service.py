from pathlib import Path
from typing import Dict, List, Sequence
import logging

from morph_eval.config import RunConfig, trainer_config_for
from morph_eval.errors import TrainerError
from morph_eval.models import Corpus, TrainingResult, Vocabulary, WordVocabRanking
from morph_eval.morphdata import load_corpus
from morph_eval.tokenizers import load_vocabulary, save_vocabulary
from morph_eval.tokenizers.vocabulary import write_text_atomic
from morph_eval.trainer import WordPieceTrainer, rank_words

logger = logging.getLogger(__name__)


def vocab_filename(size: int) -> str:
    return f"vocab-{size}.txt"


def ranking_tsv(ranking: WordVocabRanking) -> str:
    return "".join(f"{word}\t{count}\n" for word, count in ranking.words)


class TrainingService:
    """
    Service for training WordPiece vocabularies at several target sizes
    """

    @staticmethod
    def train_sizes(corpus: Corpus, config: RunConfig, sizes: Sequence[int]) -> Dict[int, Vocabulary]:
        """
        Train once at the largest size and slice the smaller sizes from it

        Training is deterministic, so the vocabulary at a smaller target is a
        prefix of the one at a larger target; the slices are checked for that.

        Args:
            corpus: Training corpus
            config: Run configuration (trainer settings)
            sizes: Target vocabulary sizes

        Returns:
            Map from requested size to vocabulary (at most that many entries)
        """
        base = TrainingService.base_size(corpus, config)
        valid = [size for size in sizes if size >= base]
        if not valid:
            return {}
        largest = max(valid)
        result: TrainingResult = WordPieceTrainer(trainer_config_for(config, largest)).train(corpus)
        full = result.vocabulary
        if result.exhausted:
            short = sorted(size for size in set(sizes) if size > len(full))
            logger.warning(f"Training exhausted merges at {len(full)} entries; sizes {short} share that vocabulary")

        vocabularies: Dict[int, Vocabulary] = {}
        for size in sorted(set(sizes)):
            if size < base:
                continue
            vocabularies[size] = full.truncate(min(size, len(full)))

        ordered = [vocabularies[size] for size in sorted(vocabularies)]
        for smaller, larger in zip(ordered, ordered[1:]):
            if not set(smaller.entries) <= set(larger.entries):
                logger.error(f"Containment violated between {len(smaller)} and {len(larger)} entries")
            else:
                logger.info(f"Containment holds: {len(smaller)} entries within {len(larger)}")
        return vocabularies

    @staticmethod
    def base_size(corpus: Corpus, config: RunConfig) -> int:
        config_for_base = trainer_config_for(config, 1)
        marker = config_for_base.continuation_marker
        alphabet = set()
        for word in corpus.word_counts:
            alphabet.add(word[0])
            alphabet.update(marker + char for char in word[1:])
        return len(set(config_for_base.special_tokens) | alphabet)

    @staticmethod
    def run_train(config: RunConfig) -> List[Path]:
        """
        Train vocabularies for every requested size and write them with the word ranking

        Args:
            config: Run configuration in train mode

        Returns:
            Paths of the written files
        """
        corpus = load_corpus(config.corpus, config.lowercase)
        config.out.mkdir(parents=True, exist_ok=True)
        written: List[Path] = []

        if config.reuse_vocab and all((config.out / vocab_filename(size)).is_file() for size in config.vocab_sizes):
            logger.info("All requested vocabularies exist; nothing to train")
        else:
            smallest = min(config.vocab_sizes)
            base = TrainingService.base_size(corpus, config)
            if smallest < base:
                raise TrainerError(
                    f"Target vocabulary size {smallest} is smaller than specials + alphabet ({base})"
                )
            for size, vocabulary in TrainingService.train_sizes(corpus, config, config.vocab_sizes).items():
                path = config.out / vocab_filename(size)
                save_vocabulary(vocabulary, path)
                written.append(path)

        ranking_path = config.out / "word_ranking.tsv"
        write_text_atomic(ranking_path, ranking_tsv(rank_words(corpus)))
        written.append(ranking_path)
        for path in written:
            logger.info(f"Wrote {path}")
        return written

    @staticmethod
    def load_or_train(corpus: Corpus, config: RunConfig, sizes: Sequence[int]) -> Dict[int, Vocabulary]:
        """Reuse vocab-<size>.txt files from the output directory when asked, else train"""
        if config.reuse_vocab:
            paths = {size: config.out / vocab_filename(size) for size in sizes}
            if all(path.is_file() for path in paths.values()):
                logger.info(f"Reusing {len(paths)} vocabularies from {config.out}")
                specials = trainer_config_for(config, 1).special_tokens
                return {size: load_vocabulary(path, config.continuation_marker, specials) for size, path in paths.items()}
        return TrainingService.train_sizes(corpus, config, sizes)
