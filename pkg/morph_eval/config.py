"""
Run configuration

RunConfig gathers CLI flags with environment fallbacks; trainer settings may
come from a flat key=value file read with python-dotenv.
"""

from pathlib import Path
from typing import Dict, List, Literal, Optional
import logging
import os

from dotenv import dotenv_values
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from morph_eval.errors import ConfigError
from morph_eval.models import DEFAULT_CONTINUATION_MARKER, DEFAULT_SPECIAL_TOKENS, TrainerConfig

logger = logging.getLogger(__name__)

REPORT_FORMATS = ("json", "csv", "md")
TRAINER_CONFIG_KEYS = ("target_vocab_size", "min_pair_frequency", "special_tokens", "continuation_marker")


def env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got '{raw}'")


class RunConfig(BaseModel):
    mode: Literal["train", "eval", "sweep", "coverage"]
    tokenizer: str = "wordpiece"
    vocab: Optional[Path] = None
    pretokenized: Optional[Path] = None
    gold: List[Path] = Field(default_factory=list)
    corpus: Optional[Path] = None
    test_corpus: Optional[Path] = None
    vocab_sizes: List[int] = Field(default_factory=list)
    top_k: List[int] = Field(default_factory=list)
    coverage_targets: List[float] = Field(default_factory=list)
    affix_top: int = Field(default=200, ge=1)
    bootstrap: int = Field(default=0, ge=0)
    seed: int = 0
    out: Path = Path("out")
    formats: List[str] = Field(default_factory=lambda: list(REPORT_FORMATS))
    lowercase: bool = True
    reuse_vocab: bool = False
    trainer_config: Optional[Path] = None
    min_pair_frequency: Optional[int] = Field(default=None, ge=1)
    special_tokens: Optional[List[str]] = None
    continuation_marker: str = DEFAULT_CONTINUATION_MARKER

    @field_validator("formats")
    @classmethod
    def _known_formats(cls, value: List[str]) -> List[str]:
        unknown = [fmt for fmt in value if fmt not in REPORT_FORMATS]
        if unknown:
            raise ValueError(f"unknown report formats {unknown}")
        return value

    @field_validator("vocab_sizes", "top_k")
    @classmethod
    def _positive_sizes(cls, value: List[int]) -> List[int]:
        if any(size < 1 for size in value):
            raise ValueError("sizes must be positive")
        return value

    @model_validator(mode="after")
    def _check_paths(self) -> "RunConfig":
        paths = [self.vocab, self.pretokenized, self.corpus, self.test_corpus, self.trainer_config, *self.gold]
        missing = [str(path) for path in paths if path is not None and not path.is_file()]
        if missing:
            raise ValueError(f"input files not found: {', '.join(missing)}")

        if self.mode == "train":
            if self.corpus is None or not self.vocab_sizes:
                raise ValueError("train needs --corpus and --vocab-sizes")
        elif self.mode == "eval":
            if not self.gold:
                raise ValueError("eval needs at least one --gold file")
            if self.tokenizer in ("word", "wordpiece") and self.vocab is None:
                if not (self.tokenizer == "word" and self.corpus is not None and self.top_k):
                    raise ValueError(f"the {self.tokenizer} tokenizer needs --vocab")
            if self.tokenizer == "pretokenized" and self.pretokenized is None:
                raise ValueError("the pretokenized tokenizer needs --pretokenized")
        elif self.mode == "sweep":
            if self.corpus is None or not self.gold:
                raise ValueError("sweep needs --corpus and at least one --gold file")
            if not self.vocab_sizes:
                raise ValueError("sweep needs a non-empty --vocab-sizes list")
        elif self.mode == "coverage":
            if self.corpus is None or self.test_corpus is None:
                raise ValueError("coverage needs --corpus and --test-corpus")
        return self

    @classmethod
    def build(cls, **values) -> "RunConfig":
        """Validate, turning pydantic errors into a ConfigError."""
        try:
            return cls(**values)
        except ValidationError as e:
            messages = "; ".join(error["msg"] for error in e.errors())
            raise ConfigError(f"Invalid configuration: {messages}") from e


def read_trainer_file(path: Optional[Path]) -> Dict[str, str]:
    """Flat key=value trainer settings; unknown keys are logged and ignored."""
    if path is None:
        return {}
    values = {key: value for key, value in dotenv_values(path).items() if value is not None}
    unknown = [key for key in values if key not in TRAINER_CONFIG_KEYS]
    if unknown:
        logger.warning(f"Ignoring unknown trainer config keys in {path}: {unknown}")
    return {key: value for key, value in values.items() if key in TRAINER_CONFIG_KEYS}


def trainer_config_for(config: RunConfig, target_vocab_size: int) -> TrainerConfig:
    """
    Trainer settings for one target size: file values first, then explicit flags.

    Args:
        config: The run configuration
        target_vocab_size: Target size of this training run

    Returns:
        A validated TrainerConfig
    """
    settings = read_trainer_file(config.trainer_config)
    values: Dict[str, object] = {
        "target_vocab_size": target_vocab_size,
        "continuation_marker": settings.get("continuation_marker", DEFAULT_CONTINUATION_MARKER),
        "special_tokens": list(DEFAULT_SPECIAL_TOKENS),
    }
    if "min_pair_frequency" in settings:
        values["min_pair_frequency"] = settings["min_pair_frequency"]
    if "special_tokens" in settings:
        values["special_tokens"] = [token.strip() for token in settings["special_tokens"].split(",") if token.strip()]

    if config.min_pair_frequency is not None:
        values["min_pair_frequency"] = config.min_pair_frequency
    if config.special_tokens is not None:
        values["special_tokens"] = config.special_tokens
    if config.continuation_marker != DEFAULT_CONTINUATION_MARKER:
        values["continuation_marker"] = config.continuation_marker

    try:
        return TrainerConfig(**values)
    except ValidationError as e:
        messages = "; ".join(error["msg"] for error in e.errors())
        raise ConfigError(f"Invalid trainer configuration: {messages}") from e
