"""
Models for the morphology-aware tokenizer evaluation toolkit

This module defines the Pydantic models shared by the loaders, tokenizers,
trainer, metrics engine and reports.
"""

from typing import Dict, List, Optional, Tuple
from pydantic import BaseModel, ConfigDict, Field, PositiveInt, PrivateAttr, field_validator, model_validator

DEFAULT_CONTINUATION_MARKER = "##"
UNK_TOKEN = "[UNK]"
DEFAULT_SPECIAL_TOKENS = ["[PAD]", UNK_TOKEN]
DEFAULT_EPSILON = 1e-9
LONG_WORD_CHARS = 512


class FrozenModel(BaseModel):
    model_config = ConfigDict(frozen=True)


# Input bookkeeping
class LineIssue(FrozenModel):
    path: str
    line: int
    message: str


# Gold data Models
class MorphAnalysis(FrozenModel):
    word: str
    lemma: str
    suffixes: Tuple[str, ...] = ()

    @field_validator("word", "lemma")
    @classmethod
    def _non_empty(cls, value: str) -> str:
        if not value:
            raise ValueError("must be non-empty")
        return value

    @field_validator("suffixes")
    @classmethod
    def _no_empty_suffix(cls, value: Tuple[str, ...]) -> Tuple[str, ...]:
        if any(not suffix for suffix in value):
            raise ValueError("suffix chain contains an empty morph")
        return value

    @property
    def morphs(self) -> Tuple[str, ...]:
        return (self.lemma,) + tuple(self.suffixes)


class BoundarySet(FrozenModel):
    """1-indexed code-point offsets at which segments end"""

    offsets: Tuple[int, ...] = ()

    @field_validator("offsets")
    @classmethod
    def _strictly_increasing(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if any(offset < 1 for offset in value):
            raise ValueError("offsets must be >= 1")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("offsets must be strictly increasing")
        return value

    @classmethod
    def from_lengths(cls, lengths: List[int]) -> "BoundarySet":
        offsets = []
        total = 0
        for length in lengths:
            total += length
            offsets.append(total)
        return cls(offsets=tuple(offsets))

    def as_set(self) -> frozenset:
        return frozenset(self.offsets)

    def __contains__(self, offset: int) -> bool:
        return offset in self.offsets

    def __len__(self) -> int:
        return len(self.offsets)


class GoldSegmentation(FrozenModel):
    word: str
    morphs: Tuple[str, ...]
    k: int
    boundaries: BoundarySet
    concatenative: bool

    @model_validator(mode="after")
    def _check_shape(self) -> "GoldSegmentation":
        if self.k < 1 or self.k != len(self.morphs):
            raise ValueError("k must equal the number of morphs and be >= 1")
        if self.concatenative:
            if len(self.boundaries) != self.k:
                raise ValueError("concatenative segmentation needs one boundary per morph")
            if self.boundaries.offsets[-1] != len(self.word):
                raise ValueError("last boundary must equal the word length")
        return self

    @property
    def lemma(self) -> str:
        return self.morphs[0]


class Corpus(FrozenModel):
    documents: Tuple[str, ...] = ()
    word_counts: Dict[str, int] = Field(default_factory=dict)

    @field_validator("word_counts")
    @classmethod
    def _positive_counts(cls, value: Dict[str, int]) -> Dict[str, int]:
        if any(count < 1 for count in value.values()):
            raise ValueError("word counts must be >= 1")
        return value

    @property
    def total_tokens(self) -> int:
        return sum(self.word_counts.values())

    def is_empty(self) -> bool:
        return not self.word_counts


# Tokenization Models
class Token(FrozenModel):
    text: str
    is_continuation: bool = False
    is_unknown: bool = False

    @model_validator(mode="after")
    def _text_required(self) -> "Token":
        if not self.text and not self.is_unknown:
            raise ValueError("known tokens need non-empty text")
        return self


class TokenizedWord(FrozenModel):
    word: str
    tokens: Tuple[Token, ...]

    @model_validator(mode="after")
    def _check_tokens(self) -> "TokenizedWord":
        if not self.tokens:
            raise ValueError("a tokenized word has at least one token")
        if self.tokens[0].is_continuation:
            raise ValueError("the first token of a word cannot be a continuation")
        if not self.has_unknown and "".join(token.text for token in self.tokens) != self.word:
            raise ValueError(f"tokens do not reconstruct '{self.word}'")
        return self

    @property
    def n(self) -> int:
        return len(self.tokens)

    @property
    def pieces(self) -> List[str]:
        return [token.text for token in self.tokens]

    @property
    def continuation_count(self) -> int:
        return sum(1 for token in self.tokens if token.is_continuation)

    @property
    def has_unknown(self) -> bool:
        return any(token.is_unknown for token in self.tokens)


class Vocabulary(FrozenModel):
    """Ordered token inventory; continuation entries carry the marker prefix"""

    entries: Tuple[str, ...]
    specials: Tuple[str, ...] = (UNK_TOKEN,)
    continuation_marker: str = DEFAULT_CONTINUATION_MARKER

    _lookup: frozenset = PrivateAttr(default=frozenset())

    @model_validator(mode="after")
    def _check_entries(self) -> "Vocabulary":
        if len(set(self.entries)) != len(self.entries):
            raise ValueError("vocabulary has duplicate entries")
        if UNK_TOKEN not in self.entries:
            raise ValueError(f"vocabulary must contain {UNK_TOKEN}")
        missing = [special for special in self.specials if special not in self.entries]
        if missing:
            raise ValueError(f"special tokens missing from entries: {missing}")
        if not self.continuation_marker:
            raise ValueError("continuation marker must be non-empty")
        return self

    def model_post_init(self, __context) -> None:
        self._lookup = frozenset(self.entries)

    def __contains__(self, entry: str) -> bool:
        return entry in self._lookup

    def __len__(self) -> int:
        return len(self.entries)

    def has_piece(self, text: str, continuation: bool) -> bool:
        if continuation:
            return (self.continuation_marker + text) in self._lookup
        return text in self._lookup

    def piece_types(self) -> frozenset:
        """Entry texts with the continuation marker stripped, specials excluded"""
        marker = self.continuation_marker
        specials = set(self.specials)
        return frozenset(
            entry[len(marker):] if entry.startswith(marker) and len(entry) > len(marker) else entry
            for entry in self.entries
            if entry not in specials
        )

    def truncate(self, size: int) -> "Vocabulary":
        if size < len(self.specials) or size > len(self.entries):
            raise ValueError(f"cannot truncate a {len(self.entries)}-entry vocabulary to {size}")
        return Vocabulary(
            entries=self.entries[:size],
            specials=self.specials,
            continuation_marker=self.continuation_marker,
        )


# Trainer Models
class TrainerConfig(FrozenModel):
    target_vocab_size: PositiveInt
    min_pair_frequency: PositiveInt = 2
    special_tokens: List[str] = Field(default_factory=lambda: list(DEFAULT_SPECIAL_TOKENS))
    continuation_marker: str = DEFAULT_CONTINUATION_MARKER

    @field_validator("special_tokens")
    @classmethod
    def _unk_required(cls, value: List[str]) -> List[str]:
        if UNK_TOKEN not in value:
            raise ValueError(f"special tokens must include {UNK_TOKEN}")
        if len(set(value)) != len(value):
            raise ValueError("special tokens must be unique")
        return value


class TrainingResult(FrozenModel):
    vocabulary: Vocabulary
    merges: Tuple[str, ...]
    base_size: int
    exhausted: bool


class WordVocabRanking(FrozenModel):
    words: Tuple[Tuple[str, int], ...]

    @field_validator("words")
    @classmethod
    def _ordered(cls, value: Tuple[Tuple[str, int], ...]) -> Tuple[Tuple[str, int], ...]:
        for (w1, c1), (w2, c2) in zip(value, value[1:]):
            if c2 > c1 or (c1 == c2 and w2 <= w1):
                raise ValueError("ranking must be sorted by count desc, then word asc")
        return value

    def __len__(self) -> int:
        return len(self.words)


# Metrics Models
class ItemDiagnostics(FrozenModel):
    word: str
    n: int
    k: int
    tp: int
    fp: int
    fn: int
    p: float
    r: float
    f1: float
    lemma_hit: bool
    lemma_span: bool
    exact_match: bool
    char_edit: int
    token_edit: int
    gold_chars: int
    gold_units: int
    pred_units: int
    hits: int
    substitutions: int
    deletions: int
    insertions: int

    @model_validator(mode="after")
    def _check_ranges(self) -> "ItemDiagnostics":
        if not all(0.0 <= value <= 1.0 for value in (self.p, self.r, self.f1)):
            raise ValueError("per-item scores must lie in [0, 1]")
        return self


class ConfidenceInterval(FrozenModel):
    low: float
    high: float


class GranularityStats(FrozenModel):
    fertility: float
    fertility_sd: float
    continuation_rate: float
    continuation_sd: float
    mean_token_length: float
    unk_word_rate: float
    documents: int
    band: str


class MetricsReport(BaseModel):
    tokenizer: str
    split: str
    vocab_size: Optional[int] = None
    word_count: int = 0
    item_count: int = 0
    subwords_per_word: float = 0.0
    fertility: float = 0.0
    continuation_rate: float = 0.0
    micro_p: float = 0.0
    micro_r: float = 0.0
    micro_f1: float = 0.0
    macro_p: float = 0.0
    macro_r: float = 0.0
    macro_f1: float = 0.0
    lemma_hit_rate: float = 0.0
    lemma_single_rate: float = 0.0
    lemma_span_rate: float = 0.0
    overseg: float = 0.0
    underseg: float = 0.0
    cer: float = 0.0
    wer: float = 0.0
    mer: float = 0.0
    wil: float = 0.0
    wip: float = 0.0
    exact_match_rate: float = 0.0
    affix_coverage: float = 0.0
    affix_atomicity: float = 0.0
    affix_types: int = 0
    mean_token_length: float = 0.0
    unk_word_rate: float = 0.0
    lemma_unk_count: int = 0
    skipped_nonconcatenative: int = 0
    skipped_unknown: int = 0
    missing_count: int = 0
    malformed_lines: int = 0
    long_word_count: int = 0
    granularity_band: str = ""
    flags: List[str] = Field(default_factory=list)
    cis: Dict[str, ConfidenceInterval] = Field(default_factory=dict)


# Column order follows the reference diagnostic tables, then the extra columns
REPORT_CSV_COLUMNS: List[Tuple[str, str]] = [
    ("Vocab", "vocab_size"),
    ("Split", "split"),
    ("Sw/W", "subwords_per_word"),
    ("Pmu", "micro_p"),
    ("Rmu", "micro_r"),
    ("F1mu", "micro_f1"),
    ("PM", "macro_p"),
    ("RM", "macro_r"),
    ("F1M", "macro_f1"),
    ("LSingle", "lemma_single_rate"),
    ("LBoun", "lemma_hit_rate"),
    ("ExMatch", "exact_match_rate"),
    ("OverSeg", "overseg"),
    ("UnderSeg", "underseg"),
    ("CER", "cer"),
    ("WER", "wer"),
    ("MER", "mer"),
    ("WIL", "wil"),
    ("WIP", "wip"),
    ("AffixCov", "affix_coverage"),
    ("AffixAtom", "affix_atomicity"),
    ("LSpan", "lemma_span_rate"),
    ("Fert", "fertility"),
    ("Cont", "continuation_rate"),
    ("Items", "item_count"),
    ("SkipNonConcat", "skipped_nonconcatenative"),
    ("SkipUNK", "skipped_unknown"),
    ("Missing", "missing_count"),
    ("Tokenizer", "tokenizer"),
]


# Coverage Models
class CoveragePoint(FrozenModel):
    k: int
    vocab_fraction: float
    train_coverage: float
    test_coverage: float
    test_type_coverage: Optional[float] = None

    @model_validator(mode="after")
    def _fractions(self) -> "CoveragePoint":
        values = [self.vocab_fraction, self.train_coverage, self.test_coverage]
        if self.test_type_coverage is not None:
            values.append(self.test_type_coverage)
        if not all(0.0 <= value <= 1.0 for value in values):
            raise ValueError("coverage fractions must lie in [0, 1]")
        return self


# Sweep Models
class SweepRow(BaseModel):
    vocab_size: int
    split: str
    status: str = "ok"
    degenerate: bool = False
    # Entries actually trained; below vocab_size when merges ran out
    vocab_entries: Optional[int] = None
    exhausted: bool = False
    error: Optional[str] = None
    report: Optional[MetricsReport] = None
    granularity: Optional[GranularityStats] = None
