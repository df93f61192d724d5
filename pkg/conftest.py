"""
Shared fixtures for the test scripts
"""

from pathlib import Path
from typing import List
import json
import random

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-size runs on a corpus of about a megabyte")


LEMMAS = ["ev", "kitap", "göz", "yol", "kapı", "masa", "okul", "araba", "gel", "koş", "bak", "yaz", "oku", "git", "dön", "çocuk"]
SUFFIXES = ["ler", "lar", "im", "imiz", "ımız", "de", "da", "den", "dan", "e", "a", "i", "in", "yor", "du", "dum", "dük", "mış", "ce"]


def synthetic_words(count: int, seed: int = 7) -> List[str]:
    """Turkish-like words: a lemma followed by up to three suffixes."""
    rng = random.Random(seed)
    words = []
    for _ in range(count):
        chain = [rng.choice(SUFFIXES) for _ in range(rng.randint(0, 3))]
        words.append(rng.choice(LEMMAS) + "".join(chain))
    return words


def write_corpus(path: Path, words: List[str], per_line: int = 10) -> Path:
    lines = [" ".join(words[i:i + per_line]) for i in range(0, len(words), per_line)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_jsonl(path: Path, records: List[dict]) -> Path:
    path.write_text("".join(json.dumps(record, ensure_ascii=False) + "\n" for record in records), encoding="utf-8")
    return path


@pytest.fixture
def worked_gold() -> Path:
    return FIXTURES / "worked_gold.jsonl"


@pytest.fixture
def worked_predictions() -> Path:
    return FIXTURES / "worked_predictions.jsonl"


@pytest.fixture
def reference_table() -> Path:
    return FIXTURES / "reference_diagnostics.csv"


@pytest.fixture
def synthetic_corpus(tmp_path) -> Path:
    return write_corpus(tmp_path / "train.txt", synthetic_words(1000))


@pytest.fixture
def synthetic_gold(tmp_path) -> Path:
    rng = random.Random(11)
    records = []
    for _ in range(60):
        lemma = rng.choice(LEMMAS)
        chain = [rng.choice(SUFFIXES) for _ in range(rng.randint(0, 3))]
        records.append({"word": lemma + "".join(chain), "lemma": lemma, "suffixes": "+".join(chain)})
    return write_jsonl(tmp_path / "synthetic_gold.jsonl", records)
