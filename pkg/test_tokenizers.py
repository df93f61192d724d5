"""
Tests for the tokenization schemes and vocab.txt handling
"""

import pytest

from conftest import write_jsonl
from morph_eval.errors import ConfigError, MissingSegmentationError, VocabularyError
from morph_eval.models import Vocabulary
from morph_eval.tokenizers import (
    build_tokenizer,
    char_tokenize,
    load_pretokenized_with_issues,
    load_vocabulary,
    pretokenized_adapter,
    render,
    save_vocabulary,
    strip_marker,
    word_tokenize,
    wordpiece_tokenize,
)


def vocab(*entries: str) -> Vocabulary:
    return Vocabulary(entries=("[UNK]",) + entries)


def test_char_tokenize_marks_continuations():
    tokenized = char_tokenize("gittim")
    assert render(tokenized) == ["g", "##i", "##t", "##t", "##i", "##m"]
    assert tokenized.continuation_count == 5


def test_char_tokenize_counts_code_points():
    assert render(char_tokenize("a")) == ["a"]
    tokenized = char_tokenize("koş")
    assert render(tokenized) == ["k", "##o", "##ş"]
    assert tokenized.n == 3


def test_word_tokenize_known_and_unknown():
    vocabulary = vocab("ev")
    known = word_tokenize("ev", vocabulary)
    assert known.pieces == ["ev"] and not known.has_unknown
    unknown = word_tokenize("evlerimizden", vocabulary)
    assert unknown.n == 1 and unknown.has_unknown
    assert unknown.continuation_count == 0


def test_word_tokenize_never_matches_special_tokens():
    assert word_tokenize("[UNK]", vocab("ev")).has_unknown


def test_wordpiece_greedy_longest_match():
    vocabulary = vocab("e", "ev", "##lerimiz", "##ler", "##den", "##d", "##e", "##n")
    assert render(wordpiece_tokenize("evlerimizden", vocabulary)) == ["ev", "##lerimiz", "##den"]
    assert render(wordpiece_tokenize("ev", vocabulary)) == ["ev"]


def test_wordpiece_unmatchable_word_becomes_unknown():
    tokenized = wordpiece_tokenize("xyz", vocab("y", "##z"))
    assert tokenized.has_unknown and tokenized.n == 1


def test_wordpiece_with_character_vocabulary_matches_char_tokenize():
    word = "güzelleştirmek"
    letters = sorted(set(word))
    vocabulary = vocab(*letters, *("##" + letter for letter in letters))
    assert wordpiece_tokenize(word, vocabulary) == char_tokenize(word)


def test_wordpiece_is_deterministic():
    vocabulary = vocab("k", "ki", "##tap", "##t", "##a", "##p", "##lar")
    assert wordpiece_tokenize("kitaplar", vocabulary) == wordpiece_tokenize("kitaplar", vocabulary)
    assert wordpiece_tokenize("kitaplar", vocabulary).pieces == ["ki", "tap", "lar"]


def test_strip_marker():
    assert strip_marker("##ler") == ("ler", True)
    assert strip_marker("ev") == ("ev", False)
    assert strip_marker("##") == ("##", False)


def test_pretokenized_adapter(tmp_path):
    path = write_jsonl(tmp_path / "seg.jsonl", [
        {"word": "gittim", "tokens": ["git", "##ti", "##m"]},
        {"word": "ve", "tokens": ["ve"]},
        {"word": "ab", "tokens": ["a", "##c"]},
    ])
    segmentations, issues = load_pretokenized_with_issues(path)
    assert set(segmentations) == {"gittim", "ve"}
    assert render(segmentations["gittim"]) == ["git", "##ti", "##m"]
    assert segmentations["ve"].n == 1
    assert [issue.line for issue in issues] == [3]


def test_pretokenized_later_duplicates_override(tmp_path):
    path = write_jsonl(tmp_path / "seg.jsonl", [
        {"word": "evde", "tokens": ["ev", "##de"]},
        {"word": "evde", "tokens": ["evde"]},
    ])
    assert pretokenized_adapter(path)["evde"].pieces == ["evde"]


def test_pretokenized_tokenizer_reports_missing_words(worked_predictions):
    tokenizer = build_tokenizer("pretokenized", pretokenized_path=worked_predictions)
    assert tokenizer.tokenize("koşuyordum").pieces == ["koş", "uyor", "dum"]
    with pytest.raises(MissingSegmentationError):
        tokenizer.tokenize("evde")


def test_build_tokenizer_needs_a_vocabulary_for_word_schemes():
    with pytest.raises(ConfigError):
        build_tokenizer("wordpiece")
    with pytest.raises(ConfigError):
        build_tokenizer("bpe")
    assert build_tokenizer("char").name == "char"


def test_vocabulary_file_round_trip(tmp_path):
    vocabulary = Vocabulary(entries=("[PAD]", "[UNK]", "e", "##v", "ev"), specials=("[PAD]", "[UNK]"))
    path = tmp_path / "vocab.txt"
    save_vocabulary(vocabulary, path)
    assert path.read_text(encoding="utf-8") == "[PAD]\n[UNK]\ne\n##v\nev\n"
    loaded = load_vocabulary(path)
    assert loaded == vocabulary


def test_vocabulary_file_errors(tmp_path):
    duplicates = tmp_path / "dup.txt"
    duplicates.write_text("[UNK]\nev\nev\n", encoding="utf-8")
    with pytest.raises(VocabularyError):
        load_vocabulary(duplicates)
    no_unk = tmp_path / "nounk.txt"
    no_unk.write_text("ev\n##de\n", encoding="utf-8")
    with pytest.raises(VocabularyError):
        load_vocabulary(no_unk)


def test_declared_special_tokens_survive_a_reload(tmp_path):
    path = tmp_path / "vocab.txt"
    path.write_text("[PAD]\n[UNK]\n<s>\n<\n##s\n##>\n", encoding="utf-8")

    plain = load_vocabulary(path)
    assert plain.specials == ("[PAD]", "[UNK]")

    loaded = load_vocabulary(path, special_tokens=["<s>"])
    assert loaded.specials == ("[PAD]", "[UNK]", "<s>")
    assert "<s>" not in loaded.piece_types()
    assert render(wordpiece_tokenize("<s>", loaded)) == ["<", "##s", "##>"]
    with pytest.raises(VocabularyError):
        load_vocabulary(path, special_tokens=["</s>"])


def test_vocabulary_piece_types_strip_the_marker():
    vocabulary = Vocabulary(entries=("[UNK]", "ev", "##ler", "##de"))
    assert vocabulary.piece_types() == frozenset({"ev", "ler", "de"})
    assert vocabulary.truncate(2).entries == ("[UNK]", "ev")
