"""
End-to-end tests of the morph-eval command line
"""

import csv

import pytest

from conftest import synthetic_words, write_corpus
from main import main
from morph_eval.config import RunConfig
from morph_eval.coverage import coverage_curve
from morph_eval.metrics import AGGREGATES
from morph_eval.morphdata import load_corpus
from morph_eval.tokenizers import load_vocabulary
from morph_eval.trainer import rank_words
from services.report_service import ReportService, validate_report
from services.training_service import TrainingService


def base_size_of(corpus_path) -> int:
    config = RunConfig.build(mode="train", corpus=corpus_path, vocab_sizes=[1])
    return TrainingService.base_size(load_corpus(corpus_path), config)


def eval_args(out, worked_gold, worked_predictions):
    return [
        "eval", "--tokenizer", "pretokenized", "--pretokenized", str(worked_predictions),
        "--gold", str(worked_gold), "--out", str(out),
    ]


def test_eval_writes_identical_reports(tmp_path, worked_gold, worked_predictions):
    assert main(eval_args(tmp_path / "a", worked_gold, worked_predictions)) == 0
    assert main(eval_args(tmp_path / "b", worked_gold, worked_predictions)) == 0

    name = "pretokenized-worked_gold.json"
    first = (tmp_path / "a" / name).read_bytes()
    assert first == (tmp_path / "b" / name).read_bytes()
    assert (tmp_path / "a" / "reports.csv").is_file()
    assert (tmp_path / "a" / "reports.md").is_file()

    report = ReportService.load_report(tmp_path / "a" / name)
    assert report is not None
    assert report.micro_p == 11 / 13
    assert validate_report(report.model_dump(mode="json"))["valid"]


def test_eval_csv_columns_follow_the_reference_order(tmp_path, worked_gold, worked_predictions):
    assert main(eval_args(tmp_path, worked_gold, worked_predictions) + ["--format", "csv"]) == 0
    with open(tmp_path / "reports.csv", encoding="utf-8") as handle:
        header = next(csv.reader(handle))
    assert header[:14] == ["Vocab", "Split", "Sw/W", "Pmu", "Rmu", "F1mu", "PM", "RM", "F1M",
                           "LSingle", "LBoun", "ExMatch", "OverSeg", "UnderSeg"]
    assert not (tmp_path / "pretokenized-worked_gold.json").exists()


def test_eval_with_missing_inputs_fails(tmp_path, worked_gold, capsys):
    assert main(["eval", "--tokenizer", "wordpiece", "--gold", str(worked_gold), "--out", str(tmp_path)]) == 1
    assert main(["eval", "--tokenizer", "char", "--gold", str(tmp_path / "nope.jsonl")]) == 1
    assert "Error:" in capsys.readouterr().err


def test_unknown_log_level_fails(tmp_path, worked_gold):
    assert main(["eval", "--tokenizer", "char", "--gold", str(worked_gold), "--log-level", "chatty"]) == 1


def test_train_writes_vocabularies_and_ranking(tmp_path, synthetic_corpus):
    base = base_size_of(synthetic_corpus)
    small, large = base + 20, base + 60
    out = tmp_path / "vocab"
    assert main(["train", "--corpus", str(synthetic_corpus), "--vocab-sizes", f"{small},{large}", "--out", str(out)]) == 0

    small_vocab = load_vocabulary(out / f"vocab-{small}.txt")
    large_vocab = load_vocabulary(out / f"vocab-{large}.txt")
    assert len(small_vocab) == small
    assert large_vocab.entries[:small] == small_vocab.entries
    ranking = (out / "word_ranking.tsv").read_text(encoding="utf-8").splitlines()
    assert ranking and all(len(line.split("\t")) == 2 for line in ranking)


def test_train_reads_target_from_trainer_file(tmp_path, synthetic_corpus):
    target = base_size_of(synthetic_corpus) + 10
    settings = tmp_path / "trainer.env"
    settings.write_text(f"target_vocab_size={target}\nmin_pair_frequency=2\n", encoding="utf-8")
    out = tmp_path / "vocab"
    assert main(["train", "--corpus", str(synthetic_corpus), "--trainer-config", str(settings), "--out", str(out)]) == 0
    assert (out / f"vocab-{target}.txt").is_file()


def test_train_below_alphabet_size_fails(tmp_path, synthetic_corpus, capsys):
    assert main(["train", "--corpus", str(synthetic_corpus), "--vocab-sizes", "3", "--out", str(tmp_path)]) == 1
    assert "smaller than specials + alphabet" in capsys.readouterr().err


def test_coverage_writes_curve(tmp_path):
    train = write_corpus(tmp_path / "train.txt", synthetic_words(400, seed=1))
    test = write_corpus(tmp_path / "test.txt", synthetic_words(200, seed=2))
    out = tmp_path / "coverage"
    assert main(["coverage", "--corpus", str(train), "--test-corpus", str(test), "--out", str(out)]) == 0

    with open(out / "coverage.csv", encoding="utf-8") as handle:
        rows = list(csv.DictReader(handle))
    assert list(rows[0]) == ["k", "vocab_fraction", "train_coverage", "test_coverage", "test_type_coverage"]
    assert float(rows[-1]["train_coverage"]) == 1.0
    assert float(rows[-1]["vocab_fraction"]) == 1.0


def test_sweep_with_empty_size_list_fails(tmp_path, synthetic_corpus, synthetic_gold):
    args = ["sweep", "--corpus", str(synthetic_corpus), "--gold", str(synthetic_gold),
            "--vocab-sizes", "", "--out", str(tmp_path)]
    assert main(args) == 1


def test_sweep_fertility_falls_as_vocabulary_grows(tmp_path, synthetic_gold):
    corpus = write_corpus(tmp_path / "corpus.txt", synthetic_words(3000, seed=21))
    base = base_size_of(corpus)
    sizes = [base + 20, base + 60, base + 150]
    out = tmp_path / "sweep"
    args = ["sweep", "--corpus", str(corpus), "--gold", str(synthetic_gold),
            "--vocab-sizes", ",".join(str(size) for size in sizes), "--out", str(out)]
    assert main(args) == 0

    with open(out / "sweep.csv", encoding="utf-8") as handle:
        rows = list(csv.DictReader(handle))
    fertility = {
        int(row["vocab_size"]): float(row["value"])
        for row in rows
        if row["split"] == "corpus" and row["metric"] == "fertility"
    }
    assert sorted(fertility) == sizes
    assert fertility[sizes[0]] > fertility[sizes[1]] > fertility[sizes[2]]

    assert {row["split"] for row in rows} == {"corpus", "synthetic_gold"}
    assert (out / "sweep.md").is_file()
    assert (out / "reports" / f"wordpiece-{sizes[0]}-synthetic_gold.json").is_file()


def test_sweep_flags_sizes_beyond_exhausted_training(tmp_path, synthetic_corpus, synthetic_gold):
    small = base_size_of(synthetic_corpus) + 20
    out = tmp_path / "sweep"
    args = ["sweep", "--corpus", str(synthetic_corpus), "--gold", str(synthetic_gold),
            "--vocab-sizes", f"{small},100000", "--out", str(out)]
    assert main(args) == 0

    with open(out / "sweep.csv", encoding="utf-8") as handle:
        rows = list(csv.DictReader(handle))
    entries = {
        (int(row["vocab_size"]), row["split"]): int(row["value"])
        for row in rows
        if row["metric"] == "vocab_entries"
    }
    assert entries[(small, "corpus")] == small
    assert entries[(100000, "corpus")] < 100000
    assert entries[(100000, "synthetic_gold")] == entries[(100000, "corpus")]
    assert {row["status"] for row in rows if row["vocab_size"] == "100000"} == {"exhausted"}
    assert all(row["status"] != "exhausted" for row in rows if row["vocab_size"] == str(small))

    large = ReportService.load_report(out / "reports" / "wordpiece-100000-synthetic_gold.json")
    assert "exhausted" in large.flags
    reached = ReportService.load_report(out / "reports" / f"wordpiece-{small}-synthetic_gold.json")
    assert "exhausted" not in reached.flags
    assert f"- 100000: {entries[(100000, 'corpus')]} entries" in (out / "sweep.md").read_text(encoding="utf-8")


def test_train_reuses_existing_vocabularies(tmp_path, synthetic_corpus):
    out = tmp_path / "vocab"
    out.mkdir()
    existing = out / "vocab-50.txt"
    existing.write_text("[PAD]\n[UNK]\nev\n", encoding="utf-8")

    args = ["train", "--corpus", str(synthetic_corpus), "--vocab-sizes", "50", "--out", str(out), "--reuse-vocab"]
    assert main(args) == 0
    assert existing.read_text(encoding="utf-8") == "[PAD]\n[UNK]\nev\n"
    assert (out / "word_ranking.tsv").is_file()


def test_sweep_reuses_vocabularies_from_the_output_directory(tmp_path, synthetic_corpus, synthetic_gold):
    out = tmp_path / "sweep"
    out.mkdir()
    (out / "vocab-4.txt").write_text("[PAD]\n[UNK]\nev\n##ler\n", encoding="utf-8")

    args = ["sweep", "--corpus", str(synthetic_corpus), "--gold", str(synthetic_gold),
            "--vocab-sizes", "4", "--out", str(out), "--reuse-vocab"]
    assert main(args) == 0

    report = ReportService.load_report(out / "reports" / "wordpiece-4-synthetic_gold.json")
    assert report.vocab_size == 4
    assert report.unk_word_rate > 0.5
    assert "exhausted" not in report.flags


def test_coverage_targets_pick_the_smallest_k(tmp_path):
    train = write_corpus(tmp_path / "train.txt", synthetic_words(400, seed=1))
    test = write_corpus(tmp_path / "test.txt", synthetic_words(200, seed=2))
    out = tmp_path / "coverage"
    args = ["coverage", "--corpus", str(train), "--test-corpus", str(test),
            "--coverage-targets", "0.5,1.0", "--out", str(out)]
    assert main(args) == 0

    with open(out / "coverage.csv", encoding="utf-8") as handle:
        rows = list(csv.DictReader(handle))
    ks = [int(row["k"]) for row in rows]
    assert 1 <= len(rows) <= 2
    assert ks == sorted(ks)
    assert float(rows[0]["train_coverage"]) >= 0.5
    assert float(rows[-1]["train_coverage"]) == 1.0

    corpus = load_corpus(train)
    if ks[0] > 1:
        below = coverage_curve(rank_words(corpus), corpus, corpus, [ks[0] - 1])
        assert below[0].train_coverage < 0.5


def test_eval_word_tokenizer_from_top_k_corpus_words(tmp_path, synthetic_corpus, synthetic_gold):
    args = ["eval", "--tokenizer", "word", "--corpus", str(synthetic_corpus), "--top-k", "20",
            "--gold", str(synthetic_gold), "--out", str(tmp_path)]
    assert main(args) == 0

    report = ReportService.load_report(tmp_path / "word-21-synthetic_gold.json")
    assert report.vocab_size == 21
    assert report.fertility == 1.0
    assert report.continuation_rate == 0.0


def test_eval_top_k_beyond_the_ranking_fails(tmp_path, synthetic_corpus, synthetic_gold, capsys):
    args = ["eval", "--tokenizer", "word", "--corpus", str(synthetic_corpus), "--top-k", "1000000",
            "--gold", str(synthetic_gold), "--out", str(tmp_path)]
    assert main(args) == 1
    assert "outside" in capsys.readouterr().err


def test_eval_bootstrap_flag_adds_intervals(tmp_path, worked_gold, worked_predictions):
    args = eval_args(tmp_path, worked_gold, worked_predictions) + ["--bootstrap", "50", "--seed", "4"]
    assert main(args) == 0

    report = ReportService.load_report(tmp_path / "pretokenized-worked_gold.json")
    assert set(report.cis) == set(AGGREGATES)
    for interval in report.cis.values():
        assert interval.low <= interval.high
    assert report.cis["micro_p"].low <= report.micro_p <= report.cis["micro_p"].high


@pytest.mark.slow
def test_sweep_on_a_megabyte_corpus(tmp_path, synthetic_gold):
    corpus = write_corpus(tmp_path / "corpus.txt", synthetic_words(120000, seed=5))
    assert corpus.stat().st_size > 900_000
    out = tmp_path / "sweep"
    args = ["sweep", "--corpus", str(corpus), "--gold", str(synthetic_gold),
            "--vocab-sizes", "2k,5k,10k", "--out", str(out)]
    assert main(args) == 0

    with open(out / "sweep.csv", encoding="utf-8") as handle:
        rows = list(csv.DictReader(handle))
    fertility = [
        float(row["value"])
        for row in sorted(rows, key=lambda row: int(row["vocab_size"]))
        if row["split"] == "corpus" and row["metric"] == "fertility"
    ]
    assert len(fertility) == 3
    assert fertility[0] >= fertility[1] >= fertility[2]
    assert all((out / "reports" / f"wordpiece-{size}-synthetic_gold.json").is_file() for size in (2000, 5000, 10000))
