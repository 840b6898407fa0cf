"""CLI harness: subcommands, exit codes, report determinism and schema."""

import json
from pathlib import Path

import jsonschema
import pytest

from knnloop.cli import SimulationConfig, main, simulate, sweep_lambda
from knnloop.synthetic import TERMS, generate_repeat_term_corpus

SCHEMA = json.loads(
    (Path(__file__).parent.parent / "docs" / "report.schema.json").read_text()
)


@pytest.fixture(scope="module")
def small_corpus(tmp_path_factory):
    out = tmp_path_factory.mktemp("corpus")
    return generate_repeat_term_corpus(seed=0, rounds=10).write(out)


def small_config(paths, **kw):
    defaults = dict(
        corpus=paths["corpus"],
        lexicon=paths["lexicon"],
        vocab=paths["vocab"],
        temperature=0.08,
        policy_temperature=0.05,
    )
    defaults.update(kw)
    return SimulationConfig(**defaults)


class TestGenerator:
    def test_shape_constraints(self):
        corpus = generate_repeat_term_corpus(seed=0)
        assert len(corpus.corpus_rows) >= 200
        assert 40 <= len(corpus.vocabulary_words) <= 60
        for term, _, _ in TERMS:
            occurrences = sum(1 for _, src, _ in corpus.corpus_rows if term in src.split())
            assert occurrences >= 10

    def test_terms_mistranslated_but_corrected(self):
        corpus = generate_repeat_term_corpus(seed=0)
        wrong_by_src = {src: wrong for src, wrong, _ in TERMS}
        right_by_src = {src: right for src, _, right in TERMS}
        lex = {(s, t) for s, t, _ in corpus.lexicon_rows}
        for _, src, ref in corpus.corpus_rows:
            for word in src.split():
                if word in wrong_by_src:
                    assert (word, wrong_by_src[word]) in lex
                    assert right_by_src[word] in ref.split()

    def test_deterministic_given_seed(self):
        a = generate_repeat_term_corpus(seed=5)
        b = generate_repeat_term_corpus(seed=5)
        assert a.corpus_rows == b.corpus_rows

    def test_rounds_below_ten_rejected(self):
        with pytest.raises(ValueError):
            generate_repeat_term_corpus(rounds=9)


class TestSimulate:
    def test_base_mode_keeps_datastores_empty(self, small_corpus):
        report = simulate(small_config(small_corpus, mode="base"))
        assert report["datastore"] == {"token_entries": 0, "policy_entries": 0}

    def test_constant_zero_matches_base(self, small_corpus):
        base = simulate(small_config(small_corpus, mode="base"))
        knn0 = simulate(small_config(small_corpus, mode="constant", lam=0.0))
        assert base["aggregate"]["bleu"] == knn0["aggregate"]["bleu"]
        assert base["aggregate"]["ter_noshift"] == knn0["aggregate"]["ter_noshift"]

    def test_adaptive_beats_base(self, small_corpus):
        base = simulate(small_config(small_corpus, mode="base"))
        kok = simulate(small_config(small_corpus, mode="adaptive"))
        assert kok["aggregate"]["bleu"] > base["aggregate"]["bleu"]

    def test_report_validates_against_schema(self, small_corpus):
        report = simulate(small_config(small_corpus, mode="adaptive"))
        jsonschema.validate(report, SCHEMA)

    def test_determinism_modulo_latency(self, small_corpus):
        def strip(obj):
            if isinstance(obj, dict):
                return {k: strip(v) for k, v in obj.items() if k != "latency"}
            if isinstance(obj, list):
                return [strip(v) for v in obj]
            return obj

        a = simulate(small_config(small_corpus, mode="adaptive"))
        b = simulate(small_config(small_corpus, mode="adaptive"))
        assert json.dumps(strip(a), sort_keys=True) == json.dumps(strip(b), sort_keys=True)

    def test_clear_between_documents(self, tmp_path):
        paths = generate_repeat_term_corpus(seed=0, rounds=10, documents=4).write(tmp_path)
        cleared = simulate(
            small_config(paths, mode="adaptive", clear_between_documents=True)
        )
        shared = simulate(small_config(paths, mode="adaptive"))
        assert len(cleared["documents"]) == 4
        # shared datastores accumulate across documents, cleared ones do not
        assert (
            cleared["datastore"]["token_entries"] < shared["datastore"]["token_entries"]
        )

    def test_snapshot_round_trip_through_simulate(self, small_corpus, tmp_path):
        prefix = tmp_path / "state"
        first = simulate(small_config(small_corpus, mode="adaptive", snapshot_out=prefix))
        resumed = simulate(small_config(small_corpus, mode="adaptive", snapshot_in=prefix))
        assert (prefix.parent / "state.token.knns").exists()
        assert (prefix.parent / "state.policy.knns").exists()
        assert (
            resumed["datastore"]["token_entries"]
            > first["datastore"]["token_entries"] / 2
        )


class TestSweep:
    def test_lambda_zero_equals_base(self, small_corpus):
        base = simulate(small_config(small_corpus, mode="base"))
        points = sweep_lambda(small_config(small_corpus), [0.0])
        assert points[0] == (0.0, base["aggregate"]["bleu"])

    def test_duplicate_lambdas_give_identical_points(self, small_corpus):
        points = sweep_lambda(small_config(small_corpus), [0.3, 0.3])
        assert points[0][1] == points[1][1]

    def test_lambda_one_rejected(self, small_corpus):
        from knnloop.errors import InputError

        with pytest.raises(InputError):
            sweep_lambda(small_config(small_corpus), [1.0])


class TestCommandLine:
    def test_usage_error_exits_1(self, capsys):
        assert main(["simulate", "--mode", "bogus"]) == 1

    def test_missing_command_exits_1(self, capsys):
        assert main([]) == 1

    def test_data_error_exits_2(self, tmp_path, capsys):
        missing = tmp_path / "missing.tsv"
        code = main(
            ["simulate", "--corpus", str(missing), "--lexicon", str(missing)]
        )
        assert code == 2

    def test_gen_corpus_then_simulate(self, tmp_path, capsys):
        out = tmp_path / "corpus"
        assert main(["gen-corpus", "--out", str(out), "--rounds", "10"]) == 0
        report_path = tmp_path / "report.json"
        code = main(
            [
                "simulate",
                "--corpus", str(out / "corpus.tsv"),
                "--lexicon", str(out / "lexicon.tsv"),
                "--vocab", str(out / "vocab.txt"),
                "--mode", "adaptive",
                "--temperature", "0.08",
                "--policy-temperature", "0.05",
                "--report", str(report_path),
            ]
        )
        assert code == 0
        report = json.loads(report_path.read_text())
        jsonschema.validate(report, SCHEMA)

    def test_snapshot_info_command(self, tmp_path, capsys):
        out = tmp_path / "corpus"
        main(["gen-corpus", "--out", str(out), "--rounds", "10"])
        prefix = tmp_path / "st"
        main(
            [
                "simulate",
                "--corpus", str(out / "corpus.tsv"),
                "--lexicon", str(out / "lexicon.tsv"),
                "--temperature", "0.08",
                "--policy-temperature", "0.05",
                "--snapshot-out", str(prefix),
                "--report", str(tmp_path / "r.json"),
            ]
        )
        capsys.readouterr()
        code = main(["snapshot", "info", str(tmp_path / "st.token.knns")])
        assert code == 0
        info = json.loads(capsys.readouterr().out)
        assert info[0]["kind"] == "token"
        assert info[0]["entries"] > 0
