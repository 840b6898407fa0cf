"""HTTP session service, exercised through the in-process test client."""

import pytest
from fastapi.testclient import TestClient

from knnloop.base_model import LexiconStubModel
from knnloop.core import Vocabulary
from knnloop.service import create_app


@pytest.fixture
def client():
    vocab = Vocabulary(["hund", "haus", "katze", "cat", "dog", "house", "kitten"])
    lexicon = {
        vocab.id_of("hund"): [(vocab.id_of("cat"), 0.9)],
        vocab.id_of("haus"): [(vocab.id_of("house"), 0.9)],
        vocab.id_of("katze"): [(vocab.id_of("kitten"), 0.9)],
    }
    model = LexiconStubModel(vocab, lexicon, dim=64, seed=7)
    return TestClient(create_app(model))


def create_session(client, **config):
    body = {"temperature": 0.1, "policy_temperature": 0.05}
    body.update(config)
    response = client.post("/sessions", json=body)
    assert response.status_code == 201
    return response.json()["session_id"]


class TestLifecycle:
    def test_health(self, client):
        assert client.get("/healthz").json()["status"] == "ok"

    def test_create_echoes_config(self, client):
        response = client.post("/sessions", json={"mode": "constant", "lam": 0.3})
        payload = response.json()
        assert payload["config"]["mode"] == "constant"
        assert payload["config"]["lam"] == 0.3

    def test_stats_start_at_zero(self, client):
        sid = create_session(client)
        stats = client.get(f"/sessions/{sid}/stats").json()
        assert stats["datastore"] == {"token_entries": 0, "policy_entries": 0}
        assert stats["adapted_sentences"] == 0

    def test_unknown_session_is_404(self, client):
        assert client.post("/sessions/nope/translate", json={"source": "hund"}).status_code == 404
        assert client.get("/sessions/nope/stats").status_code == 404

    def test_malformed_body_is_400(self, client):
        sid = create_session(client)
        assert client.post(f"/sessions/{sid}/translate", json={}).status_code == 400
        assert (
            client.post(f"/sessions/{sid}/correct", json={"source": "hund"}).status_code
            == 400
        )

    def test_empty_source_is_400(self, client):
        sid = create_session(client)
        assert (
            client.post(f"/sessions/{sid}/translate", json={"source": "  "}).status_code
            == 400
        )

    def test_delete_then_404(self, client):
        sid = create_session(client)
        assert client.delete(f"/sessions/{sid}").status_code == 200
        assert client.get(f"/sessions/{sid}/stats").status_code == 404


class TestWorkflow:
    def test_translate_shape(self, client):
        sid = create_session(client)
        payload = client.post(f"/sessions/{sid}/translate", json={"source": "hund"}).json()
        assert payload["text"] == "cat"
        assert payload["tokens"] == ["cat"]
        diag = payload["diagnostics"][0]
        assert set(diag) == {"token", "lambda", "p_nmt_top", "p_knn_top", "neighbor_distances"}
        assert 0.0 <= diag["lambda"] <= 1.0
        assert len(diag["p_nmt_top"]) <= 5

    def test_correct_then_retranslate_reflects_adaptation(self, client):
        sid = create_session(client, fallback_lambda=1.0)
        first = client.post(f"/sessions/{sid}/translate", json={"source": "hund"}).json()
        assert first["text"] == "cat"
        report = client.post(
            f"/sessions/{sid}/correct", json={"source": "hund", "corrected": "dog"}
        ).json()
        assert report["token_entries_added"] == 2
        second = client.post(f"/sessions/{sid}/translate", json={"source": "hund"}).json()
        assert second["text"] == "dog"

    def test_stats_track_corrections(self, client):
        sid = create_session(client)
        client.post(f"/sessions/{sid}/correct", json={"source": "haus", "corrected": "house"})
        stats = client.get(f"/sessions/{sid}/stats").json()
        assert stats["datastore"]["token_entries"] == 2
        assert stats["adapted_sentences"] == 1
        assert "bleu" in stats["running"]

    def test_oov_reported(self, client):
        sid = create_session(client)
        payload = client.post(
            f"/sessions/{sid}/correct",
            json={"source": "hund neuwort", "corrected": "dog"},
        ).json()
        assert payload["oov"]["source"] == ["neuwort"]

    def test_clear_resets_datastores(self, client):
        sid = create_session(client)
        client.post(f"/sessions/{sid}/correct", json={"source": "haus", "corrected": "house"})
        client.post(f"/sessions/{sid}/clear")
        stats = client.get(f"/sessions/{sid}/stats").json()
        assert stats["datastore"] == {"token_entries": 0, "policy_entries": 0}

    def test_no_raw_vectors_in_responses(self, client):
        sid = create_session(client, fallback_lambda=1.0)
        client.post(f"/sessions/{sid}/correct", json={"source": "hund", "corrected": "dog"})
        payload = client.post(f"/sessions/{sid}/translate", json={"source": "hund"}).json()
        diag = payload["diagnostics"][0]
        # distances and top-candidate lists only; nothing of embedding size
        assert len(diag["neighbor_distances"]) <= 8
        for entry in diag["p_knn_top"]:
            assert isinstance(entry[0], str) and isinstance(entry[1], float)

    def test_sessions_are_independent(self, client):
        a = create_session(client, fallback_lambda=1.0)
        b = create_session(client, fallback_lambda=1.0)
        client.post(f"/sessions/{a}/correct", json={"source": "hund", "corrected": "dog"})
        translated_b = client.post(f"/sessions/{b}/translate", json={"source": "hund"}).json()
        assert translated_b["text"] == "cat"

    def test_snapshot_on_delete(self, client, tmp_path):
        sid = create_session(client)
        client.post(f"/sessions/{sid}/correct", json={"source": "haus", "corrected": "house"})
        prefix = tmp_path / "final"
        response = client.delete(f"/sessions/{sid}", params={"snapshot_prefix": str(prefix)})
        assert response.status_code == 200
        assert (tmp_path / "final.token.knns").exists()
        assert (tmp_path / "final.policy.knns").exists()
