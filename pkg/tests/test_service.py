import numpy as np
import pytest
from fastapi.testclient import TestClient

from patentlab.embedder import MockEmbedder, build_request
from patentlab.pipeline import list_vintages, load_vintage, record_parts, structural_from_parts
from patentlab.service import ServiceStartupError, create_app, load_bundles
from patentlab.corpus import parse_applications


@pytest.fixture(scope="module")
def client(trained_world):
    out, _ = trained_world
    app = create_app(out / "models", provider="mock", cache_path=out / "cache" / "service.bin")
    with TestClient(app) as c:
        yield c


SCORE_BODY = {
    "title": "novel adaptive sensor",
    "abstract": "an efficient integrated sensor assembly with robust calibration",
}


class TestHealthAndVintages:
    def test_health(self, client):
        resp = client.get("/health")
        assert resp.status_code == 200
        body = resp.json()
        assert body["status"] == "ok"
        assert body["vintages"] == [2004, 2005]

    def test_vintages(self, client):
        assert client.get("/vintages").json() == [2004, 2005]


class TestScore:
    def test_basic_response_shape(self, client):
        resp = client.post("/score", json=SCORE_BODY)
        assert resp.status_code == 200
        body = resp.json()
        assert 0.0 < body["acceptance_prob"] < 1.0
        assert 0.0 < body["quality_score"] < 1.0
        assert np.isfinite(body["value_transformed"])
        assert 0.0 <= body["value_percentile"] <= 1.0
        assert body["model_vintage"] == 2005  # latest is the default
        assert "ln_mktcap" in body["assumed_defaults"]

    def test_deterministic_byte_identical(self, client):
        r1 = client.post("/score", json=SCORE_BODY)
        r2 = client.post("/score", json=SCORE_BODY)
        assert r1.content == r2.content

    def test_cache_hit_flag(self, client):
        body = dict(SCORE_BODY, title="cache probe title")
        first = client.post("/score", json=body).json()
        second = client.post("/score", json=body).json()
        assert first["embedding_cache_hit"] is False
        assert second["embedding_cache_hit"] is True

    def test_explicit_vintage(self, client):
        body = dict(SCORE_BODY, vintage=2004)
        assert client.post("/score", json=body).json()["model_vintage"] == 2004

    def test_unknown_vintage_404(self, client):
        resp = client.post("/score", json=dict(SCORE_BODY, vintage=1999))
        assert resp.status_code == 404
        assert "1999" in resp.json()["detail"]

    def test_empty_text_rejected_400(self, client):
        resp = client.post("/score", json={"title": " ", "abstract": ""})
        assert resp.status_code == 400
        assert resp.json()["error"] == "validation"

    def test_malformed_json_400_with_fields(self, client):
        resp = client.post("/score", json={"title": "t", "abstract": "a", "ff12_industry": 55})
        assert resp.status_code == 400
        fields = [d["field"] for d in resp.json()["detail"]]
        assert "ff12_industry" in fields

    def test_unknown_field_rejected(self, client):
        resp = client.post("/score", json=dict(SCORE_BODY, bogus=1))
        assert resp.status_code == 400

    def test_provided_structural_fields_echo_no_defaults(self, client):
        body = dict(
            SCORE_BODY, cpc_classes=["G"], num_claims=12, is_ai=False, is_ict=True,
            is_biotech=False, is_hightech=True, is_research_institution=False,
            ff12_industry=6, market_cap_musd=1500.0,
        )
        assumed = client.post("/score", json=body).json()["assumed_defaults"]
        assert assumed == {}


class TestCompare:
    def test_identical_texts_zero(self, client):
        resp = client.post("/compare", json={"text_a": "same words", "text_b": "same words"})
        assert resp.json()["cosine_distance"] == 0.0

    def test_disjoint_texts_positive(self, client):
        resp = client.post("/compare", json={"text_a": "polymer resin oven",
                                             "text_b": "antenna voltage relay"})
        assert resp.json()["cosine_distance"] > 0.0


class TestOneScoringPath:
    def test_service_equals_batch_scoring(self, trained_world, client):
        """/score with a record's own fields reproduces the batch path."""
        out, _ = trained_world
        records = parse_applications(out / "corpus" / "applications.tsv").records
        bundle = load_vintage(out / "models", 2005)
        rec = next(r for r in records if r.year == 2005)
        body = {
            "title": rec.title, "abstract": rec.abstract, "vintage": 2005,
            "cpc_classes": sorted(rec.cpc_classes), "num_claims": rec.num_claims,
            "is_ai": rec.is_ai, "is_ict": rec.is_ict, "is_biotech": rec.is_biotech,
            "is_hightech": rec.is_hightech,
            "is_research_institution": rec.is_research_institution,
            "ff12_industry": rec.ff12_industry, "market_cap_musd": rec.market_cap_musd,
        }
        served = client.post("/score", json=body).json()
        emb = MockEmbedder().embed(build_request(rec.title, rec.abstract))
        batch = bundle.acceptance.score_record(rec, emb.values)
        assert served["acceptance_prob"] == pytest.approx(batch, abs=1e-12)
        vec, assumed = structural_from_parts("acceptance", record_parts(rec))
        assert assumed == {}


class TestStartupValidation:
    def test_missing_models_refused_with_diff(self, tmp_path):
        (tmp_path / "2004").mkdir()
        (tmp_path / "2004" / "meta.json").write_text("{}")
        with pytest.raises(ServiceStartupError, match="missing.*acceptance_full.npz"):
            load_bundles(tmp_path)

    def test_empty_dir_refused(self, tmp_path):
        with pytest.raises(ServiceStartupError, match="no vintages"):
            create_app(tmp_path)
