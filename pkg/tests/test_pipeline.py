import json

import numpy as np
import pytest

from patentlab.corpus import SyntheticConfig, generate_synthetic, generate_synthetic_with_truth
from patentlab.corpus import _structural_index  # structural truth for placebo checks
from patentlab.embedder import EMBED_DIM, MockEmbedder
from patentlab.metrics import ClassificationReport
from patentlab.pipeline import (
    FeatureError,
    RollingConfig,
    application_quality,
    assemble_matrix,
    bucket_analysis,
    feature_names,
    list_vintages,
    load_vintage,
    manifest_payload,
    missing_vintage_files,
    quality_regression,
    read_predictions,
    rolling_run,
    save_vintage,
    structural_feature_names,
    structural_features,
    value_target,
    write_manifest,
    write_predictions,
)

FAST = dict(hidden_dims=(16,), epochs=2, batch_size=128, seed=3, min_train=50)


@pytest.fixture(scope="module")
def small_corpus():
    cfg = SyntheticConfig(n_apps=2000, n_firms=25, year_range=(2001, 2010), seed=17)
    return generate_synthetic_with_truth(cfg)


@pytest.fixture(scope="module")
def acceptance_run(small_corpus):
    corpus, _, _ = small_corpus
    rc = RollingConfig(task="acceptance", variant="no_embedding",
                       test_years=(2004, 2010), **FAST)
    return rolling_run(corpus, rc, MockEmbedder())


class TestFeatureLayout:
    def test_acceptance_excludes_claims_and_ai(self):
        names = structural_feature_names("acceptance")
        assert "ln1p_claims" not in names and "is_ai" not in names
        assert names[-1] == "ln_mktcap"

    def test_value_excludes_mktcap(self):
        names = structural_feature_names("value")
        assert "ln1p_claims" in names and "is_ai" in names
        assert "ln_mktcap" not in names

    def test_variant_dimensions(self):
        assert len(feature_names("acceptance", "full")) == EMBED_DIM + 27
        assert len(feature_names("acceptance", "no_embedding")) == 27
        assert len(feature_names("value", "no_embedding")) == 28
        assert feature_names("acceptance", "embedding_only") == [f"emb_{i}" for i in range(EMBED_DIM)]

    def test_no_embedding_is_strict_subset_of_full(self):
        full = feature_names("acceptance", "full")
        structural = feature_names("acceptance", "no_embedding")
        emb = feature_names("acceptance", "embedding_only")
        assert set(structural) < set(full)
        assert set(emb) < set(full)
        assert set(structural) & set(emb) == set()

    def test_structural_vector_matches_names(self, small_corpus):
        corpus, _, _ = small_corpus
        rec = corpus.applications[0]
        for task in ("acceptance", "value"):
            vec = structural_features(rec, task)
            assert vec.shape == (len(structural_feature_names(task)),)

    def test_empty_cpc_rejected(self, small_corpus):
        corpus, _, _ = small_corpus
        rec = corpus.applications[0]
        bad = type(rec)(**{**rec.__dict__, "app_id": "BAD", "cpc_classes": frozenset()})
        with pytest.raises(FeatureError):
            structural_features(bad, "acceptance")

    def test_assemble_matrix_variants(self, small_corpus):
        corpus, _, _ = small_corpus
        recs = list(corpus.applications[:5])
        emb = {r.app_id: np.zeros(EMBED_DIM) + 0.01 for r in recs}
        full = assemble_matrix(recs, "acceptance", "full", emb)
        ne = assemble_matrix(recs, "acceptance", "no_embedding", None)
        eo = assemble_matrix(recs, "acceptance", "embedding_only", emb)
        assert full.shape == (5, EMBED_DIM + 27)
        assert ne.shape == (5, 27)
        assert eo.shape == (5, EMBED_DIM)
        assert np.array_equal(full[:, EMBED_DIM:], ne)
        assert np.array_equal(full[:, :EMBED_DIM], eo)


class TestRollingProtocol:
    def test_one_row_per_test_year(self, acceptance_run):
        assert [e.year for e in acceptance_run.evaluations] == list(range(2004, 2011))
        assert acceptance_run.skipped == []

    def test_training_window_is_three_prior_years(self, acceptance_run):
        for year, ym in acceptance_run.year_models.items():
            assert ym.train_years == (year - 3, year - 1)

    def test_no_leakage(self, acceptance_run, small_corpus):
        corpus, _, _ = small_corpus
        years = {r.app_id: r.year for r in corpus.applications}
        for app_id, year in acceptance_run.prediction_years.items():
            ym = acceptance_run.year_models[year]
            assert ym.train_years[1] < year
            assert years[app_id] == year

    def test_insufficient_window_skipped_with_reason(self, small_corpus):
        # data starts 2001, so 2002/2003 lack full three-year windows
        corpus, _, _ = small_corpus
        rc = RollingConfig(task="acceptance", variant="no_embedding",
                           test_years=(2002, 2004), **FAST)
        res = rolling_run(corpus, rc, MockEmbedder())
        skipped_years = [y for y, _ in res.skipped]
        assert skipped_years == [2002, 2003]
        assert all(reason for _, reason in res.skipped)
        assert [e.year for e in res.evaluations] == [2004]

    def test_summary_rows(self, acceptance_run):
        summary = acceptance_run.summary()
        assert set(summary) == {"mean", "median"}
        aucs = [e.report.auc for e in acceptance_run.evaluations]
        assert summary["mean"]["auc"] == pytest.approx(np.mean(aucs))
        assert summary["median"]["auc"] == pytest.approx(np.median(aucs))

    def test_determinism(self, small_corpus):
        corpus, _, _ = small_corpus
        rc = RollingConfig(task="acceptance", variant="no_embedding",
                           test_years=(2004, 2005), **FAST)
        r1 = rolling_run(corpus, rc, MockEmbedder())
        r2 = rolling_run(corpus, rc, MockEmbedder())
        assert r1.predictions == r2.predictions


@pytest.fixture(scope="module")
def value_run(small_corpus):
    corpus, _, _ = small_corpus
    rc = RollingConfig(task="value", variant="no_embedding",
                       test_years=(2004, 2006), **FAST)
    return rolling_run(corpus, rc, MockEmbedder()), corpus


class TestValueTask:

    def test_transform_fitted_on_training_window_only(self, value_run):
        result, corpus = value_run
        for year, ym in result.year_models.items():
            lo, hi = ym.train_years
            n_train = sum(1 for r in corpus.labeled()
                          if lo <= r.year <= hi and r.accepted and r.raw_value_musd is not None)
            assert ym.transform.fitted_on == n_train

    def test_lambda_differs_across_years(self, value_run):
        result, _ = value_run
        lambdas = {ym.transform.lambda_ for ym in result.year_models.values()}
        assert len(lambdas) > 1

    def test_inverse_preserves_prediction_ranks(self, value_run):
        result, _ = value_run
        year = 2004
        ym = result.year_models[year]
        ids = [a for a, y in result.prediction_years.items() if y == year]
        preds = np.array([result.predictions[a] for a in ids])
        raw = ym.transform.inverse(preds)
        assert np.array_equal(np.argsort(preds), np.argsort(raw))

    def test_value_target_scaling(self, small_corpus):
        corpus, _, _ = small_corpus
        rec = next(r for r in corpus.applications if r.raw_value_musd is not None)
        expect = (rec.raw_value_musd / 0.45) / rec.market_cap_musd
        assert value_target(rec) == pytest.approx(expect, rel=1e-12)


class TestBucketAnalysis:
    def test_oracle_predictor(self, small_corpus):
        # cutoff must stay below the rarer class count for exact 1.0/0.0
        corpus, _, _ = small_corpus
        labeled = [r for r in corpus.labeled() if r.year == 2005]
        predictions = {r.app_id: float(r.accepted) for r in labeled}
        k = min(sum(1 - r.accepted for r in labeled), sum(r.accepted for r in labeled)) // 2
        reports = bucket_analysis(predictions, corpus, cutoffs=(k,))
        assert reports[0].top_acceptance_rate == 1.0
        assert reports[0].bottom_acceptance_rate == 0.0

    def test_random_predictor_near_prevalence(self):
        corpus = generate_synthetic(SyntheticConfig(
            n_apps=5000, n_firms=20, year_range=(2004, 2004), seed=29))
        rng = np.random.default_rng(5)
        labeled = corpus.labeled()
        predictions = {r.app_id: float(rng.random()) for r in labeled}
        prevalence = np.mean([r.accepted for r in labeled])
        rep = bucket_analysis(predictions, corpus, cutoffs=(1000,))[0]
        assert rep.top_acceptance_rate == pytest.approx(prevalence, abs=0.03)
        assert rep.bottom_acceptance_rate == pytest.approx(prevalence, abs=0.03)

    def test_small_year_skipped_for_large_cutoff(self, small_corpus):
        corpus, _, _ = small_corpus
        labeled = [r for r in corpus.labeled() if r.year == 2005]
        predictions = {r.app_id: 0.5 for r in labeled}
        rep = bucket_analysis(predictions, corpus, cutoffs=(100000,))[0]
        assert rep.n_years == 0
        assert 2005 in rep.skipped_years


class TestApplicationQuality:
    def test_quality_tracks_latent_quality_on_text_corpus(self):
        cfg = SyntheticConfig(n_apps=3000, n_firms=25, year_range=(2001, 2004), seed=31)
        corpus, q, _ = generate_synthetic_with_truth(cfg)
        rc = RollingConfig(task="acceptance", variant="full", test_years=(2004, 2004),
                           hidden_dims=(32, 8), epochs=4, seed=3)
        result = application_quality(corpus, rc, MockEmbedder())
        assert result.config.variant == "embedding_only"
        idx = {r.app_id: i for i, r in enumerate(corpus.applications)}
        ids = sorted(result.predictions)
        scores = np.array([result.predictions[a] for a in ids])
        latent = np.array([q[idx[a]] for a in ids])
        ranks = lambda v: np.argsort(np.argsort(v))
        rho = np.corrcoef(ranks(scores), ranks(latent))[0, 1]
        assert rho > 0.3

    def test_quality_uncorrelated_with_structure_under_placebo(self):
        # |rho| < 0.05 needs a few thousand test predictions against noise
        cfg = SyntheticConfig(n_apps=7000, n_firms=25, year_range=(2001, 2005), seed=37,
                              signal_strength_text=0.0)
        corpus, _, _ = generate_synthetic_with_truth(cfg)
        rc = RollingConfig(task="acceptance", variant="full", test_years=(2004, 2005),
                           hidden_dims=(32, 8), epochs=4, seed=3)
        result = application_quality(corpus, rc, MockEmbedder())
        records = corpus.by_id()
        ids = sorted(result.predictions)
        scores = np.array([result.predictions[a] for a in ids])
        s_index = np.array([
            _structural_index(min(records[a].cpc_classes), records[a].is_hightech,
                              records[a].ff12_industry)
            for a in ids
        ])
        assert abs(np.corrcoef(scores, s_index)[0, 1]) < 0.05

    def test_quality_regression_recovers_planted_size_effect(self):
        corpus = generate_synthetic(SyntheticConfig(
            n_apps=5000, n_firms=50, year_range=(2001, 2006), seed=41))
        rng = np.random.default_rng(4)
        firm_effect = {f: rng.normal(0, 0.05) for f in corpus.firms}
        quality = {}
        for r in corpus.applications:
            quality[r.app_id] = (0.016 * np.log(r.market_cap_musd)
                                 + firm_effect[r.firm_id] + rng.normal(0, 0.02))
        res, names = quality_regression(corpus, quality)
        i = names.index("size_ln")
        assert res.coefficients[i] > 0
        assert res.t_stats[i] > 2.0
        assert res.n == 5000

    def test_quality_regression_with_patent_controls(self):
        corpus = generate_synthetic(SyntheticConfig(
            n_apps=1500, n_firms=20, year_range=(2001, 2004), seed=43))
        rng = np.random.default_rng(6)
        quality = {r.app_id: float(rng.uniform(0.3, 0.9)) for r in corpus.applications}
        res, names = quality_regression(corpus, quality, patent_controls=True)
        assert "cpc_A" in names and "ln_mktcap" not in names
        assert res.n == 1500


class TestArtifacts:
    def test_prediction_file_round_trip(self, acceptance_run, tmp_path):
        path = tmp_path / "preds.tsv"
        write_predictions(acceptance_run, path)
        preds, years = read_predictions(path)
        assert preds == acceptance_run.predictions
        assert years == acceptance_run.prediction_years

    def test_manifest_contents(self, acceptance_run, tmp_path):
        path = tmp_path / "manifest.json"
        write_manifest(acceptance_run, path)
        payload = json.loads(path.read_text())
        assert payload["config"]["task"] == "acceptance"
        assert payload["years"]["2004"]["train_years"] == [2001, 2003]
        assert "auc" in payload["years"]["2004"]["metrics"]
        assert payload["summary"]["mean"]["auc"] == pytest.approx(
            acceptance_run.summary()["mean"]["auc"])

    def test_vintage_round_trip(self, small_corpus, tmp_path):
        corpus, _, _ = small_corpus
        provider = MockEmbedder()
        acc = rolling_run(corpus, RollingConfig(
            task="acceptance", variant="full", test_years=(2004, 2004),
            hidden_dims=(8,), epochs=1, seed=3), provider)
        qual = rolling_run(corpus, RollingConfig(
            task="acceptance", variant="embedding_only", test_years=(2004, 2004),
            hidden_dims=(8,), epochs=1, seed=3), provider)
        val = rolling_run(corpus, RollingConfig(
            task="value", variant="no_embedding", test_years=(2004, 2004),
            hidden_dims=(8,), epochs=1, seed=3), provider)
        ym = acc.year_models[2004]
        save_vintage(tmp_path, 2004, ym, qual.year_models[2004], val.year_models[2004],
                     val.year_models[2004].train_targets,
                     defaults={"ln_mktcap": 6.9, "ln1p_claims": 2.5})
        assert list_vintages(tmp_path) == [2004]
        bundle = load_vintage(tmp_path, 2004)
        rec = next(r for r in corpus.applications if r.year == 2004)
        emb = provider.embed(rec.title + "\n" + rec.abstract)
        p1 = ym.score_record(rec, emb.values)
        p2 = bundle.acceptance.score_record(rec, emb.values)
        assert p1 == p2
        assert 0.0 <= bundle.value_percentile(0.0) <= 1.0
        assert bundle.defaults["ln_mktcap"] == 6.9

    def test_missing_vintage_files_detected(self, tmp_path):
        (tmp_path / "2004").mkdir()
        (tmp_path / "2004" / "meta.json").write_text("{}")
        missing = missing_vintage_files(tmp_path / "2004")
        assert "acceptance_full.npz" in missing
        with pytest.raises(Exception, match="incomplete"):
            load_vintage(tmp_path, 2004)
