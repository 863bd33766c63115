import math
from datetime import date

import numpy as np
import pytest

from patentlab.corpus import (
    APPLICATION_COLUMNS,
    ApplicationRecord,
    Corpus,
    CorpusError,
    FirmRecord,
    MissingCovariateError,
    RowError,
    SchemaError,
    SyntheticConfig,
    firm_covariates,
    generate_synthetic,
    generate_synthetic_with_truth,
    month_add,
    month_index,
    parse_applications,
    parse_factors,
    parse_firms,
    write_applications,
    write_factors,
    write_firms,
)


def _row(app_id="A1", firm_id="F1", assignees="F1", **overrides):
    base = {
        "app_id": app_id, "firm_id": firm_id, "assignee_ids": assignees,
        "filing_date": "2003-01-15", "publication_date": "2004-07-15",
        "title": "novel sensor", "abstract": "an efficient sensor assembly",
        "cpc_classes": "G", "num_claims": "12", "is_ai": "0", "is_ict": "1",
        "is_biotech": "0", "is_hightech": "1", "is_research_institution": "0",
        "ff12_industry": "6", "accepted": "1", "grant_title": "novel sensor",
        "grant_abstract": "an efficient sensor assembly",
        "raw_value_musd": "2.5", "market_cap_musd": "1500.0",
    }
    base.update(overrides)
    return base


def _write_rows(path, rows, delim="\t"):
    lines = [delim.join(APPLICATION_COLUMNS)]
    for row in rows:
        lines.append(delim.join(row[c] for c in APPLICATION_COLUMNS))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


class TestParseApplications:
    def test_multi_assignee_row_dropped(self, tmp_path):
        p = tmp_path / "apps.tsv"
        _write_rows(p, [_row(), _row(app_id="A2", assignees="F1|F9")])
        result = parse_applications(p)
        assert len(result.records) == 1
        assert result.n_multi_assignee_dropped == 1

    def test_unlinked_row_dropped(self, tmp_path):
        p = tmp_path / "apps.tsv"
        _write_rows(p, [_row(), _row(app_id="A2", firm_id="", assignees="")])
        result = parse_applications(p)
        assert len(result.records) == 1
        assert result.n_unlinked_dropped == 1

    def test_empty_file_with_header(self, tmp_path):
        p = tmp_path / "apps.tsv"
        _write_rows(p, [])
        assert parse_applications(p).records == []

    def test_missing_column_is_schema_error(self, tmp_path):
        p = tmp_path / "apps.tsv"
        cols = [c for c in APPLICATION_COLUMNS if c != "accepted"]
        p.write_text("\t".join(cols) + "\n", encoding="utf-8")
        with pytest.raises(SchemaError, match="accepted"):
            parse_applications(p)

    def test_malformed_row_names_row_and_column(self, tmp_path):
        p = tmp_path / "apps.tsv"
        _write_rows(p, [_row(), _row(app_id="A2", market_cap_musd="not-a-number")])
        with pytest.raises(RowError, match="row 3.*market_cap_musd"):
            parse_applications(p)

    def test_csv_format(self, tmp_path):
        p = tmp_path / "apps.csv"
        _write_rows(p, [_row()], delim=",")
        assert len(parse_applications(p, fmt="csv").records) == 1

    def test_roundtrip_field_equality(self, tmp_path):
        corpus = generate_synthetic(SyntheticConfig(n_apps=100, n_firms=10, seed=3))
        p = tmp_path / "apps.tsv"
        write_applications(corpus.applications, p)
        parsed = parse_applications(p).records
        assert len(parsed) == 100
        for orig, back in zip(corpus.applications, parsed):
            assert orig == back

    def test_write_parse_write_is_identity(self, tmp_path):
        corpus = generate_synthetic(SyntheticConfig(n_apps=50, n_firms=8, seed=4))
        p1, p2 = tmp_path / "a.tsv", tmp_path / "b.tsv"
        write_applications(corpus.applications, p1)
        write_applications(parse_applications(p1).records, p2)
        assert p1.read_bytes() == p2.read_bytes()


class TestRecordInvariants:
    def test_grant_text_requires_accepted(self):
        with pytest.raises(CorpusError, match="grant text"):
            ApplicationRecord(
                app_id="X", firm_id="F", filing_date=date(2003, 1, 1),
                publication_date=date(2004, 1, 1), title="t", abstract="a",
                cpc_classes=frozenset("G"), is_ict=False, is_biotech=False,
                is_hightech=False, is_research_institution=False,
                ff12_industry=1, market_cap_musd=10.0,
                accepted=False, grant_title="t2",
            )

    def test_duplicate_app_id_rejected(self):
        rec = generate_synthetic(SyntheticConfig(n_apps=1, n_firms=2, seed=0)).applications[0]
        with pytest.raises(CorpusError, match="duplicate"):
            Corpus(applications=(rec, rec))

    def test_firm_months_strictly_increasing(self):
        with pytest.raises(CorpusError, match="strictly increasing"):
            FirmRecord(
                firm_id="F", first_listed=date(1990, 1, 1),
                monthly_returns={"2004-02": 0.01, "2004-01": 0.02},
                monthly_market_cap_musd={"2004-02": 5.0, "2004-01": 5.0},
            )


class TestFirmAndFactorFiles:
    def test_firm_roundtrip(self, tmp_path):
        corpus = generate_synthetic(SyntheticConfig(n_apps=20, n_firms=5, seed=7))
        p = tmp_path / "firms.tsv"
        write_firms(corpus.firms, p)
        parsed = parse_firms(p)
        assert parsed == corpus.firms

    def test_factor_roundtrip(self, tmp_path):
        corpus = generate_synthetic(SyntheticConfig(n_apps=20, n_firms=5, seed=7))
        p = tmp_path / "factors.tsv"
        write_factors(corpus.factors, p)
        assert parse_factors(p) == corpus.factors


class TestFirmCovariates:
    def _firm(self):
        return FirmRecord(
            firm_id="F", first_listed=date(1994, 6, 1),
            monthly_returns={"2004-05": 0.01, "2004-06": 0.02},
            monthly_market_cap_musd={"2004-05": 900.0, "2004-06": 1000.0},
        )

    def test_age_ten_years(self):
        _, age, _ = firm_covariates(self._firm(), "2004-06")
        assert age == pytest.approx(10.0)

    def test_stock_counts_strictly_prior_months(self):
        app_months = ["2004-01", "2004-02", "2004-03", "2004-06", "2004-06"]
        _, _, stock = firm_covariates(self._firm(), "2004-06", app_months)
        assert stock == 3

    def test_size_is_log_cap(self):
        size, _, _ = firm_covariates(self._firm(), "2004-06")
        assert size == pytest.approx(math.log(1000.0), abs=1e-12)

    def test_deflator_applied(self):
        size, _, _ = firm_covariates(self._firm(), "2004-06", deflator=lambda m: 2.0)
        assert size == pytest.approx(math.log(500.0), abs=1e-12)

    def test_no_cap_raises(self):
        with pytest.raises(MissingCovariateError):
            firm_covariates(self._firm(), "2004-04")

    def test_stock_monotone_in_month(self):
        firm = self._firm()
        app_months = ["2004-01", "2004-02", "2004-05", "2004-05"]
        stocks = [
            firm_covariates(firm, m, app_months)[2]
            for m in ("2004-05", "2004-06")
        ]
        assert stocks == sorted(stocks)


class TestSyntheticCorpus:
    def test_zero_text_signal_decorrelates_quality(self):
        cfg = SyntheticConfig(n_apps=10000, n_firms=40, seed=11, signal_strength_text=0.0)
        corpus, q, _ = generate_synthetic_with_truth(cfg)
        accepted = np.array([r.accepted for r in corpus.applications], dtype=float)
        assert abs(np.corrcoef(q, accepted)[0, 1]) < 0.05

    def test_default_grant_fraction_calibration(self):
        corpus = generate_synthetic(SyntheticConfig(n_apps=10000, n_firms=40, seed=12))
        rate = np.mean([r.accepted for r in corpus.applications])
        assert 0.67 <= rate <= 0.77

    def test_same_seed_identical_serialized_corpora(self, tmp_path):
        cfg = SyntheticConfig(n_apps=200, n_firms=10, seed=1)
        for name in ("x", "y"):
            corpus = generate_synthetic(cfg)
            write_applications(corpus.applications, tmp_path / f"{name}_apps.tsv")
            write_firms(corpus.firms, tmp_path / f"{name}_firms.tsv")
            write_factors(corpus.factors, tmp_path / f"{name}_factors.tsv")
        for part in ("apps", "firms", "factors"):
            assert (tmp_path / f"x_{part}.tsv").read_bytes() == (tmp_path / f"y_{part}.tsv").read_bytes()

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SyntheticConfig(signal_strength_text=1.5)
        with pytest.raises(ValueError):
            SyntheticConfig(year_range=(2010, 2001))

    def test_pending_records_excluded_from_labeled(self):
        corpus = generate_synthetic(SyntheticConfig(n_apps=50, n_firms=5, seed=2))
        rec = corpus.applications[0]
        pending = ApplicationRecord(
            app_id="PENDING", firm_id=rec.firm_id, filing_date=rec.filing_date,
            publication_date=rec.publication_date, title=rec.title,
            abstract=rec.abstract, cpc_classes=rec.cpc_classes,
            is_ict=rec.is_ict, is_biotech=rec.is_biotech,
            is_hightech=rec.is_hightech,
            is_research_institution=rec.is_research_institution,
            ff12_industry=rec.ff12_industry, market_cap_musd=rec.market_cap_musd,
        )
        corpus2 = Corpus(applications=corpus.applications + (pending,))
        assert all(r.accepted is not None for r in corpus2.labeled())
        assert len(corpus2.labeled()) == 50


class TestMonthHelpers:
    def test_index_roundtrip(self):
        assert month_add("2004-12", 1) == "2005-01"
        assert month_add("2004-01", -1) == "2003-12"
        assert month_index("2005-01") - month_index("2004-12") == 1
