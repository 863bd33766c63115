"""Rolling-window experiment protocol.

One model is trained per test year on the three preceding calendar years
(publication-year based, never pooled across the test boundary). Three
feature variants are supported: full (embedding + structural),
no_embedding (structural only), and embedding_only. Value-task targets are
Box-Cox transformed with the lambda fitted on the training window only,
and value metrics are reported in transformed space.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, asdict

import numpy as np

from . import neuralnet
from .corpus import CPC_SECTIONS, ApplicationRecord, Corpus, month_index
from .embedder import EMBED_DIM, EmbeddingCache, build_request, get_or_embed
from .metrics import (
    ClassificationReport,
    MetricError,
    RegressionReport,
    classification_report,
    regression_report,
)
from .neuralnet import AdamParams, MLPConfig, MLPModel
from .stats import RegressionResult, fe_panel
from .transforms import fit_transform, transform_from_json

TASKS = ("acceptance", "value")
VARIANTS = ("full", "no_embedding", "embedding_only")

KPSS_BASELINE_P = 0.55


class PipelineError(Exception):
    pass


class FeatureError(PipelineError):
    pass


# ---------------------------------------------------------------------------
# feature layout


def structural_feature_names(task: str) -> list[str]:
    """Fixed, documented feature order per task.

    The acceptance task excludes num_claims and the AI flag (not available
    in processed application data) and includes ln(market cap); the value
    task is the reverse.
    """
    names = [f"cpc_{s}" for s in CPC_SECTIONS]
    names.append("n_cpc")
    if task == "value":
        names.append("ln1p_claims")
        names.append("is_ai")
    names += ["is_ict", "is_biotech", "is_hightech", "is_research_institution"]
    names += [f"ff12_{i}" for i in range(1, 13)]
    if task == "acceptance":
        names.append("ln_mktcap")
    return names


def feature_names(task: str, variant: str) -> list[str]:
    emb = [f"emb_{i}" for i in range(EMBED_DIM)]
    if variant == "full":
        return emb + structural_feature_names(task)
    if variant == "no_embedding":
        return structural_feature_names(task)
    if variant == "embedding_only":
        return emb
    raise ValueError(f"unknown variant {variant!r}")


def record_parts(record: ApplicationRecord) -> dict:
    return {
        "cpc_classes": record.cpc_classes,
        "num_claims": record.num_claims,
        "is_ai": record.is_ai,
        "is_ict": record.is_ict,
        "is_biotech": record.is_biotech,
        "is_hightech": record.is_hightech,
        "is_research_institution": record.is_research_institution,
        "ff12_industry": record.ff12_industry,
        "market_cap_musd": record.market_cap_musd,
    }


def structural_from_parts(task: str, parts: dict,
                          defaults: dict[str, float] | None = None) -> tuple[np.ndarray, dict]:
    """Structural vector from possibly-partial fields, with echoed defaults.

    Unknown indicator fields zero out; ln(market cap) and ln(1+claims) fall
    back to the supplied training medians. Returns (vector, assumptions)
    where assumptions records every substituted value.
    """
    defaults = defaults or {}
    assumed: dict[str, float] = {}
    cpc = parts.get("cpc_classes") or frozenset()
    if not cpc:
        assumed["cpc_classes"] = 0.0
    row = [1.0 if s in cpc else 0.0 for s in CPC_SECTIONS]
    row.append(float(len(cpc)))
    if task == "value":
        claims = parts.get("num_claims")
        if claims is None:
            ln1p_claims = float(defaults.get("ln1p_claims", 0.0))
            assumed["ln1p_claims"] = ln1p_claims
        else:
            ln1p_claims = float(np.log1p(claims))
        row.append(ln1p_claims)
        row.append(1.0 if parts.get("is_ai") else 0.0)
        if parts.get("is_ai") is None:
            assumed["is_ai"] = 0.0
    for flag in ("is_ict", "is_biotech", "is_hightech", "is_research_institution"):
        val = parts.get(flag)
        if val is None:
            assumed[flag] = 0.0
        row.append(1.0 if val else 0.0)
    ff12 = parts.get("ff12_industry")
    if ff12 is None:
        assumed["ff12_industry"] = 0.0
    row += [1.0 if ff12 == i else 0.0 for i in range(1, 13)]
    if task == "acceptance":
        cap = parts.get("market_cap_musd")
        if cap is None:
            ln_cap = float(defaults.get("ln_mktcap", 0.0))
            assumed["ln_mktcap"] = ln_cap
        else:
            ln_cap = float(np.log(cap))
        row.append(ln_cap)
    return np.array(row), assumed


def structural_features(record: ApplicationRecord, task: str) -> np.ndarray:
    """Structural vector for a complete corpus record (training path)."""
    if not record.cpc_classes:
        raise FeatureError(f"{record.app_id}: empty cpc_classes")
    if record.market_cap_musd <= 0:
        raise FeatureError(f"{record.app_id}: nonpositive market cap")
    vec, _ = structural_from_parts(task, record_parts(record))
    return vec


def embedding_text(record: ApplicationRecord, task: str, value_text: str = "grant") -> str:
    """Text fed to the embedder: application title+abstract, or the granted
    patent text for the value task when available."""
    if task == "value" and value_text == "grant" and record.grant_abstract is not None:
        return build_request(record.grant_title or record.title, record.grant_abstract)
    return build_request(record.title, record.abstract)


def assemble_matrix(records, task, variant, embeddings: dict[str, np.ndarray] | None) -> np.ndarray:
    rows = []
    for r in records:
        parts = []
        if variant in ("full", "embedding_only"):
            emb = embeddings[r.app_id]
            parts.append(np.asarray(emb, dtype=np.float64))
        if variant in ("full", "no_embedding"):
            parts.append(structural_features(r, task))
        rows.append(np.concatenate(parts))
    return np.array(rows) if rows else np.empty((0, len(feature_names(task, variant))))


@dataclass(frozen=True)
class FeatureScaler:
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, X: np.ndarray) -> "FeatureScaler":
        mean = X.mean(axis=0)
        std = X.std(axis=0)
        std = np.where(std < 1e-12, 1.0, std)
        return cls(mean=mean, std=std)

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=np.float64) - self.mean) / self.std


# ---------------------------------------------------------------------------
# rolling runs


@dataclass(frozen=True)
class RollingConfig:
    task: str
    variant: str
    test_years: tuple[int, int]
    window_years: int = 3
    hidden_dims: tuple[int, ...] = (256, 64, 16)
    dropout_rate: float = 0.20
    epochs: int = 30
    batch_size: int = 256
    learning_rate: float = 1e-3
    seed: int = 0
    activation: str = "mish"
    transform_kind: str = "boxcox"
    value_text: str = "grant"
    threshold: float = 0.5
    min_train: int = 50

    def __post_init__(self):
        if self.task not in TASKS:
            raise ValueError(f"unknown task {self.task!r}")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        object.__setattr__(self, "hidden_dims", tuple(int(d) for d in self.hidden_dims))
        object.__setattr__(self, "test_years", tuple(int(y) for y in self.test_years))

    def mlp_config(self, input_dim: int, year: int) -> MLPConfig:
        return MLPConfig(
            input_dim=input_dim,
            hidden_dims=self.hidden_dims,
            dropout_rate=self.dropout_rate,
            task="binary" if self.task == "acceptance" else "regression",
            adam=AdamParams(learning_rate=self.learning_rate),
            epochs=self.epochs,
            batch_size=self.batch_size,
            seed=self.seed + year,
            activation=self.activation,
        )


@dataclass(frozen=True)
class YearlyEvaluation:
    year: int
    task: str
    variant: str
    report: ClassificationReport | RegressionReport


@dataclass
class YearModel:
    year: int
    task: str
    variant: str
    model: MLPModel
    scaler: FeatureScaler
    train_years: tuple[int, int]
    transform: object | None = None
    train_targets: np.ndarray | None = None
    train_medians: dict[str, float] = field(default_factory=dict)

    def predict(self, X_raw: np.ndarray) -> np.ndarray:
        X = self.scaler.transform(np.atleast_2d(X_raw))
        if self.task == "acceptance":
            return neuralnet.predict_proba(self.model, X)
        return neuralnet.predict_value(self.model, X)

    def score_record(self, record: ApplicationRecord, embedding: np.ndarray | None) -> float:
        X = assemble_matrix([record], self.task, self.variant,
                            None if embedding is None else {record.app_id: embedding})
        return float(self.predict(X)[0])

    def score_text(self, embedding: np.ndarray, record: ApplicationRecord) -> float:
        """Score alternate text against this model, reusing the record's
        structural features so the delta isolates the text change."""
        parts = []
        if self.variant in ("full", "embedding_only"):
            parts.append(np.asarray(embedding, dtype=np.float64))
        if self.variant in ("full", "no_embedding"):
            parts.append(structural_features(record, self.task))
        return float(self.predict(np.concatenate(parts)[None, :])[0])


@dataclass
class RollingResult:
    config: RollingConfig
    evaluations: list[YearlyEvaluation] = field(default_factory=list)
    predictions: dict[str, float] = field(default_factory=dict)
    prediction_years: dict[str, int] = field(default_factory=dict)
    year_models: dict[int, YearModel] = field(default_factory=dict)
    skipped: list[tuple[int, str]] = field(default_factory=list)

    def metric_rows(self) -> list[dict]:
        rows = []
        for ev in self.evaluations:
            r = ev.report
            if isinstance(r, ClassificationReport):
                rows.append({"year": ev.year, "auc": r.auc, "f1": r.f1, "accuracy": r.accuracy,
                             "precision": r.precision, "recall": r.recall})
            else:
                rows.append({"year": ev.year, "mse": r.mse, "r2": r.r2, "adj_r2": r.adj_r2})
        return rows

    def summary(self) -> dict[str, dict[str, float]]:
        """Mean and median of each statistic across test years."""
        rows = self.metric_rows()
        if not rows:
            return {}
        keys = [k for k in rows[0] if k != "year"]
        out = {"mean": {}, "median": {}}
        for k in keys:
            vals = np.array([row[k] for row in rows], dtype=np.float64)
            out["mean"][k] = float(np.mean(vals))
            out["median"][k] = float(np.median(vals))
        return out


def collect_embeddings(records, task, provider, cache: EmbeddingCache | None,
                       value_text: str = "grant") -> dict[str, np.ndarray]:
    out = {}
    for r in records:
        text = embedding_text(r, task, value_text)
        emb, _ = get_or_embed(text, cache, provider)
        out[r.app_id] = emb.values
    return out


def _training_rows(corpus: Corpus, task: str, years: tuple[int, int]):
    lo, hi = years
    rows = []
    for r in corpus.labeled():
        if not lo <= r.year <= hi:
            continue
        if task == "value" and (not r.accepted or r.raw_value_musd is None):
            continue
        rows.append(r)
    return rows


def value_target(record: ApplicationRecord) -> float:
    """KPSS-style value scaled by market capitalization.

    The corpus stores the raw (unscaled) market reaction; the KPSS measure
    applies the constant 1/(1-0.55) acceptance factor before the size
    scaling.
    """
    kpss = record.raw_value_musd / (1.0 - KPSS_BASELINE_P)
    return kpss / record.market_cap_musd


def rolling_run(corpus: Corpus, config: RollingConfig, provider, cache: EmbeddingCache | None = None) -> RollingResult:
    """Train one model per test year on the preceding window and evaluate.

    Years whose window holds fewer than min_train usable rows are skipped
    with an explicit reason, never silently. Predictions cover every
    test-year record with valid features; evaluation uses the labeled
    subset (value task: accepted records with a raw value).
    """
    result = RollingResult(config=config)
    needs_embedding = config.variant in ("full", "embedding_only")
    y_lo, y_hi = config.test_years
    for year in range(y_lo, y_hi + 1):
        train_years = (year - config.window_years, year - 1)
        train_records = _training_rows(corpus, config.task, train_years)
        covered = {r.year for r in train_records}
        missing_years = [y for y in range(train_years[0], train_years[1] + 1) if y not in covered]
        if missing_years:
            result.skipped.append((year, f"no training data for window year(s) {missing_years}"))
            continue
        if len(train_records) < config.min_train:
            result.skipped.append((year, f"only {len(train_records)} training rows in {train_years}"))
            continue
        test_records = _training_rows(corpus, config.task, (year, year))
        if not test_records:
            result.skipped.append((year, "no labeled test records"))
            continue

        embeddings = None
        if needs_embedding:
            embeddings = collect_embeddings(train_records + test_records, config.task,
                                            provider, cache, config.value_text)
        X_train = assemble_matrix(train_records, config.task, config.variant, embeddings)
        X_test = assemble_matrix(test_records, config.task, config.variant, embeddings)
        scaler = FeatureScaler.fit(X_train)

        transform = None
        if config.task == "acceptance":
            y_train = np.array([1.0 if r.accepted else 0.0 for r in train_records])
            y_test = np.array([1.0 if r.accepted else 0.0 for r in test_records])
        else:
            raw_train = np.array([value_target(r) for r in train_records])
            transform = fit_transform(config.transform_kind, raw_train)
            y_train = np.asarray(transform.apply(raw_train))
            y_test = np.asarray(transform.apply(np.array([value_target(r) for r in test_records])))

        mlp_cfg = config.mlp_config(X_train.shape[1], year)
        model = neuralnet.train(neuralnet.init_model(mlp_cfg), scaler.transform(X_train), y_train)
        medians = {
            "ln_mktcap": float(np.median(np.log([r.market_cap_musd for r in train_records]))),
            "ln1p_claims": float(np.median(np.log1p([r.num_claims or 0 for r in train_records]))),
        }
        year_model = YearModel(year=year, task=config.task, variant=config.variant,
                               model=model, scaler=scaler, train_years=train_years,
                               transform=transform, train_targets=y_train,
                               train_medians=medians)
        result.year_models[year] = year_model

        preds = year_model.predict(X_test)
        for r, p in zip(test_records, preds):
            result.predictions[r.app_id] = float(p)
            result.prediction_years[r.app_id] = year
        try:
            if config.task == "acceptance":
                report = classification_report(preds, y_test.astype(int), threshold=config.threshold)
            else:
                report = regression_report(preds, y_test, p=X_train.shape[1])
        except MetricError as exc:
            # model and predictions stand; only the metric row is impossible
            # (e.g. adjusted R^2 needs more test rows than features)
            result.skipped.append((year, f"evaluation skipped: {exc}"))
            continue
        result.evaluations.append(YearlyEvaluation(year=year, task=config.task,
                                                   variant=config.variant, report=report))
    return result


# ---------------------------------------------------------------------------
# bucket analysis (best/worst predicted applications)


@dataclass(frozen=True)
class BucketReport:
    cutoff: int
    top_acceptance_rate: float
    bottom_acceptance_rate: float
    n_years: int
    skipped_years: tuple[int, ...] = ()


def bucket_analysis(predictions: dict[str, float], corpus: Corpus,
                    cutoffs=(100, 250, 500, 1000)) -> list[BucketReport]:
    """Realized acceptance among the yearly top-k and bottom-k predictions,
    averaged across years; years with fewer than k records are skipped for
    that cutoff, with a note."""
    by_year: dict[int, list[tuple[float, bool]]] = {}
    records = corpus.by_id()
    for app_id, p in predictions.items():
        rec = records[app_id]
        if rec.accepted is None:
            continue
        by_year.setdefault(rec.year, []).append((p, rec.accepted))
    reports = []
    for k in cutoffs:
        tops, bottoms, skipped = [], [], []
        for year in sorted(by_year):
            entries = sorted(by_year[year], key=lambda e: e[0])
            if len(entries) < k:
                skipped.append(year)
                continue
            bottoms.append(float(np.mean([a for _, a in entries[:k]])))
            tops.append(float(np.mean([a for _, a in entries[-k:]])))
        if tops:
            reports.append(BucketReport(cutoff=k,
                                        top_acceptance_rate=float(np.mean(tops)),
                                        bottom_acceptance_rate=float(np.mean(bottoms)),
                                        n_years=len(tops),
                                        skipped_years=tuple(skipped)))
        else:
            reports.append(BucketReport(cutoff=k, top_acceptance_rate=float("nan"),
                                        bottom_acceptance_rate=float("nan"),
                                        n_years=0, skipped_years=tuple(skipped)))
    return reports


# ---------------------------------------------------------------------------
# application quality (embedding-only acceptance model) and its regression


def application_quality(corpus: Corpus, config: RollingConfig, provider,
                        cache: EmbeddingCache | None = None) -> RollingResult:
    """Quality scores: acceptance probabilities from the embedding-only model."""
    cfg = RollingConfig(**{**asdict(config), "task": "acceptance", "variant": "embedding_only"})
    return rolling_run(corpus, cfg, provider, cache)


QUALITY_REGRESSORS = ("size_ln", "age_years", "application_stock")


def quality_control_names() -> list[str]:
    """Patent-level controls usable inside a linear panel regression.

    The NN feature set carries exact collinearities a regression cannot
    (n_cpc equals the sum of the CPC indicators; the FF12 indicators sum to
    one), so n_cpc is dropped, FF12 industry 12 is the reference category,
    and ln(market cap) is excluded because firm size is already a
    regressor.
    """
    names = [f"cpc_{s}" for s in CPC_SECTIONS]
    names += ["is_ict", "is_biotech", "is_hightech", "is_research_institution"]
    names += [f"ff12_{i}" for i in range(1, 12)]
    return names


def _quality_controls(record: ApplicationRecord) -> list[float]:
    row = [1.0 if s in record.cpc_classes else 0.0 for s in CPC_SECTIONS]
    row += [
        1.0 if record.is_ict else 0.0,
        1.0 if record.is_biotech else 0.0,
        1.0 if record.is_hightech else 0.0,
        1.0 if record.is_research_institution else 0.0,
    ]
    row += [1.0 if record.ff12_industry == i else 0.0 for i in range(1, 12)]
    return row


def quality_panel(corpus: Corpus, quality: dict[str, float], patent_controls: bool = False):
    """Assemble the firm-application panel for the quality regression.

    Regressors: firm size (ln market cap), age (years since first listing),
    and application stock (count of the firm's strictly-prior-month
    applications); optional patent-level structural controls.
    """
    app_months_by_firm: dict[str, list[str]] = {}
    for r in corpus.applications:
        if r.firm_id:
            app_months_by_firm.setdefault(r.firm_id, []).append(r.publication_month)

    rows, y, firms = [], [], []
    names = list(QUALITY_REGRESSORS)
    if patent_controls:
        names += quality_control_names()
    records = corpus.by_id()
    for app_id, q in sorted(quality.items()):
        r = records[app_id]
        firm = corpus.firms.get(r.firm_id)
        if firm is None:
            continue
        at = r.publication_month
        months = app_months_by_firm.get(r.firm_id, [])
        stock = sum(1 for m in months if month_index(m) < month_index(at))
        size_ln = float(np.log(r.market_cap_musd))
        age = (month_index(at) - month_index(f"{firm.first_listed.year:04d}-{firm.first_listed.month:02d}")) / 12.0
        row = [size_ln, age, float(stock)]
        if patent_controls:
            row += _quality_controls(r)
        rows.append(row)
        y.append(q)
        firms.append(r.firm_id)
    return np.array(rows), np.array(y), np.array(firms), names


def quality_regression(corpus: Corpus, quality: dict[str, float],
                       patent_controls: bool = False) -> tuple[RegressionResult, list[str]]:
    X, y, firms, names = quality_panel(corpus, quality, patent_controls)
    if len(y) == 0:
        raise PipelineError("no applications with quality scores and firm links")
    return fe_panel(X, y, firms), names


# ---------------------------------------------------------------------------
# manifests, prediction files, vintage bundles


def write_predictions(result: RollingResult, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("app_id\tyear\tprediction\n")
        for app_id in sorted(result.predictions):
            fh.write(f"{app_id}\t{result.prediction_years[app_id]}\t{result.predictions[app_id]!r}\n")


def read_predictions(path) -> tuple[dict[str, float], dict[str, int]]:
    preds, years = {}, {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if header != ["app_id", "year", "prediction"]:
            raise PipelineError(f"{path}: unexpected prediction file header {header}")
        for line in fh:
            app_id, year, pred = line.rstrip("\n").split("\t")
            preds[app_id] = float(pred)
            years[app_id] = int(year)
    return preds, years


def manifest_payload(result: RollingResult) -> dict:
    cfg = asdict(result.config)
    years = {}
    for ev, row in zip(result.evaluations, result.metric_rows()):
        ym = result.year_models[ev.year]
        entry = {
            "train_years": list(ym.train_years),
            "metrics": {k: v for k, v in row.items() if k != "year"},
        }
        if ym.transform is not None:
            entry["transform"] = ym.transform.to_json()
        years[str(ev.year)] = entry
    return {
        "config": cfg,
        "years": years,
        "skipped": [{"year": y, "reason": r} for y, r in result.skipped],
        "summary": result.summary(),
    }


def write_manifest(result: RollingResult, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest_payload(result), fh, indent=2, sort_keys=True)
        fh.write("\n")


VINTAGE_FILES = {
    "acceptance": "acceptance_full.npz",
    "quality": "acceptance_embedding_only.npz",
    "value": "value_full.npz",
}
VINTAGE_META = "meta.json"


@dataclass
class VintageBundle:
    year: int
    acceptance: YearModel
    quality: YearModel
    value: YearModel
    value_train_quantiles: np.ndarray  # sorted transformed training targets
    defaults: dict[str, float]

    def value_percentile(self, value_transformed: float) -> float:
        q = self.value_train_quantiles
        if q.size == 0:
            return float("nan")
        return float(np.searchsorted(q, value_transformed, side="right")) / q.size


def save_vintage(models_dir, year: int, acceptance: YearModel, quality: YearModel,
                 value: YearModel, value_train_targets: np.ndarray,
                 defaults: dict[str, float]) -> None:
    vdir = os.path.join(str(models_dir), str(year))
    os.makedirs(vdir, exist_ok=True)
    metas = {}
    for key, ym in (("acceptance", acceptance), ("quality", quality), ("value", value)):
        neuralnet.save_model(ym.model, os.path.join(vdir, VINTAGE_FILES[key]))
        metas[key] = {
            "task": ym.task,
            "variant": ym.variant,
            "train_years": list(ym.train_years),
            "scaler_mean": ym.scaler.mean.tolist(),
            "scaler_std": ym.scaler.std.tolist(),
            "transform": None if ym.transform is None else ym.transform.to_json(),
        }
    payload = {
        "year": year,
        "models": metas,
        "value_train_quantiles": np.sort(np.asarray(value_train_targets, dtype=np.float64)).tolist(),
        "defaults": defaults,
    }
    with open(os.path.join(vdir, VINTAGE_META), "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")


def missing_vintage_files(vdir) -> list[str]:
    expected = sorted([*VINTAGE_FILES.values(), VINTAGE_META])
    return [f for f in expected if not os.path.exists(os.path.join(str(vdir), f))]


def load_vintage(models_dir, year: int) -> VintageBundle:
    vdir = os.path.join(str(models_dir), str(year))
    missing = missing_vintage_files(vdir)
    if missing:
        present = sorted(os.listdir(vdir)) if os.path.isdir(vdir) else []
        raise PipelineError(
            f"vintage {year} incomplete: missing {missing}; present {present}"
        )
    with open(os.path.join(vdir, VINTAGE_META), encoding="utf-8") as fh:
        meta = json.load(fh)
    models = {}
    for key, fname in VINTAGE_FILES.items():
        m = meta["models"][key]
        models[key] = YearModel(
            year=year,
            task=m["task"],
            variant=m["variant"],
            model=neuralnet.load_model(os.path.join(vdir, fname)),
            scaler=FeatureScaler(mean=np.array(m["scaler_mean"]), std=np.array(m["scaler_std"])),
            train_years=tuple(m["train_years"]),
            transform=None if m["transform"] is None else transform_from_json(m["transform"]),
        )
    return VintageBundle(
        year=meta["year"],
        acceptance=models["acceptance"],
        quality=models["quality"],
        value=models["value"],
        value_train_quantiles=np.array(meta["value_train_quantiles"], dtype=np.float64),
        defaults=meta["defaults"],
    )


def list_vintages(models_dir) -> list[int]:
    if not os.path.isdir(str(models_dir)):
        return []
    years = []
    for name in os.listdir(str(models_dir)):
        if name.isdigit() and os.path.isdir(os.path.join(str(models_dir), name)):
            years.append(int(name))
    return sorted(years)
