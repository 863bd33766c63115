"""Command-line front door.

Thin dispatcher over the library: synth/ingest/embed/train produce
artifacts under --out-dir, evaluate/screen/revalue/backtest turn them into
table reports, and serve exposes the scoring service over HTTP. Failures
exit nonzero with a machine-readable JSON error on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field, asdict


from . import corpus as corpus_mod
from . import pipeline, reports, screening, valuation
from . import portfolio as portfolio_mod
from .corpus import Corpus, SyntheticConfig, generate_synthetic
from .embedder import EmbeddingCache, MockEmbedder, RemoteEmbedder, build_request, get_or_embed


class DependencyError(Exception):
    """A required artifact from an earlier pipeline step is missing."""


@dataclass
class TrainSettings:
    test_years: tuple[int, int] = (2004, 2005)
    window_years: int = 3
    hidden_dims: tuple[int, ...] = (128, 32)
    dropout_rate: float = 0.20
    epochs: int = 8
    batch_size: int = 256
    learning_rate: float = 2e-3
    seed: int = 1
    min_train: int = 50
    runs: tuple[tuple[str, str], ...] = (
        ("acceptance", "full"),
        ("acceptance", "no_embedding"),
        ("acceptance", "embedding_only"),
        ("value", "full"),
        ("value", "no_embedding"),
    )


@dataclass
class WorkflowConfig:
    synthetic: SyntheticConfig = field(default_factory=lambda: SyntheticConfig(
        n_firms=50, n_apps=18000, year_range=(2001, 2005), seed=7))
    train: TrainSettings = field(default_factory=TrainSettings)
    file_format: str = "tsv"
    provider: str = "mock"
    screen_worst_k: int = 500
    screen_thresholds: tuple[float, float] = (0.05, 0.02)
    revalue_baseline_p: float = 0.55
    revalue_adjusted_p: float = 0.724
    revalue_winsor_pct: float = 0.01
    backtest_models: tuple[str, ...] = ("FF3", "FF4", "FF5")

    @classmethod
    def load(cls, path: str | None, seed_override: int | None = None) -> "WorkflowConfig":
        cfg = cls()
        if path is not None:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
            if "synthetic" in raw:
                syn = dict(raw["synthetic"])
                if "year_range" in syn:
                    syn["year_range"] = tuple(syn["year_range"])
                cfg.synthetic = SyntheticConfig(**syn)
            if "train" in raw:
                tr = dict(raw["train"])
                for key in ("test_years", "hidden_dims"):
                    if key in tr:
                        tr[key] = tuple(tr[key])
                if "runs" in tr:
                    tr["runs"] = tuple((t, v) for t, v in tr["runs"])
                cfg.train = TrainSettings(**tr)
            for key in ("file_format", "provider", "screen_worst_k", "revalue_baseline_p",
                        "revalue_adjusted_p", "revalue_winsor_pct"):
                if key in raw:
                    setattr(cfg, key, raw[key])
            if "screen_thresholds" in raw:
                cfg.screen_thresholds = tuple(raw["screen_thresholds"])
            if "backtest_models" in raw:
                cfg.backtest_models = tuple(raw["backtest_models"])
        if seed_override is not None:
            cfg.synthetic = SyntheticConfig(**{**asdict(cfg.synthetic), "seed": seed_override})
        return cfg


# ---------------------------------------------------------------------------
# out-dir layout helpers


def _p(out_dir: str, *parts: str) -> str:
    return os.path.join(out_dir, *parts)


def _ensure_dir(path: str) -> None:
    os.makedirs(path, exist_ok=True)


def _require(path: str, producer: str) -> str:
    if not os.path.exists(path):
        raise DependencyError(f"missing {path}; run `patentlab {producer}` first")
    return path


def _corpus_paths(out_dir: str, fmt: str) -> dict[str, str]:
    ext = "tsv" if fmt == "tsv" else "csv"
    return {
        "applications": _p(out_dir, "corpus", f"applications.{ext}"),
        "firms": _p(out_dir, "corpus", f"firms.{ext}"),
        "factors": _p(out_dir, "corpus", f"factors.{ext}"),
    }


def load_corpus(out_dir: str, cfg: WorkflowConfig) -> Corpus:
    paths = _corpus_paths(out_dir, cfg.file_format)
    for p in paths.values():
        _require(p, "synth")
    apps = corpus_mod.parse_applications(paths["applications"], cfg.file_format)
    firms = corpus_mod.parse_firms(paths["firms"], cfg.file_format)
    factors = corpus_mod.parse_factors(paths["factors"], cfg.file_format)
    return Corpus(applications=tuple(apps.records), firms=firms, factors=factors)


def make_provider(cfg: WorkflowConfig):
    if cfg.provider == "mock":
        return MockEmbedder()
    if cfg.provider == "remote":
        return RemoteEmbedder()
    raise ValueError(f"unknown provider {cfg.provider!r}")


def open_cache(out_dir: str) -> EmbeddingCache:
    _ensure_dir(_p(out_dir, "cache"))
    return EmbeddingCache(_p(out_dir, "cache", "embeddings.bin"))


def _run_name(task: str, variant: str) -> str:
    return f"{task}_{variant}"


# ---------------------------------------------------------------------------
# subcommands


def cmd_synth(args, cfg: WorkflowConfig) -> dict:
    corpus = generate_synthetic(cfg.synthetic)
    paths = _corpus_paths(args.out_dir, cfg.file_format)
    _ensure_dir(_p(args.out_dir, "corpus"))
    corpus_mod.write_applications(corpus.applications, paths["applications"], cfg.file_format)
    corpus_mod.write_firms(corpus.firms, paths["firms"], cfg.file_format)
    corpus_mod.write_factors(corpus.factors, paths["factors"], cfg.file_format)
    return {"applications": len(corpus.applications), "firms": len(corpus.firms),
            "factor_months": len(corpus.factors.months), "out": paths}


def cmd_ingest(args, cfg: WorkflowConfig) -> dict:
    result = corpus_mod.parse_applications(args.applications, args.format)
    out = {
        "applications": len(result.records),
        "dropped_multi_assignee": result.n_multi_assignee_dropped,
        "dropped_unlinked": result.n_unlinked_dropped,
    }
    if args.firms:
        out["firms"] = len(corpus_mod.parse_firms(args.firms, args.format))
    if args.factors:
        out["factor_months"] = len(corpus_mod.parse_factors(args.factors, args.format).months)
    return out


def cmd_embed(args, cfg: WorkflowConfig) -> dict:
    corpus = load_corpus(args.out_dir, cfg)
    provider = make_provider(cfg)
    cache = open_cache(args.out_dir)
    hits = misses = 0
    for rec in corpus.applications:
        texts = [build_request(rec.title, rec.abstract)]
        if rec.grant_abstract is not None:
            texts.append(build_request(rec.grant_title or rec.title, rec.grant_abstract))
        for text in texts:
            _, hit = get_or_embed(text, cache, provider)
            hits += hit
            misses += not hit
    return {"cache_entries": len(cache), "hits": hits, "misses": misses}


def cmd_train(args, cfg: WorkflowConfig) -> dict:
    corpus = load_corpus(args.out_dir, cfg)
    provider = make_provider(cfg)
    cache = open_cache(args.out_dir)
    tr = cfg.train
    for sub in ("predictions", "manifests"):
        _ensure_dir(_p(args.out_dir, sub))
    results: dict[tuple[str, str], pipeline.RollingResult] = {}
    summary: dict[str, dict] = {}
    for task, variant in tr.runs:
        rc = pipeline.RollingConfig(
            task=task, variant=variant, test_years=tr.test_years,
            window_years=tr.window_years, hidden_dims=tr.hidden_dims,
            dropout_rate=tr.dropout_rate, epochs=tr.epochs, batch_size=tr.batch_size,
            learning_rate=tr.learning_rate, seed=tr.seed, min_train=tr.min_train,
        )
        result = pipeline.rolling_run(corpus, rc, provider, cache)
        results[(task, variant)] = result
        name = _run_name(task, variant)
        pipeline.write_predictions(result, _p(args.out_dir, "predictions", f"{name}.tsv"))
        pipeline.write_manifest(result, _p(args.out_dir, "manifests", f"{name}.json"))
        summary[name] = result.summary()

    needed = [("acceptance", "full"), ("acceptance", "embedding_only"), ("value", "full")]
    if all(key in results for key in needed):
        acc, qual, val = (results[k] for k in needed)
        _ensure_dir(_p(args.out_dir, "models"))
        saved = []
        for year in sorted(set(acc.year_models) & set(qual.year_models) & set(val.year_models)):
            ym = acc.year_models[year]
            pipeline.save_vintage(
                _p(args.out_dir, "models"), year, ym, qual.year_models[year],
                val.year_models[year], val.year_models[year].train_targets,
                defaults=ym.train_medians,
            )
            saved.append(year)
        summary["vintages_saved"] = saved
    return summary


def _load_manifest(out_dir: str, task: str, variant: str) -> dict:
    path = _require(_p(out_dir, "manifests", f"{_run_name(task, variant)}.json"), "train")
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _load_predictions(out_dir: str, task: str, variant: str):
    path = _require(_p(out_dir, "predictions", f"{_run_name(task, variant)}.tsv"), "train")
    return pipeline.read_predictions(path)


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def cmd_evaluate(args, cfg: WorkflowConfig) -> dict:
    corpus = load_corpus(args.out_dir, cfg)
    rdir = _p(args.out_dir, "reports")
    _ensure_dir(rdir)
    acc_full = _load_manifest(args.out_dir, "acceptance", "full")
    acc_ne = _load_manifest(args.out_dir, "acceptance", "no_embedding")
    val_full = _load_manifest(args.out_dir, "value", "full")
    val_ne = _load_manifest(args.out_dir, "value", "no_embedding")

    _write_text(_p(rdir, "table1.txt"), reports.yearly_table_from_manifest(acc_full))
    _write_text(_p(rdir, "table2.txt"), reports.comparison_table_from_manifests(
        {"Full Model": acc_full, "No Embedding": acc_ne}))
    _write_text(_p(rdir, "table5.txt"), reports.yearly_table_from_manifest(val_full))
    _write_text(_p(rdir, "table6.txt"), reports.comparison_table_from_manifests(
        {"Full Model": val_full, "No Embedding": val_ne}))

    preds_full, _ = _load_predictions(args.out_dir, "acceptance", "full")
    preds_ne, _ = _load_predictions(args.out_dir, "acceptance", "no_embedding")
    buckets_full = pipeline.bucket_analysis(preds_full, corpus)
    buckets_ne = pipeline.bucket_analysis(preds_ne, corpus)
    _write_text(_p(rdir, "table3.txt"), reports.bucket_table(buckets_full, buckets_ne))

    metrics = {
        "acceptance_full": acc_full["summary"],
        "acceptance_no_embedding": acc_ne["summary"],
        "value_full": val_full["summary"],
        "value_no_embedding": val_ne["summary"],
        "buckets_full": [asdict(b) for b in buckets_full],
        "buckets_no_embedding": [asdict(b) for b in buckets_ne],
    }
    with open(_p(rdir, "metrics.json"), "w", encoding="utf-8") as fh:
        json.dump(metrics, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return {"reports": sorted(os.listdir(rdir))}


def _year_models_from_vintages(out_dir: str) -> dict[int, pipeline.YearModel]:
    models_dir = _require(_p(out_dir, "models"), "train")
    out = {}
    for year in pipeline.list_vintages(models_dir):
        out[year] = pipeline.load_vintage(models_dir, year).acceptance
    if not out:
        raise DependencyError(f"no vintages under {models_dir}; run `patentlab train` first")
    return out


def cmd_screen(args, cfg: WorkflowConfig) -> dict:
    corpus = load_corpus(args.out_dir, cfg)
    provider = make_provider(cfg)
    cache = open_cache(args.out_dir)
    predictions, years = _load_predictions(args.out_dir, "acceptance", "full")
    year_models = _year_models_from_vintages(args.out_dir)
    _ensure_dir(_p(args.out_dir, "screening"))
    _ensure_dir(_p(args.out_dir, "reports"))

    panels = []
    out: dict = {}
    for threshold in cfg.screen_thresholds:
        cohorts = screening.build_cohorts(
            predictions, years, corpus, year_models, provider, cache,
            worst_k=cfg.screen_worst_k, threshold=threshold)
        panel = screening.improvement_analysis(cohorts)
        panels.append(panel)
        rows = ["app_id\tyear\tp_application\tp_grant\tdistance"]
        for cohort in cohorts:
            for m in cohort.changed:
                rows.append(f"{m.app_id}\t{cohort.year}\t{m.p_application!r}\t{m.p_grant!r}\t{m.distance!r}")
        _write_text(_p(args.out_dir, "screening", f"cohort_{threshold:g}.tsv"),
                    "\n".join(rows) + "\n")
        out[f"threshold_{threshold:g}"] = {
            "members": sum(len(c.members) for c in cohorts),
            "accepted": sum(len(c.accepted_subset) for c in cohorts),
            "changed": panel.n,
        }
    _write_text(_p(args.out_dir, "reports", "table7.txt"),
                reports.improvement_table(panels[0], panels[1]))
    return out


def cmd_revalue(args, cfg: WorkflowConfig) -> dict:
    corpus = load_corpus(args.out_dir, cfg)
    predictions, _ = _load_predictions(args.out_dir, "acceptance", "full")
    records = corpus.by_id()
    entries = []
    for app_id in sorted(predictions):
        rec = records[app_id]
        if rec.raw_value_musd is None:
            continue
        entries.append((app_id, predictions[app_id], rec.raw_value_musd))
    vals, summary = valuation.revalue(
        entries, baseline_p=cfg.revalue_baseline_p,
        adjusted_p=cfg.revalue_adjusted_p, winsor_pct=cfg.revalue_winsor_pct)
    _ensure_dir(_p(args.out_dir, "valuation"))
    _ensure_dir(_p(args.out_dir, "reports"))
    rows = ["app_id\tp_hat\tp_used\tclamped\traw_reaction_musd\tscale_factor\t"
            "scale_ratio\tscale_ratio_adj\tai_value_musd\tkpss_value_musd\tadj_kpss_value_musd"]
    for v in vals:
        rows.append("\t".join([
            v.app_id, repr(v.p_hat), repr(v.p_used), str(int(v.clamped)),
            repr(v.raw_reaction_musd), repr(v.scale_factor), repr(v.scale_ratio),
            repr(v.scale_ratio_adj), repr(v.ai_value_musd), repr(v.kpss_value_musd),
            repr(v.adj_kpss_value_musd),
        ]))
    _write_text(_p(args.out_dir, "valuation", "valuations.tsv"), "\n".join(rows) + "\n")
    _write_text(_p(args.out_dir, "reports", "table8.txt"), reports.valuation_table(summary))
    return {"records": len(vals), "clamped": summary.n_clamped}


def cmd_backtest(args, cfg: WorkflowConfig) -> dict:
    corpus = load_corpus(args.out_dir, cfg)
    predictions, _ = _load_predictions(args.out_dir, "acceptance", "full")
    panel, dropped = portfolio_mod.build_panel(predictions, corpus)
    series = portfolio_mod.build_portfolio(panel)
    _ensure_dir(_p(args.out_dir, "portfolio"))
    _ensure_dir(_p(args.out_dir, "reports"))

    rows = ["firm_id\tmonth\tn_apps\tmean_p\tapplication_strength\tnext_month_return"]
    for r in panel:
        rows.append(f"{r.firm_id}\t{r.month}\t{r.n_apps}\t{r.mean_p!r}\t"
                    f"{r.application_strength!r}\t{r.next_month_return!r}")
    _write_text(_p(args.out_dir, "portfolio", "panel.tsv"), "\n".join(rows) + "\n")
    rows = ["formation_month\treturn_month\tlong\tshort\tlong_short\tn_long\tn_short"]
    for i in range(len(series)):
        rows.append(f"{series.formation_months[i]}\t{series.return_months[i]}\t"
                    f"{series.long_returns[i]!r}\t{series.short_returns[i]!r}\t"
                    f"{series.long_short_returns[i]!r}\t{series.n_long[i]}\t{series.n_short[i]}")
    _write_text(_p(args.out_dir, "portfolio", "series.tsv"), "\n".join(rows) + "\n")

    alphas: dict[str, dict[str, portfolio_mod.FactorAlpha]] = {}
    out: dict = {"months": len(series), "panel_rows": len(panel), "dropped_rows": dropped}
    for model in cfg.backtest_models:
        alphas[model] = {}
        for leg in ("long", "short", "long_short"):
            a = portfolio_mod.factor_alpha(series, corpus.factors, model=model, leg=leg)
            alphas[model][leg] = a
            out[f"{model}_{leg}_alpha_monthly"] = a.alpha_monthly
            out[f"{model}_{leg}_t"] = a.t_stat
    _write_text(_p(args.out_dir, "reports", "table9.txt"), reports.alpha_table(alphas))
    return out


def cmd_serve(args, cfg: WorkflowConfig) -> dict:
    import uvicorn

    from .service import create_app

    app = create_app(args.models_dir, provider=args.provider, cache_path=args.cache)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return {}


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="patentlab",
                                     description="patent application analytics engine")
    parser.add_argument("--config", default=None, help="workflow config JSON")
    parser.add_argument("--seed", type=int, default=None, help="override the synthetic seed")
    parser.add_argument("--out-dir", default="out", help="artifact directory")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("synth", help="generate a synthetic corpus")

    p_ingest = sub.add_parser("ingest", help="parse and validate corpus files")
    p_ingest.add_argument("--applications", required=True)
    p_ingest.add_argument("--firms", default=None)
    p_ingest.add_argument("--factors", default=None)
    p_ingest.add_argument("--format", default="tsv", choices=("tsv", "csv"))

    sub.add_parser("embed", help="populate the embedding cache")
    sub.add_parser("train", help="run the rolling-window training protocol")
    sub.add_parser("evaluate", help="emit yearly/comparison/bucket reports")
    sub.add_parser("screen", help="build screening cohorts and the improvement report")
    sub.add_parser("revalue", help="emit the adjusted-valuation report")
    sub.add_parser("backtest", help="run the application-strength portfolio")

    p_serve = sub.add_parser("serve", help="serve the scoring API")
    p_serve.add_argument("--models-dir", default=None)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--provider", default="mock", choices=("mock", "remote"))
    p_serve.add_argument("--cache", default=None)
    return parser


COMMANDS = {
    "synth": cmd_synth,
    "ingest": cmd_ingest,
    "embed": cmd_embed,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "screen": cmd_screen,
    "revalue": cmd_revalue,
    "backtest": cmd_backtest,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = WorkflowConfig.load(args.config, seed_override=args.seed)
        if args.command == "serve" and args.models_dir is None:
            args.models_dir = _p(args.out_dir, "models")
        result = COMMANDS[args.command](args, cfg)
        json.dump(result, sys.stdout, indent=2, sort_keys=True, default=str)
        sys.stdout.write("\n")
        return 0
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports all errors
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
