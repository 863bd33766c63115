"""Worst-application screening cohorts and the revise-and-rescore loop.

Cohorts take each year's bottom-k predicted applications, keep the ones
that were nonetheless granted, and flag the members whose grant abstract
moved at least a cosine-distance threshold away from the application text.
Grant text is scored against the same year's model with the application's
structural features held fixed, so the improvement isolates the text
change.
"""

from __future__ import annotations

import datetime
from dataclasses import dataclass, field

import numpy as np

from .corpus import Corpus
from .embedder import EmbeddingCache, build_request, cosine_distance, get_or_embed
from .pipeline import YearModel
from .stats import (
    DegenerateSampleError,
    signed_rank_median,
    t_test_mean,
    t_test_p_value,
)

DEFAULT_WORST_K = 500
DEFAULT_THRESHOLD = 0.05
ALTERNATE_THRESHOLD = 0.02


class ScreeningError(Exception):
    pass


@dataclass(frozen=True)
class ScreeningMember:
    app_id: str
    p_application: float
    p_grant: float
    distance: float


@dataclass
class ScreeningCohort:
    year: int
    worst_k: int
    threshold: float
    members: tuple[str, ...]  # bottom-k ids by predicted acceptance
    accepted_subset: tuple[str, ...]
    changed: tuple[ScreeningMember, ...]
    n_missing_grant_text: int = 0

    @property
    def changed_subset(self) -> tuple[str, ...]:
        return tuple(m.app_id for m in self.changed)


def build_cohorts(predictions: dict[str, float], prediction_years: dict[str, int],
                  corpus: Corpus, year_models: dict[int, YearModel], provider,
                  cache: EmbeddingCache | None = None, worst_k: int = DEFAULT_WORST_K,
                  threshold: float = DEFAULT_THRESHOLD) -> list[ScreeningCohort]:
    records = corpus.by_id()
    by_year: dict[int, list[str]] = {}
    for app_id, year in prediction_years.items():
        by_year.setdefault(year, []).append(app_id)

    cohorts = []
    for year in sorted(by_year):
        if year not in year_models:
            continue
        model = year_models[year]
        ids = sorted(by_year[year], key=lambda a: (predictions[a], a))
        bottom = tuple(ids[:worst_k])
        accepted = tuple(a for a in bottom if records[a].accepted)
        changed = []
        missing = 0
        for app_id in accepted:
            rec = records[app_id]
            if rec.grant_abstract is None:
                missing += 1
                continue
            app_emb, _ = get_or_embed(build_request(rec.title, rec.abstract), cache, provider)
            grant_emb, _ = get_or_embed(
                build_request(rec.grant_title or rec.title, rec.grant_abstract), cache, provider)
            dist = cosine_distance(app_emb, grant_emb)
            if dist >= threshold:
                changed.append(ScreeningMember(
                    app_id=app_id,
                    p_application=predictions[app_id],
                    p_grant=model.score_text(grant_emb.values, rec),
                    distance=dist,
                ))
        cohorts.append(ScreeningCohort(
            year=year, worst_k=worst_k, threshold=threshold,
            members=bottom, accepted_subset=accepted, changed=tuple(changed),
            n_missing_grant_text=missing,
        ))
    return cohorts


IMPROVEMENT_ROWS = (
    "Predicted Success Rate (Application Text)",
    "Predicted Success Rate (Patent Text)",
    "Improvement",
)

IMPROVEMENT_COLUMNS = ("Mean", "SD", "Min.", "25 Pct.", "Median", "75 Pct.", "Max.", "N")


def _panel_stats(values: np.ndarray) -> dict[str, float]:
    q = np.percentile(values, [25, 50, 75])
    return {
        "Mean": float(np.mean(values)),
        "SD": float(np.std(values, ddof=1)) if values.size > 1 else 0.0,
        "Min.": float(np.min(values)),
        "25 Pct.": float(q[0]),
        "Median": float(q[1]),
        "75 Pct.": float(q[2]),
        "Max.": float(np.max(values)),
        "N": float(values.size),
    }


@dataclass
class ImprovementPanel:
    threshold: float
    n: int
    rows: dict[str, dict[str, float]] = field(default_factory=dict)
    mean_improvement: float = float("nan")
    mean_t: float = float("nan")
    mean_p: float = float("nan")
    median_improvement: float = float("nan")
    median_z: float = float("nan")
    median_p: float = float("nan")
    empty: bool = False
    degenerate: bool = False
    members: tuple[ScreeningMember, ...] = ()


def improvement_analysis(cohorts: list[ScreeningCohort]) -> ImprovementPanel:
    """Pool changed members across years and test the grant-minus-application
    improvement in predicted acceptance (mean t-test, median signed-rank)."""
    members = tuple(m for c in cohorts for m in c.changed)
    if not members:
        threshold = cohorts[0].threshold if cohorts else float("nan")
        return ImprovementPanel(threshold=threshold, n=0, empty=True)
    threshold = cohorts[0].threshold
    p_app = np.array([m.p_application for m in members])
    p_grant = np.array([m.p_grant for m in members])
    improvement = p_grant - p_app
    panel = ImprovementPanel(
        threshold=threshold, n=len(members), members=members,
        rows={
            IMPROVEMENT_ROWS[0]: _panel_stats(p_app),
            IMPROVEMENT_ROWS[1]: _panel_stats(p_grant),
            IMPROVEMENT_ROWS[2]: _panel_stats(improvement),
        },
    )
    try:
        mean, t = t_test_mean(improvement)
        panel.mean_improvement = mean
        panel.mean_t = t
        panel.mean_p = t_test_p_value(t)
        median, z, p = signed_rank_median(improvement)
        panel.median_improvement = median
        panel.median_z = z
        panel.median_p = p
    except DegenerateSampleError:
        panel.degenerate = True
        panel.mean_improvement = float(np.mean(improvement))
        panel.median_improvement = float(np.median(improvement))
    return panel


@dataclass(frozen=True)
class RevisionScore:
    version: int
    p_hat: float
    distance_from_previous: float | None
    timestamp: str


def score_revision(title: str, abstract: str, year_model: YearModel, provider,
                   cache: EmbeddingCache | None = None,
                   prior: tuple[str, str] | None = None,
                   structural_record=None, version: int = 0) -> RevisionScore:
    """Score one draft against a loaded model; pure in the model state.

    `structural_record` supplies the structural features for full-variant
    models (the service fills unknown fields with documented defaults).
    When a prior (title, abstract) is given, the cosine distance to it is
    reported alongside.
    """
    if year_model is None:
        raise ScreeningError("no model loaded for scoring")
    emb, _ = get_or_embed(build_request(title, abstract), cache, provider)
    if year_model.variant != "embedding_only" and structural_record is None:
        raise ScreeningError("full-variant scoring needs structural features")
    p_hat = year_model.score_text(emb.values, structural_record)
    distance = None
    if prior is not None:
        prior_emb, _ = get_or_embed(build_request(prior[0], prior[1]), cache, provider)
        distance = cosine_distance(emb, prior_emb)
    return RevisionScore(
        version=version,
        p_hat=p_hat,
        distance_from_previous=distance,
        timestamp=datetime.datetime.now(datetime.timezone.utc).isoformat(),
    )
