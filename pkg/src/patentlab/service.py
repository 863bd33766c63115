"""HTTP scoring service.

Loads immutable per-vintage model bundles at startup (acceptance,
embedding-only quality, and value models) and serves deterministic
scores over JSON. The service never trains; the embedding cache is the
only mutable shared state and serializes its own writes.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .embedder import EmbeddingCache, MockEmbedder, RemoteEmbedder, build_request, cosine_distance, get_or_embed
from .pipeline import PipelineError, VintageBundle, list_vintages, load_vintage, structural_from_parts


class ServiceStartupError(Exception):
    pass


class ScoreRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    title: str = ""
    abstract: str = ""
    vintage: int | None = None
    cpc_classes: list[str] | None = None
    num_claims: int | None = Field(None, ge=1)
    is_ai: bool | None = None
    is_ict: bool | None = None
    is_biotech: bool | None = None
    is_hightech: bool | None = None
    is_research_institution: bool | None = None
    ff12_industry: int | None = Field(None, ge=1, le=12)
    market_cap_musd: float | None = Field(None, gt=0)

    @model_validator(mode="after")
    def _nonempty_text(self):
        if not (self.title.strip() or self.abstract.strip()):
            raise ValueError("title or abstract must be nonempty")
        return self


class ScoreResponse(BaseModel):
    model_config = ConfigDict(protected_namespaces=())

    acceptance_prob: float
    quality_score: float
    value_transformed: float
    value_percentile: float
    model_vintage: int
    embedding_cache_hit: bool
    assumed_defaults: dict[str, float]


class CompareRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    text_a: str
    text_b: str


class CompareResponse(BaseModel):
    cosine_distance: float


class HealthResponse(BaseModel):
    status: str
    vintages: list[int]


class ScoringState:
    def __init__(self, bundles: dict[int, VintageBundle], provider, cache: EmbeddingCache | None):
        if not bundles:
            raise ServiceStartupError("no model vintages loaded")
        self.bundles = bundles
        self.provider = provider
        self.cache = cache
        self.latest = max(bundles)

    def bundle_for(self, vintage: int | None) -> VintageBundle:
        if vintage is None:
            return self.bundles[self.latest]
        if vintage not in self.bundles:
            raise HTTPException(status_code=404, detail=f"unknown vintage {vintage}; "
                                                        f"available: {sorted(self.bundles)}")
        return self.bundles[vintage]

    def score(self, req: ScoreRequest) -> ScoreResponse:
        bundle = self.bundle_for(req.vintage)
        emb, cache_hit = get_or_embed(build_request(req.title, req.abstract),
                                      self.cache, self.provider)
        parts = {
            "cpc_classes": frozenset(req.cpc_classes) if req.cpc_classes else None,
            "num_claims": req.num_claims,
            "is_ai": req.is_ai,
            "is_ict": req.is_ict,
            "is_biotech": req.is_biotech,
            "is_hightech": req.is_hightech,
            "is_research_institution": req.is_research_institution,
            "ff12_industry": req.ff12_industry,
            "market_cap_musd": req.market_cap_musd,
        }
        acc_structural, acc_assumed = structural_from_parts("acceptance", parts, bundle.defaults)
        val_structural, val_assumed = structural_from_parts("value", parts, bundle.defaults)
        emb_vec = emb.values.astype(np.float64)

        acceptance = float(bundle.acceptance.predict(
            np.concatenate([emb_vec, acc_structural])[None, :])[0])
        quality = float(bundle.quality.predict(emb_vec[None, :])[0])
        value_t = float(bundle.value.predict(
            np.concatenate([emb_vec, val_structural])[None, :])[0])

        assumed = {**acc_assumed, **val_assumed}
        return ScoreResponse(
            acceptance_prob=acceptance,
            quality_score=quality,
            value_transformed=value_t,
            value_percentile=bundle.value_percentile(value_t),
            model_vintage=bundle.year,
            embedding_cache_hit=cache_hit,
            assumed_defaults=assumed,
        )

    def compare(self, req: CompareRequest) -> CompareResponse:
        emb_a, _ = get_or_embed(req.text_a, self.cache, self.provider)
        emb_b, _ = get_or_embed(req.text_b, self.cache, self.provider)
        return CompareResponse(cosine_distance=cosine_distance(emb_a, emb_b))


def make_provider(name: str):
    if name == "mock":
        return MockEmbedder()
    if name == "remote":
        return RemoteEmbedder()
    raise ValueError(f"unknown embedding provider {name!r}")


def load_bundles(models_dir) -> dict[int, VintageBundle]:
    vintages = list_vintages(models_dir)
    if not vintages:
        raise ServiceStartupError(f"no vintages found under {models_dir}")
    bundles = {}
    for year in vintages:
        try:
            bundles[year] = load_vintage(models_dir, year)
        except PipelineError as exc:
            raise ServiceStartupError(str(exc)) from None
    return bundles


def create_app(models_dir, provider: str = "mock", cache_path=None) -> FastAPI:
    """Build the service; refuses to start on missing model files."""
    state = ScoringState(
        bundles=load_bundles(models_dir),
        provider=make_provider(provider),
        cache=EmbeddingCache(cache_path) if cache_path else None,
    )
    app = FastAPI(title="patentlab scoring service", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"],
    )
    app.state.scoring = state

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        detail = [
            {"field": ".".join(str(p) for p in err["loc"] if p != "body"),
             "message": err["msg"]}
            for err in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"error": "validation", "detail": detail})

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok", vintages=sorted(state.bundles))

    @app.get("/vintages", response_model=list[int])
    def vintages():
        return sorted(state.bundles)

    @app.post("/score", response_model=ScoreResponse)
    def score(req: ScoreRequest):
        return state.score(req)

    @app.post("/compare", response_model=CompareResponse)
    def compare(req: CompareRequest):
        return state.compare(req)

    return app
