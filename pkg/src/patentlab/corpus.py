"""Application/firm/factor data model, delimited file I/O, and synthetic corpora.

File formats are tab- or comma-delimited UTF-8 with a header row; column
schemas are frozen in the README. Months are "YYYY-MM" strings throughout.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from datetime import date, timedelta

import numpy as np

CPC_SECTIONS = ("A", "B", "C", "D", "E", "F", "G", "H", "Y")
FF12_RANGE = range(1, 13)


class CorpusError(Exception):
    """Base error for corpus parsing and validation."""


class SchemaError(CorpusError):
    """Header row does not match the documented column set."""


class RowError(CorpusError):
    """A data row is malformed; carries row number and column name."""

    def __init__(self, row_num: int, column: str, message: str):
        self.row_num = row_num
        self.column = column
        super().__init__(f"row {row_num}, column {column!r}: {message}")


class MissingCovariateError(CorpusError):
    """A firm covariate cannot be computed at the requested month."""


# ---------------------------------------------------------------------------
# month helpers


def month_key(d: date) -> str:
    return f"{d.year:04d}-{d.month:02d}"


def month_index(key: str) -> int:
    """Months as a flat integer index (year*12 + month-1) for arithmetic."""
    y, m = key.split("-")
    return int(y) * 12 + int(m) - 1


def month_from_index(idx: int) -> str:
    return f"{idx // 12:04d}-{idx % 12 + 1:02d}"


def month_add(key: str, n: int) -> str:
    return month_from_index(month_index(key) + n)


# ---------------------------------------------------------------------------
# records


@dataclass(frozen=True)
class ApplicationRecord:
    app_id: str
    firm_id: str  # empty = unassigned
    filing_date: date
    publication_date: date
    title: str
    abstract: str
    cpc_classes: frozenset[str]
    is_ict: bool
    is_biotech: bool
    is_hightech: bool
    is_research_institution: bool
    ff12_industry: int
    market_cap_musd: float
    num_claims: int | None = None
    is_ai: bool | None = None
    accepted: bool | None = None
    grant_title: str | None = None
    grant_abstract: str | None = None
    raw_value_musd: float | None = None

    def __post_init__(self):
        if (self.grant_title is not None or self.grant_abstract is not None) and self.accepted is not True:
            raise CorpusError(f"{self.app_id}: grant text present but accepted is not true")
        bad = set(self.cpc_classes) - set(CPC_SECTIONS)
        if bad:
            raise CorpusError(f"{self.app_id}: unknown CPC sections {sorted(bad)}")
        if self.ff12_industry not in FF12_RANGE:
            raise CorpusError(f"{self.app_id}: ff12_industry {self.ff12_industry} outside 1-12")

    @property
    def publication_month(self) -> str:
        return month_key(self.publication_date)

    @property
    def year(self) -> int:
        return self.publication_date.year


@dataclass(frozen=True)
class FirmRecord:
    firm_id: str
    first_listed: date
    monthly_returns: dict[str, float]
    monthly_market_cap_musd: dict[str, float]

    def __post_init__(self):
        idx = [month_index(m) for m in self.monthly_returns]
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise CorpusError(f"{self.firm_id}: months not strictly increasing")
        if any(r <= -1.0 for r in self.monthly_returns.values()):
            raise CorpusError(f"{self.firm_id}: return <= -1")
        if any(c <= 0 for c in self.monthly_market_cap_musd.values()):
            raise CorpusError(f"{self.firm_id}: nonpositive market cap")


FACTOR_NAMES = ("mkt_rf", "smb", "hml", "mom", "rmw", "cma", "rf")


@dataclass(frozen=True)
class FactorSeries:
    months: tuple[str, ...]
    mkt_rf: tuple[float, ...]
    smb: tuple[float, ...]
    hml: tuple[float, ...]
    mom: tuple[float, ...]
    rmw: tuple[float, ...]
    cma: tuple[float, ...]
    rf: tuple[float, ...]

    def __post_init__(self):
        n = len(self.months)
        for name in FACTOR_NAMES:
            if len(getattr(self, name)) != n:
                raise CorpusError(f"factor column {name} length mismatch")
        idx = [month_index(m) for m in self.months]
        if any(b != a + 1 for a, b in zip(idx, idx[1:])):
            raise CorpusError("factor months not contiguous")

    def row(self, month: str) -> dict[str, float] | None:
        if not self.months:
            return None
        i = month_index(month) - month_index(self.months[0])
        if 0 <= i < len(self.months):
            return {name: getattr(self, name)[i] for name in FACTOR_NAMES}
        return None


@dataclass(frozen=True)
class SyntheticConfig:
    n_firms: int = 40
    n_apps: int = 5000
    year_range: tuple[int, int] = (2001, 2008)
    seed: int = 0
    signal_strength_text: float = 1.0
    signal_strength_structural: float = 0.5
    planted_monthly_alpha: float = 0.003
    # fraction of accepted applications whose grant abstract is rewritten
    grant_rewrite_frac: float = 0.10
    base_acceptance_rate: float = 0.724

    def __post_init__(self):
        if not 0.0 <= self.signal_strength_text <= 1.0:
            raise ValueError("signal_strength_text outside [0, 1]")
        if not 0.0 <= self.signal_strength_structural <= 1.0:
            raise ValueError("signal_strength_structural outside [0, 1]")
        if self.year_range[0] > self.year_range[1]:
            raise ValueError("empty year_range")
        if self.n_firms < 1 or self.n_apps < 1:
            raise ValueError("n_firms and n_apps must be positive")


@dataclass(frozen=True)
class Corpus:
    applications: tuple[ApplicationRecord, ...]
    firms: dict[str, FirmRecord] = field(default_factory=dict)
    factors: FactorSeries | None = None

    def __post_init__(self):
        seen = set()
        for r in self.applications:
            if r.app_id in seen:
                raise CorpusError(f"duplicate app_id {r.app_id}")
            seen.add(r.app_id)

    def by_id(self) -> dict[str, ApplicationRecord]:
        return {r.app_id: r for r in self.applications}

    def labeled(self) -> list[ApplicationRecord]:
        """Records usable for training/evaluation (pending excluded)."""
        return [r for r in self.applications if r.accepted is not None]


# ---------------------------------------------------------------------------
# delimited file I/O

APPLICATION_COLUMNS = [
    "app_id", "firm_id", "assignee_ids", "filing_date", "publication_date",
    "title", "abstract", "cpc_classes", "num_claims", "is_ai", "is_ict",
    "is_biotech", "is_hightech", "is_research_institution", "ff12_industry",
    "accepted", "grant_title", "grant_abstract", "raw_value_musd",
    "market_cap_musd",
]

FIRM_COLUMNS = ["firm_id", "first_listed", "month", "monthly_return", "market_cap_musd"]

FACTOR_COLUMNS = ["month"] + list(FACTOR_NAMES)


def _delimiter(fmt: str) -> str:
    if fmt in ("tsv", "\t", "tab"):
        return "\t"
    if fmt in ("csv", ",", "comma"):
        return ","
    raise ValueError(f"unknown format {fmt!r}; use 'tsv' or 'csv'")


def _check_header(header: list[str], required: list[str]) -> None:
    missing = [c for c in required if c not in header]
    if missing:
        raise SchemaError(f"missing mandatory columns: {missing}")


def _fmt_bool(v: bool | None) -> str:
    return "" if v is None else ("1" if v else "0")


def _parse_bool(raw: str, row_num: int, column: str, optional: bool = False) -> bool | None:
    if raw == "":
        if optional:
            return None
        raise RowError(row_num, column, "empty value for mandatory boolean")
    if raw in ("0", "1"):
        return raw == "1"
    raise RowError(row_num, column, f"expected 0/1, got {raw!r}")


def _parse_date(raw: str, row_num: int, column: str) -> date:
    try:
        return date.fromisoformat(raw)
    except ValueError as exc:
        raise RowError(row_num, column, str(exc)) from None


def _parse_float(raw: str, row_num: int, column: str, optional: bool = False) -> float | None:
    if raw == "":
        if optional:
            return None
        raise RowError(row_num, column, "empty value for mandatory number")
    try:
        return float(raw)
    except ValueError:
        raise RowError(row_num, column, f"not a number: {raw!r}") from None


@dataclass
class ParseResult:
    records: list[ApplicationRecord]
    n_multi_assignee_dropped: int = 0
    n_unlinked_dropped: int = 0

    @property
    def n_dropped(self) -> int:
        return self.n_multi_assignee_dropped + self.n_unlinked_dropped


def parse_applications(path, fmt: str = "tsv") -> ParseResult:
    """Parse a PatentsView-shaped applications export.

    Rows with multiple assignee ids or no firm link are dropped; the drop
    counts are reported on the result. Unknown extra columns are ignored.
    """
    delim = _delimiter(fmt)
    result = ParseResult(records=[])
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh, delimiter=delim)
        if reader.fieldnames is None:
            raise SchemaError("empty file: no header row")
        _check_header(list(reader.fieldnames), APPLICATION_COLUMNS)
        for row_num, row in enumerate(reader, start=2):
            if any(v is None for v in row.values()):
                short = [k for k, v in row.items() if v is None][0]
                raise RowError(row_num, short, "row has fewer fields than header")
            assignees = [a for a in row["assignee_ids"].split("|") if a]
            if len(assignees) > 1:
                result.n_multi_assignee_dropped += 1
                continue
            if not row["firm_id"]:
                result.n_unlinked_dropped += 1
                continue
            ff12 = row["ff12_industry"]
            try:
                ff12_val = int(ff12)
            except ValueError:
                raise RowError(row_num, "ff12_industry", f"not an integer: {ff12!r}") from None
            claims = row["num_claims"]
            accepted = _parse_bool(row["accepted"], row_num, "accepted", optional=True)
            try:
                rec = ApplicationRecord(
                    app_id=row["app_id"],
                    firm_id=row["firm_id"],
                    filing_date=_parse_date(row["filing_date"], row_num, "filing_date"),
                    publication_date=_parse_date(row["publication_date"], row_num, "publication_date"),
                    title=row["title"],
                    abstract=row["abstract"],
                    cpc_classes=frozenset(c for c in row["cpc_classes"].split("|") if c),
                    num_claims=int(claims) if claims else None,
                    is_ai=_parse_bool(row["is_ai"], row_num, "is_ai", optional=True),
                    is_ict=bool(_parse_bool(row["is_ict"], row_num, "is_ict")),
                    is_biotech=bool(_parse_bool(row["is_biotech"], row_num, "is_biotech")),
                    is_hightech=bool(_parse_bool(row["is_hightech"], row_num, "is_hightech")),
                    is_research_institution=bool(
                        _parse_bool(row["is_research_institution"], row_num, "is_research_institution")
                    ),
                    ff12_industry=ff12_val,
                    accepted=accepted,
                    grant_title=row["grant_title"] or None,
                    grant_abstract=row["grant_abstract"] or None,
                    raw_value_musd=_parse_float(row["raw_value_musd"], row_num, "raw_value_musd", optional=True),
                    market_cap_musd=float(_parse_float(row["market_cap_musd"], row_num, "market_cap_musd")),
                )
            except CorpusError as exc:
                raise RowError(row_num, "record", str(exc)) from None
            result.records.append(rec)
    return result


def write_applications(records, path, fmt: str = "tsv") -> None:
    delim = _delimiter(fmt)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter=delim, lineterminator="\n")
        writer.writerow(APPLICATION_COLUMNS)
        for r in records:
            writer.writerow([
                r.app_id,
                r.firm_id,
                r.firm_id,  # single assignee: the linked firm
                r.filing_date.isoformat(),
                r.publication_date.isoformat(),
                r.title,
                r.abstract,
                "|".join(sorted(r.cpc_classes)),
                "" if r.num_claims is None else str(r.num_claims),
                _fmt_bool(r.is_ai),
                _fmt_bool(r.is_ict),
                _fmt_bool(r.is_biotech),
                _fmt_bool(r.is_hightech),
                _fmt_bool(r.is_research_institution),
                str(r.ff12_industry),
                _fmt_bool(r.accepted),
                r.grant_title or "",
                r.grant_abstract or "",
                "" if r.raw_value_musd is None else repr(r.raw_value_musd),
                repr(r.market_cap_musd),
            ])


def parse_firms(path, fmt: str = "tsv") -> dict[str, FirmRecord]:
    delim = _delimiter(fmt)
    rows: dict[str, list[tuple[str, str, float, float]]] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh, delimiter=delim)
        if reader.fieldnames is None:
            raise SchemaError("empty file: no header row")
        _check_header(list(reader.fieldnames), FIRM_COLUMNS)
        for row_num, row in enumerate(reader, start=2):
            ret = _parse_float(row["monthly_return"], row_num, "monthly_return")
            cap = _parse_float(row["market_cap_musd"], row_num, "market_cap_musd")
            rows.setdefault(row["firm_id"], []).append(
                (row["first_listed"], row["month"], float(ret), float(cap))
            )
    firms = {}
    for firm_id, entries in rows.items():
        entries.sort(key=lambda e: month_index(e[1]))
        firms[firm_id] = FirmRecord(
            firm_id=firm_id,
            first_listed=date.fromisoformat(entries[0][0]),
            monthly_returns={m: r for _, m, r, _ in entries},
            monthly_market_cap_musd={m: c for _, m, _, c in entries},
        )
    return firms


def write_firms(firms: dict[str, FirmRecord], path, fmt: str = "tsv") -> None:
    delim = _delimiter(fmt)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter=delim, lineterminator="\n")
        writer.writerow(FIRM_COLUMNS)
        for firm_id in sorted(firms):
            f = firms[firm_id]
            for m in f.monthly_returns:
                writer.writerow([
                    firm_id, f.first_listed.isoformat(), m,
                    repr(f.monthly_returns[m]), repr(f.monthly_market_cap_musd[m]),
                ])


def parse_factors(path, fmt: str = "tsv") -> FactorSeries:
    delim = _delimiter(fmt)
    months, cols = [], {name: [] for name in FACTOR_NAMES}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh, delimiter=delim)
        if reader.fieldnames is None:
            raise SchemaError("empty file: no header row")
        _check_header(list(reader.fieldnames), FACTOR_COLUMNS)
        for row_num, row in enumerate(reader, start=2):
            months.append(row["month"])
            for name in FACTOR_NAMES:
                cols[name].append(float(_parse_float(row[name], row_num, name)))
    return FactorSeries(months=tuple(months), **{k: tuple(v) for k, v in cols.items()})


def write_factors(factors: FactorSeries, path, fmt: str = "tsv") -> None:
    delim = _delimiter(fmt)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter=delim, lineterminator="\n")
        writer.writerow(FACTOR_COLUMNS)
        for i, m in enumerate(factors.months):
            writer.writerow([m] + [repr(getattr(factors, name)[i]) for name in FACTOR_NAMES])


# ---------------------------------------------------------------------------
# firm covariates


def firm_covariates(
    firm: FirmRecord,
    at_month: str,
    app_months=(),
    deflator=None,
) -> tuple[float, float, int]:
    """Size, age, and application stock for a firm at a given month.

    Size is ln of the inflation-adjusted market cap at the nearest month at
    or before `at_month`; age is years since first listing; application
    stock counts the firm's applications in strictly prior months.
    `deflator` maps month -> price index (real cap = cap / deflator).
    """
    at_idx = month_index(at_month)
    best = None
    for m, cap in firm.monthly_market_cap_musd.items():
        idx = month_index(m)
        if idx <= at_idx and (best is None or idx > best[0]):
            best = (idx, m, cap)
    if best is None:
        raise MissingCovariateError(f"{firm.firm_id}: no market cap at or before {at_month}")
    _, cap_month, cap = best
    defl = 1.0 if deflator is None else float(deflator(cap_month))
    size_ln = math.log(cap / defl)
    first_idx = month_index(month_key(firm.first_listed))
    age_years = (at_idx - first_idx) / 12.0
    stock = sum(1 for m in app_months if month_index(m) < at_idx)
    return size_ln, age_years, stock


# ---------------------------------------------------------------------------
# synthetic corpus

# Token pools: content slots draw "strong" tokens with probability equal to
# the application's latent quality, so the text itself encodes quality.
_STRONG_TOKENS = (
    "novel", "efficient", "robust", "scalable", "precise", "optimized",
    "adaptive", "integrated", "breakthrough", "reliable", "versatile",
    "streamlined", "accurate", "durable", "innovative", "refined",
)
_WEAK_TOKENS = (
    "various", "typical", "generally", "certain", "miscellaneous", "plain",
    "ordinary", "assorted", "common", "usual", "basic", "standard",
    "conventional", "routine", "simple", "regular",
)
# topic tokens are deliberately section-independent: the text must encode
# only the latent quality, so a zero text-signal corpus leaves acceptance
# genuinely unpredictable from text
_TOPIC_TOKENS = (
    "therapy", "compound", "dosage", "treatment", "formulation",
    "conveyor", "actuator", "assembly", "fixture", "tooling",
    "polymer", "catalyst", "solvent", "resin", "alloy",
    "fabric", "fiber", "weave", "yarn", "textile",
    "foundation", "girder", "drilling", "masonry", "scaffold",
    "turbine", "valve", "combustion", "pump", "bearing",
    "sensor", "processor", "signal", "encoder", "circuit",
    "antenna", "transistor", "voltage", "semiconductor", "relay",
    "module", "platform", "framework", "interface", "array",
)

# Fixed structural effects feeding the structural acceptance/value index.
_SECTION_SCORE = {s: i / (len(CPC_SECTIONS) - 1) for i, s in enumerate(CPC_SECTIONS)}
_FF12_SCORE = {k: (k - 1) / 11.0 for k in FF12_RANGE}


def _quality_text(rng: np.random.Generator, q: float, n_content: int) -> str:
    words = []
    for _ in range(n_content):
        pool = _STRONG_TOKENS if rng.random() < q else _WEAK_TOKENS
        words.append(pool[rng.integers(len(pool))])
        if rng.random() < 0.4:
            words.append(_TOPIC_TOKENS[rng.integers(len(_TOPIC_TOKENS))])
    return " ".join(words)


def _structural_index(section: str, is_hightech: bool, ff12: int) -> float:
    return 0.5 * _SECTION_SCORE[section] + 0.2 * float(is_hightech) + 0.3 * _FF12_SCORE[ff12]


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def _calibrate_intercept(logits: np.ndarray, target_rate: float) -> float:
    """Bisection for c with mean(sigmoid(logits + c)) == target_rate."""
    lo, hi = -20.0, 20.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if float(np.mean(_sigmoid(logits + mid))) < target_rate:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def generate_synthetic(config: SyntheticConfig) -> Corpus:
    """Planted-signal synthetic corpus; a pure function of the config.

    Each application carries a latent quality q in [0, 1] encoded in its
    text tokens; acceptance follows Bernoulli(sigmoid(a*q + b*s + c)) with
    a proportional to the text signal strength, s a structural index, and c
    calibrated so the base acceptance rate matches the config. Raw values
    are lognormal with location increasing in q. Above-median true
    application strength earns the planted alpha in the following month.
    """
    return generate_synthetic_with_truth(config)[0]


def generate_synthetic_with_truth(config: SyntheticConfig) -> tuple[Corpus, np.ndarray, np.ndarray]:
    """generate_synthetic plus the planted truth (latent q, true acceptance p)."""
    rng = np.random.default_rng(config.seed)
    y0, y1 = config.year_range
    n = config.n_apps

    firm_ids = [f"F{i:04d}" for i in range(config.n_firms)]
    firm_base_lncap = rng.normal(7.0, 1.0, size=config.n_firms)
    firm_beta = rng.normal(1.0, 0.2, size=config.n_firms)
    firm_listed_year = rng.integers(y0 - 25, y0 - 1, size=config.n_firms)

    # applications
    app_firm = rng.integers(config.n_firms, size=n)
    q = rng.uniform(0.0, 1.0, size=n)
    pub_year = rng.integers(y0, y1 + 1, size=n)
    pub_month = rng.integers(1, 13, size=n)
    pub_day = rng.integers(1, 28, size=n)
    sections = rng.choice(len(CPC_SECTIONS), size=n)
    n_extra_cpc = rng.integers(0, 3, size=n)
    ff12 = rng.integers(1, 13, size=n)
    is_hightech = rng.random(n) < 0.3
    is_ict = rng.random(n) < 0.25
    is_biotech = rng.random(n) < 0.15
    is_research = rng.random(n) < 0.05
    is_ai = rng.random(n) < 0.05
    num_claims = rng.poisson(12, size=n) + 1
    cap_noise = rng.normal(0.0, 0.15, size=n)

    section_letters = [CPC_SECTIONS[i] for i in sections]
    s_index = np.array([
        _structural_index(sec, ht, f)
        for sec, ht, f in zip(section_letters, is_hightech, ff12)
    ])
    ln_caps = firm_base_lncap[app_firm] + cap_noise
    cap_z = (ln_caps - ln_caps.mean()) / (ln_caps.std() or 1.0)

    a = 4.0 * config.signal_strength_text
    b = 2.0 * config.signal_strength_structural
    b_cap = 0.5 * config.signal_strength_structural
    logits = a * (q - 0.5) + b * (s_index - 0.5) + b_cap * cap_z
    c = _calibrate_intercept(logits, config.base_acceptance_rate)
    p_true = _sigmoid(logits + c)
    accepted = rng.random(n) < p_true

    # raw market-reaction value: lognormal, location increasing in quality
    # and proportional to firm size (the size-scaled target then carries a
    # clean text signal; mean level ~0.8% of market cap)
    k_text = 2.4 * config.signal_strength_text
    k_struct = 0.8 * config.signal_strength_structural
    ln_value = (-4.8 + ln_caps + k_text * (q - 0.5) + k_struct * (s_index - 0.5)
                + rng.normal(0.0, 0.35, size=n))

    rewrite = rng.random(n) < config.grant_rewrite_frac
    records = []
    for i in range(n):
        section = section_letters[i]
        extra = rng.choice(len(CPC_SECTIONS), size=int(n_extra_cpc[i]), replace=False)
        cpc = frozenset({section} | {CPC_SECTIONS[j] for j in extra})
        title = _quality_text(rng, float(q[i]), 5)
        abstract = _quality_text(rng, float(q[i]), 30)
        pub = date(int(pub_year[i]), int(pub_month[i]), int(pub_day[i]))
        filing = pub - timedelta(days=540)
        acc = bool(accepted[i])
        if acc and rewrite[i]:
            q_grant = min(1.0, float(q[i]) + 0.25)
            grant_title = _quality_text(rng, q_grant, 5)
            grant_abstract = _quality_text(rng, q_grant, 30)
        elif acc:
            grant_title, grant_abstract = title, abstract
        else:
            grant_title = grant_abstract = None
        records.append(ApplicationRecord(
            app_id=f"A{i:06d}",
            firm_id=firm_ids[int(app_firm[i])],
            filing_date=filing,
            publication_date=pub,
            title=title,
            abstract=abstract,
            cpc_classes=cpc,
            num_claims=int(num_claims[i]),
            is_ai=bool(is_ai[i]),
            is_ict=bool(is_ict[i]),
            is_biotech=bool(is_biotech[i]),
            is_hightech=bool(is_hightech[i]),
            is_research_institution=bool(is_research[i]),
            ff12_industry=int(ff12[i]),
            accepted=acc,
            grant_title=grant_title,
            grant_abstract=grant_abstract,
            raw_value_musd=float(np.exp(ln_value[i])),
            market_cap_musd=float(np.exp(ln_caps[i])),
        ))

    # monthly factor series spanning the corpus plus a one-year tail
    start = month_index(f"{y0:04d}-01")
    end = month_index(f"{y1 + 1:04d}-12")
    months = [month_from_index(i) for i in range(start, end + 1)]
    n_m = len(months)
    mkt_rf = rng.normal(0.006, 0.04, size=n_m)
    smb = rng.normal(0.0, 0.02, size=n_m)
    hml = rng.normal(0.0, 0.02, size=n_m)
    mom = rng.normal(0.0, 0.025, size=n_m)
    rmw = rng.normal(0.0, 0.015, size=n_m)
    cma = rng.normal(0.0, 0.015, size=n_m)
    rf = np.full(n_m, 0.002)
    factors = FactorSeries(
        months=tuple(months),
        mkt_rf=tuple(float(x) for x in mkt_rf),
        smb=tuple(float(x) for x in smb),
        hml=tuple(float(x) for x in hml),
        mom=tuple(float(x) for x in mom),
        rmw=tuple(float(x) for x in rmw),
        cma=tuple(float(x) for x in cma),
        rf=tuple(float(x) for x in rf),
    )

    # true per-firm-month application strength drives the planted alpha
    strength: dict[tuple[int, str], list[float]] = {}
    for i, rec in enumerate(records):
        strength.setdefault((int(app_firm[i]), rec.publication_month), []).append(float(p_true[i]))
    above: set[tuple[int, str]] = set()
    by_month: dict[str, list[tuple[int, float]]] = {}
    for (fi, m), ps in strength.items():
        by_month.setdefault(m, []).append((fi, float(np.mean(ps)) * math.sqrt(len(ps))))
    for m, entries in by_month.items():
        med = float(np.median([s for _, s in entries]))
        for fi, s in entries:
            if s >= med:
                above.add((fi, m))

    idio = rng.normal(0.0, 0.01, size=(config.n_firms, n_m))
    cap_walk = rng.normal(0.0, 0.02, size=(config.n_firms, n_m))
    firms = {}
    for fi, firm_id in enumerate(firm_ids):
        rets, caps = {}, {}
        ln_cap = float(firm_base_lncap[fi])
        for mi, m in enumerate(months):
            r = float(rf[mi] + firm_beta[fi] * mkt_rf[mi] + idio[fi, mi])
            if mi > 0 and (fi, months[mi - 1]) in above:
                r += config.planted_monthly_alpha
            rets[m] = r
            ln_cap += float(cap_walk[fi, mi])
            caps[m] = float(np.exp(ln_cap))
        firms[firm_id] = FirmRecord(
            firm_id=firm_id,
            first_listed=date(int(firm_listed_year[fi]), 1, 1),
            monthly_returns=rets,
            monthly_market_cap_musd=caps,
        )

    corpus = Corpus(applications=tuple(records), firms=firms, factors=factors)
    return corpus, q, p_true
