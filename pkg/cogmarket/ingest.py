"""
Readers for CSD sentiment reports, price series, day-state tables and the
model configuration.

Report documents are JSON in the CSD field layout and may carry ``//`` line
comments.  Parse errors are raised as ``InputError`` with ``file:line``
context; config problems as ``ConfigError``.
"""
from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field
from datetime import date
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import pandas as pd

from . import constants as C
from .affect import DecayTable, HolidayTable, SatelliteRegimes, ShockConfig
from .backtest import BacktestConfig, MarketEvent, PriceSeries
from .cogvec import (
    Bias,
    CognitiveVector,
    DailySentimentReport,
    DimensionRegistry,
    Persona,
    PersonaDayState,
    zeros,
)
from .config import config_path, load_config
from .errors import ConfigError, InputError
from .garch import GarchConfig, ParamArsenal
from .macrostate import QuadrantPrototypes, macro_state
from .strategy import StrategyConfig
from .textlab import TextlabConfig

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Report documents
# ---------------------------------------------------------------------------

def strip_line_comments(text: str) -> str:
    """Drop ``//`` comments outside string literals; newlines are kept."""
    out: List[str] = []
    i = 0
    n = len(text)
    in_string = False
    while i < n:
        ch = text[i]
        if in_string:
            out.append(ch)
            if ch == "\\" and i + 1 < n:
                out.append(text[i + 1])
                i += 2
                continue
            if ch == '"':
                in_string = False
        elif ch == '"':
            in_string = True
            out.append(ch)
        elif ch == "/" and text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        else:
            out.append(ch)
        i += 1
    return "".join(out)


def _decode(text: str, source: str) -> Dict[str, Any]:
    try:
        doc = json.loads(strip_line_comments(text))
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}:{exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise InputError(f"{source}: report must be a JSON object")
    return doc


def _parse_date(raw: Any, source: str) -> date:
    try:
        return date.fromisoformat(str(raw))
    except ValueError:
        raise InputError(f"{source}: unparseable date {raw!r}") from None


def _emotion_scores(entries: Any, source: str) -> List[Tuple[str, float]]:
    pairs = []
    for entry in entries or ():
        try:
            pairs.append((str(entry["emotion"]), float(entry["score"])))
        except (KeyError, TypeError, ValueError):
            raise InputError(f"{source}: malformed dominant_emotions entry {entry!r}") from None
    return pairs


def _persona_scores(block: Mapping[str, Any], source: str) -> Dict[str, float]:
    scores: Dict[str, float] = {}
    for dim, value in _emotion_scores(block.get("dominant_emotions"), source):
        scores[dim] = value
    for key in ("cognitive_profile", "sentiment_vector"):
        for dim, value in (block.get(key) or {}).items():
            scores[str(dim)] = value
    return scores


def _metacognition(doc: Mapping[str, Any], summary: Mapping[str, Any]) -> float:
    state = doc.get("calculated_state_vector") or {}
    if "metacognition_score" in state:
        return float(state["metacognition_score"])
    tokens = doc.get("detailed_thought_token_analysis") or summary.get("detailed_thought_token_analysis") or []
    if not tokens:
        return 0.0

    def tagged(token: Mapping[str, Any]) -> bool:
        tags = list(token.get("tags") or ())
        tags += [token.get("thought_token_type_enum"), token.get("tag")]
        return C.TAG_METACOGNITION in tags

    return sum(1 for t in tokens if tagged(t)) / len(tokens)


def parse_csd_report(
    text: str,
    registry: Optional[DimensionRegistry] = None,
    *,
    clamp: bool = False,
    source: str = "<report>",
) -> DailySentimentReport:
    """
    Build a ``DailySentimentReport`` from one report document.

    Persona vectors come from ``segregated_sentiment``; a missing persona
    block yields the zero vector and is listed in ``persona_day.missing``.
    Unknown dimensions fail under a strict registry and extend an
    extensible one.
    """
    registry = registry or DimensionRegistry.default()
    doc = _decode(text, source)
    meta = doc.get("report_metadata") or {}
    summary = doc.get("market_sentiment_summary") or {}

    raw_date = doc.get("date", meta.get("date"))
    if raw_date is None:
        raise InputError(f"{source}: missing date")
    day = _parse_date(raw_date, source)

    osi = summary.get("overall_sentiment_index", doc.get("overall_sentiment_index"))
    if osi is None:
        raise InputError(f"{source}: missing overall_sentiment_index")
    try:
        osi = float(osi)
    except (TypeError, ValueError):
        raise InputError(f"{source}: overall_sentiment_index is not a number: {osi!r}") from None

    dominant = _emotion_scores(summary.get("dominant_emotions"), source)
    segregated = summary.get("segregated_sentiment") or {}
    blocks: Dict[Persona, Dict[str, float]] = {}
    for key, block in segregated.items():
        blocks[Persona.parse(key)] = _persona_scores(block or {}, source)

    referenced = [d for d, _ in dominant] + [d for s in blocks.values() for d in s]
    unknown = [d for d in referenced if d not in registry]
    if unknown:
        if not registry.extensible:
            raise InputError(f"{source}: unknown dimension {unknown[0]!r}")
        registry = registry.extended(unknown)
        logger.info("%s: registry extended with %s", source, sorted(set(unknown)))
    for dim, value in dominant:
        if not clamp and not C.SCORE_MIN <= value <= C.SCORE_MAX:
            raise InputError(f"{source}: score {dim}={value!r} outside [-1, 1]")

    vectors: Dict[Persona, CognitiveVector] = {}
    missing = set()
    for persona in Persona:
        if persona in blocks:
            try:
                vectors[persona] = CognitiveVector.from_scores(registry, blocks[persona], clamp=clamp)
            except InputError as exc:
                raise InputError(f"{source}: {persona.value}: {exc}") from None
        else:
            vectors[persona] = zeros(registry)
            missing.add(persona)
            logger.warning("%s: no %s block; using the zero vector", source, persona.value)

    biases = summary.get("diagnosed_biases", doc.get("diagnosed_biases")) or []
    topics = summary.get("narrative_dynamics", doc.get("narrative_dynamics")) or []

    try:
        persona_day = PersonaDayState(
            date=day,
            novice=vectors[Persona.NOVICE],
            veteran=vectors[Persona.VETERAN],
            metacognition_score=_metacognition(doc, summary),
            missing=frozenset(missing),
        )
        return DailySentimentReport(
            date=day,
            overall_sentiment_index=osi,
            persona_day=persona_day,
            dominant_emotions=tuple(dominant),
            diagnosed_biases=tuple(Bias.parse(b["bias_enum"] if isinstance(b, Mapping) else b) for b in biases),
            narrative_topics=tuple(str(t["topic"]) if isinstance(t, Mapping) else str(t) for t in topics),
            model_version=str(meta.get("model_version", meta.get("report_id", ""))),
        )
    except InputError as exc:
        raise InputError(f"{source}: {exc}") from None


def serialize_report(report: DailySentimentReport) -> str:
    """Canonical document for *report*; parsing it yields an equal report."""
    segregated = {}
    for persona in Persona:
        if persona in report.persona_day.missing:
            continue
        vec = report.persona_day.persona(persona)
        segregated[persona.value] = {"sentiment_vector": vec.scores}

    doc: Dict[str, Any] = {
        "date": report.date.isoformat(),
        "report_metadata": {"model_version": report.model_version},
        "calculated_state_vector": {"metacognition_score": report.persona_day.metacognition_score},
        "market_sentiment_summary": {
            "overall_sentiment_index": report.overall_sentiment_index,
            "dominant_emotions": [{"emotion": d, "score": s} for d, s in report.dominant_emotions],
            "segregated_sentiment": segregated,
            "diagnosed_biases": [{"bias_enum": b.value} for b in report.diagnosed_biases],
            "narrative_dynamics": [{"topic": t} for t in report.narrative_topics],
        },
    }
    return json.dumps(doc, sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def _reproject(report: DailySentimentReport, registry: DimensionRegistry) -> DailySentimentReport:
    if report.persona_day.registry == registry:
        return report
    day = report.persona_day
    novice = CognitiveVector.from_scores(registry, day.novice.scores)
    veteran = CognitiveVector.from_scores(registry, day.veteran.scores)
    new_day = PersonaDayState(day.date, novice, veteran, day.metacognition_score, day.missing)
    return DailySentimentReport(
        report.date, report.overall_sentiment_index, new_day, report.dominant_emotions,
        report.diagnosed_biases, report.narrative_topics, report.model_version,
    )


def _report_sources(path: str) -> Iterable[Tuple[str, str]]:
    if os.path.isdir(path):
        for name in sorted(os.listdir(path)):
            if name.endswith((".json", ".jsonl")):
                yield from _report_sources(os.path.join(path, name))
        return
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: cannot read: {exc}") from None
    if path.endswith(".jsonl"):
        for lineno, line in enumerate(text.splitlines(), start=1):
            if line.strip():
                yield f"{path}:{lineno}", line
    else:
        yield path, text


def load_reports(
    path: str,
    registry: Optional[DimensionRegistry] = None,
    *,
    clamp: bool = False,
) -> List[DailySentimentReport]:
    """Reports from a file, a ``.jsonl`` stream or a directory, sorted by date."""
    registry = registry or DimensionRegistry.default()
    reports = []
    for source, text in _report_sources(path):
        report = parse_csd_report(text, registry, clamp=clamp, source=source)
        registry = report.persona_day.registry
        reports.append(report)
    if not reports:
        raise InputError(f"{path}: no reports found")

    reports = sorted((_reproject(r, registry) for r in reports), key=lambda r: r.date)
    for prev, cur in zip(reports, reports[1:]):
        if prev.date == cur.date:
            raise InputError(f"{path}: duplicate report date {cur.date}")
    logger.info("loaded %d reports from %s", len(reports), path)
    return reports


# ---------------------------------------------------------------------------
# Tabular inputs
# ---------------------------------------------------------------------------

CSV_OPTIONS = {"index": False, "lineterminator": "\n", "float_format": "%.10g"}


def _read_table(path: str, fmt: str) -> pd.DataFrame:
    seps = {"csv": ",", "tsv": "\t"}
    if fmt not in seps:
        raise InputError(f"unsupported table format {fmt!r}; choose from {sorted(seps)}")
    try:
        return pd.read_csv(path, sep=seps[fmt])
    except FileNotFoundError:
        raise InputError(f"{path}: file not found") from None
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise InputError(f"{path}: cannot parse table: {exc}") from None


def _parse_dates(column: pd.Series, path: str) -> List[date]:
    dates = []
    for row, raw in enumerate(column, start=2):
        try:
            dates.append(date.fromisoformat(str(raw).strip()))
        except ValueError:
            raise InputError(f"{path}:{row}: unparseable date {raw!r}") from None
    return dates


def load_price_series(path: str, fmt: str = "csv") -> PriceSeries:
    """``date,close[,open,high,low]`` table, validated and sorted by date."""
    df = _read_table(path, fmt)
    df.columns = [str(c).strip().lower() for c in df.columns]
    for required in ("date", "close"):
        if required not in df.columns:
            raise InputError(f"{path}: missing column {required!r}")

    dates = _parse_dates(df["date"], path)
    closes = pd.to_numeric(df["close"], errors="coerce")
    if closes.isna().any():
        row = int(closes.isna().to_numpy().argmax()) + 2
        raise InputError(f"{path}:{row}: close is not a number")
    bad = closes <= 0
    if bad.any():
        row = int(bad.to_numpy().argmax()) + 2
        raise InputError(f"{path}:{row}: non-positive price {closes.iloc[row - 2]!r}")

    frame = pd.DataFrame({"date": dates, "close": closes.astype(float)})
    dupes = frame["date"][frame["date"].duplicated()]
    if not dupes.empty:
        raise InputError(f"{path}: duplicate date {dupes.iloc[0]}")
    frame = frame.sort_values("date", kind="mergesort")
    return PriceSeries(tuple(frame["date"]), frame["close"].to_numpy())


def load_numeric_columns(path: str, columns: Sequence[str], fmt: str = "csv") -> pd.DataFrame:
    """Named numeric columns of a table; column names are matched case-insensitively."""
    df = _read_table(path, fmt)
    df.columns = [str(c).strip().lower() for c in df.columns]
    out = {}
    for name in columns:
        if name not in df.columns:
            raise InputError(f"{path}: missing column {name!r}")
        values = pd.to_numeric(df[name], errors="coerce")
        if values.isna().any():
            row = int(values.isna().to_numpy().argmax()) + 2
            raise InputError(f"{path}:{row}: {name} is not a number")
        out[name] = values.astype(float)
    return pd.DataFrame(out)


def load_series(path: str, column: Optional[str] = None, fmt: str = "csv") -> List[float]:
    """One numeric column; without *column* the last column of the table."""
    if column is None:
        df = _read_table(path, fmt)
        if df.empty or not len(df.columns):
            raise InputError(f"{path}: table is empty")
        column = str(df.columns[-1]).strip().lower()
    return load_numeric_columns(path, [column.lower()], fmt)[column.lower()].tolist()


def load_groups(path: str, value_column: str, fmt: str = "csv") -> Dict[str, List[float]]:
    """``group,<value_column>`` table as one sample per group, groups in sorted order."""
    df = _read_table(path, fmt)
    df.columns = [str(c).strip().lower() for c in df.columns]
    if "group" not in df.columns:
        raise InputError(f"{path}: missing column 'group'")
    values = load_numeric_columns(path, [value_column], fmt)[value_column]
    groups = df["group"].astype(str).str.strip()
    return {g: values[groups == g].tolist() for g in sorted(groups.unique())}


def load_events(path: str, fmt: str = "csv") -> List[MarketEvent]:
    """``date,kind`` table of dated market events (kind crash or rally)."""
    df = _read_table(path, fmt)
    df.columns = [str(c).strip().lower() for c in df.columns]
    for required in ("date", "kind"):
        if required not in df.columns:
            raise InputError(f"{path}: missing column {required!r}")
    events = []
    for row, (d, kind) in enumerate(zip(_parse_dates(df["date"], path), df["kind"]), start=2):
        try:
            events.append(MarketEvent(d, str(kind).strip().lower()))
        except InputError as exc:
            raise InputError(f"{path}:{row}: {exc}") from None
    return events


def day_states_frame(days: Sequence[PersonaDayState], mcfi_alpha: float = C.MCFI_ALPHA) -> pd.DataFrame:
    rows = []
    for day in days:
        row: Dict[str, Any] = {"date": day.date.isoformat()}
        for dim, v in day.novice.scores.items():
            row[f"novice_{dim}"] = v
        for dim, v in day.veteran.scores.items():
            row[f"veteran_{dim}"] = v
        state = macro_state(day, mcfi_alpha)
        row.update({"meta": day.metacognition_score, "mdi": state.mdi, "mcfi": state.mcfi})
        rows.append(row)
    return pd.DataFrame(rows)


def save_day_states(days: Sequence[PersonaDayState], path: str, mcfi_alpha: float = C.MCFI_ALPHA) -> None:
    day_states_frame(days, mcfi_alpha).to_csv(path, **CSV_OPTIONS)


def load_day_states(
    path: str,
    registry: Optional[DimensionRegistry] = None,
    *,
    clamp: bool = False,
) -> List[PersonaDayState]:
    """
    Read the normalized day-state table.  Without *registry* the dimensions
    are taken from the ``novice_*`` columns; ``mdi``/``mcfi`` are derived
    and ignored on read.
    """
    df = _read_table(path, "csv")
    if "date" not in df.columns:
        raise InputError(f"{path}: missing column 'date'")
    if registry is None:
        labels = [c[len("novice_"):] for c in df.columns if c.startswith("novice_")]
        if not labels:
            raise InputError(f"{path}: no novice_<dim> columns")
        registry = DimensionRegistry(tuple(labels))
    for persona in Persona:
        for dim in registry:
            if f"{persona.value}_{dim}" not in df.columns:
                raise InputError(f"{path}: missing column '{persona.value}_{dim}'")

    dates = _parse_dates(df["date"], path)
    meta = df["meta"] if "meta" in df.columns else pd.Series([0.0] * len(df))
    days = []
    for i, day in enumerate(dates):
        vectors = {}
        for persona in Persona:
            scores = {dim: df[f"{persona.value}_{dim}"].iloc[i] for dim in registry}
            try:
                vectors[persona] = CognitiveVector.from_scores(registry, scores, clamp=clamp)
            except InputError as exc:
                raise InputError(f"{path}:{i + 2}: {exc}") from None
        days.append(PersonaDayState(day, vectors[Persona.NOVICE], vectors[Persona.VETERAN], float(meta.iloc[i])))

    days.sort(key=lambda d: d.date)
    for prev, cur in zip(days, days[1:]):
        if prev.date == cur.date:
            raise InputError(f"{path}: duplicate date {cur.date}")
    return days


# ---------------------------------------------------------------------------
# Model configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelConfig:
    registry: DimensionRegistry
    prototypes: QuadrantPrototypes
    arsenal: ParamArsenal
    garch: GarchConfig
    decay: DecayTable
    holiday: HolidayTable
    shock: ShockConfig
    satellite: SatelliteRegimes
    strategy: StrategyConfig
    backtest: BacktestConfig
    textlab: TextlabConfig
    clamp_on_ingest: bool = False
    strict_ranges: bool = False
    mcfi_alpha: float = C.MCFI_ALPHA
    lag: int = C.DYNAMICS_LAG
    noise_sd: float = 0.0
    source: Optional[str] = None
    raw: Mapping[str, Any] = field(default_factory=dict, repr=False)

    @property
    def lam(self) -> float:
        return self.shock.loss_aversion


def _referenced_dims(cfg: ModelConfig) -> List[Tuple[str, str]]:
    refs = [("decay", d) for d in cfg.decay.dims]
    refs += [("holiday", d) for d in cfg.holiday.multipliers]
    refs += [("shock", d) for d in cfg.shock.dims]
    refs += [("strategy.prepare_dims", d) for d in cfg.strategy.prepare_dims]
    refs += [("garch.dims", d) for d in cfg.garch.dims]
    refs += [(f"arsenal.{q.letter}.core", qp.core) for q, qp in cfg.arsenal.quadrants.items()]
    return refs


def build_model_config(data: Mapping[str, Any], *, source: Optional[str] = None,
                       strict_ranges: Optional[bool] = None, mode: Optional[str] = None,
                       annualize: Optional[bool] = None) -> ModelConfig:
    """Typed, cross-validated config from a merged config dict."""
    strict = bool(data.get("strict_ranges", False)) if strict_ranges is None else strict_ranges
    reg = data.get("registry", {})
    garch = GarchConfig.from_dict(data.get("garch", {}))
    macro = data.get("macro", {})
    try:
        registry = DimensionRegistry(tuple(reg.get("labels", C.DEFAULT_LABELS)), bool(reg.get("extensible", False)))
    except InputError as exc:
        raise ConfigError(f"[registry] {exc}") from None

    cfg = ModelConfig(
        registry=registry,
        prototypes=QuadrantPrototypes.from_dict(data.get("quadrants", {})),
        arsenal=ParamArsenal.from_dict(
            data.get("arsenal", {}),
            strict_ranges=strict,
            strict_stationarity=garch.strict_stationarity,
        ),
        garch=garch,
        decay=DecayTable.from_dict(data.get("decay", {})),
        holiday=HolidayTable.from_dict(data.get("holiday", {})),
        shock=ShockConfig.from_dict(data.get("shock", {})),
        satellite=SatelliteRegimes.from_dict(data.get("satellite", {})),
        strategy=StrategyConfig.from_dict(data.get("strategy", {}), mode=mode),
        backtest=BacktestConfig.from_dict(data.get("backtest", {}), annualize=annualize),
        textlab=TextlabConfig.from_dict(data.get("textlab", {})),
        clamp_on_ingest=bool(reg.get("clamp_on_ingest", False)),
        strict_ranges=strict,
        mcfi_alpha=float(macro.get("mcfi_alpha", C.MCFI_ALPHA)),
        lag=int(macro.get("lag", C.DYNAMICS_LAG)),
        noise_sd=float(data.get("simulation", {}).get("noise_sd", 0.0)),
        source=source,
        raw=data,
    )
    if not 0.0 <= cfg.mcfi_alpha <= 1.0:
        raise ConfigError(f"[macro] mcfi_alpha must be in [0, 1], got {cfg.mcfi_alpha!r}")
    if cfg.lag < 1:
        raise ConfigError(f"[macro] lag must be >= 1, got {cfg.lag}")
    if cfg.noise_sd < 0:
        raise ConfigError(f"[simulation] noise_sd must be >= 0, got {cfg.noise_sd!r}")

    for section, dim in _referenced_dims(cfg):
        if dim not in registry:
            raise ConfigError(f"[{section}] references dimension {dim!r} absent from the registry")
    return cfg


def load_model_config(
    path: Optional[str] = None,
    strict_ranges: Optional[bool] = None,
    *,
    mode: Optional[str] = None,
    annualize: Optional[bool] = None,
) -> ModelConfig:
    """Resolve, merge and validate the model configuration."""
    return build_model_config(
        load_config(path),
        source=config_path(path),
        strict_ranges=strict_ranges,
        mode=mode,
        annualize=annualize,
    )
