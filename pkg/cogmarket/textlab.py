"""
Text laboratory: rhythm and sampling operators, sentence segmentation,
stylometric fingerprints and a template-backed synthetic comment generator.

Everything random draws from ``numpy.random.default_rng`` seeded by the
caller; generated batches derive one generator per item from
``(seed, index)`` so a batch is reproducible item by item.
"""
from __future__ import annotations

import logging
import math
import os
import re
import tomllib
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from . import constants as C
from .cogvec import Persona
from .errors import ConfigError, InputError, NumericError
from .stats import histogram_jsd

logger = logging.getLogger(__name__)

Seed = Union[int, np.random.Generator, None]


def _rng(seed: Seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TextlabConfig:
    slang_p: float = C.SLANG_P
    leap_threshold: float = C.SEMANTIC_LEAP_THRESHOLD
    bins: int = C.HISTOGRAM_BINS
    base_length: float = C.OSC_BASE_LENGTH
    amplitude: float = C.OSC_AMPLITUDE
    omega: float = C.OSC_OMEGA
    noise: float = C.OSC_NOISE
    fragment_rate: float = C.FRAGMENT_RATE
    run_on_rate: float = C.RUN_ON_RATE

    def __post_init__(self) -> None:
        if not 0.0 <= self.slang_p <= 1.0:
            raise ConfigError(f"[textlab] slang_p must be in [0, 1], got {self.slang_p!r}")
        if not -1.0 <= self.leap_threshold <= 1.0:
            raise ConfigError(f"[textlab] leap_threshold must be in [-1, 1], got {self.leap_threshold!r}")
        if self.bins < 1 or self.base_length < 1:
            raise ConfigError("[textlab] bins and base_length must be >= 1")
        for name in ("amplitude", "noise", "fragment_rate", "run_on_rate"):
            if getattr(self, name) < 0:
                raise ConfigError(f"[textlab] {name} must be >= 0")

    @classmethod
    def from_dict(cls, section: Mapping) -> "TextlabConfig":
        known = set(cls.__dataclass_fields__)
        return cls(**{k: v for k, v in section.items() if k in known})


# ---------------------------------------------------------------------------
# Rhythm
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OscillationParams:
    """Sentence-length oscillator; lengths are in characters."""

    base_length: float
    amplitude: float = 0.0
    omega: float = C.OSC_OMEGA
    phase: float = 0.0
    noise: float = 0.0
    min_len: int = 1

    def __post_init__(self) -> None:
        if self.base_length < 1:
            raise InputError(f"base length must be >= 1, got {self.base_length!r}")
        if self.min_len < 1:
            raise InputError(f"min_len must be >= 1, got {self.min_len!r}")
        if self.amplitude < 0 or self.noise < 0:
            raise InputError("amplitude and noise must be >= 0")


def oscillation_schedule(params: OscillationParams, n_sentences: int, seed: Seed = None) -> List[int]:
    """``max(min_len, floor(L + A*sin(omega*n + phase) + eps_n))`` for n = 1..N."""
    if n_sentences < 1:
        raise InputError(f"need at least one sentence, got {n_sentences}")
    n = np.arange(1, n_sentences + 1)
    eps = _rng(seed).normal(0.0, params.noise, n_sentences)
    raw = np.floor(params.base_length + params.amplitude * np.sin(params.omega * n + params.phase) + eps)
    return [max(params.min_len, int(v)) for v in raw]


# ---------------------------------------------------------------------------
# Sampling operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PerturbationParams:
    tau: float = 1.0
    mask: Optional[Tuple[float, ...]] = None
    beta: float = 0.0
    theta_leap: float = C.SEMANTIC_LEAP_THRESHOLD
    epsilon_sd: float = 0.01

    def __post_init__(self) -> None:
        if not self.tau > 0:
            raise InputError(f"temperature must be > 0, got {self.tau!r}")
        if not 0.0 <= self.beta <= 1.0:
            raise InputError(f"beta must be in [0, 1], got {self.beta!r}")
        if not -1.0 <= self.theta_leap <= 1.0:
            raise InputError(f"theta_leap must be in [-1, 1], got {self.theta_leap!r}")
        if self.mask is not None:
            mask = np.asarray(self.mask, dtype=float)
            if np.any(mask < 0) or not np.any(mask > 0):
                raise InputError("bias mask must be non-negative with at least one positive entry")
            object.__setattr__(self, "mask", tuple(float(m) for m in mask))


def perturb_distribution(
    p: Sequence[float],
    params: PerturbationParams,
    seed: Seed = None,
    *,
    mode: str = "tempered",
) -> np.ndarray:
    """
    Tempered: ``q ~ p**(1/tau) * mask`` computed in log space.
    Additive: ``q ~ (p*(1 - beta) + eps) * mask`` with seeded Gaussian eps.
    """
    pv = np.asarray(p, dtype=float)
    if pv.ndim != 1 or pv.size == 0 or np.any(pv < 0) or abs(float(pv.sum()) - 1.0) > 1e-9:
        raise InputError("p must be a non-negative vector summing to 1")
    mask = np.ones_like(pv) if params.mask is None else np.asarray(params.mask, dtype=float)
    if mask.shape != pv.shape:
        raise InputError(f"mask has {mask.size} entries for {pv.size} tokens")

    if mode == "tempered":
        with np.errstate(divide="ignore"):
            logits = np.log(pv) / params.tau + np.log(mask)
        if not np.any(np.isfinite(logits)):
            raise NumericError("distribution is all zero after masking")
        weights = np.exp(logits - logits[np.isfinite(logits)].max())
    elif mode == "additive":
        eps = _rng(seed).normal(0.0, params.epsilon_sd, pv.size)
        weights = np.clip(pv * (1.0 - params.beta) + eps, 0.0, None) * mask
    else:
        raise InputError(f"unknown perturbation mode {mode!r}")

    total = float(weights.sum())
    if total <= 0:
        raise NumericError("distribution is all zero after masking")
    return weights / total


def semantic_gate(context_vec: Sequence[float], candidate_vec: Sequence[float], theta_leap: float = C.SEMANTIC_LEAP_THRESHOLD) -> bool:
    """True when the candidate is far enough from the context to leap to."""
    a = np.asarray(context_vec, dtype=float)
    b = np.asarray(candidate_vec, dtype=float)
    if a.shape != b.shape:
        raise InputError(f"embedding size mismatch: {a.size} vs {b.size}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise InputError("semantic gate needs non-zero embeddings")
    return float(np.dot(a, b)) / (na * nb) < theta_leap


# ---------------------------------------------------------------------------
# Segmentation and fingerprints
# ---------------------------------------------------------------------------

_TERMINATOR_RUN = re.compile(f"[{re.escape(C.TERMINATORS)}]+")
_TOKEN = re.compile(r"[A-Za-z]+(?:'[A-Za-z]+)?|\d+(?:\.\d+)?|[㐀-䶿一-鿿]")
_CJK = re.compile(r"[㐀-䶿一-鿿]")


@dataclass(frozen=True)
class Sentence:
    text: str
    length: int


def segment_sentences(text: str) -> List[Sentence]:
    """Split on runs of 。？！.?!; a trailing unterminated fragment is a sentence."""
    out = []
    for part in _TERMINATOR_RUN.split(text):
        part = part.strip()
        if part:
            out.append(Sentence(part, len(part)))
    return out


@dataclass(frozen=True)
class Lexicons:
    adjectives: Tuple[str, ...] = ()
    nouns: Tuple[str, ...] = ()
    verbs: Tuple[str, ...] = ()
    interjections: Tuple[str, ...] = ()
    sentiment: Mapping[str, float] = field(default_factory=dict)


_LEXICON_FILES = ("adjectives", "nouns", "verbs", "interjections")


def _read_lines(path: str) -> List[str]:
    try:
        with open(path, encoding="utf-8") as fh:
            return [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    except OSError:
        raise InputError(f"{path}: lexicon file missing or unreadable") from None


def load_lexicons(directory: str) -> Lexicons:
    """``adjectives.txt`` ... one phrase per line; ``sentiment.txt`` is ``phrase<TAB>score``."""
    lists = {name: tuple(_read_lines(os.path.join(directory, f"{name}.txt"))) for name in _LEXICON_FILES}
    sentiment_path = os.path.join(directory, "sentiment.txt")
    sentiment: Dict[str, float] = {}
    for lineno, line in enumerate(_read_lines(sentiment_path), start=1):
        phrase, _, score = line.partition("\t")
        try:
            sentiment[phrase.strip()] = float(score)
        except ValueError:
            raise InputError(f"{sentiment_path}:{lineno}: expected phrase<TAB>score") from None
    return Lexicons(sentiment=sentiment, **lists)


def _hits(text: str, phrase: str) -> int:
    if _CJK.search(phrase):
        return text.count(phrase)
    return len(re.findall(rf"\b{re.escape(phrase)}\b", text, flags=re.IGNORECASE))


def _lexicon_hits(text: str, phrases: Sequence[str]) -> int:
    return sum(_hits(text, p) for p in phrases)


METRICS = (
    "avg_sentence_length",
    "sentence_length_sd",
    "adjective_density",
    "noun_verb_ratio",
    "interjection_count",
    "sentiment_volatility",
)


@dataclass(frozen=True)
class Fingerprint:
    """One sample per metric, one value per text."""

    metrics: Mapping[str, np.ndarray]

    @property
    def n_texts(self) -> int:
        return len(next(iter(self.metrics.values()))) if self.metrics else 0

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({m: self.metrics[m] for m in self.metrics})


def text_metrics(text: str, lexicons: Lexicons) -> Dict[str, float]:
    sentences = segment_sentences(text)
    lengths = np.array([s.length for s in sentences], dtype=float)
    tokens = len(_TOKEN.findall(text))
    verbs = _lexicon_hits(text, lexicons.verbs)
    nouns = _lexicon_hits(text, lexicons.nouns)
    scores = [
        math.fsum(score * _hits(s.text, phrase) for phrase, score in lexicons.sentiment.items())
        for s in sentences
    ]
    return {
        "avg_sentence_length": float(lengths.mean()) if lengths.size else 0.0,
        "sentence_length_sd": float(lengths.std()) if lengths.size else 0.0,
        "adjective_density": min(_lexicon_hits(text, lexicons.adjectives) / tokens, 1.0) if tokens else 0.0,
        # verb-free texts count nouns against a single verb
        "noun_verb_ratio": nouns / max(verbs, 1),
        "interjection_count": float(_lexicon_hits(text, lexicons.interjections)),
        "sentiment_volatility": float(np.std(scores)) if scores else 0.0,
    }


def fingerprint(corpus: Sequence[str], lexicons: Lexicons) -> Fingerprint:
    if not corpus:
        raise InputError("cannot fingerprint an empty corpus")
    rows = [text_metrics(t, lexicons) for t in corpus]
    return Fingerprint({m: np.array([r[m] for r in rows]) for m in METRICS})


def compare_corpora(a: Fingerprint, b: Fingerprint, bins: int = C.HISTOGRAM_BINS) -> Dict[str, float]:
    """Per-metric Jensen-Shannon divergence on shared bins."""
    if set(a.metrics) != set(b.metrics):
        raise InputError("fingerprints carry different metric sets")
    return {m: histogram_jsd(a.metrics[m], b.metrics[m], bins) for m in METRICS if m in a.metrics}


def load_corpus(path: str) -> List[str]:
    """One text per non-empty line."""
    try:
        with open(path, encoding="utf-8") as fh:
            texts = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise InputError(f"{path}: cannot read corpus: {exc}") from None
    if not texts:
        raise InputError(f"{path}: corpus is empty")
    return texts


# ---------------------------------------------------------------------------
# Slang and templates
# ---------------------------------------------------------------------------

SLANG_CATEGORIES = ("Despair", "Denial", "Euphoria", "Cynicism")


@dataclass(frozen=True)
class SlangPhrase:
    phrase: str
    tag: str


_DEFAULT_SLANG = {
    "Despair": (("关灯吃面", "sadness"), ("天台见", "regret"), ("销户", "regret")),
    "Denial": (("骗炮", "dissonance"), ("老乡别走", "dissonance"), ("假摔", "distrust")),
    "Euphoria": (("GOGOGO", "fomo"), ("这种图不冲还是人", "fomo"), ("满仓干", "greed")),
    "Cynicism": (("还是太年轻", "veterancy"), ("都是剧本", "veterancy"), ("内资不争气", "arrogance")),
}


@dataclass(frozen=True)
class SlangDictionary:
    entries: Mapping[str, Tuple[SlangPhrase, ...]] = field(
        default_factory=lambda: {
            cat: tuple(SlangPhrase(p, t) for p, t in rows) for cat, rows in _DEFAULT_SLANG.items()
        }
    )
    p: float = C.SLANG_P

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise InputError(f"slang injection probability must be in [0, 1], got {self.p!r}")
        for cat, phrases in self.entries.items():
            if cat not in SLANG_CATEGORIES:
                raise InputError(f"unknown slang category {cat!r}; choose from {SLANG_CATEGORIES}")
            if not phrases:
                raise InputError(f"slang category {cat!r} is empty")

    def with_p(self, p: float) -> "SlangDictionary":
        return SlangDictionary(self.entries, p)


def load_slang(path: str, p: float = C.SLANG_P) -> SlangDictionary:
    """CSV with ``category,phrase,tag`` columns."""
    try:
        df = pd.read_csv(path, dtype=str).fillna("")
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise InputError(f"{path}: cannot read slang dictionary: {exc}") from None
    missing = {"category", "phrase"} - set(df.columns)
    if missing:
        raise InputError(f"{path}: missing column(s) {sorted(missing)}")
    entries: Dict[str, List[SlangPhrase]] = {}
    for row in df.itertuples(index=False):
        tag = getattr(row, "tag", "")
        entries.setdefault(row.category.strip(), []).append(SlangPhrase(row.phrase.strip(), tag.strip()))
    return SlangDictionary({k: tuple(v) for k, v in entries.items()}, p)


_DEFAULT_TEMPLATES = {
    ("novice", "fear"): ("{event}又跌了还让不让人活了", "底在哪里啊我真的扛不住了", "满仓被套心里发慌"),
    ("novice", "joy"): ("{event}大涨今天赚麻了", "红红火火一片全是红的", "账户终于回本了开心"),
    ("novice", "sadness"): ("上周五割肉了现在后悔死了", "{event}一直绿心情很低落", "亏得连饭都不想吃"),
    ("novice", "anticipation"): ("尾盘突然拉升要不要追进去博一把", "明天{event}肯定还要涨", "感觉要起飞了准备加仓"),
    ("novice", "anger"): ("又是外资抄底内资砸盘", "{event}天天割韭菜太过分了", "庄家太黑了受不了"),
    ("veteran", "fear"): ("{event}量能不足要注意风险", "高位放量先减仓观望", "杠杆太高迟早出事"),
    ("veteran", "joy"): ("{event}结构健康可以持有", "趋势确认按计划止盈", "板块轮动节奏不错"),
    ("veteran", "sadness"): ("这波行情错过了只能等下一次", "{event}走弱仓位控制不好", "复盘下来还是操作失误"),
    ("veteran", "anticipation"): ("底部区域开始分批建仓", "{event}情绪冰点往往是机会", "耐心等待右侧信号"),
    ("veteran", "anger"): ("拉指数出个股老套路了", "{event}消息面又在带节奏", "新手追高被收割不意外"),
}

CONNECTIVES = ("但是", "所以", "然后", "而且", "因为", "不过", "可是")


def _sanitize(text: str) -> str:
    """Remove terminators and whitespace so a piece never splits or strips."""
    return "".join(ch for ch in text if ch not in C.TERMINATORS and not ch.isspace())


@dataclass(frozen=True)
class TemplateBank:
    cells: Mapping[Tuple[str, str], Tuple[str, ...]] = field(default_factory=lambda: dict(_DEFAULT_TEMPLATES))

    def __post_init__(self) -> None:
        for key, phrases in self.cells.items():
            if not phrases or not all(_sanitize(p.replace("{event}", "")) or "{event}" in p for p in phrases):
                raise InputError(f"template cell {key[0]}/{key[1]} is empty")

    def get(self, persona: str, emotion: str) -> Tuple[str, ...]:
        phrases = self.cells.get((persona, emotion))
        if not phrases:
            raise InputError(f"no templates for {persona}/{emotion}")
        return phrases

    def emotions(self, persona: str) -> Tuple[str, ...]:
        return tuple(sorted(e for p, e in self.cells if p == persona))


def load_templates(path: str) -> TemplateBank:
    """TOML with one table per persona: ``[novice] fear = ["...", ...]``."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: cannot read templates: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise InputError(f"{path}: invalid TOML: {exc}") from None
    cells = {}
    for persona, table in data.items():
        persona = Persona.parse(persona).value
        for emotion, phrases in table.items():
            cells[(persona, emotion)] = tuple(str(p) for p in phrases)
    return TemplateBank(cells)


# ---------------------------------------------------------------------------
# Synthetic comments
# ---------------------------------------------------------------------------

CONDITION_EMOTIONS = {
    "crash": {"fear": 0.4, "sadness": 0.3, "anger": 0.3},
    "rally": {"joy": 0.5, "anticipation": 0.5},
    "flat": {"fear": 0.2, "joy": 0.2, "sadness": 0.2, "anticipation": 0.2, "anger": 0.2},
}

EMOTION_SLANG = {
    "fear": ("Despair", "Denial"),
    "sadness": ("Despair",),
    "anger": ("Cynicism", "Denial"),
    "joy": ("Euphoria",),
    "anticipation": ("Euphoria", "Denial"),
}


@dataclass(frozen=True)
class MarketContext:
    condition: str = "crash"
    event: str = "大盘"

    def __post_init__(self) -> None:
        if self.condition not in CONDITION_EMOTIONS:
            raise InputError(f"unknown market condition {self.condition!r}; choose from {sorted(CONDITION_EMOTIONS)}")


RHYTHM_REGIMES = {
    "robot": C.I_RHYTHM_ROBOT,
    "human": C.I_RHYTHM_HUMAN,
    "madman": C.I_RHYTHM_MADMAN,
}


@dataclass(frozen=True)
class RhythmPhysics:
    i_rhythm: float = C.I_RHYTHM_HUMAN
    p_leap: float = 0.0

    @classmethod
    def regime(cls, name: str, p_leap: float = 0.0) -> "RhythmPhysics":
        if name not in RHYTHM_REGIMES:
            raise InputError(f"unknown rhythm regime {name!r}; choose from {sorted(RHYTHM_REGIMES)}")
        return cls(RHYTHM_REGIMES[name], p_leap)

    def __post_init__(self) -> None:
        if not 0.0 <= self.i_rhythm <= C.I_RHYTHM_MAX:
            raise InputError(f"I_rhythm must be in [0, {C.I_RHYTHM_MAX}], got {self.i_rhythm!r}")
        if not 0.0 <= self.p_leap <= 1.0:
            raise InputError(f"P_leap must be in [0, 1], got {self.p_leap!r}")


@dataclass(frozen=True)
class GeneratedComment:
    persona: Persona
    emotion: str
    text: str
    lengths: Tuple[int, ...]
    slang: bool = False
    leaps: int = 0

    def to_row(self) -> dict:
        return {
            "persona": self.persona.value,
            "emotion": self.emotion,
            "slang": self.slang,
            "leaps": self.leaps,
            "sentences": len(self.lengths),
            "text": self.text,
        }


def rhythm_params(i_rhythm: float, cfg: TextlabConfig, phase: float = 0.0) -> OscillationParams:
    return OscillationParams(
        base_length=cfg.base_length,
        amplitude=cfg.amplitude * i_rhythm,
        omega=cfg.omega,
        phase=phase,
        noise=cfg.noise * i_rhythm,
        min_len=2,
    )


def _strip_connective(piece: str) -> str:
    for c in CONNECTIVES:
        if piece.startswith(c) and len(piece) > len(c):
            return piece[len(c):]
    return piece


def _fit(rng: np.random.Generator, phrases: Sequence[str], length: int, event: str, fragment: bool) -> str:
    """Content of exactly *length* characters built from *phrases*."""
    pool = [_sanitize(p.replace("{event}", event)) for p in phrases]
    pool = [p for p in pool if p] or ["嗯"]
    order = rng.permutation(len(pool))
    text = ""
    i = 0
    while len(text) < length:
        piece = pool[order[i % len(pool)]]
        if fragment and not text:
            piece = _strip_connective(piece)
        text = f"{text}，{piece}" if text else piece
        i += 1
    return text[:length]


def _weights(persona_dist: Mapping[Union[str, Persona], float]) -> Tuple[List[Persona], np.ndarray]:
    personas = sorted((Persona.parse(k) for k in persona_dist), key=lambda p: p.value)
    weights = np.array([float(persona_dist.get(p, persona_dist.get(p.value, 0.0))) for p in personas])
    if np.any(weights < 0) or abs(float(weights.sum()) - 1.0) > 1e-9:
        raise InputError(f"persona weights must be non-negative and sum to 1, got {weights.sum()!r}")
    return personas, weights


def _comment(
    rng: np.random.Generator,
    persona: Persona,
    context: MarketContext,
    physics: RhythmPhysics,
    templates: TemplateBank,
    cfg: TextlabConfig,
) -> Tuple[str, List[Tuple[str, int, bool]], int]:
    emotions = CONDITION_EMOTIONS[context.condition]
    names = sorted(emotions)
    emotion = names[int(rng.choice(len(names), p=[emotions[e] for e in names]))]

    k = int(rng.integers(2, 6))
    schedule = oscillation_schedule(rhythm_params(physics.i_rhythm, cfg, rng.uniform(0, 2 * math.pi)), k, rng)

    # run-on merges
    merge_p = min(C.RUN_ON_CAP, cfg.run_on_rate * physics.i_rhythm)
    merged: List[int] = []
    for length in schedule:
        if merged and rng.random() < merge_p:
            merged[-1] += length
        else:
            merged.append(length)

    # fragmentation
    split_p = min(C.FRAGMENT_CAP, cfg.fragment_rate * physics.i_rhythm)
    pieces: List[Tuple[int, bool]] = []
    for length in merged:
        if length >= 2 and rng.random() < split_p:
            cut = int(rng.integers(1, length))
            pieces += [(cut, False), (length - cut, True)]
        else:
            pieces.append((length, False))

    sentences = []
    leaps = 0
    others = [e for e in templates.emotions(persona.value) if e != emotion]
    for length, fragment in pieces:
        cell = emotion
        if others and rng.random() < physics.p_leap:
            cell = others[int(rng.integers(len(others)))]
            leaps += 1
        sentences.append((_fit(rng, templates.get(persona.value, cell), length, context.event, fragment), length, fragment))
    return emotion, sentences, leaps


def generate_synthetic_comments(
    context: MarketContext,
    persona_dist: Mapping[Union[str, Persona], float],
    physics: RhythmPhysics,
    slang: SlangDictionary,
    templates: TemplateBank,
    n: int,
    seed: int = 0,
    cfg: Optional[TextlabConfig] = None,
) -> List[GeneratedComment]:
    """
    *n* persona-tagged comments.  Sentence lengths follow the rhythm
    oscillator scaled by ``I_rhythm``; run-on merges and fragmentation
    widen the length distribution as ``I_rhythm`` grows.  Exactly
    ``round(p * n)`` comments carry a slang sentence.
    """
    if n < 0:
        raise InputError(f"comment count must be >= 0, got {n}")
    cfg = cfg or TextlabConfig()
    personas, weights = _weights(persona_dist)

    n_slang = int(math.floor(slang.p * n + 0.5))
    slang_idx = set(np.random.default_rng([seed, n, 1]).permutation(n)[:n_slang].tolist())
    terminators = ("。", "！", "？")

    out = []
    for i in range(n):
        rng = np.random.default_rng([seed, i])
        persona = personas[int(rng.choice(len(personas), p=weights))]
        emotion, sentences, leaps = _comment(rng, persona, context, physics, templates, cfg)

        parts = [text + terminators[int(rng.integers(len(terminators)))] for text, _, _ in sentences]
        lengths = [length for _, length, _ in sentences]
        has_slang = i in slang_idx
        if has_slang:
            cats = [c for c in EMOTION_SLANG.get(emotion, SLANG_CATEGORIES) if c in slang.entries]
            cats = cats or sorted(slang.entries)
            phrases = slang.entries[cats[int(rng.integers(len(cats)))]]
            phrase = _sanitize(phrases[int(rng.integers(len(phrases)))].phrase) or "GOGOGO"
            parts.append(phrase + "！")
            lengths.append(len(phrase))
        out.append(GeneratedComment(persona, emotion, "".join(parts), tuple(lengths), has_slang, leaps))

    logger.debug("generated %d comments (I_rhythm=%.2f, %d with slang)", n, physics.i_rhythm, n_slang)
    return out


def sentence_lengths(comments: Sequence[GeneratedComment]) -> np.ndarray:
    """Lengths of every sentence in *comments*, via segmentation."""
    return np.array([s.length for c in comments for s in segment_sentences(c.text)], dtype=float)
