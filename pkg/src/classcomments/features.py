"""TF-IDF term weights and natural-language pattern indicators.

Feature ids are namespaced: ``tfidf:<term>`` for stemmed terms and
``pat:<pattern_id>`` for pattern hits.  A feature vector is a plain
``dict[str, float]`` without zero entries.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import EmptyCorpus, NamespaceCollision, SchemaError, UnknownMatcherKind
from .textproc import PREPROCESSING_CHAIN, Sentence, preprocess, split_sentences, tokenize

FeatureVector = dict[str, float]

TFIDF_PREFIX = "tfidf:"
PATTERN_PREFIX = "pat:"
DEFAULT_MIN_DF = 2

TFIDF_DESCRIPTOR = "tf=raw-count; idf=ln((1+N)/(1+df))+1; l2-normalized"


class FeatureMode(enum.Enum):
    TFIDF_ONLY = "tfidf"
    NLP_PLUS_TFIDF = "nlp+tfidf"


# ------------------------------------------------------------------ TF-IDF


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]
    doc_freq: Mapping[str, int]
    n_docs: int
    min_df: int = DEFAULT_MIN_DF

    def __contains__(self, term: str) -> bool:
        return term in self.doc_freq

    def __len__(self) -> int:
        return len(self.terms)

    def idf(self, term: str) -> float:
        return math.log((1 + self.n_docs) / (1 + self.doc_freq[term])) + 1.0

    def to_dict(self) -> dict:
        return {
            "n_docs": self.n_docs,
            "min_df": self.min_df,
            "terms": [[t, self.doc_freq[t]] for t in self.terms],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Vocabulary":
        pairs = [(str(t), int(df)) for t, df in data["terms"]]
        return cls(tuple(t for t, _ in pairs), dict(pairs), int(data["n_docs"]), int(data["min_df"]))


def build_vocabulary(corpus: Sequence[Sequence[str]], min_df: int = DEFAULT_MIN_DF) -> Vocabulary:
    if not corpus:
        raise EmptyCorpus("cannot build a vocabulary from an empty corpus")
    df: Counter[str] = Counter()
    for doc in corpus:
        df.update(set(doc))
    kept = {t: c for t, c in df.items() if c >= min_df}
    return Vocabulary(tuple(sorted(kept)), kept, len(corpus), min_df)


def tfidf_vector(doc: Sequence[str], vocab: Vocabulary) -> FeatureVector:
    counts = Counter(t for t in doc if t in vocab)
    if not counts:
        return {}
    raw = {t: c * vocab.idf(t) for t, c in counts.items()}
    norm = math.sqrt(math.fsum(w * w for w in raw.values()))
    return {TFIDF_PREFIX + t: raw[t] / norm for t in sorted(raw)}


# ---------------------------------------------------------------- patterns

_CHAR_CLASSES = {
    "alpha": "[A-Za-z]",
    "digit": "[0-9]",
    "alnum": "[A-Za-z0-9]",
    "word": "[A-Za-z0-9_]",
    "upper": "[A-Z]",
    "lower": "[a-z]",
    "space": r"\s",
    "nonspace": r"\S",
}
_ANCHORS = {"start": "^", "end": "$", "word": r"\b"}


def _compile_regex_lite(sequence: list[dict], where: str) -> re.Pattern:
    parts = []
    for k, item in enumerate(sequence):
        loc = f"{where}[{k}]"
        if "anchor" in item:
            if item["anchor"] not in _ANCHORS:
                raise SchemaError(loc, f"unknown anchor {item['anchor']!r}")
            parts.append(_ANCHORS[item["anchor"]])
            continue
        if "lit" in item:
            atom = "(?:" + re.escape(str(item["lit"])) + ")"
        elif "class" in item:
            if item["class"] not in _CHAR_CLASSES:
                raise SchemaError(loc, f"unknown character class {item['class']!r}")
            atom = _CHAR_CLASSES[item["class"]]
        else:
            raise SchemaError(loc, "item needs one of 'lit', 'class', 'anchor'")
        lo = int(item.get("min", 1))
        hi = item.get("max", lo if "min" in item else 1)
        if hi is None:
            quant = f"{{{lo},}}"
        else:
            quant = f"{{{lo},{int(hi)}}}"
        parts.append(atom + quant)
    return re.compile("".join(parts))


def _match_template(template: Sequence[str], tokens: Sequence[str]) -> bool:
    """Ordered token match; ``*`` is a gap of any length, other items are adjacent."""
    groups: list[list[str]] = [[]]
    for item in template:
        if item == "*":
            groups.append([])
        else:
            groups[-1].append(item)
    groups = [g for g in groups if g]
    pos = 0
    for g in groups:
        width = len(g)
        while pos + width <= len(tokens) and list(tokens[pos : pos + width]) != g:
            pos += 1
        if pos + width > len(tokens):
            return False
        pos += width
    return True


@dataclass(frozen=True)
class Pattern:
    id: str
    kind: str
    spec: Mapping
    description: str = ""
    _compiled: tuple = field(default=(), compare=False, repr=False)

    def matches(self, sentence: str, tokens: Sequence[str]) -> bool:
        if self.kind == "keyword-set":
            kw = self._compiled[0]
            return any(t in kw for t in tokens)
        if self.kind == "prefix":
            return any(list(tokens[: len(p)]) == list(p) for p in self._compiled)
        if self.kind == "template":
            return any(_match_template(t, tokens) for t in self._compiled)
        return any(rx.search(sentence) for rx in self._compiled)


_KINDS = ("keyword-set", "prefix", "template", "regex-lite")


def _compile_pattern(entry: dict, where: str) -> Pattern:
    unknown = set(entry) - {"id", "kind", "spec", "description"}
    if unknown:
        raise SchemaError(where, f"unknown field(s) {sorted(unknown)}")
    pid = entry.get("id")
    if not isinstance(pid, str) or not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", pid):
        raise SchemaError(f"{where}.id", f"invalid pattern id {pid!r}")
    kind = entry.get("kind")
    if kind not in _KINDS:
        raise UnknownMatcherKind(f"{where}: unknown matcher kind {kind!r}")
    spec = entry.get("spec")
    if not isinstance(spec, dict):
        raise SchemaError(f"{where}.spec", "must be an object")
    try:
        if kind == "keyword-set":
            compiled = (frozenset(str(k).lower() for k in spec["keywords"]),)
        elif kind == "prefix":
            compiled = tuple(tuple(str(w).lower() for w in p) for p in spec["prefixes"])
        elif kind == "template":
            compiled = tuple(tuple(str(w).lower() for w in t) for t in spec["templates"])
        else:
            compiled = tuple(
                _compile_regex_lite(seq, f"{where}.spec.alternatives[{k}]")
                for k, seq in enumerate(spec["alternatives"])
            )
    except KeyError as exc:
        raise SchemaError(f"{where}.spec", f"missing key {exc.args[0]!r} for kind {kind}") from None
    return Pattern(pid, kind, spec, str(entry.get("description", "")), compiled)


@dataclass(frozen=True)
class PatternLibrary:
    version: str
    patterns: tuple[Pattern, ...]

    @property
    def fingerprint(self) -> str:
        """Hash of every matcher, so silent edits without a version bump are detectable."""
        payload = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    @property
    def ids(self) -> list[str]:
        return [p.id for p in self.patterns]

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "patterns": [
                {"id": p.id, "kind": p.kind, "spec": p.spec, "description": p.description} for p in self.patterns
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "PatternLibrary":
        if not isinstance(doc, dict):
            raise SchemaError("$", "pattern library must be an object")
        unknown = set(doc) - {"version", "patterns"}
        if unknown:
            raise SchemaError("$", f"unknown field(s) {sorted(unknown)}")
        if not isinstance(doc.get("version"), str):
            raise SchemaError("$.version", "missing or not a string")
        seen = set()
        patterns = []
        for k, entry in enumerate(doc.get("patterns") or []):
            pat = _compile_pattern(entry, f"$.patterns[{k}]")
            if pat.id in seen:
                raise SchemaError(f"$.patterns[{k}].id", f"duplicate pattern id {pat.id!r}")
            seen.add(pat.id)
            patterns.append(pat)
        return cls(doc["version"], tuple(patterns))


def load_pattern_library(path: str | Path | None = None) -> PatternLibrary:
    """Load a pattern library JSON file; ``None`` loads the shipped default."""
    if path is None:
        text = resources.files("classcomments").joinpath("data/default_patterns.json").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return PatternLibrary.from_dict(json.loads(text))


def pattern_features(sentences: Iterable[Sentence], library: PatternLibrary) -> FeatureVector:
    hits: set[str] = set()
    for sentence in sentences:
        tokens = tokenize(sentence.text)
        for pat in library.patterns:
            if pat.id not in hits and pat.matches(sentence.text, tokens):
                hits.add(pat.id)
    return {PATTERN_PREFIX + pid: 1.0 for pid in sorted(hits)}


def combine(tfidf: FeatureVector, patterns: FeatureVector) -> FeatureVector:
    clash = tfidf.keys() & patterns.keys()
    if clash:
        raise NamespaceCollision(f"feature ids present in both vectors: {sorted(clash)}")
    out = dict(tfidf)
    out.update(patterns)
    return out


# -------------------------------------------------------------- featurizer


@dataclass(frozen=True)
class AnalyzedText:
    """Training-independent analysis of one comment: stemmed terms and pattern hits."""

    terms: tuple[str, ...]
    patterns: FeatureVector


@dataclass
class Featurizer:
    """The comment -> feature vector pipeline.

    ``fit`` builds the vocabulary; ``transform`` vectorizes with it.
    """

    library: PatternLibrary
    mode: FeatureMode = FeatureMode.NLP_PLUS_TFIDF
    min_df: int = DEFAULT_MIN_DF
    vocabulary: Vocabulary | None = None

    def analyze(self, text: str) -> AnalyzedText:
        pats = pattern_features(split_sentences(text), self.library) if self.mode is FeatureMode.NLP_PLUS_TFIDF else {}
        return AnalyzedText(tuple(preprocess(text)), pats)

    def fit_analyzed(self, docs: Sequence[AnalyzedText]) -> "Featurizer":
        self.vocabulary = build_vocabulary([d.terms for d in docs], self.min_df)
        return self

    def fit(self, texts: Sequence[str]) -> "Featurizer":
        return self.fit_analyzed([self.analyze(t) for t in texts])

    def transform_analyzed(self, doc: AnalyzedText) -> FeatureVector:
        if self.vocabulary is None:
            raise RuntimeError("featurizer is not fitted")
        return combine(tfidf_vector(doc.terms, self.vocabulary), doc.patterns)

    def transform(self, text: str) -> FeatureVector:
        return self.transform_analyzed(self.analyze(text))

    def descriptor(self) -> dict:
        return dict(PREPROCESSING_CHAIN, tfidf=TFIDF_DESCRIPTOR, min_df=self.min_df, feature_mode=self.mode.value)
