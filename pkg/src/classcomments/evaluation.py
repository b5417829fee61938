"""Stratified k-fold cross-validation and precision / recall / F1 reporting.

Each category is evaluated as its own binary problem with its own folds.
Inside every fold the vocabulary and the class balancing are computed from
the training split only, and confusion counts are pooled over folds before
metrics are computed.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
import statistics
from dataclasses import asdict, dataclass, field
from typing import Sequence

from .errors import DegenerateLabel, FingerprintMismatch, TooFewInstances
from .features import AnalyzedText, FeatureMode, Featurizer, PatternLibrary, load_pattern_library
from .learners import Algorithm, LearnerParams, balance, decide, train_binary
from .taxonomy import LabeledComment, Taxonomy, dumps_labeled

REPORT_FORMAT_VERSION = 1
METRICS = ("precision", "recall", "f1")


@dataclass(frozen=True)
class FoldAssignment:
    k: int
    assignment: tuple[int, ...]

    def fold(self, j: int) -> list[int]:
        return [i for i, f in enumerate(self.assignment) if f == j]

    def sizes(self) -> list[int]:
        counts = [0] * self.k
        for f in self.assignment:
            counts[f] += 1
        return counts


def stratified_kfold(
    dataset: Sequence[LabeledComment] | Sequence[bool],
    category: str | None,
    k: int,
    seed: int,
) -> FoldAssignment:
    """Shuffle positives and negatives separately, then deal them round-robin.

    *dataset* is either labeled comments stratified on *category*, or plain
    booleans (pass ``category=None``).  Negatives continue the deal where the
    positives stopped, so both the overall fold sizes and the per-fold
    positive counts differ by at most one.
    """
    if category is None:
        labels = [bool(y) for y in dataset]
    else:
        labels = [category in lc.labels for lc in dataset]
    if k < 2:
        raise ValueError("k must be >= 2")
    if len(labels) < k:
        raise TooFewInstances(f"{len(labels)} instances cannot fill {k} folds")
    rng = random.Random(seed)
    pos = [i for i, y in enumerate(labels) if y]
    neg = [i for i, y in enumerate(labels) if not y]
    rng.shuffle(pos)
    rng.shuffle(neg)
    assignment = [0] * len(labels)
    for slot, i in enumerate(pos + neg):
        assignment[i] = slot % k
    return FoldAssignment(k, tuple(assignment))


@dataclass
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def add(self, predicted: bool, actual: bool) -> None:
        if predicted and actual:
            self.tp += 1
        elif predicted:
            self.fp += 1
        elif actual:
            self.fn += 1
        else:
            self.tn += 1

    def __iadd__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        self.tp += other.tp
        self.fp += other.fp
        self.fn += other.fn
        self.tn += other.tn
        return self


def precision(c: ConfusionCounts) -> float:
    denom = c.tp + c.fp
    return c.tp / denom if denom else 0.0


def recall(c: ConfusionCounts) -> float:
    denom = c.tp + c.fn
    return c.tp / denom if denom else 0.0


def f1(c: ConfusionCounts) -> float:
    # harmonic mean of precision and recall, as one exactly rounded division
    denom = 2 * c.tp + c.fp + c.fn
    return 2 * c.tp / denom if c.tp else 0.0


def zero_division_flags(c: ConfusionCounts) -> list[str]:
    """Names of metrics whose value came from the 0/0 := 0 rule."""
    flags = []
    if c.tp + c.fp == 0:
        flags.append("precision")
    if c.tp + c.fn == 0:
        flags.append("recall")
    if c.tp == 0:
        flags.append("f1")
    return flags


@dataclass
class CategoryResult:
    evaluated: bool
    reason: str = ""
    confusion: ConfusionCounts = field(default_factory=ConfusionCounts)
    precision: float = 0.0
    recall: float = 0.0
    f1: float = 0.0
    support: int = 0
    folds_evaluated: int = 0
    zero_division: list[str] = field(default_factory=list)
    fold_f1: list[float] = field(default_factory=list)

    @property
    def fold_f1_variance(self) -> float:
        return statistics.pvariance(self.fold_f1) if len(self.fold_f1) > 1 else 0.0

    def to_dict(self) -> dict:
        out = {"evaluated": self.evaluated}
        if not self.evaluated:
            out["reason"] = self.reason
            out["support"] = self.support
            return out
        out.update(
            confusion=asdict(self.confusion),
            precision=self.precision,
            recall=self.recall,
            f1=self.f1,
            support=self.support,
            folds_evaluated=self.folds_evaluated,
            zero_division=list(self.zero_division),
            fold_f1=list(self.fold_f1),
            fold_f1_variance=self.fold_f1_variance,
        )
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "CategoryResult":
        if not d["evaluated"]:
            return cls(False, d.get("reason", ""), support=d.get("support", 0))
        return cls(
            True,
            "",
            ConfusionCounts(**d["confusion"]),
            d["precision"],
            d["recall"],
            d["f1"],
            d["support"],
            d["folds_evaluated"],
            list(d["zero_division"]),
            list(d["fold_f1"]),
        )


@dataclass
class EvalReport:
    per_category: dict[str, CategoryResult]
    fingerprint: dict

    def evaluated(self) -> dict[str, CategoryResult]:
        return {k: v for k, v in self.per_category.items() if v.evaluated}

    @property
    def macro(self) -> dict[str, float]:
        res = list(self.evaluated().values())
        if not res:
            return {m: 0.0 for m in METRICS}
        return {m: math.fsum(getattr(r, m) for r in res) / len(res) for m in METRICS}

    @property
    def weighted(self) -> dict[str, float]:
        res = list(self.evaluated().values())
        total = sum(r.support for r in res)
        if not total:
            return {m: 0.0 for m in METRICS}
        return {m: math.fsum(getattr(r, m) * r.support for r in res) / total for m in METRICS}

    def to_dict(self) -> dict:
        return {
            "format_version": REPORT_FORMAT_VERSION,
            "fingerprint": self.fingerprint,
            "per_category": {k: v.to_dict() for k, v in self.per_category.items()},
            "macro": self.macro,
            "weighted": self.weighted,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False, allow_nan=False) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "EvalReport":
        return cls({k: CategoryResult.from_dict(v) for k, v in d["per_category"].items()}, d["fingerprint"])

    def to_text(self) -> str:
        return render_table(self)


@dataclass
class FoldState:
    featurizer: Featurizer
    balanced: list[int]
    model: object


def train_fold(
    analyzed: Sequence[AnalyzedText],
    truth: Sequence[bool],
    folds: FoldAssignment,
    j: int,
    algorithm: Algorithm,
    library: PatternLibrary,
    feature_mode: FeatureMode,
    params: LearnerParams,
    seed: int,
    min_df: int = 2,
) -> FoldState:
    """Fit vocabulary, balancing and classifier for fold *j* from its training split only.

    Only positions outside fold *j* are read from *analyzed* and *truth*.
    """
    train = [p for p, f in enumerate(folds.assignment) if f != j]
    featurizer = Featurizer(library, feature_mode, min_df).fit_analyzed([analyzed[p] for p in train])
    # balancing only looks at the labels, so balance positions and vectorize after
    balanced = [p for p, _ in balance([(p, truth[p]) for p in train], seed)]
    data = [(featurizer.transform_analyzed(analyzed[p]), truth[p]) for p in balanced]
    return FoldState(featurizer, balanced, train_binary(data, algorithm, params, seed))


def dataset_fingerprint(labeled: Sequence[LabeledComment]) -> str:
    return hashlib.sha256(dumps_labeled(labeled).encode("utf-8")).hexdigest()


def cross_validate(
    labeled: Sequence[LabeledComment],
    taxonomy: Taxonomy,
    algorithm: Algorithm,
    feature_mode: FeatureMode,
    k: int = 10,
    seed: int = 42,
    library: PatternLibrary | None = None,
    params: LearnerParams = LearnerParams(),
    threshold: float = 0.5,
    min_df: int = 2,
) -> EvalReport:
    """Per-category stratified k-fold evaluation.

    Category at taxonomy position *c* draws its folds with seed ``seed + c``;
    fold *j* of it balances and trains with seed ``seed + c + j``.
    """
    if len(labeled) < k:
        raise TooFewInstances(f"dataset has {len(labeled)} comments, fewer than k={k}")
    library = library or load_pattern_library()
    featurizer = Featurizer(library, feature_mode, min_df)
    analyzed = [featurizer.analyze(lc.comment.raw_text) for lc in labeled]
    present = {lc.comment.language for lc in labeled}

    per_category: dict[str, CategoryResult] = {}
    for c, cat in enumerate(taxonomy.categories):
        if not cat.languages & present:
            continue
        members = [i for i, lc in enumerate(labeled) if cat.applies_to(lc.comment.language)]
        truth = [cat.name in labeled[i].labels for i in members]
        n_pos = sum(truth)
        n_neg = len(truth) - n_pos
        if n_pos < k or n_neg < k:
            per_category[cat.name] = CategoryResult(
                False, f"{n_pos} positives / {n_neg} negatives; need at least k={k} of each", support=n_pos
            )
            continue
        folds = stratified_kfold(truth, None, k, seed + c)
        pooled = ConfusionCounts()
        fold_f1 = []
        folds_done = 0
        cat_analyzed = [analyzed[i] for i in members]
        for j in range(k):
            try:
                state = train_fold(
                    cat_analyzed, truth, folds, j, algorithm, library, feature_mode, params, seed + c + j, min_df
                )
            except DegenerateLabel:
                continue
            fold_counts = ConfusionCounts()
            for p in folds.fold(j):
                fv = state.featurizer.transform_analyzed(cat_analyzed[p])
                fold_counts.add(decide(state.model.score(fv), fv, threshold), truth[p])
            pooled += fold_counts
            fold_f1.append(f1(fold_counts))
            folds_done += 1
        per_category[cat.name] = CategoryResult(
            True,
            confusion=pooled,
            precision=precision(pooled),
            recall=recall(pooled),
            f1=f1(pooled),
            support=n_pos,
            folds_evaluated=folds_done,
            zero_division=zero_division_flags(pooled),
            fold_f1=fold_f1,
        )

    fingerprint = {
        "dataset_sha256": dataset_fingerprint(labeled),
        "n_comments": len(labeled),
        "taxonomy_version": taxonomy.version,
        "pattern_library_version": library.version,
        "pattern_library_fingerprint": library.fingerprint,
        "algorithm": algorithm.value,
        "feature_mode": feature_mode.value,
        "k": k,
        "seed": seed,
        "threshold": threshold,
        "min_df": min_df,
        "hyperparameters": asdict(params),
    }
    return EvalReport(per_category, fingerprint)


_COMPARABLE = ("dataset_sha256", "taxonomy_version", "k", "seed")


@dataclass
class ModeComparison:
    label_a: str
    label_b: str
    per_category: dict[str, dict[str, float]]
    macro: dict[str, float]

    def to_dict(self) -> dict:
        return {"a": self.label_a, "b": self.label_b, "per_category": self.per_category, "macro": self.macro}

    def to_text(self) -> str:
        header = f"delta = ({self.label_b}) - ({self.label_a})"
        rows = [[name] + [f"{d[m]:+.4f}" for m in METRICS] for name, d in self.per_category.items()]
        rows.append(["macro"] + [f"{self.macro[m]:+.4f}" for m in METRICS])
        return header + "\n" + _align(["category", "d_precision", "d_recall", "d_f1"], rows)


def compare_modes(report_a: EvalReport, report_b: EvalReport) -> ModeComparison:
    """Per-category and macro deltas ``b - a``."""
    for key in _COMPARABLE:
        if report_a.fingerprint.get(key) != report_b.fingerprint.get(key):
            raise FingerprintMismatch(
                f"reports differ in {key}: {report_a.fingerprint.get(key)!r} vs {report_b.fingerprint.get(key)!r}"
            )
    both = [n for n, r in report_a.evaluated().items() if n in report_b.evaluated()]
    per = {
        n: {m: getattr(report_b.per_category[n], m) - getattr(report_a.per_category[n], m) for m in METRICS}
        for n in both
    }
    macro_a, macro_b = report_a.macro, report_b.macro
    return ModeComparison(
        _label(report_a), _label(report_b), per, {m: macro_b[m] - macro_a[m] for m in METRICS}
    )


def _label(report: EvalReport) -> str:
    fp = report.fingerprint
    return f"{fp.get('algorithm')}/{fp.get('feature_mode')}"


def _align(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
    lines = []
    for r in [header] + rows:
        cells = [r[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(r[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def render_table(report: EvalReport) -> str:
    fp = report.fingerprint
    head = [f"# {key}: {json.dumps(fp[key]) if isinstance(fp[key], dict) else fp[key]}" for key in fp]
    header = ["category", "tp", "fp", "fn", "tn", "precision", "recall", "f1", "support", "folds", "note"]
    rows = []
    for name, r in report.per_category.items():
        if not r.evaluated:
            rows.append([name, "-", "-", "-", "-", "-", "-", "-", str(r.support), "0", "unevaluated: " + r.reason])
            continue
        c = r.confusion
        note = ("0/0: " + ",".join(r.zero_division)) if r.zero_division else ""
        rows.append(
            [name, str(c.tp), str(c.fp), str(c.fn), str(c.tn), f"{r.precision:.4f}", f"{r.recall:.4f}", f"{r.f1:.4f}",
             str(r.support), str(r.folds_evaluated), note]
        )
    for label, agg in (("macro", report.macro), ("weighted", report.weighted)):
        rows.append([label, "", "", "", "", f"{agg['precision']:.4f}", f"{agg['recall']:.4f}", f"{agg['f1']:.4f}", "", "", ""])
    return "\n".join(head) + "\n\n" + _align(header, rows)
