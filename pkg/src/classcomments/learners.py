"""Binary-relevance learners: multinomial Naive Bayes, a C4.5-style tree, and a random forest.

Every category of the taxonomy becomes its own binary problem.  Training sets
are balanced per category by seeded undersampling of the majority class.

Randomness comes exclusively from :class:`random.Random` instances seeded
with explicit integers, so models are pure functions of (data,
hyperparameters, seed).
"""

from __future__ import annotations

import enum
import json
import math
import random
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import DegenerateLabel, EmptyDataset, LanguageMismatch, ModelFormatError
from .extraction import SUPPORTED_LANGUAGES, ClassComment, Language
from .features import FeatureMode, FeatureVector, Featurizer, PatternLibrary, Vocabulary
from .taxonomy import LabeledComment, Taxonomy

FORMAT_VERSION = 1
DEFAULT_THRESHOLD = 0.5

BinaryData = Sequence[tuple[FeatureVector, bool]]


class Algorithm(enum.Enum):
    NB = "nb"
    TREE = "tree"
    FOREST = "forest"


@dataclass(frozen=True)
class LearnerParams:
    alpha: float = 1.0
    max_depth: int | None = 20
    min_leaf: int = 1
    n_trees: int = 100
    feature_subsample: str = "sqrt"
    bootstrap: bool = True


def _split_classes(data: BinaryData) -> tuple[list, list]:
    pos = [d for d in data if d[1]]
    neg = [d for d in data if not d[1]]
    return pos, neg


def _require_both_classes(data: BinaryData) -> None:
    pos, neg = _split_classes(data)
    if not pos or not neg:
        raise DegenerateLabel(f"need both classes, got {len(pos)} positive / {len(neg)} negative")


def balance(dataset: BinaryData, seed: int) -> list[tuple[FeatureVector, bool]]:
    """Undersample the majority class to the minority size, then shuffle."""
    pos, neg = _split_classes(dataset)
    if not pos or not neg:
        raise DegenerateLabel(f"need both classes, got {len(pos)} positive / {len(neg)} negative")
    rng = random.Random(seed)
    if len(pos) > len(neg):
        pos = rng.sample(pos, len(neg))
    elif len(neg) > len(pos):
        neg = rng.sample(neg, len(pos))
    out = pos + neg
    rng.shuffle(out)
    return out


def decide(score: float, fv: FeatureVector, threshold: float) -> bool:
    """Binary decision shared by classification and evaluation.

    A score of exactly 0.5 on an empty feature vector carries no evidence and
    resolves to negative; otherwise the comparison is inclusive.
    """
    if not fv and score == 0.5:
        return False
    return score >= threshold


# ------------------------------------------------------------ Naive Bayes


@dataclass
class NaiveBayesModel:
    class_log_prior: tuple[float, float]  # (negative, positive)
    feature_log_likelihood: tuple[dict[str, float], dict[str, float]]
    smoothing_alpha: float
    vocab_size_at_train: int

    def score(self, fv: FeatureVector) -> float:
        return predict_proba_nb(self, fv)

    def to_dict(self) -> dict:
        neg, pos = self.feature_log_likelihood
        return {
            "kind": "nb",
            "smoothing_alpha": self.smoothing_alpha,
            "vocab_size_at_train": self.vocab_size_at_train,
            "class_log_prior": {"neg": self.class_log_prior[0], "pos": self.class_log_prior[1]},
            "feature_log_likelihood": {"neg": neg, "pos": pos},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NaiveBayesModel":
        fll = d["feature_log_likelihood"]
        return cls(
            (float(d["class_log_prior"]["neg"]), float(d["class_log_prior"]["pos"])),
            ({k: float(v) for k, v in fll["neg"].items()}, {k: float(v) for k, v in fll["pos"].items()}),
            float(d["smoothing_alpha"]),
            int(d["vocab_size_at_train"]),
        )


def train_naive_bayes(data: BinaryData, alpha: float = 1.0) -> NaiveBayesModel:
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    _require_both_classes(data)
    counts: tuple[dict[str, list[float]], ...] = ({}, {})
    n_class = [0, 0]
    features: set[str] = set()
    for fv, label in data:
        c = int(label)
        n_class[c] += 1
        for f, w in fv.items():
            if w != 0:
                features.add(f)
                counts[c].setdefault(f, []).append(w)
    vocab = sorted(features)
    V = len(vocab)
    loglik: tuple[dict[str, float], dict[str, float]] = ({}, {})
    for c in (0, 1):
        per_feature = {f: math.fsum(counts[c].get(f, ())) for f in vocab}
        total = math.fsum(per_feature.values())
        denom = total + alpha * V
        for f in vocab:
            loglik[c][f] = math.log((per_feature[f] + alpha) / denom)
    n = n_class[0] + n_class[1]
    prior = (math.log(n_class[0] / n), math.log(n_class[1] / n))
    return NaiveBayesModel(prior, loglik, float(alpha), V)


_EXP_SAFE = -700.0


def predict_proba_nb(model: NaiveBayesModel, fv: FeatureVector) -> float:
    """Posterior P(positive | fv); unseen features are ignored."""
    neg_ll, pos_ll = model.feature_log_likelihood
    s_neg = [model.class_log_prior[0]]
    s_pos = [model.class_log_prior[1]]
    for f, w in fv.items():
        if f in pos_ll:
            s_neg.append(w * neg_ll[f])
            s_pos.append(w * pos_ll[f])
    a, b = math.fsum(s_neg), math.fsum(s_pos)
    if min(a, b) > _EXP_SAFE:
        ea, eb = math.exp(a), math.exp(b)
        return eb / (ea + eb)
    # log-sum-exp with the larger score factored out
    if b >= a:
        return 1.0 / (1.0 + math.exp(a - b))
    e = math.exp(b - a)
    return e / (1.0 + e)


# ----------------------------------------------------------- decision tree


@dataclass
class TreeNode:
    # internal nodes have a feature; leaves have feature None
    feature: str | None = None
    threshold: float = 0.0
    left: int = -1
    right: int = -1
    label: bool = False
    pos_fraction: float = 0.0
    n: int = 0

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"class": int(self.label), "pos_fraction": self.pos_fraction, "n": self.n}
        return {"feature": self.feature, "threshold": self.threshold, "left": self.left, "right": self.right}

    @classmethod
    def from_dict(cls, d: dict) -> "TreeNode":
        if "feature" in d:
            return cls(d["feature"], float(d["threshold"]), int(d["left"]), int(d["right"]))
        return cls(label=bool(d["class"]), pos_fraction=float(d["pos_fraction"]), n=int(d["n"]))


@dataclass
class DecisionTreeModel:
    nodes: list[TreeNode]
    max_depth: int | None
    min_leaf: int

    def leaf(self, fv: FeatureVector) -> TreeNode:
        node = self.nodes[0]
        while node.feature is not None:
            node = self.nodes[node.left if fv.get(node.feature, 0.0) <= node.threshold else node.right]
        return node

    def score(self, fv: FeatureVector) -> float:
        return self.leaf(fv).pos_fraction

    def predict(self, fv: FeatureVector) -> bool:
        return self.leaf(fv).label

    @property
    def depth(self) -> int:
        def walk(i: int) -> int:
            node = self.nodes[i]
            return 0 if node.is_leaf else 1 + max(walk(node.left), walk(node.right))

        return walk(0)

    def to_dict(self) -> dict:
        return {
            "kind": "tree",
            "max_depth": self.max_depth,
            "min_leaf": self.min_leaf,
            "nodes": [n.to_dict() for n in self.nodes],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DecisionTreeModel":
        return cls([TreeNode.from_dict(n) for n in d["nodes"]], d["max_depth"], int(d["min_leaf"]))


def _design_matrix(data: BinaryData) -> tuple[list[str], np.ndarray, np.ndarray]:
    ids = sorted({f for fv, _ in data for f, w in fv.items() if w != 0})
    col = {f: j for j, f in enumerate(ids)}
    X = np.zeros((len(data), len(ids)))
    for i, (fv, _) in enumerate(data):
        for f, w in fv.items():
            if w != 0:
                X[i, col[f]] = w
    y = np.fromiter((bool(lab) for _, lab in data), dtype=bool, count=len(data))
    return ids, X, y


def _entropy(p: np.ndarray) -> np.ndarray:
    h = np.zeros_like(p)
    for part in (p, 1.0 - p):
        h -= part * np.log2(part, out=np.zeros_like(part), where=part > 0)
    return h


def binary_entropy(pos: int, n: int) -> float:
    """Entropy in bits of a node holding *pos* positives out of *n*."""
    return float(_entropy(np.array([pos / n]))[0]) if n else 0.0


_MIN_GAIN = 1e-12


class _TreeBuilder:
    def __init__(self, ids, X, y, max_depth, min_leaf, rng: random.Random | None, n_candidates: int | None):
        self.ids = ids
        self.X = X
        self.y = y
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.rng = rng
        self.n_candidates = n_candidates

    def _best_split(self, idx: np.ndarray) -> tuple[int, float] | None:
        Xn = self.X[idx]
        nonconst = np.flatnonzero(Xn.max(axis=0) > Xn.min(axis=0))
        if nonconst.size == 0:
            return None
        if self.rng is not None and self.n_candidates is not None and self.n_candidates < nonconst.size:
            cols = np.array(sorted(self.rng.sample(nonconst.tolist(), self.n_candidates)), dtype=np.intp)
        else:
            cols = nonconst
        Xc = Xn[:, cols]
        yn = self.y[idx]
        m = idx.size
        pos = int(yn.sum())

        order = np.argsort(Xc, axis=0, kind="stable")
        Xs = np.take_along_axis(Xc, order, axis=0)
        ys = yn[order]
        left_pos = np.cumsum(ys, axis=0)[:-1].astype(float)
        n_left = np.arange(1, m, dtype=float)[:, None]
        n_right = m - n_left
        valid = (Xs[:-1] < Xs[1:]) & (n_left >= self.min_leaf) & (n_right >= self.min_leaf)
        if not valid.any():
            return None

        # candidate thresholds in column-major order: lowest feature id first, then lowest threshold
        j_idx, row_idx = np.nonzero(valid.T)
        lp = left_pos[row_idx, j_idx]
        nl = n_left[row_idx, 0]
        nr = m - nl
        parent = binary_entropy(pos, m)
        gain = parent - (nl / m) * _entropy(lp / nl) - (nr / m) * _entropy((pos - lp) / nr)
        keep = gain > _MIN_GAIN
        if not keep.any():
            return None
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(keep, gain / _entropy(nl / m), -np.inf)
        best = int(np.argmax(ratio))
        if not np.isfinite(ratio[best]) or ratio[best] <= 0:
            return None
        j, row = int(j_idx[best]), int(row_idx[best])
        lo, hi = float(Xs[row, j]), float(Xs[row + 1, j])
        theta = lo + (hi - lo) / 2.0
        if not lo <= theta < hi:
            theta = lo
        return int(cols[j]), theta

    def build(self) -> list[TreeNode]:
        nodes: list[TreeNode] = []
        stack = [(np.arange(self.y.size), 0, -1, False)]
        while stack:
            idx, depth, parent, is_right = stack.pop()
            me = len(nodes)
            if parent >= 0:
                if is_right:
                    nodes[parent].right = me
                else:
                    nodes[parent].left = me
            m = idx.size
            pos = int(self.y[idx].sum())
            split = None
            if not (
                (self.max_depth is not None and depth >= self.max_depth)
                or m < 2 * self.min_leaf
                or pos == 0
                or pos == m
            ):
                split = self._best_split(idx)
            if split is None:
                nodes.append(TreeNode(label=pos > m - pos, pos_fraction=pos / m, n=m))
                continue
            col, theta = split
            nodes.append(TreeNode(self.ids[col], theta))
            go_left = self.X[idx, col] <= theta
            stack.append((idx[~go_left], depth + 1, me, True))
            stack.append((idx[go_left], depth + 1, me, False))
        return nodes


def train_tree(
    data: BinaryData,
    max_depth: int | None = 20,
    min_leaf: int = 1,
    rng: random.Random | None = None,
    n_candidates: int | None = None,
) -> DecisionTreeModel:
    """Grow a gain-ratio threshold tree.

    With *rng* and *n_candidates* set, each node considers a random subset of
    that many features (forest mode); otherwise every feature is considered.
    """
    _require_both_classes(data)
    ids, X, y = _design_matrix(data)
    return _grow(ids, X, y, max_depth, min_leaf, rng, n_candidates)


def _grow(ids, X, y, max_depth, min_leaf, rng, n_candidates) -> DecisionTreeModel:
    nodes = _TreeBuilder(ids, X, y, max_depth, min_leaf, rng, n_candidates).build()
    return DecisionTreeModel(nodes, max_depth, min_leaf)


# ----------------------------------------------------------- random forest


@dataclass
class RandomForestModel:
    trees: list[DecisionTreeModel]
    n_trees: int
    feature_subsample: str
    bootstrap_seed: int
    bootstrap: bool = True

    def score(self, fv: FeatureVector) -> float:
        return math.fsum(t.leaf(fv).pos_fraction for t in self.trees) / len(self.trees)

    def predict(self, fv: FeatureVector) -> bool:
        return self.score(fv) > 0.5

    def to_dict(self) -> dict:
        return {
            "kind": "forest",
            "n_trees": self.n_trees,
            "feature_subsample": self.feature_subsample,
            "bootstrap": self.bootstrap,
            "bootstrap_seed": self.bootstrap_seed,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RandomForestModel":
        trees = [DecisionTreeModel.from_dict(t) for t in d["trees"]]
        return cls(trees, int(d["n_trees"]), d["feature_subsample"], int(d["bootstrap_seed"]), bool(d["bootstrap"]))


def train_forest(
    data: BinaryData,
    n_trees: int = 100,
    seed: int = 0,
    feature_subsample: str = "sqrt",
    bootstrap: bool = True,
    max_depth: int | None = 20,
    min_leaf: int = 1,
) -> RandomForestModel:
    """Bagged gain-ratio trees; tree *i* draws from ``random.Random(seed + i)``.

    ``feature_subsample="all"`` with ``bootstrap=False`` and ``n_trees=1``
    reproduces :func:`train_tree` exactly.
    """
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    if feature_subsample not in ("sqrt", "all"):
        raise ValueError(f"unknown feature_subsample {feature_subsample!r}")
    _require_both_classes(data)
    ids, X, y = _design_matrix(data)
    n = y.size
    n_candidates = math.ceil(math.sqrt(len(ids))) if feature_subsample == "sqrt" else None
    trees = []
    for i in range(n_trees):
        rng = random.Random(seed + i)
        if bootstrap:
            sample = np.fromiter((rng.randrange(n) for _ in range(n)), dtype=np.intp, count=n)
            Xb, yb = X[sample], y[sample]
        else:
            Xb, yb = X, y
        trees.append(_grow(ids, Xb, yb, max_depth, min_leaf, rng, n_candidates))
    return RandomForestModel(trees, n_trees, feature_subsample, seed, bootstrap)


# ------------------------------------------------------- binary dispatcher

BinaryModel = NaiveBayesModel | DecisionTreeModel | RandomForestModel


def train_binary(data: BinaryData, algorithm: Algorithm, params: LearnerParams, seed: int) -> BinaryModel:
    if algorithm is Algorithm.NB:
        return train_naive_bayes(data, params.alpha)
    if algorithm is Algorithm.TREE:
        return train_tree(data, params.max_depth, params.min_leaf)
    return train_forest(
        data,
        params.n_trees,
        seed,
        params.feature_subsample,
        params.bootstrap,
        params.max_depth,
        params.min_leaf,
    )


def binary_from_dict(d: dict) -> BinaryModel:
    kind = d.get("kind")
    if kind == "nb":
        return NaiveBayesModel.from_dict(d)
    if kind == "tree":
        return DecisionTreeModel.from_dict(d)
    if kind == "forest":
        return RandomForestModel.from_dict(d)
    raise ModelFormatError(f"unknown classifier kind {kind!r}")


# -------------------------------------------------------------- multilabel


@dataclass
class MultiLabelModel:
    algorithm: Algorithm
    taxonomy_version: str
    featurizer: Featurizer
    languages: tuple[Language, ...]
    category_languages: dict[str, frozenset[Language]]
    per_category: dict[str, BinaryModel]
    skipped_categories: dict[str, str] = field(default_factory=dict)
    threshold: float = DEFAULT_THRESHOLD
    train_seed: int = 42
    params: LearnerParams = field(default_factory=LearnerParams)

    @property
    def pattern_library_version(self) -> str:
        return self.featurizer.library.version

    @property
    def vocabulary(self) -> Vocabulary:
        assert self.featurizer.vocabulary is not None
        return self.featurizer.vocabulary

    def to_dict(self) -> dict:
        lang_order = [lang for lang in SUPPORTED_LANGUAGES]
        return {
            "format_version": FORMAT_VERSION,
            "algorithm": self.algorithm.value,
            "taxonomy_version": self.taxonomy_version,
            "pattern_library_version": self.featurizer.library.version,
            "pattern_library_fingerprint": self.featurizer.library.fingerprint,
            "preprocessing_chain_descriptor": self.featurizer.descriptor(),
            "languages": [lang.value for lang in self.languages],
            "threshold": self.threshold,
            "train_seed": self.train_seed,
            "hyperparameters": asdict(self.params),
            "category_languages": {
                name: [lang.value for lang in lang_order if lang in langs] for name, langs in self.category_languages.items()
            },
            "skipped_categories": dict(self.skipped_categories),
            "pattern_library": self.featurizer.library.to_dict(),
            "vocabulary": self.vocabulary.to_dict(),
            "per_category": {name: m.to_dict() for name, m in self.per_category.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, separators=(",", ":"), allow_nan=False) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "MultiLabelModel":
        if d.get("format_version") != FORMAT_VERSION:
            raise ModelFormatError(f"unsupported model format_version {d.get('format_version')!r}")
        library = PatternLibrary.from_dict(d["pattern_library"])
        if library.fingerprint != d["pattern_library_fingerprint"]:
            raise ModelFormatError("embedded pattern library does not match its fingerprint")
        chain = d["preprocessing_chain_descriptor"]
        featurizer = Featurizer(
            library,
            FeatureMode(chain["feature_mode"]),
            int(chain["min_df"]),
            Vocabulary.from_dict(d["vocabulary"]),
        )
        return cls(
            algorithm=Algorithm(d["algorithm"]),
            taxonomy_version=d["taxonomy_version"],
            featurizer=featurizer,
            languages=tuple(Language.parse(v) for v in d["languages"]),
            category_languages={k: frozenset(Language.parse(v) for v in vs) for k, vs in d["category_languages"].items()},
            per_category={k: binary_from_dict(v) for k, v in d["per_category"].items()},
            skipped_categories=dict(d["skipped_categories"]),
            threshold=float(d["threshold"]),
            train_seed=int(d["train_seed"]),
            params=LearnerParams(**d["hyperparameters"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "MultiLabelModel":
        return cls.from_dict(json.loads(text))


def _languages_of(labeled: Sequence[LabeledComment]) -> tuple[Language, ...]:
    present = {lc.comment.language for lc in labeled}
    return tuple(lang for lang in SUPPORTED_LANGUAGES if lang in present)


def train_multilabel(
    labeled: Sequence[LabeledComment],
    taxonomy: Taxonomy,
    algorithm: Algorithm,
    seed: int,
    featurizer: Featurizer,
    params: LearnerParams = LearnerParams(),
    threshold: float = DEFAULT_THRESHOLD,
) -> MultiLabelModel:
    """Train one binary classifier per applicable category.

    Category *k* (position in the taxonomy) balances and trains with seed
    ``seed + k``.  Categories without both classes are recorded as skipped.
    """
    if len(labeled) < 2:
        raise EmptyDataset(f"need at least 2 labeled comments, got {len(labeled)}")
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must be in (0, 1)")
    languages = _languages_of(labeled)
    analyzed = [featurizer.analyze(lc.comment.raw_text) for lc in labeled]
    featurizer.fit_analyzed(analyzed)
    vectors = [featurizer.transform_analyzed(a) for a in analyzed]

    per_category: dict[str, BinaryModel] = {}
    skipped: dict[str, str] = {}
    category_languages = {}
    for k, cat in enumerate(taxonomy.categories):
        if not cat.languages & set(languages):
            continue
        category_languages[cat.name] = cat.languages
        data = [
            (fv, cat.name in lc.labels)
            for fv, lc in zip(vectors, labeled)
            if cat.applies_to(lc.comment.language)
        ]
        try:
            balanced = balance(data, seed + k)
            per_category[cat.name] = train_binary(balanced, algorithm, params, seed + k)
        except DegenerateLabel as exc:
            skipped[cat.name] = str(exc)

    return MultiLabelModel(
        algorithm=algorithm,
        taxonomy_version=taxonomy.version,
        featurizer=featurizer,
        languages=languages,
        category_languages=category_languages,
        per_category=per_category,
        skipped_categories=skipped,
        threshold=threshold,
        train_seed=seed,
        params=params,
    )


@dataclass(frozen=True)
class Classification:
    comment_id: str
    labels: tuple[str, ...]
    scores: Mapping[str, float]

    def to_record(self) -> dict:
        return {"id": self.comment_id, "categories": list(self.labels), "scores": dict(self.scores)}


def classify(model: MultiLabelModel, comment: ClassComment) -> Classification:
    """Score every applicable category; keep those at or above the threshold."""
    if comment.language not in model.languages:
        raise LanguageMismatch(
            f"{comment.id}: model covers {[lang.value for lang in model.languages]}, comment is {comment.language.value}"
        )
    fv = model.featurizer.transform(comment.raw_text)
    scores: dict[str, float] = {}
    labels = []
    for name, clf in model.per_category.items():
        if comment.language not in model.category_languages[name]:
            continue
        score = clf.score(fv)
        scores[name] = score
        if decide(score, fv, model.threshold):
            labels.append(name)
    return Classification(comment.id, tuple(labels), scores)
