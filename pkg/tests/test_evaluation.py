from __future__ import annotations

import json
import random
from dataclasses import replace

import pytest

from classcomments.errors import FingerprintMismatch, TooFewInstances
from classcomments.evaluation import (
    ConfusionCounts,
    EvalReport,
    compare_modes,
    cross_validate,
    f1,
    precision,
    recall,
    stratified_kfold,
    train_fold,
    zero_division_flags,
)
from classcomments.features import AnalyzedText, FeatureMode, Featurizer
from classcomments.learners import Algorithm, LearnerParams
from classcomments.taxonomy import LabeledComment

# (tp, fp, fn, tn) -> (precision, recall, f1), all worked out by hand
CONFUSIONS = [
    ((8, 2, 2, 0), (0.8, 0.8, 0.8)),
    ((0, 0, 5, 3), (0.0, 0.0, 0.0)),
    ((0, 4, 0, 6), (0.0, 0.0, 0.0)),
    ((0, 0, 0, 9), (0.0, 0.0, 0.0)),
    ((5, 0, 0, 5), (1.0, 1.0, 1.0)),
    ((2, 1, 2, 0), (2 / 3, 1 / 2, 4 / 7)),
    ((1, 3, 0, 0), (1 / 4, 1.0, 2 / 5)),
    ((3, 0, 1, 7), (1.0, 3 / 4, 6 / 7)),
    ((9, 1, 3, 2), (9 / 10, 3 / 4, 9 / 11)),
    ((7, 7, 7, 7), (0.5, 0.5, 0.5)),
]


class TestMetrics:
    @pytest.mark.parametrize("counts, expected", CONFUSIONS)
    def test_exact(self, counts, expected):
        c = ConfusionCounts(*counts)
        assert (precision(c), recall(c), f1(c)) == expected

    def test_zero_division_flags(self):
        assert zero_division_flags(ConfusionCounts(0, 0, 5, 3)) == ["precision", "f1"]
        assert zero_division_flags(ConfusionCounts(0, 4, 0, 6)) == ["recall", "f1"]
        assert zero_division_flags(ConfusionCounts(1, 1, 1, 1)) == []

    def test_equal_precision_recall(self):
        for tp, e in [(3, 1), (10, 7), (1, 2)]:
            c = ConfusionCounts(tp, e, e, 0)
            assert f1(c) == precision(c) == recall(c)


class TestStratifiedKFold:
    def test_round_robin_counts(self):
        labels = [True] * 20 + [False] * 80
        folds = stratified_kfold(labels, None, 10, 1)
        for j in range(10):
            members = folds.fold(j)
            assert sum(labels[i] for i in members) == 2
            assert len(members) == 10

    def test_singletons(self):
        assert sorted(stratified_kfold([True, False] * 5, None, 10, 0).sizes()) == [1] * 10

    def test_too_few(self):
        with pytest.raises(TooFewInstances):
            stratified_kfold([True] * 5, None, 10, 0)

    def test_dataset_and_category(self, small_corpus):
        folds = stratified_kfold(small_corpus, "Summary", 5, 3)
        labels = ["Summary" in lc.labels for lc in small_corpus]
        assert folds == stratified_kfold(labels, None, 5, 3)

    @pytest.mark.parametrize("seed", range(100))
    def test_balance_property(self, seed):
        rng = random.Random(seed)
        k = rng.randint(2, 10)
        n = rng.randint(k, 120)
        labels = [rng.random() < rng.uniform(0.05, 0.95) for _ in range(n)]
        folds = stratified_kfold(labels, None, k, seed)
        sizes = folds.sizes()
        positives = [sum(labels[i] for i in folds.fold(j)) for j in range(k)]
        assert max(sizes) - min(sizes) <= 1
        assert max(positives) - min(positives) <= 1
        covered = sorted(i for j in range(k) for i in folds.fold(j))
        assert covered == list(range(n))


@pytest.fixture(scope="module")
def nb_reports(small_corpus, taxonomy):
    a = cross_validate(small_corpus, taxonomy, Algorithm.NB, FeatureMode.TFIDF_ONLY, k=5, seed=11)
    b = cross_validate(small_corpus, taxonomy, Algorithm.NB, FeatureMode.NLP_PLUS_TFIDF, k=5, seed=11)
    return a, b


class TestCrossValidate:
    def test_evaluates_the_six_categories(self, nb_reports):
        report = nb_reports[1]
        assert sorted(report.evaluated()) == sorted(
            ["Summary", "Usage", "Example", "Links", "Warning", "Pointer_To_Code"]
        )
        for name, res in report.per_category.items():
            if not res.evaluated:
                assert "positives" in res.reason

    def test_pooled_confusion_covers_every_instance(self, nb_reports, small_corpus):
        for res in nb_reports[1].evaluated().values():
            assert res.confusion.total == len(small_corpus)
            assert res.folds_evaluated == 5
            assert res.f1 == f1(res.confusion)

    def test_bounds_and_weighted_average(self, nb_reports):
        for report in nb_reports:
            scores = [r.f1 for r in report.evaluated().values()]
            for r in report.evaluated().values():
                assert all(0.0 <= getattr(r, m) <= 1.0 for m in ("precision", "recall", "f1"))
            assert min(scores) - 1e-12 <= report.weighted["f1"] <= max(scores) + 1e-12

    def test_category_with_three_positives_is_unevaluated(self, small_corpus, taxonomy):
        data = list(small_corpus)
        kept = 0
        for i, lc in enumerate(data):
            if "Links" in lc.labels:
                kept += 1
                if kept > 3:
                    data[i] = LabeledComment(lc.comment, lc.labels - {"Links"})
        report = cross_validate(data, taxonomy, Algorithm.NB, FeatureMode.NLP_PLUS_TFIDF, k=10, seed=1)
        links = report.per_category["Links"]
        assert not links.evaluated and "3 positives" in links.reason
        assert report.per_category["Summary"].evaluated

    def test_k_larger_than_dataset(self, small_corpus, taxonomy):
        with pytest.raises(TooFewInstances):
            cross_validate(small_corpus[:4], taxonomy, Algorithm.NB, FeatureMode.TFIDF_ONLY, k=5)

    def test_deterministic_report(self, small_corpus, taxonomy, nb_reports):
        again = cross_validate(small_corpus, taxonomy, Algorithm.NB, FeatureMode.NLP_PLUS_TFIDF, k=5, seed=11)
        assert again.to_json() == nb_reports[1].to_json()
        assert again.to_text() == nb_reports[1].to_text()

    def test_json_round_trip(self, nb_reports):
        doc = json.loads(nb_reports[0].to_json())
        assert EvalReport.from_dict(doc).to_json() == nb_reports[0].to_json()
        assert doc["fingerprint"]["seed"] == 11 and doc["fingerprint"]["k"] == 5

    def test_text_table_lists_categories_and_fingerprint(self, nb_reports):
        text = nb_reports[1].to_text()
        assert "# seed: 11" in text and "# dataset_sha256:" in text
        assert "Pointer_To_Code" in text and "unevaluated" in text


class TestNoLeakage:
    def test_test_fold_contents_are_never_read(self, small_corpus, library):
        featurizer = Featurizer(library)
        analyzed = [featurizer.analyze(lc.comment.raw_text) for lc in small_corpus]
        truth = ["Usage" in lc.labels for lc in small_corpus]
        folds = stratified_kfold(truth, None, 5, 2)
        params = LearnerParams(n_trees=5)
        for j in range(5):
            base = train_fold(analyzed, truth, folds, j, Algorithm.FOREST, library, FeatureMode.NLP_PLUS_TFIDF, params, 9)
            poisoned = list(analyzed)
            for p in folds.fold(j):
                poisoned[p] = AnalyzedText(("leak",) * 5, {"pat:todo_fixme": 1.0})
            other = train_fold(poisoned, truth, folds, j, Algorithm.FOREST, library, FeatureMode.NLP_PLUS_TFIDF, params, 9)
            assert other.featurizer.vocabulary == base.featurizer.vocabulary
            assert other.balanced == base.balanced
            assert other.model.to_dict() == base.model.to_dict()
            assert not set(base.balanced) & set(folds.fold(j))


class TestCompareModes:
    def test_identical_reports(self, nb_reports):
        cmp = compare_modes(nb_reports[0], nb_reports[0])
        assert all(v == 0.0 for d in cmp.per_category.values() for v in d.values())
        assert all(v == 0.0 for v in cmp.macro.values())

    def test_deltas_are_b_minus_a(self, nb_reports):
        a, b = nb_reports
        cmp = compare_modes(a, b)
        assert cmp.macro["f1"] == b.macro["f1"] - a.macro["f1"]
        assert "d_f1" in cmp.to_text()

    def test_mismatched_seed(self, nb_reports):
        other = EvalReport(nb_reports[1].per_category, dict(nb_reports[1].fingerprint, seed=12))
        with pytest.raises(FingerprintMismatch):
            compare_modes(nb_reports[0], other)

    def test_mismatched_dataset(self, nb_reports):
        other = replace(nb_reports[1], fingerprint=dict(nb_reports[1].fingerprint, dataset_sha256="0" * 64))
        with pytest.raises(FingerprintMismatch):
            compare_modes(nb_reports[0], other)
