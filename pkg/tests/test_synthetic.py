from __future__ import annotations

from collections import Counter

import pytest

from classcomments.features import pattern_features
from classcomments.synthetic import CATEGORIES, SIGNATURES, TRIGGER_PATTERNS, generate_synthetic
from classcomments.taxonomy import dumps_labeled, load_taxonomy
from classcomments.textproc import split_sentences


def has_signature(text: str, category: str) -> bool:
    return all(word in text for word in SIGNATURES[category])


class TestGenerator:
    def test_size_and_label_arithmetic(self, synthetic_corpus):
        assert len(synthetic_corpus) == 1200
        assert Counter(len(lc.labels) for lc in synthetic_corpus) == {1: 960, 2: 240}
        assert {name for lc in synthetic_corpus for name in lc.labels} == set(CATEGORIES)

    def test_exact_noise_per_category(self, synthetic_corpus):
        for cat in CATEGORIES:
            positives = [lc for lc in synthetic_corpus if cat in lc.labels]
            dropped = sum(not has_signature(lc.comment.raw_text, cat) for lc in positives)
            assert dropped == round(0.1 * len(positives))

    def test_signatures_never_appear_on_negatives(self, synthetic_corpus):
        for cat in CATEGORIES:
            for lc in synthetic_corpus:
                if cat not in lc.labels:
                    assert not any(w in lc.comment.raw_text for w in SIGNATURES[cat])

    def test_designated_pattern_fires_exactly_on_positives(self, synthetic_corpus, library):
        for lc in synthetic_corpus:
            hits = pattern_features(split_sentences(lc.comment.raw_text), library)
            for cat, pid in TRIGGER_PATTERNS.items():
                assert (f"pat:{pid}" in hits) == (cat in lc.labels), (cat, lc.comment.raw_text)

    def test_reproducible(self, taxonomy):
        a = dumps_labeled(generate_synthetic(15, 0.2, 5, taxonomy), taxonomy)
        b = dumps_labeled(generate_synthetic(15, 0.2, 5, taxonomy), taxonomy)
        assert a == b
        assert a != dumps_labeled(generate_synthetic(15, 0.2, 6, taxonomy), taxonomy)

    def test_noise_free_keeps_every_signature(self, taxonomy):
        for lc in generate_synthetic(10, 0.0, 1, taxonomy):
            assert all(has_signature(lc.comment.raw_text, cat) for cat in lc.labels)

    def test_languages_and_ids(self, synthetic_corpus):
        assert Counter(lc.comment.language.value for lc in synthetic_corpus) == {
            "Java": 400, "Python": 400, "Smalltalk": 400,
        }
        assert len({lc.comment.id for lc in synthetic_corpus}) == 1200

    @pytest.mark.parametrize("n, noise", [(9, 0.1), (10, 0.5), (10, -0.1)])
    def test_preconditions(self, n, noise):
        with pytest.raises(ValueError):
            generate_synthetic(n, noise, 0)

    def test_taxonomy_must_define_the_categories(self):
        tax = load_taxonomy({"version": "x", "categories": [{"name": "Summary", "languages": ["Java"]}]})
        with pytest.raises(ValueError):
            generate_synthetic(10, 0.1, 0, tax)
