from __future__ import annotations

import json
from dataclasses import replace

import pytest

from classcomments.adherence import check_adherence, load_guideline, parse_guideline
from classcomments.errors import LanguageMismatch, SchemaError, TaxonomyVersionMismatch
from classcomments.extraction import Language, SourceFile, extract_class_comments, iter_source_paths, read_source
from classcomments.learners import classify

from conftest import FIXTURES

ADHERENCE = FIXTURES / "adherence"
SUMMARY_CLASSES = {"Polygon", "Mesh", "Hull", "Grid", "Triangle", "Segment", "Region"}


def files_under(*dirs):
    return [read_source(p) for p in iter_source_paths(dirs)]


@pytest.fixture(scope="module")
def python_spec(taxonomy):
    return load_guideline(None, taxonomy, Language.PYTHON)


class TestGuideline:
    def test_shipped_defaults(self, taxonomy):
        assert load_guideline(None, taxonomy, Language.JAVA).required_categories == ("Summary",)
        assert load_guideline(None, taxonomy, Language.PYTHON).required_categories == ("Summary",)
        st = load_guideline(None, taxonomy, Language.SMALLTALK)
        assert st.required_categories == ("Summary", "Usage", "Example")
        assert st.taxonomy_version == taxonomy.version

    def test_unknown_category(self, taxonomy):
        doc = {"name": "g", "language": "Java", "required_categories": ["Sumary"], "require_comment_presence": True}
        with pytest.raises(SchemaError):
            parse_guideline(doc, taxonomy)

    def test_category_not_applicable(self, taxonomy):
        doc = {"name": "g", "language": "Smalltalk", "required_categories": ["License"]}
        with pytest.raises(SchemaError) as err:
            parse_guideline(doc, taxonomy)
        assert err.value.where == "$.required_categories[0]"

    def test_from_file(self, taxonomy, tmp_path):
        p = tmp_path / "g.json"
        p.write_text(json.dumps({"name": "g", "language": "Python", "required_categories": ["Summary", "Usage"]}))
        spec = load_guideline(p, taxonomy)
        assert spec.required_categories == ("Summary", "Usage") and spec.require_comment_presence


class TestFixturePredictions:
    """Each fixture comment is checked on its own before aggregate numbers are trusted."""

    def test_individual_predictions(self, forest_model):
        for f in files_under(ADHERENCE / "commented"):
            for c in extract_class_comments(f):
                labels = classify(forest_model, c).labels
                assert ("Summary" in labels) == (c.class_name in SUMMARY_CLASSES), c.class_name


class TestCheckAdherence:
    def test_summary_fraction(self, forest_model, python_spec):
        report = check_adherence(files_under(ADHERENCE / "commented"), forest_model, python_spec)
        assert report.n_classes == 10
        assert report.aggregate == {"Summary": 0.7}
        assert report.comment_coverage == 1.0
        assert report.violations == [] and report.exit_code == 0

    def test_uncommented_classes(self, forest_model, python_spec):
        report = check_adherence(files_under(ADHERENCE), forest_model, python_spec)
        assert report.comment_coverage == 10 / 12
        assert report.aggregate == {"Summary": 0.7}
        assert len(report.violations) == 2 and report.exit_code == 1

    def test_presence_not_required(self, forest_model, python_spec):
        report = check_adherence(files_under(ADHERENCE), forest_model, replace(python_spec, require_comment_presence=False))
        assert report.violations == [] and report.comment_coverage == 10 / 12

    def test_completeness_and_partition(self, forest_model, python_spec):
        report = check_adherence(files_under(ADHERENCE), forest_model, python_spec)
        assert len(report.per_class) == 12
        for entry in report.per_class.values():
            if entry.has_comment:
                assert set(entry.satisfied) | set(entry.missing) == set(python_spec.required_categories)
                assert not set(entry.satisfied) & set(entry.missing)

    def test_two_classes_fully_satisfied(self, forest_model, python_spec):
        text = 'class A:\n    """I represent the polygon grid. Covers polygon vertex geometry concerns."""\n'
        text += 'class B:\n    """I represent the mesh. It deals with vertex, geometry and polygon."""\n'
        report = check_adherence([SourceFile("ab.py", Language.PYTHON, text)], forest_model, python_spec)
        assert report.aggregate == {"Summary": 1.0}

    def test_half_coverage(self, forest_model, python_spec):
        text = 'class A:\n    """I represent a thing."""\nclass B:\n    pass\n'
        report = check_adherence([SourceFile("ab.py", Language.PYTHON, text)], forest_model, python_spec)
        assert report.comment_coverage == 0.5

    def test_no_classes(self, forest_model, python_spec):
        report = check_adherence([SourceFile("e.py", Language.PYTHON, "")], forest_model, python_spec)
        assert report.comment_coverage == 1.0 and report.exit_code == 0

    def test_taxonomy_version_mismatch(self, forest_model, python_spec):
        with pytest.raises(TaxonomyVersionMismatch):
            check_adherence([], forest_model, replace(python_spec, taxonomy_version="other"))

    def test_file_language_mismatch(self, forest_model, python_spec):
        with pytest.raises(LanguageMismatch):
            check_adherence([SourceFile("A.java", Language.JAVA, "class A {}")], forest_model, python_spec)

    def test_outputs(self, forest_model, python_spec):
        report = check_adherence(files_under(ADHERENCE), forest_model, python_spec)
        doc = json.loads(report.to_json())
        assert doc["comment_coverage"] == 10 / 12 and doc["aggregate"] == {"Summary": 0.7}
        text = report.to_text()
        assert "Bare: no class comment" in text and "violations: 2" in text

    def test_adding_a_prediction_never_lowers_a_fraction(self, forest_model, taxonomy):
        spec = parse_guideline(
            {"name": "g", "language": "Python", "required_categories": ["Summary", "Usage", "Warning"]}, taxonomy
        )
        report = check_adherence(files_under(ADHERENCE), forest_model, spec)
        before = report.aggregate
        for entry in report.per_class.values():
            if entry.has_comment and entry.missing:
                added = entry.missing[0]
                entry.satisfied = tuple(c for c in spec.required_categories if c in entry.satisfied or c == added)
                entry.missing = entry.missing[1:]
                after = report.aggregate
                assert all(after[c] >= before[c] for c in before)
                before = after
