"""Guideline adherence: which required information types each class comment carries.

Adherence is computed from classifier predictions, not from labels, so it
runs on unlabeled code bases; every number here inherits the error of the
model that produced the predictions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

from .errors import LanguageMismatch, SchemaError, TaxonomyVersionMismatch
from .extraction import Language, SourceFile, scan_file
from .learners import MultiLabelModel, classify
from .taxonomy import Taxonomy

_FIELDS = {"name", "language", "required_categories", "require_comment_presence"}


@dataclass(frozen=True)
class GuidelineSpec:
    name: str
    language: Language
    required_categories: tuple[str, ...]
    require_comment_presence: bool
    taxonomy_version: str

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "language": self.language.value,
            "required_categories": list(self.required_categories),
            "require_comment_presence": self.require_comment_presence,
        }


def parse_guideline(doc: dict, taxonomy: Taxonomy) -> GuidelineSpec:
    if not isinstance(doc, dict):
        raise SchemaError("$", "guideline must be a JSON object")
    unknown = set(doc) - _FIELDS
    if unknown:
        raise SchemaError("$", f"unknown field(s) {sorted(unknown)}")
    name = doc.get("name")
    if not isinstance(name, str) or not name:
        raise SchemaError("$.name", "missing or empty")
    try:
        language = Language.parse(str(doc.get("language")))
    except ValueError:
        language = Language.UNKNOWN
    if language is Language.UNKNOWN:
        raise SchemaError("$.language", f"unsupported language {doc.get('language')!r}")
    required = doc.get("required_categories")
    if not isinstance(required, list):
        raise SchemaError("$.required_categories", "must be a list")
    for k, cat in enumerate(required):
        where = f"$.required_categories[{k}]"
        if cat not in taxonomy:
            raise SchemaError(where, f"category {cat!r} is not in taxonomy {taxonomy.version}")
        if not taxonomy[cat].applies_to(language):
            raise SchemaError(where, f"category {cat!r} does not apply to {language.value}")
    if len(set(required)) != len(required):
        raise SchemaError("$.required_categories", "duplicate category")
    presence = doc.get("require_comment_presence", True)
    if not isinstance(presence, bool):
        raise SchemaError("$.require_comment_presence", "must be a boolean")
    return GuidelineSpec(name, language, tuple(required), presence, taxonomy.version)


def load_guideline(source: str | Path | None, taxonomy: Taxonomy, language: Language | None = None) -> GuidelineSpec:
    """Load a guideline file, or the shipped default for *language* when *source* is ``None``."""
    if source is None:
        if language is None or language is Language.UNKNOWN:
            raise SchemaError("guideline", "a language is needed to pick the default guideline")
        text = (
            resources.files("classcomments")
            .joinpath(f"data/guidelines/{language.value.lower()}.json")
            .read_text(encoding="utf-8")
        )
    else:
        text = Path(source).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(str(source), f"invalid JSON: {exc}") from None
    return parse_guideline(doc, taxonomy)


@dataclass
class ClassAdherence:
    class_name: str
    path: str
    declaration_line: int
    has_comment: bool
    predicted: tuple[str, ...] = ()
    satisfied: tuple[str, ...] = ()
    missing: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "class_name": self.class_name,
            "path": self.path,
            "declaration_line": self.declaration_line,
            "has_comment": self.has_comment,
            "predicted": list(self.predicted),
            "satisfied": list(self.satisfied),
            "missing": list(self.missing),
        }


@dataclass
class AdherenceReport:
    guideline: GuidelineSpec
    per_class: dict[str, ClassAdherence]
    violations: list[str] = field(default_factory=list)
    fingerprint: dict = field(default_factory=dict)

    @property
    def n_classes(self) -> int:
        return len(self.per_class)

    @property
    def n_commented(self) -> int:
        return sum(1 for c in self.per_class.values() if c.has_comment)

    @property
    def comment_coverage(self) -> float:
        # with no classes at all nothing is uncommented
        return self.n_commented / self.n_classes if self.n_classes else 1.0

    @property
    def aggregate(self) -> dict[str, float]:
        commented = [c for c in self.per_class.values() if c.has_comment]
        if not commented:
            return {cat: 1.0 for cat in self.guideline.required_categories}
        return {
            cat: sum(1 for c in commented if cat in c.satisfied) / len(commented)
            for cat in self.guideline.required_categories
        }

    @property
    def exit_code(self) -> int:
        return 1 if self.violations else 0

    def to_dict(self) -> dict:
        return {
            "guideline": self.guideline.to_dict(),
            "taxonomy_version": self.guideline.taxonomy_version,
            "fingerprint": self.fingerprint,
            "n_classes": self.n_classes,
            "n_commented": self.n_commented,
            "comment_coverage": self.comment_coverage,
            "aggregate": self.aggregate,
            "violations": list(self.violations),
            "per_class": {k: v.to_dict() for k, v in self.per_class.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False, allow_nan=False) + "\n"

    def to_text(self) -> str:
        g = self.guideline
        lines = [
            f"guideline {g.name} ({g.language.value}), taxonomy {g.taxonomy_version}",
            f"classes: {self.n_classes}, commented: {self.n_commented}, coverage: {self.comment_coverage:.4f}",
        ]
        width = max([len(c) for c in g.required_categories] + [8])
        for cat, frac in self.aggregate.items():
            lines.append(f"  {cat.ljust(width)}  {frac:.4f}")
        for cid, c in self.per_class.items():
            if c.has_comment and c.missing:
                lines.append(f"{c.path}:{c.declaration_line}: {c.class_name}: missing {', '.join(c.missing)}")
        for cid in self.violations:
            c = self.per_class[cid]
            lines.append(f"{c.path}:{c.declaration_line}: {c.class_name}: no class comment")
        lines.append(f"violations: {len(self.violations)}")
        return "\n".join(lines) + "\n"


def check_adherence(files: Sequence[SourceFile], model: MultiLabelModel, spec: GuidelineSpec) -> AdherenceReport:
    """Classify every class comment in *files* and compare with *spec*."""
    if model.taxonomy_version != spec.taxonomy_version:
        raise TaxonomyVersionMismatch(
            f"model was trained with taxonomy {model.taxonomy_version!r}, guideline uses {spec.taxonomy_version!r}"
        )
    if spec.language not in model.languages:
        raise LanguageMismatch(
            f"guideline language {spec.language.value} is not covered by the model "
            f"({[lang.value for lang in model.languages]})"
        )
    required = spec.required_categories
    per_class: dict[str, ClassAdherence] = {}
    violations = []
    for file in files:
        if file.language is not spec.language:
            raise LanguageMismatch(f"{file.path} is {file.language.value}, guideline is for {spec.language.value}")
        for cid, decl, comment in scan_file(file):
            if comment is None:
                per_class[cid] = ClassAdherence(decl.class_name, file.path, decl.declaration_line, False)
                if spec.require_comment_presence:
                    violations.append(cid)
                continue
            predicted = classify(model, comment).labels
            satisfied = tuple(c for c in required if c in predicted)
            missing = tuple(c for c in required if c not in predicted)
            per_class[cid] = ClassAdherence(
                decl.class_name, file.path, decl.declaration_line, True, predicted, satisfied, missing
            )
    return AdherenceReport(spec, per_class, violations)
