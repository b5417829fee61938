"""Category model (taxonomy) and labeled datasets.

The shipped default taxonomy is a stand-in of 17 common documentation
information types; it is configuration and meant to be edited.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .errors import MalformedRecord, SchemaError, UnknownLabel
from .extraction import SUPPORTED_LANGUAGES, ClassComment, Language

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
_TOP_FIELDS = {"version", "categories"}
_CATEGORY_FIELDS = {"name", "description", "languages", "guideline_required"}


@dataclass(frozen=True)
class Category:
    name: str
    description: str
    languages: frozenset[Language]
    guideline_required: bool = False

    def applies_to(self, language: Language) -> bool:
        return language in self.languages


@dataclass(frozen=True)
class Taxonomy:
    version: str
    categories: tuple[Category, ...]

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.categories]

    def __getitem__(self, name: str) -> Category:
        for c in self.categories:
            if c.name == name:
                return c
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(c.name == name for c in self.categories)

    def __len__(self) -> int:
        return len(self.categories)

    def for_language(self, language: Language) -> list[Category]:
        return [c for c in self.categories if c.applies_to(language)]

    def applicable(self, languages: Iterable[Language]) -> list[Category]:
        """Categories applicable to at least one of *languages*, in canonical order."""
        langs = set(languages)
        return [c for c in self.categories if c.languages & langs]

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "categories": [
                {
                    "name": c.name,
                    "description": c.description,
                    "languages": [lang.value for lang in SUPPORTED_LANGUAGES if lang in c.languages],
                    "guideline_required": c.guideline_required,
                }
                for c in self.categories
            ],
        }


def parse_taxonomy(doc: dict) -> Taxonomy:
    if not isinstance(doc, dict):
        raise SchemaError("$", "taxonomy must be a JSON object")
    unknown = set(doc) - _TOP_FIELDS
    if unknown:
        raise SchemaError("$", f"unknown field(s) {sorted(unknown)}")
    version = doc.get("version")
    if not isinstance(version, str) or not version:
        raise SchemaError("$.version", "missing or empty")
    raw = doc.get("categories")
    if not isinstance(raw, list) or not raw:
        raise SchemaError("$.categories", "must be a non-empty list")

    categories = []
    seen: set[str] = set()
    for k, entry in enumerate(raw):
        where = f"$.categories[{k}]"
        if not isinstance(entry, dict):
            raise SchemaError(where, "must be an object")
        unknown = set(entry) - _CATEGORY_FIELDS
        if unknown:
            raise SchemaError(where, f"unknown field(s) {sorted(unknown)}")
        name = entry.get("name")
        if not isinstance(name, str) or not _NAME_RE.fullmatch(name):
            raise SchemaError(f"{where}.name", f"invalid category name {name!r}")
        if name in seen:
            raise SchemaError(f"{where}.name", f"duplicate category name {name!r}")
        seen.add(name)
        langs = entry.get("languages")
        if not isinstance(langs, list) or not langs:
            raise SchemaError(f"{where}.languages", "must be a non-empty list")
        parsed = set()
        for j, lang in enumerate(langs):
            try:
                value = Language.parse(str(lang))
            except ValueError:
                value = Language.UNKNOWN
            if value is Language.UNKNOWN:
                raise SchemaError(f"{where}.languages[{j}]", f"unsupported language {lang!r}")
            parsed.add(value)
        required = entry.get("guideline_required", False)
        if not isinstance(required, bool):
            raise SchemaError(f"{where}.guideline_required", "must be a boolean")
        categories.append(Category(name, str(entry.get("description", "")), frozenset(parsed), required))
    return Taxonomy(version, tuple(categories))


def load_taxonomy(config: str | Path | dict | None = None) -> Taxonomy:
    """Load a taxonomy from a JSON file path, a parsed dict, or the shipped default (``None``)."""
    if config is None:
        text = resources.files("classcomments").joinpath("data/default_taxonomy.json").read_text(encoding="utf-8")
        return parse_taxonomy(json.loads(text))
    if isinstance(config, dict):
        return parse_taxonomy(config)
    try:
        doc = json.loads(Path(config).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(str(config), f"invalid JSON: {exc}") from None
    return parse_taxonomy(doc)


@dataclass(frozen=True)
class LabeledComment:
    comment: ClassComment
    labels: frozenset[str]

    def to_record(self, taxonomy: Taxonomy | None = None) -> dict:
        rec = self.comment.to_record()
        order = taxonomy.names if taxonomy is not None else sorted(self.labels)
        rec["labels"] = [name for name in order if name in self.labels]
        return rec


def validate_labels(comment: ClassComment, labels: Iterable[str], taxonomy: Taxonomy) -> frozenset[str]:
    out = set()
    for label in labels:
        if label not in taxonomy or not taxonomy[label].applies_to(comment.language):
            raise UnknownLabel(comment.id, label)
        out.add(label)
    return frozenset(out)


def parse_labeled_lines(lines: Iterable[str], taxonomy: Taxonomy) -> list[LabeledComment]:
    records = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            labels = rec["labels"]
            if not isinstance(labels, list):
                raise TypeError("labels must be a list")
            comment = ClassComment.from_record(rec)
        except KeyError as exc:
            raise MalformedRecord(lineno, f"missing field {exc}") from None
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            raise MalformedRecord(lineno, str(exc)) from None
        records.append(LabeledComment(comment, validate_labels(comment, labels, taxonomy)))
    return records


def load_labeled_dataset(path: str | Path, taxonomy: Taxonomy) -> list[LabeledComment]:
    with open(path, encoding="utf-8") as fh:
        return parse_labeled_lines(fh, taxonomy)


def dumps_labeled(records: Sequence[LabeledComment], taxonomy: Taxonomy | None = None) -> str:
    return "".join(json.dumps(r.to_record(taxonomy), ensure_ascii=False) + "\n" for r in records)


def save_labeled_dataset(records: Sequence[LabeledComment], path: str | Path, taxonomy: Taxonomy | None = None) -> None:
    Path(path).write_text(dumps_labeled(records, taxonomy), encoding="utf-8")
