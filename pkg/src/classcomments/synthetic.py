"""Seeded generator for labeled synthetic class comments.

Six categories each own a three-word signature vocabulary and a trigger
sentence matched by one pattern of the default library.  Every comment also
carries a *decoy* sentence for each category it is not labeled with; a decoy
has the same content words as the trigger once stopwords are dropped and
terms stemmed, but does not match the pattern.  The trigger is therefore
invisible to a bag-of-words model, and comments whose signature words were
dropped as noise can only be recovered through pattern features.
"""

from __future__ import annotations

import random
from typing import Callable

from .extraction import ClassComment, Language, comment_id
from .taxonomy import LabeledComment, Taxonomy

NOUNS = (
    "buffer", "record", "table", "socket", "stream", "cache", "queue", "token", "frame", "packet",
    "ledger", "matrix", "schema", "widget", "cursor", "window", "thread", "bucket", "channel", "payload",
    "header", "folder", "account", "invoice", "segment", "cluster", "pixel", "bitmap", "tensor", "graph",
    "router", "module", "parser", "loader", "sensor", "timer", "counter", "mailbox", "journal", "profile",
)
VERBS = (
    "store", "read", "write", "merge", "split", "parse", "render", "encode", "decode", "sort",
    "filter", "track", "load", "flush", "scan", "hash", "copy", "index", "batch", "route",
)
ADJECTIVES = (
    "current", "shared", "remote", "local", "cached", "raw", "nested", "empty", "stale", "active",
    "primary", "dirty", "visible", "signed", "compact", "global", "pending", "frozen", "mutable", "sparse",
)

Slot = Callable[[random.Random], str]


def _n(rng: random.Random) -> str:
    return rng.choice(NOUNS)


def _v(rng: random.Random) -> str:
    return rng.choice(VERBS)


def _trigger_decoy(category: str, rng: random.Random) -> tuple[str, str]:
    """Return a (trigger, decoy) sentence pair sharing the same slot words."""
    a, b, verb = _n(rng), _n(rng), _v(rng)
    if category == "Summary":
        return f"I represent the {a} {b}.", f"These represent the {a} {b}."
    if category == "Usage":
        return f"If you need the {a}, use this {b}.", f"You need the {a} to use this {b}."
    if category == "Example":
        return f"For example, the {a} {verb}s the {b}.", f"An example of the {a} {verb}s the {b}."
    if category == "Links":
        return f"See http://{a}.org/{b} for details.", f"See the http {a} org {b} for details."
    if category == "Warning":
        return f"You must not {verb} the {a}.", f"You must {verb} the {a}."
    if category == "Pointer_To_Code":
        return f"It delegates to {a}{b.capitalize()}.", f"It delegates to {a}{b}."
    raise KeyError(category)


SIGNATURES = {
    "Summary": ("geometry", "polygon", "vertex"),
    "Usage": ("workflow", "session", "handshake"),
    "Example": ("sample", "snippet", "demo"),
    "Links": ("reference", "manual", "website"),
    "Warning": ("hazard", "corruption", "deadlock"),
    "Pointer_To_Code": ("collaborator", "helper", "companion"),
}
CATEGORIES = tuple(SIGNATURES)

# pattern each category's trigger is built to match
TRIGGER_PATTERNS = {
    "Summary": "first_person_summary",
    "Usage": "conditional_usage",
    "Example": "example_marker",
    "Links": "url_reference",
    "Warning": "warning_modal",
    "Pointer_To_Code": "code_reference",
}

MULTI_LABEL_FRACTION = 0.2

_LANGS = (
    (Language.JAVA, "java", "java"),
    (Language.PYTHON, "python", "py"),
    (Language.SMALLTALK, "smalltalk", "st"),
)


def _signature_sentence(category: str, rng: random.Random) -> str:
    words = list(SIGNATURES[category])
    rng.shuffle(words)
    if rng.random() < 0.5:
        return f"It deals with {words[0]}, {words[1]} and {words[2]}."
    return f"Covers {words[0]} {words[1]} {words[2]} concerns."


def _filler_sentence(rng: random.Random) -> str:
    return f"The {rng.choice(ADJECTIVES)} {_n(rng)} {_v(rng)}s each {_n(rng)}."


def generate_synthetic(
    n_per_category: int,
    noise_rate: float,
    seed: int,
    taxonomy: Taxonomy | None = None,
) -> list[LabeledComment]:
    """Generate ``6 * n_per_category`` labeled comments.

    Comment *i* has primary category ``i // n_per_category``; exactly
    ``round(0.2 * N)`` comments receive a second, different category; for
    each category exactly ``round(noise_rate * positives)`` of its positive
    comments lose their signature sentence.
    """
    if n_per_category < 10:
        raise ValueError("n_per_category must be >= 10")
    if not 0.0 <= noise_rate < 0.5:
        raise ValueError("noise_rate must be in [0, 0.5)")
    if taxonomy is not None:
        for cat in CATEGORIES:
            if cat not in taxonomy or any(not taxonomy[cat].applies_to(lang) for lang, _, _ in _LANGS):
                raise ValueError(f"taxonomy must define {cat!r} for all languages")

    rng = random.Random(seed)
    total = n_per_category * len(CATEGORIES)
    labels: list[list[str]] = [[CATEGORIES[i // n_per_category]] for i in range(total)]

    for i in sorted(rng.sample(range(total), round(MULTI_LABEL_FRACTION * total))):
        others = [c for c in CATEGORIES if c != labels[i][0]]
        labels[i].append(rng.choice(others))

    noisy: set[tuple[int, str]] = set()
    for cat in CATEGORIES:
        positives = [i for i in range(total) if cat in labels[i]]
        for i in rng.sample(positives, round(noise_rate * len(positives))):
            noisy.add((i, cat))

    records = []
    for i in range(total):
        lang, folder, ext = _LANGS[i % len(_LANGS)]
        sentences = [_filler_sentence(rng) for _ in range(rng.randint(1, 2))]
        for cat in CATEGORIES:
            trigger, decoy = _trigger_decoy(cat, rng)
            if cat in labels[i]:
                sentences.append(trigger)
                if (i, cat) not in noisy:
                    sentences.append(_signature_sentence(cat, rng))
            else:
                sentences.append(decoy)
        rng.shuffle(sentences)
        name = f"Synthetic{i:04d}"
        path = f"synthetic/{folder}/{name}.{ext}"
        comment = ClassComment(comment_id(path, name, 0), lang, name, " ".join(sentences), 1, 1, 2, path)
        records.append(LabeledComment(comment, frozenset(labels[i])))
    return records
