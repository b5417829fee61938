"""Command-line interface: ``classcomments <command> [options]``.

Exit codes: 0 success, 1 guideline violation, 2 usage or configuration
error, 3 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .errors import ConfigError, DataError, SchemaError
from .extraction import Language, extract_paths, iter_source_paths, read_source, to_jsonl
from .features import FeatureMode, Featurizer, load_pattern_library
from .learners import Algorithm, LearnerParams, MultiLabelModel, classify, train_multilabel
from .taxonomy import dumps_labeled, load_labeled_dataset, load_taxonomy

log = logging.getLogger("classcomments")

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_DATA = 0, 1, 2, 3
DEFAULT_SEED = 42


@dataclass
class RunConfig:
    """Everything a command depends on; embedded in every report it writes."""

    command: str
    inputs: list[str] = field(default_factory=list)
    taxonomy: str | None = None
    patterns: str | None = None
    algorithm: str | None = None
    feature_mode: str | None = None
    k: int | None = None
    seed: int = DEFAULT_SEED
    threshold: float | None = None
    out: str | None = None
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        def resolved(p):
            return None if p is None else str(Path(p).resolve())

        inputs = [resolved(p) for p in getattr(args, "inputs", None) or []]
        extra = {}
        for name in ("lang", "model", "guideline", "n_per_category", "noise", "alpha", "max_depth", "min_leaf", "n_trees"):
            value = getattr(args, name, None)
            if value is not None:
                extra[name] = resolved(value) if name in ("model", "guideline") else value
        return cls(
            command=args.command,
            inputs=inputs,
            taxonomy=resolved(getattr(args, "taxonomy", None)),
            patterns=resolved(getattr(args, "patterns", None)),
            algorithm=getattr(args, "algo", None),
            feature_mode=getattr(args, "features", None),
            k=getattr(args, "k", None),
            seed=args.seed if getattr(args, "seed", None) is not None else DEFAULT_SEED,
            threshold=getattr(args, "threshold", None),
            out=resolved(getattr(args, "out", None)),
            extra=extra,
        )

    def to_dict(self) -> dict:
        return asdict(self)


# ------------------------------------------------------------------ output


def _umask_mode() -> int:
    mask = os.umask(0)
    os.umask(mask)
    return 0o666 & ~mask


def write_atomic(path: str | Path, data: str | bytes) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data.encode("utf-8") if isinstance(data, str) else data)
        os.chmod(tmp, _umask_mode())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _plot_atomic(plot, obj, path: Path) -> None:
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".png", dir=path.parent)
    os.close(fd)
    try:
        plot(obj, tmp)
        os.chmod(tmp, _umask_mode())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        write_atomic(out, text)


def emit_report(json_text: str, table: str, out: str | None, plot=None, obj=None) -> list[Path]:
    """Print the table; with ``--out`` also write ``.json``, ``.txt`` and ``.png`` siblings."""
    sys.stdout.write(table)
    if out is None:
        return []
    base = Path(out)
    if base.suffix == ".json":
        base = base.with_suffix("")
    paths = [base.with_name(base.name + ".json"), base.with_name(base.name + ".txt")]
    write_atomic(paths[0], json_text)
    write_atomic(paths[1], table)
    if plot is not None:
        png = base.with_name(base.name + ".png")
        _plot_atomic(plot, obj, png)
        paths.append(png)
    return paths


# ---------------------------------------------------------------- commands


def _language(args) -> Language | None:
    if getattr(args, "lang", None) is None:
        return None
    lang = Language.parse(args.lang)
    if lang is Language.UNKNOWN:
        raise ConfigError(f"unsupported language {args.lang!r}")
    return lang


def _params(args) -> LearnerParams:
    defaults = LearnerParams()
    return LearnerParams(
        alpha=args.alpha if args.alpha is not None else defaults.alpha,
        max_depth=args.max_depth if args.max_depth is not None else defaults.max_depth,
        min_leaf=args.min_leaf if args.min_leaf is not None else defaults.min_leaf,
        n_trees=args.n_trees if args.n_trees is not None else defaults.n_trees,
    )


def _load_model(path: str) -> MultiLabelModel:
    try:
        text = Path(path).read_text(encoding="utf-8")
        return MultiLabelModel.from_json(text)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise SchemaError(path, f"not a valid model file: {exc}") from None


def _check_readable(paths) -> None:
    for p in paths:
        if not Path(p).exists():
            raise ConfigError(f"no such file or directory: {p}")


def cmd_extract(args) -> int:
    _check_readable(args.inputs)
    diagnostics: list[str] = []
    comments = extract_paths(args.inputs, _language(args), diagnostics)
    for msg in diagnostics:
        print(f"warning: {msg}", file=sys.stderr)
    emit(to_jsonl(comments), args.out)
    return EXIT_OK


def cmd_train(args) -> int:
    taxonomy = load_taxonomy(args.taxonomy)
    library = load_pattern_library(args.patterns)
    labeled = load_labeled_dataset(args.dataset, taxonomy)
    featurizer = Featurizer(library, FeatureMode(args.features))
    model = train_multilabel(
        labeled, taxonomy, Algorithm(args.algo), args.seed, featurizer, _params(args), args.threshold
    )
    if model.skipped_categories:
        names = ", ".join(model.skipped_categories)
        print(f"note: not trained (a class is missing): {names}", file=sys.stderr)
    emit(model.to_json(), args.out)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    from .evaluation import cross_validate

    taxonomy = load_taxonomy(args.taxonomy)
    library = load_pattern_library(args.patterns)
    labeled = load_labeled_dataset(args.dataset, taxonomy)
    report = cross_validate(
        labeled,
        taxonomy,
        Algorithm(args.algo),
        FeatureMode(args.features),
        k=args.k,
        seed=args.seed,
        library=library,
        params=_params(args),
        threshold=args.threshold,
    )
    report.fingerprint["run_config"] = RunConfig.from_args(args).to_dict()
    from .plotting import plot_eval_report

    emit_report(report.to_json(), report.to_text(), args.out, plot_eval_report, report)
    return EXIT_OK


def cmd_classify(args) -> int:
    _check_readable(args.inputs)
    model = _load_model(args.model)
    diagnostics: list[str] = []
    comments = extract_paths(args.inputs, _language(args), diagnostics)
    for msg in diagnostics:
        print(f"warning: {msg}", file=sys.stderr)
    lines = [json.dumps(classify(model, c).to_record(), ensure_ascii=False) + "\n" for c in comments]
    emit("".join(lines), args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    from .adherence import check_adherence, load_guideline

    _check_readable(args.inputs)
    model = _load_model(args.model)
    taxonomy = load_taxonomy(args.taxonomy)
    lang = _language(args)
    files = [read_source(p, lang) for p in iter_source_paths(args.inputs, lang)]
    if lang is None:
        found = {f.language for f in files}
        if len(found) > 1:
            raise ConfigError(f"inputs mix languages {sorted(x.value for x in found)}; pass --lang")
        lang = found.pop() if found else (model.languages[0] if len(model.languages) == 1 else None)
    spec = load_guideline(args.guideline, taxonomy, lang)
    report = check_adherence(files, model, spec)
    report.fingerprint = {"run_config": RunConfig.from_args(args).to_dict(), "model_train_seed": model.train_seed}
    from .plotting import plot_adherence

    emit_report(report.to_json(), report.to_text(), args.out, plot_adherence, report)
    return report.exit_code


def cmd_gen_synthetic(args) -> int:
    from .synthetic import generate_synthetic

    taxonomy = load_taxonomy(args.taxonomy)
    try:
        records = generate_synthetic(args.n_per_category, args.noise, args.seed, taxonomy)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    emit(dumps_labeled(records, taxonomy), args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    from .evaluation import EvalReport, compare_modes
    from .plotting import plot_comparison

    reports = []
    for path in (args.report_a, args.report_b):
        try:
            reports.append(EvalReport.from_dict(json.loads(Path(path).read_text(encoding="utf-8"))))
        except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ConfigError(f"{path}: not a readable evaluation report: {exc}") from None
    comparison = compare_modes(*reports)
    doc = comparison.to_dict()
    doc["run_config"] = RunConfig.from_args(args).to_dict()
    json_text = json.dumps(doc, indent=2, allow_nan=False) + "\n"
    emit_report(json_text, comparison.to_text(), args.out, plot_comparison, comparison)
    return EXIT_OK


# ------------------------------------------------------------------ parser


def _add_model_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--taxonomy", help="taxonomy JSON file (default: shipped taxonomy)")
    p.add_argument("--patterns", help="pattern library JSON file (default: shipped library)")
    p.add_argument("--algo", choices=[a.value for a in Algorithm], default="forest")
    p.add_argument("--features", choices=[m.value for m in FeatureMode], default="nlp+tfidf")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--alpha", type=float, help="Laplace smoothing for nb")
    p.add_argument("--max-depth", type=int, help="tree depth limit")
    p.add_argument("--min-leaf", type=int, help="minimum instances per leaf")
    p.add_argument("--n-trees", type=int, help="forest size")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="classcomments", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract class comments as JSON Lines")
    p.add_argument("inputs", nargs="+", metavar="PATH")
    p.add_argument("--lang", help="force a language instead of detecting it from the extension")
    p.add_argument("--out")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="train a multi-label model from a labeled dataset")
    p.add_argument("dataset")
    _add_model_options(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="stratified k-fold cross-validation")
    p.add_argument("dataset")
    _add_model_options(p)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--out", help="report path; .json, .txt and .png are written")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("classify", help="classify the class comments found in source files")
    p.add_argument("inputs", nargs="+", metavar="PATH")
    p.add_argument("--model", required=True)
    p.add_argument("--lang")
    p.add_argument("--out")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("check", help="check class comments against a guideline")
    p.add_argument("inputs", nargs="+", metavar="PATH")
    p.add_argument("--model", required=True)
    p.add_argument("--guideline", help="guideline JSON file (default: shipped one for the language)")
    p.add_argument("--taxonomy")
    p.add_argument("--lang")
    p.add_argument("--out", help="report path; .json, .txt and .png are written")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("gen-synthetic", help="write a labeled synthetic corpus")
    p.add_argument("--n-per-category", type=int, default=200)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--taxonomy")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_synthetic)

    p = sub.add_parser("compare", help="per-category deltas between two evaluation reports (b - a)")
    p.add_argument("report_a")
    p.add_argument("report_b")
    p.add_argument("--out", help="report path; .json, .txt and .png are written")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
