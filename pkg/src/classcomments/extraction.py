"""Lexical scanners that locate class comments in Java, Python and Tonel sources.

The scanners only track string, comment and bracket state; none of them
builds a syntax tree.  Each one yields every class declaration it finds
together with the comment attached to it (if any), so that
:func:`extract_class_comments` and :func:`extract_class_declarations` share
one code path and can never disagree.
"""

from __future__ import annotations

import ast
import enum
import inspect
import io
import json
import logging
import os
import re
import tokenize
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple

from .errors import UnbalancedDelimiter

log = logging.getLogger(__name__)


class Language(enum.Enum):
    JAVA = "Java"
    PYTHON = "Python"
    SMALLTALK = "Smalltalk"
    UNKNOWN = "Unknown"

    @classmethod
    def parse(cls, name: str) -> "Language":
        for lang in cls:
            if lang.value.lower() == name.strip().lower():
                return lang
        raise ValueError(f"unknown language {name!r}")


SUPPORTED_LANGUAGES = (Language.JAVA, Language.PYTHON, Language.SMALLTALK)

_EXTENSIONS = {".java": Language.JAVA, ".py": Language.PYTHON, ".st": Language.SMALLTALK}


def detect_language(path: str | os.PathLike) -> Language:
    suffix = Path(path).suffix.lower()
    return _EXTENSIONS.get(suffix, Language.UNKNOWN)


@dataclass(frozen=True)
class SourceFile:
    path: str
    language: Language
    content: str
    replacements: int = 0

    def __post_init__(self):
        if self.language is Language.UNKNOWN:
            raise ValueError(f"{self.path}: language must be known")


def read_source(path: str | os.PathLike, language: Language | None = None) -> SourceFile:
    """Read *path* as UTF-8, replacing invalid bytes and counting them."""
    lang = language or detect_language(path)
    if lang is Language.UNKNOWN:
        raise ValueError(f"{path}: cannot infer language from extension")
    data = Path(path).read_bytes()
    text = data.decode("utf-8", errors="replace")
    replaced = text.count("�") - data.count("�".encode("utf-8"))
    return SourceFile(Path(path).as_posix(), lang, text, replaced)


@dataclass(frozen=True)
class ClassComment:
    id: str
    language: Language
    class_name: str
    raw_text: str
    start_line: int
    end_line: int
    declaration_line: int
    path: str

    @property
    def span(self) -> tuple[int, int]:
        return (self.start_line, self.end_line)

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "language": self.language.value,
            "class_name": self.class_name,
            "raw_text": self.raw_text,
            "start_line": self.start_line,
            "end_line": self.end_line,
            "declaration_line": self.declaration_line,
            "path": self.path,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "ClassComment":
        return cls(
            id=str(rec["id"]),
            language=Language.parse(rec["language"]),
            class_name=str(rec["class_name"]),
            raw_text=str(rec["raw_text"]),
            start_line=int(rec["start_line"]),
            end_line=int(rec["end_line"]),
            declaration_line=int(rec["declaration_line"]),
            path=str(rec["path"]),
        )


class ClassDeclaration(NamedTuple):
    class_name: str
    declaration_line: int
    has_comment: bool


class _Found(NamedTuple):
    name: str
    declaration_line: int
    comment: tuple[str, int, int] | None  # (raw_text, start_line, end_line)


class _Lines:
    """Offset -> (line, column) lookup."""

    def __init__(self, text: str):
        self.starts = [0]
        for i, ch in enumerate(text):
            if ch == "\n":
                self.starts.append(i + 1)

    def line(self, offset: int) -> int:
        lo, hi = 0, len(self.starts)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.starts[mid] <= offset:
                lo = mid
            else:
                hi = mid
        return lo + 1

    def column(self, offset: int) -> int:
        return offset - self.starts[self.line(offset) - 1] + 1


def _normalize_newlines(text: str) -> str:
    return text.replace("\r\n", "\n").replace("\r", "\n")


def _clean(text: str) -> str:
    cleaned = inspect.cleandoc(text)
    return "\n".join(line.rstrip() for line in cleaned.split("\n")).strip("\n")


# --------------------------------------------------------------------- Java

_JAVA_MODIFIERS = frozenset(
    "public protected private static final abstract sealed non strictfp".split()
)
_JAVA_DECL = frozenset(("class", "interface", "enum"))


def _java_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch in "_$"


def _java_ident_part(ch: str) -> bool:
    return ch.isalnum() or ch in "_$"


def _java_doc_text(block: str) -> str:
    body = block[3:-2]
    lines = []
    for line in body.split("\n"):
        stripped = line.lstrip()
        if stripped.startswith("*"):
            line = stripped[1:]
        lines.append(line)
    return _clean("\n".join(lines))


class _JavaScanner:
    def __init__(self, text: str, path: str):
        self.text = text
        self.path = path
        self.n = len(text)
        self.lines = _Lines(text)

    def _fail(self, offset: int, what: str):
        raise UnbalancedDelimiter(self.path, self.lines.line(offset), self.lines.column(offset), what)

    def _skip_quoted(self, i: int, quote: str) -> int:
        """Skip a '...' or "..." literal starting at *i*; return the index after it."""
        j = i + 1
        while j < self.n:
            ch = self.text[j]
            if ch == "\\":
                j += 2
                continue
            if ch == quote:
                return j + 1
            if ch == "\n":
                break
            j += 1
        self._fail(i, "string literal" if quote == '"' else "character literal")

    def _skip_text_block(self, i: int) -> int:
        j = i + 3
        while j < self.n:
            if self.text[j] == "\\":
                j += 2
                continue
            if self.text.startswith('"""', j):
                return j + 3
            j += 1
        self._fail(i, "text block")

    def _skip_trivia(self, i: int) -> int:
        """Skip whitespace and comments."""
        text = self.text
        while i < self.n:
            if text[i].isspace():
                i += 1
            elif text.startswith("//", i):
                end = text.find("\n", i)
                i = self.n if end < 0 else end
            elif text.startswith("/*", i):
                end = text.find("*/", i + 2)
                if end < 0:
                    self._fail(i, "block comment")
                i = end + 2
            else:
                break
        return i

    def _read_ident(self, i: int) -> tuple[str, int]:
        j = i
        while j < self.n and _java_ident_part(self.text[j]):
            j += 1
        return self.text[i:j], j

    def _skip_annotation_args(self, i: int) -> int:
        """*i* points at '('; skip to the matching ')'."""
        depth = 0
        text = self.text
        start = i
        while i < self.n:
            ch = text[i]
            if text.startswith('"""', i):
                i = self._skip_text_block(i)
                continue
            if ch in "\"'":
                i = self._skip_quoted(i, ch)
                continue
            if text.startswith("/*", i) or text.startswith("//", i):
                i = self._skip_trivia(i)
                continue
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth == 0:
                    return i + 1
            i += 1
        self._fail(start, "annotation argument list")

    def scan(self) -> list[_Found]:
        text = self.text
        found: list[_Found] = []
        pending: tuple[int, int] | None = None
        depth = 0
        stack: list[tuple[str, int]] = []
        awaiting: str | None = None
        prev = ""
        i = 0
        while i < self.n:
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if text.startswith("//", i):
                end = text.find("\n", i)
                i = self.n if end < 0 else end
                pending = None
                continue
            if text.startswith("/*", i):
                end = text.find("*/", i + 2)
                if end < 0:
                    self._fail(i, "block comment")
                block_end = end + 2
                is_doc = text.startswith("/**", i) and block_end - i > 4
                pending = (i, block_end) if is_doc else None
                i = block_end
                continue
            if text.startswith('"""', i):
                i = self._skip_text_block(i)
                pending, prev = None, '"'
                continue
            if ch in "\"'":
                i = self._skip_quoted(i, ch)
                pending, prev = None, ch
                continue
            if ch == "@":
                j = self._skip_trivia(i + 1)
                name, j = self._read_ident(j)
                if name == "interface":
                    nxt = self._declare(i, j, pending, stack, found)
                    if nxt >= 0:
                        awaiting = found[-1].name
                    i = max(nxt, j)
                    pending, prev = None, "e"
                    continue
                while True:
                    k = self._skip_trivia(j)
                    if k < self.n and text[k] == "." and k + 1 < self.n and _java_ident_start(text[self._skip_trivia(k + 1)]):
                        _, j = self._read_ident(self._skip_trivia(k + 1))
                        continue
                    break
                k = self._skip_trivia(j)
                if k < self.n and text[k] == "(":
                    j = self._skip_annotation_args(k)
                i = j
                prev = ")"
                continue
            if _java_ident_start(ch):
                word, j = self._read_ident(i)
                if word in _JAVA_DECL and prev != ".":
                    nxt = self._declare(i, j, pending, stack, found)
                    if nxt >= 0:
                        awaiting = found[-1].name
                    i = max(nxt, j)
                    pending, prev = None, "e"
                    continue
                if word not in _JAVA_MODIFIERS:
                    pending = None
                elif word == "non" and text.startswith("-sealed", j):
                    j += len("-sealed")
                prev = "e"
                i = j
                continue
            if ch.isdigit():
                j = i
                while j < self.n and (_java_ident_part(text[j]) or text[j] == "."):
                    j += 1
                i = j
                pending, prev = None, "0"
                continue
            if ch == "{":
                depth += 1
                if awaiting is not None:
                    stack.append((awaiting, depth))
                    awaiting = None
            elif ch == "}":
                if depth == 0:
                    self._fail(i, "closing brace")
                while stack and stack[-1][1] == depth:
                    stack.pop()
                depth -= 1
            elif ch == ";":
                awaiting = None
            pending = None
            prev = ch
            i += 1
        return found

    def _declare(self, kw_offset, after_kw, pending, stack, found) -> int:
        """Record a declaration whose keyword starts at *kw_offset*.

        Returns the index after the class name, or -1 when no name follows.
        """
        j = self._skip_trivia(after_kw)
        if j >= self.n or not _java_ident_start(self.text[j]):
            return -1
        name, end = self._read_ident(j)
        qualified = f"{stack[-1][0]}.{name}" if stack else name
        comment = None
        if pending is not None:
            start, stop = pending
            comment = (
                _java_doc_text(self.text[start:stop]),
                self.lines.line(start),
                self.lines.line(stop - 1),
            )
        found.append(_Found(qualified, self.lines.line(kw_offset), comment))
        return end


def _scan_java(text: str, path: str) -> list[_Found]:
    return _JavaScanner(text, path).scan()


# ------------------------------------------------------------------- Python


def _python_docstring(tok: tokenize.TokenInfo) -> str | None:
    literal = tok.string
    prefix = literal[: len(literal) - len(literal.lstrip("rRbBuUfF"))].lower()
    if "b" in prefix or "f" in prefix:
        return None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        value = ast.literal_eval(literal)
    return value if isinstance(value, str) else None


def _scan_python(text: str, path: str) -> list[_Found]:
    found: list[_Found] = []
    # (qualified name, indent level of its body)
    stack: list[tuple[str, int]] = []
    level = 0
    at_stmt_start = True
    # state machine for a class header:
    #   None -> idle; "name" -> saw `class`; "header" -> inside header;
    #   "body" -> after ':'; "first" -> first body token seen (tok is STRING)
    state = None
    cls_name = cls_line = 0
    paren = 0
    body_indented = False
    doc_tok: tokenize.TokenInfo | None = None

    def finish(comment_tok):
        comment = None
        if comment_tok is not None:
            value = _python_docstring(comment_tok)
            if value is not None:
                comment = (_clean(value), comment_tok.start[0], comment_tok.end[0])
        found.append(_Found(cls_name, cls_line, comment))

    try:
        tokens = list(tokenize.generate_tokens(io.StringIO(text).readline))
    except tokenize.TokenError as exc:
        line, col = exc.args[1] if len(exc.args) > 1 else (1, 0)
        raise UnbalancedDelimiter(path, line, col + 1, "string or bracket") from None
    except IndentationError as exc:
        raise UnbalancedDelimiter(path, exc.lineno or 1, (exc.offset or 0) + 1, "indentation") from None

    for tok in tokens:
        ttype = tok.type
        if ttype in (tokenize.COMMENT, tokenize.NL, tokenize.ENCODING):
            continue
        if ttype == tokenize.INDENT:
            level += 1
            if state == "body" and not body_indented:
                body_indented = True
                stack.append((cls_name, level))
            continue
        if ttype == tokenize.DEDENT:
            level -= 1
            while stack and stack[-1][1] > level:
                stack.pop()
            continue

        if state == "first":
            # the string was the first token of the body statement; it is a
            # docstring only when the statement ends right here, so implicit
            # concatenations do not count
            if ttype == tokenize.NEWLINE or (ttype == tokenize.OP and tok.string == ";") or ttype == tokenize.ENDMARKER:
                finish(doc_tok)
            else:
                finish(None)
            state = None
        elif state == "body":
            if ttype == tokenize.NEWLINE:
                pass
            elif ttype == tokenize.STRING:
                doc_tok = tok
                state = "first"
                at_stmt_start = False
                continue
            else:
                finish(None)
                state = None
        elif state == "name":
            if ttype == tokenize.NAME:
                cls_name = f"{stack[-1][0]}.{tok.string}" if stack else tok.string
                state = "header"
                paren = 0
            else:
                state = None
            at_stmt_start = False
            continue
        elif state == "header":
            if ttype == tokenize.OP:
                if tok.string in "([{":
                    paren += 1
                elif tok.string in ")]}":
                    paren -= 1
                elif tok.string == ":" and paren == 0:
                    state = "body"
                    body_indented = False
            continue

        if ttype == tokenize.NEWLINE:
            at_stmt_start = True
            continue
        if ttype == tokenize.OP and tok.string == ";":
            at_stmt_start = True
            continue
        if at_stmt_start and ttype == tokenize.NAME and tok.string == "class" and state is None:
            state = "name"
            cls_line = tok.start[0]
            at_stmt_start = False
            continue
        at_stmt_start = False

    if state == "body":
        finish(None)
    elif state == "first":
        finish(doc_tok)
    return found


# ---------------------------------------------------------------- Smalltalk

_TONEL_NAME = re.compile(r"#name\s*:\s*(?:#'([^']+)'|#([A-Za-z_][\w:]*)|'([^']+)')")


class _TonelScanner:
    def __init__(self, text: str, path: str):
        self.text = text
        self.path = path
        self.n = len(text)
        self.lines = _Lines(text)

    def _fail(self, offset: int, what: str):
        raise UnbalancedDelimiter(self.path, self.lines.line(offset), self.lines.column(offset), what)

    def _skip_delimited(self, i: int, quote: str, what: str) -> int:
        j = i + 1
        while j < self.n:
            if self.text[j] == quote:
                if j + 1 < self.n and self.text[j + 1] == quote:
                    j += 2
                    continue
                return j + 1
            j += 1
        self._fail(i, what)

    def _matching_brace(self, i: int) -> int:
        depth = 0
        j = i
        while j < self.n:
            ch = self.text[j]
            if ch == '"':
                j = self._skip_delimited(j, '"', "comment")
                continue
            if ch == "'":
                j = self._skip_delimited(j, "'", "string")
                continue
            if ch == "$":
                j += 2
                continue
            if ch in "[({":
                depth += 1
            elif ch in "])}":
                depth -= 1
                if depth == 0:
                    return j
            j += 1
        self._fail(i, "class definition brace")

    def scan(self) -> list[_Found]:
        text = self.text
        found: list[_Found] = []
        pending: tuple[int, int] | None = None
        depth = 0
        i = 0
        while i < self.n:
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if ch == '"':
                end = self._skip_delimited(i, '"', "comment")
                pending = (i, end) if depth == 0 else None
                i = end
                continue
            if ch == "'":
                i = self._skip_delimited(i, "'", "string")
                pending = None
                continue
            if ch == "$":
                i += 2
                pending = None
                continue
            if ch.isalpha() or ch == "_":
                j = i
                while j < self.n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                word = text[i:j]
                k = j
                while k < self.n and text[k].isspace():
                    k += 1
                if word == "Class" and depth == 0 and k < self.n and text[k] == "{":
                    close = self._matching_brace(k)
                    match = _TONEL_NAME.search(text, k, close)
                    if match:
                        name = next(g for g in match.groups() if g)
                        comment = None
                        if pending is not None:
                            start, stop = pending
                            body = text[start + 1 : stop - 1].replace('""', '"')
                            comment = (_clean(body), self.lines.line(start), self.lines.line(stop - 1))
                        found.append(_Found(name, self.lines.line(i), comment))
                    else:
                        log.warning("%s:%d: Class definition without #name", self.path, self.lines.line(i))
                    i = close + 1
                    pending = None
                    continue
                pending = None
                i = j
                continue
            if ch in "[({":
                depth += 1
            elif ch in "])}":
                if depth == 0:
                    self._fail(i, f"closing {ch!r}")
                depth -= 1
            pending = None
            i += 1
        return found


def _scan_tonel(text: str, path: str) -> list[_Found]:
    return _TonelScanner(text, path).scan()


# ------------------------------------------------------------------ public

_SCANNERS = {
    Language.JAVA: _scan_java,
    Language.PYTHON: _scan_python,
    Language.SMALLTALK: _scan_tonel,
}


def comment_id(path: str, class_name: str, ordinal: int) -> str:
    return f"{path}::{class_name}#{ordinal}"


def scan_file(file: SourceFile) -> list[tuple[str, ClassDeclaration, ClassComment | None]]:
    """Return ``(id, declaration, comment)`` for every class in *file*.

    Raises :class:`UnbalancedDelimiter` for lexically broken input.
    """
    if file.language is Language.UNKNOWN:
        raise ValueError("precondition violated: language is Unknown")
    text = _normalize_newlines(file.content)
    raw = _SCANNERS[file.language](text, file.path)
    seen: dict[str, int] = {}
    out = []
    for item in sorted(raw, key=lambda f: f.declaration_line):
        ordinal = seen.get(item.name, 0)
        seen[item.name] = ordinal + 1
        cid = comment_id(file.path, item.name, ordinal)
        decl = ClassDeclaration(item.name, item.declaration_line, item.comment is not None)
        comment = None
        if item.comment is not None:
            raw_text, start, end = item.comment
            comment = ClassComment(cid, file.language, item.name, raw_text, start, end, item.declaration_line, file.path)
        out.append((cid, decl, comment))
    return out


def extract_class_comments(file: SourceFile) -> list[ClassComment]:
    return [c for _, _, c in scan_file(file) if c is not None]


def extract_class_declarations(file: SourceFile) -> list[ClassDeclaration]:
    return [d for _, d, _ in scan_file(file)]


def iter_source_paths(paths: Iterable[str | os.PathLike], language: Language | None = None) -> Iterator[Path]:
    """Walk files and directories; yield source files in sorted order."""
    collected: set[Path] = set()
    for p in paths:
        p = Path(p)
        if p.is_dir():
            for root, dirs, files in os.walk(p):
                dirs.sort()
                for name in files:
                    child = Path(root) / name
                    if language is not None or detect_language(child) is not Language.UNKNOWN:
                        collected.add(child)
        else:
            collected.add(p)
    yield from sorted(collected, key=lambda q: q.as_posix())


def extract_paths(
    paths: Iterable[str | os.PathLike],
    language: Language | None = None,
    diagnostics: list[str] | None = None,
) -> list[ClassComment]:
    """Extract comments from every source file below *paths*.

    Unreadable or lexically broken files are reported in *diagnostics*
    (and logged) and skipped.
    """
    out: list[ClassComment] = []
    for path in iter_source_paths(paths, language):
        try:
            file = read_source(path, language)
            out.extend(extract_class_comments(file))
        except (OSError, ValueError, UnbalancedDelimiter) as exc:
            msg = f"{path.as_posix()}: skipped: {exc}"
            log.warning(msg)
            if diagnostics is not None:
                diagnostics.append(msg)
    out.sort(key=lambda c: (c.path, c.declaration_line))
    return out


def to_jsonl(comments: Iterable[ClassComment]) -> str:
    return "".join(json.dumps(c.to_record(), ensure_ascii=False) + "\n" for c in comments)
