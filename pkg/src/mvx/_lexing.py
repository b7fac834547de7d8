from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError

WHITESPACE = " \t\r\n"


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "int", "real", "string", "op", "eof"
    text: str
    value: object
    offset: int


def line_col(source: str, offset: int) -> tuple[int, int]:
    """1-based (line, column) of ``offset``; clamped so it always indexes a character."""
    if source:
        offset = max(0, min(offset, len(source) - 1))
    else:
        offset = 0
    line = source.count("\n", 0, offset) + 1
    start = source.rfind("\n", 0, offset) + 1
    return line, offset - start + 1


def error_at(source: str, offset: int, message: str, expected=(), kind=None) -> ParseError:
    line, col = line_col(source, offset)
    return ParseError(message, line, col, expected, kind=kind)


def scan_number(source: str, i: int) -> tuple[str, object, int]:
    """Scan an integer or decimal literal starting at ``i``.

    A dot only continues the number when followed by a digit, so ``3.abs()``
    and ``1..3`` lex the way a reader expects.
    """
    n = len(source)
    j = i
    while j < n and source[j].isdigit():
        j += 1
    is_real = False
    if j + 1 < n and source[j] == "." and source[j + 1].isdigit():
        is_real = True
        j += 1
        while j < n and source[j].isdigit():
            j += 1
    if j < n and source[j] in "eE":
        k = j + 1
        if k < n and source[k] in "+-":
            k += 1
        if k < n and source[k].isdigit():
            is_real = True
            j = k
            while j < n and source[j].isdigit():
                j += 1
    text = source[i:j]
    return ("real", float(text), j) if is_real else ("int", int(text), j)


_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "\\": "\\", "'": "'", '"': '"'}


def scan_string(source: str, i: int, quotes: str) -> tuple[str, int]:
    quote = source[i]
    if quote not in quotes:
        raise error_at(source, i, "expected string literal")
    out = []
    j = i + 1
    while j < len(source):
        ch = source[j]
        if ch == quote:
            return "".join(out), j + 1
        if ch == "\\" and j + 1 < len(source):
            nxt = source[j + 1]
            out.append(_ESCAPES.get(nxt, nxt))
            j += 2
            continue
        if ch == "\n":
            break
        out.append(ch)
        j += 1
    raise error_at(source, i, "unterminated string literal")


def quote_string(value: str, quote: str = "'") -> str:
    body = value.replace("\\", "\\\\").replace(quote, "\\" + quote)
    body = body.replace("\n", "\\n").replace("\t", "\\t").replace("\r", "\\r")
    return f"{quote}{body}{quote}"


def format_number(value) -> str:
    if isinstance(value, float):
        text = repr(value)
        if "inf" in text or "nan" in text:
            raise ValueError(f"non-finite literal {value!r}")
        return text
    return str(value)
