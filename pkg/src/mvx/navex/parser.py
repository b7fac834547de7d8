"""Lexer and Pratt parser for NavEx expressions."""

from __future__ import annotations

from .._lexing import Token, error_at, scan_number, scan_string
from . import ast as A

_OPS = (
    "===", "!==", "=>", "==", "!=", "<=", ">=", "&&", "||",
    "<", ">", "+", "-", "*", "/", "%", "!", "?", ":", "(", ")", "[", "]", "{", "}", ",", ".", "$", ";",
)
LITERAL_WORDS = {"true": True, "false": False, "null": None}

# binding powers, loosest first
_BINARY = {
    "||": 3,
    "&&": 4,
    "===": 5, "!==": 5, "==": 5, "!=": 5,
    "<": 6, "<=": 6, ">": 6, ">=": 6,
    "+": 7, "-": 7,
    "*": 8, "/": 8, "%": 8,
}
_COND_BP = 2
_UNARY_BP = 9


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch in " \t\r\n":
            i += 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        if ch.isalpha() or ch == "_":
            j = i + 1
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            tokens.append(Token("ident", source[i:j], source[i:j], i))
            i = j
            continue
        if ch.isdigit():
            kind, value, j = scan_number(source, i)
            tokens.append(Token(kind, source[i:j], value, i))
            i = j
            continue
        if ch in "'\"":
            value, j = scan_string(source, i, "'\"")
            tokens.append(Token("string", source[i:j], value, i))
            i = j
            continue
        for op in _OPS:
            if source.startswith(op, i):
                tokens.append(Token("op", op, None, i))
                i += len(op)
                break
        else:
            raise error_at(source, i, f"unexpected character {ch!r}")
    tokens.append(Token("eof", "", None, n))
    return tokens


def _describe(tok: Token) -> str:
    return "end of input" if tok.kind == "eof" else repr(tok.text)


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = tokenize(source)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def fail(self, message: str, expected=(), tok: Token | None = None, kind=None):
        return error_at(self.source, (tok or self.tok).offset, message, expected, kind=kind)

    def expect(self, text: str) -> None:
        if not self.accept(text):
            raise self.fail(f"expected {text!r}, found {_describe(self.tok)}", [repr(text)])

    def name(self, what: str = "identifier") -> str:
        tok = self.tok
        if tok.kind != "ident":
            raise self.fail(f"expected {what}, found {_describe(tok)}", [what])
        self.pos += 1
        return tok.text

    # -- expressions -------------------------------------------------------------

    def parse_expr(self, min_bp: int = 0):
        left = self.parse_prefix()
        while True:
            tok = self.tok
            if tok.kind != "op":
                return left
            if tok.text == "?" and _COND_BP > min_bp:
                self.pos += 1
                then = self.parse_expr()
                self.expect(":")
                otherwise = self.parse_expr(_COND_BP - 1)
                left = A.Cond(left, then, otherwise)
                continue
            bp = _BINARY.get(tok.text)
            if bp is None or bp <= min_bp:
                return left
            self.pos += 1
            left = A.Binary(tok.text, left, self.parse_expr(bp))

    def parse_prefix(self):
        if self.at("!") or self.at("-"):
            op = self.tok.text
            self.pos += 1
            return A.Unary(op, self.parse_expr(_UNARY_BP))
        return self.parse_postfix(self.parse_primary())

    def parse_postfix(self, node):
        while True:
            if self.at("."):
                self.pos += 1
                if self.accept("$"):
                    node = A.Dollar(node, self.name("identifier after '$'"))
                else:
                    node = A.Member(node, self.name("member name"))
            elif self.at("["):
                self.pos += 1
                index = self.parse_expr()
                self.expect("]")
                node = A.Index(node, index)
            elif self.at("("):
                node = A.Call(node, self.parse_args())
            else:
                return node

    def parse_args(self) -> tuple:
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.parse_expr())
            while self.accept(","):
                args.append(self.parse_expr())
        self.expect(")")
        return tuple(args)

    def _lambda_params(self) -> tuple[str, ...] | None:
        """Recognize ``x =>`` or ``(x[, y]) =>`` without consuming on a miss."""
        tok = self.tok
        if tok.kind == "ident" and self.peek().text == "=>" and self.peek().kind == "op":
            self.pos += 2
            return (tok.text,)
        if not self.at("("):
            return None
        k, params = 1, []
        while True:
            cand = self.peek(k)
            if cand.kind != "ident":
                return None
            params.append(cand.text)
            sep = self.peek(k + 1)
            if sep.kind == "op" and sep.text == ",":
                k += 2
                continue
            if sep.kind == "op" and sep.text == ")":
                arrow = self.peek(k + 2)
                if arrow.kind == "op" and arrow.text == "=>":
                    if len(params) > 2:
                        raise self.fail("lambdas take one or two parameters", tok=self.peek(k + 2))
                    if len(set(params)) != len(params):
                        raise self.fail("duplicate lambda parameter", tok=self.peek(k + 2))
                    self.pos += k + 3
                    return tuple(params)
            return None

    def parse_primary(self):
        params = self._lambda_params()
        if params is not None:
            return A.Lambda(params, self.parse_expr(_COND_BP - 1))
        tok = self.tok
        if tok.kind in ("int", "real", "string"):
            self.pos += 1
            return A.Literal(tok.value)
        if tok.kind == "ident":
            self.pos += 1
            if tok.text in LITERAL_WORDS:
                return A.Literal(LITERAL_WORDS[tok.text])
            return A.Ident(tok.text)
        if self.accept("("):
            inner = self.parse_expr()
            self.expect(")")
            return inner
        if self.accept("["):
            items = []
            if not self.at("]"):
                items.append(self.parse_expr())
                while self.accept(","):
                    items.append(self.parse_expr())
            self.expect("]")
            return A.ListLit(tuple(items))
        if self.accept("{"):
            entries = []
            if not self.at("}"):
                while True:
                    entries.append(self.parse_entry())
                    if not self.accept(","):
                        break
            self.expect("}")
            return A.RecordLit(tuple(entries))
        if self.at("$"):
            raise self.fail("'$' access must follow '.'", tok=tok)
        raise self.fail(f"expected expression, found {_describe(tok)}", ["expression"])

    def parse_entry(self):
        if self.accept("$"):
            key = "$" + self.name("identifier after '$'")
        elif self.tok.kind == "string":
            key = self.tok.value
            self.pos += 1
        else:
            key = self.name("record key")
        self.expect(":")
        return key, self.parse_expr()


def parse_navex(text: str):
    """Parse a NavEx expression. A single trailing ``;`` is tolerated."""
    p = _Parser(text)
    node = p.parse_expr()
    p.accept(";")
    if p.tok.kind != "eof":
        raise p.fail(f"unexpected {_describe(p.tok)} after expression", ["end of input"], kind="TrailingInput")
    return node
