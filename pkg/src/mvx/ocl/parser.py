"""Lexer and recursive-descent parser for the supported OCL subset."""

from __future__ import annotations

from .._lexing import Token, error_at, scan_number, scan_string
from ..errors import ParseError
from ..model import OperationSig
from ..values import INVALID
from . import ast as A

KEYWORDS = {
    "and", "or", "xor", "not", "implies", "if", "then", "else", "endif", "let", "in",
    "true", "false", "null", "invalid", "context", "inv", "pre", "post", "derive",
}
COLLECTION_KINDS = {"Set", "Bag", "Sequence"}

# name -> arity
DOT_OPS = {
    "size": 0, "concat": 1, "substring": 2, "toUpperCase": 0, "toLowerCase": 0, "indexOf": 1,
    "abs": 0, "floor": 0, "round": 0, "max": 1, "min": 1, "div": 1, "mod": 1,
}
TYPE_OPS = {"oclIsTypeOf", "oclIsKindOf", "oclAsType", "oclIsUndefined"}
ARROW_OPS = {
    "size": 0, "includes": 1, "excludes": 1, "includesAll": 1, "excludesAll": 1, "isEmpty": 0,
    "notEmpty": 0, "sum": 0, "count": 1, "first": 0, "last": 0, "at": 1, "indexOf": 1,
    "including": 1, "excluding": 1, "union": 1, "intersection": 1, "append": 1, "prepend": 1,
    "flatten": 0, "asSet": 0, "asBag": 0, "asSequence": 0,
}
# name -> max number of declared iterator variables
ITERATORS = {
    "select": 1, "reject": 1, "collect": 1, "forAll": 2, "exists": 2, "one": 1, "any": 1,
    "isUnique": 1, "sortedBy": 1,
}

_TWO_CHAR = ("->", "<>", "<=", ">=", "::")
_ONE_CHAR = "().,:;|=<>+-*/{}"


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch in " \t\r\n":
            i += 1
            continue
        if source.startswith("--", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        if ch.isalpha() or ch == "_":
            j = i + 1
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            word = source[i:j]
            tokens.append(Token("kw" if word in KEYWORDS else "ident", word, word, i))
            i = j
            continue
        if ch.isdigit():
            kind, value, j = scan_number(source, i)
            tokens.append(Token(kind, source[i:j], value, i))
            i = j
            continue
        if ch == "'":
            value, j = scan_string(source, i, "'")
            tokens.append(Token("string", source[i:j], value, i))
            i = j
            continue
        if source.startswith("@pre", i) and not (i + 4 < n and (source[i + 4].isalnum() or source[i + 4] == "_")):
            tokens.append(Token("op", "@pre", None, i))
            i += 4
            continue
        two = source[i:i + 2]
        if two in _TWO_CHAR:
            tokens.append(Token("op", two, None, i))
            i += 2
            continue
        if ch in _ONE_CHAR:
            tokens.append(Token("op", ch, None, i))
            i += 1
            continue
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
        self.scope: list[str] = ["self"]
        self.allow_pre = False
        self.allow_result = False

    # -- token helpers -------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def at(self, text: str, kind: str | None = None) -> bool:
        tok = self.tok
        return tok.text == text and tok.kind in ((kind,) if kind else ("op", "kw"))

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def fail(self, message: str, expected=(), tok: Token | None = None, kind=None):
        tok = tok or self.tok
        return error_at(self.source, tok.offset, message, expected, kind=kind)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.fail(f"expected {text!r}, found {_describe(self.tok)}", [repr(text)])
        tok = self.tok
        self.pos += 1
        return tok

    def name(self, what: str = "identifier") -> str:
        tok = self.tok
        if tok.kind != "ident":
            raise self.fail(f"expected {what}, found {_describe(tok)}", [what])
        self.pos += 1
        return tok.text

    # -- context declarations ------------------------------------------------

    def parse_file(self) -> list:
        decls = []
        if self.tok.kind == "eof":
            raise self.fail("expected 'context'", ["'context'"])
        while self.tok.kind != "eof":
            decls.append(self.parse_decl())
        return decls

    def parse_decl(self):
        self.expect("context")
        class_name = self.name("class name")
        if self.accept("::"):
            member = self.name("feature or operation name")
            if self.at("("):
                return self.parse_operation(class_name, member)
            self.expect(":")
            declared = self.name("type name")
            self.expect("derive")
            self.expect(":")
            return A.DeriveContext(class_name, member, declared, self.parse_clause_body())
        invariants = []
        while self.at("inv"):
            self.pos += 1
            label = self.name() if self.tok.kind == "ident" else None
            self.expect(":")
            invariants.append((label, self.parse_clause_body()))
        if not invariants:
            raise self.fail(f"expected 'inv', found {_describe(self.tok)}", ["'inv'", "'::'"])
        return A.ClassContext(class_name, tuple(invariants))

    def parse_operation(self, class_name: str, op_name: str):
        self.expect("(")
        params: list[tuple[str, str]] = []
        if not self.at(")"):
            while True:
                pname = self.name("parameter name")
                self.expect(":")
                ptype = self.name("type name")
                if any(p == pname for p, _ in params):
                    raise self.fail(f"duplicate parameter {pname!r}", tok=self.peek(-2))
                params.append((pname, "Real" if ptype == "Number" else ptype))
                if not self.accept(","):
                    break
        self.expect(")")
        ret = None
        if self.accept(":"):
            ret = self.name("type name")
            ret = "Real" if ret == "Number" else ret
        sig = OperationSig(op_name, tuple(params), ret)
        pres, posts = [], []
        outer = list(self.scope)
        self.scope.extend(p for p, _ in params)
        try:
            while self.at("pre") or self.at("post"):
                is_post = self.tok.text == "post"
                self.pos += 1
                label = self.name() if self.tok.kind == "ident" else None
                self.expect(":")
                self.allow_pre = is_post
                self.allow_result = is_post and ret is not None
                try:
                    body = self.parse_clause_body()
                finally:
                    self.allow_pre = self.allow_result = False
                (posts if is_post else pres).append((label, body))
        finally:
            self.scope = outer
        if not pres and not posts:
            raise self.fail(f"expected 'pre' or 'post', found {_describe(self.tok)}", ["'pre'", "'post'"])
        return A.OperationContext(class_name, sig, tuple(pres), tuple(posts))

    def parse_clause_body(self):
        body = self.parse_expr()
        if self.tok.kind != "eof" and not (self.tok.kind == "kw" and self.tok.text in ("inv", "pre", "post", "context")):
            raise self.fail(f"unexpected {_describe(self.tok)} after expression", ["end of clause"])
        return body

    # -- expressions -----------------------------------------------------------

    def parse_expr(self):
        return self.parse_implies()

    def parse_implies(self):
        left = self.parse_or()
        while self.at("implies"):
            self.pos += 1
            left = A.Binary("implies", left, self.parse_or())
        return left

    def parse_or(self):
        left = self.parse_and()
        while self.at("or") or self.at("xor"):
            op = self.tok.text
            self.pos += 1
            left = A.Binary(op, left, self.parse_and())
        return left

    def parse_and(self):
        left = self.parse_rel()
        while self.at("and"):
            self.pos += 1
            left = A.Binary("and", left, self.parse_rel())
        return left

    def parse_rel(self):
        left = self.parse_add()
        while self.tok.kind == "op" and self.tok.text in ("=", "<>", "<", "<=", ">", ">="):
            op = self.tok.text
            self.pos += 1
            left = A.Binary(op, left, self.parse_add())
        return left

    def parse_add(self):
        left = self.parse_mul()
        while self.tok.kind == "op" and self.tok.text in ("+", "-"):
            op = self.tok.text
            self.pos += 1
            left = A.Binary(op, left, self.parse_mul())
        return left

    def parse_mul(self):
        left = self.parse_unary()
        while self.tok.kind == "op" and self.tok.text in ("*", "/"):
            op = self.tok.text
            self.pos += 1
            left = A.Binary(op, left, self.parse_unary())
        return left

    def parse_unary(self):
        if self.at("not"):
            self.pos += 1
            return A.Unary("not", self.parse_unary())
        if self.at("-"):
            self.pos += 1
            return A.Unary("-", self.parse_unary())
        return self.parse_postfix()

    def parse_postfix(self):
        node = self.parse_primary()
        while True:
            if self.at("."):
                self.pos += 1
                name_tok = self.tok
                name = self.name()
                if self.at("("):
                    node = self.parse_dot_call(node, name, name_tok)
                else:
                    node = A.Nav(node, name)
            elif self.at("->"):
                self.pos += 1
                name_tok = self.tok
                name = self.name()
                node = self.parse_arrow_call(node, name, name_tok)
            elif self.at("@pre"):
                if not self.allow_pre:
                    raise self.fail("'@pre' is only allowed in postconditions", kind="MisplacedPre")
                if not isinstance(node, A.Nav):
                    raise self.fail("'@pre' must follow a property navigation")
                self.pos += 1
                node = A.AtPre(node)
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

    def _check_arity(self, name: str, args: tuple, arity: int, tok: Token) -> None:
        if len(args) != arity:
            raise self.fail(f"{name}() takes {arity} argument(s), got {len(args)}", tok=tok)

    def parse_dot_call(self, source, name: str, name_tok: Token):
        if name == "allInstances":
            self.expect("(")
            self.expect(")")
            if isinstance(source, A.Var) and source.name not in self.scope:
                return A.AllInstances(source.name)
            raise self.fail("allInstances() must be called on a class name", tok=name_tok)
        if name in TYPE_OPS:
            self.expect("(")
            type_name = None
            if name != "oclIsUndefined":
                type_name = self.name("type name")
            self.expect(")")
            return A.TypeOp(source, name, type_name)
        if name not in DOT_OPS:
            raise self.fail(f"unknown operation {name!r}", tok=name_tok, kind="UnknownOperation")
        args = self.parse_args()
        self._check_arity(name, args, DOT_OPS[name], name_tok)
        return A.OpCall(source, name, args)

    def parse_arrow_call(self, source, name: str, name_tok: Token):
        if name == "iterate":
            return self.parse_iterate(source)
        if name in ITERATORS:
            self.expect("(")
            names = self.try_iterator_vars()
            if len(names) > ITERATORS[name]:
                raise self.fail(f"{name} declares at most {ITERATORS[name]} variable(s)", tok=name_tok)
            outer = list(self.scope)
            self.scope.extend(names)
            try:
                body = self.parse_expr()
            finally:
                self.scope = outer
            self.expect(")")
            return A.IteratorExp(source, name, tuple(names), body)
        if name not in ARROW_OPS:
            raise self.fail(f"unknown collection operation {name!r}", tok=name_tok, kind="UnknownOperation")
        args = self.parse_args()
        self._check_arity(name, args, ARROW_OPS[name], name_tok)
        return A.ArrowCall(source, name, args)

    def _var_decl(self) -> str:
        name = self.name()
        if self.accept(":"):
            self.parse_type()
        return name

    def parse_type(self) -> str:
        name = self.name("type name")
        if name in COLLECTION_KINDS and self.accept("("):
            self.parse_type()
            self.expect(")")
        return name

    def try_iterator_vars(self) -> list[str]:
        """Parse ``v1 [: T], v2 [: T] |`` if present; otherwise consume nothing."""
        start = self.pos
        names: list[str] = []
        try:
            while True:
                names.append(self._var_decl())
                if not self.accept(","):
                    break
            if self.accept("|"):
                return names
        except ParseError:
            pass
        self.pos = start
        return []

    def parse_iterate(self, source):
        self.expect("(")
        var = self._var_decl()
        self.expect(";")
        acc = self._var_decl()
        self.expect("=")
        outer = list(self.scope)
        init = self.parse_expr()
        self.expect("|")
        self.scope.extend([var, acc])
        try:
            body = self.parse_expr()
        finally:
            self.scope = outer
        self.expect(")")
        return A.IterateExp(source, var, acc, init, body)

    def parse_primary(self):
        tok = self.tok
        if tok.kind in ("int", "real", "string"):
            self.pos += 1
            return A.Literal(tok.value)
        if tok.kind == "kw":
            if tok.text in ("true", "false"):
                self.pos += 1
                return A.Literal(tok.text == "true")
            if tok.text == "null":
                self.pos += 1
                return A.Literal(None)
            if tok.text == "invalid":
                self.pos += 1
                return A.Literal(INVALID)
            if tok.text == "if":
                return self.parse_if()
            if tok.text == "let":
                return self.parse_let()
        if tok.kind == "op" and tok.text == "(":
            self.pos += 1
            inner = self.parse_expr()
            self.expect(")")
            return inner
        if tok.kind == "ident":
            if tok.text in COLLECTION_KINDS and self.peek().text == "{":
                return self.parse_collection_literal()
            self.pos += 1
            if tok.text == "result":
                if not self.allow_result:
                    raise self.fail(
                        "'result' is only allowed in postconditions of operations with a return type",
                        tok=tok,
                        kind="MisplacedResult",
                    )
                return A.ResultRef()
            return A.Var(tok.text)
        raise self.fail(f"expected expression, found {_describe(tok)}", ["expression"])

    def parse_collection_literal(self):
        kind = self.name()
        self.expect("{")
        items = []
        if not self.at("}"):
            items.append(self.parse_expr())
            while self.accept(","):
                items.append(self.parse_expr())
        self.expect("}")
        return A.CollectionLiteral(kind, tuple(items))

    def parse_if(self):
        self.expect("if")
        cond = self.parse_expr()
        self.expect("then")
        then = self.parse_expr()
        self.expect("else")
        otherwise = self.parse_expr()
        self.expect("endif")
        return A.If(cond, then, otherwise)

    def parse_let(self):
        self.expect("let")
        bindings = []
        outer = list(self.scope)
        try:
            while True:
                name = self._var_decl()
                self.expect("=")
                bindings.append((name, self.parse_expr()))
                self.scope.append(name)
                if not self.accept(","):
                    break
            self.expect("in")
            body = self.parse_expr()
        finally:
            self.scope = outer
        for name, init in reversed(bindings):
            body = A.Let(name, init, body)
        return body


def parse_constraints(text: str) -> list:
    """Parse a constraint file into context declarations, in source order."""
    return _Parser(text).parse_file()


def parse_expression(text: str, params=(), *, postcondition: bool = False, has_result: bool = False):
    """Parse one bare expression.

    ``params`` names extra in-scope variables (operation parameters);
    ``postcondition`` enables ``@pre`` and, with ``has_result``, ``result``.
    """
    p = _Parser(text)
    p.scope.extend(params)
    p.allow_pre = postcondition
    p.allow_result = postcondition and has_result
    node = p.parse_expr()
    if p.tok.kind != "eof":
        raise p.fail(f"unexpected {_describe(p.tok)} after expression", ["end of input"], kind="TrailingInput")
    return node
