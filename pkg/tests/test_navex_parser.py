import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mvx.errors import ParseError
from mvx.metrics import load_corpus
from mvx.navex import ast as N
from mvx.navex import parse_navex, to_source

from conftest import FIXTURES

DATA = N.Ident("data")

# The navigation fragments as they are used throughout the docs and corpus.
FRAGMENTS = [
    "data.$ownedAttributes.values.map(a => a.name)",
    "data.$ownedFeatures.values.filter(f => f.instanceof.name === 'Attribute')",
    "data.$items.values.length > 0",
    "data.$totalPrice.value === data.$items.values.reduce((acc, i) => acc + i.$price.value, 0)",
    "data.$price.value > 0",
    'data.parent.addObject({$id: "O0001", $totalPrice: 0, $items: []}, \'Order\')',
    "data.$grossSalary.value - data.$tax.value",
]


def method(obj, name, *args):
    return N.Call(N.Member(obj, name), tuple(args))


@pytest.mark.parametrize("text", FRAGMENTS)
def test_fragments_parse(text):
    node = parse_navex(text)
    assert parse_navex(to_source(node)) == node


def test_map_chain():
    node = parse_navex(FRAGMENTS[0])
    values = N.Member(N.Dollar(DATA, "ownedAttributes"), "values")
    assert node == method(values, "map", N.Lambda(("a",), N.Member(N.Ident("a"), "name")))


def test_comparison():
    assert parse_navex("data.$price.value > 0") == N.Binary(
        ">", N.Member(N.Dollar(DATA, "price"), "value"), N.Literal(0)
    )


def test_dollar_needs_identifier():
    with pytest.raises(ParseError) as err:
        parse_navex("data.$")
    assert "after '$'" in err.value.message
    assert (err.value.line, err.value.column) == (1, 6)


def test_trailing_input_and_semicolon():
    assert parse_navex("data.$items.values.length > 0;") == parse_navex("data.$items.values.length > 0")
    with pytest.raises(ParseError) as err:
        parse_navex("1 2")
    assert err.value.kind == "TrailingInput"


def test_mutating_reducer_is_not_an_expression():
    with pytest.raises(ParseError):
        parse_navex("xs.reduce((i, a) => a+=i.$price.value, 0)")


def test_record_keys_keep_dollar():
    node = parse_navex('({$id: "x", name: 1})')
    assert node == N.RecordLit((("$id", N.Literal("x")), ("name", N.Literal(1))))


def test_lambda_forms():
    assert parse_navex("x => x") == N.Lambda(("x",), N.Ident("x"))
    assert parse_navex("(a, b) => a + b").params == ("a", "b")
    assert parse_navex("(a) => a") == N.Lambda(("a",), N.Ident("a"))
    # a parenthesized expression is not a lambda
    assert parse_navex("(a)") == N.Ident("a")


@pytest.mark.parametrize(
    "loose, tight",
    [
        ("a || b && c", "a || (b && c)"),
        ("1 + 2 * 3", "1 + (2 * 3)"),
        ("a === b && c", "(a === b) && c"),
        ("a < b === c", "(a < b) === c"),
        ("!a.b", "!(a.b)"),
        ("a ? b : c ? d : e", "a ? b : (c ? d : e)"),
        ("-x.y", "-(x.y)"),
        ("1 - 2 - 3", "(1 - 2) - 3"),
    ],
)
def test_precedence(loose, tight):
    assert parse_navex(loose) == parse_navex(tight)


def test_corpus_round_trip():
    corpus = load_corpus(FIXTURES / "corpus.json")
    texts = [e.navex for e in corpus.entries if e.navex is not None]
    assert len(texts) >= 31
    for t in texts:
        node = parse_navex(t)
        assert parse_navex(to_source(node)) == node


idents = st.sampled_from(["data", "a", "b", "xs"])
leaves = st.one_of(
    st.integers(0, 99).map(N.Literal),
    st.sampled_from([0.5, 1e-07, 3.25]).map(N.Literal),
    st.booleans().map(N.Literal),
    st.just(N.Literal(None)),
    st.text("ab'\"\\ ", max_size=4).map(N.Literal),
    idents.map(N.Ident),
)


def _extend(children):
    ops = ["===", "!==", "==", "!=", "<", ">=", "+", "-", "*", "/", "%", "&&", "||"]
    return st.one_of(
        st.tuples(st.sampled_from(ops), children, children).map(lambda t: N.Binary(*t)),
        st.tuples(st.sampled_from(["!", "-"]), children).map(lambda t: N.Unary(*t)),
        st.tuples(children, st.sampled_from(["values", "value", "length", "name"])).map(lambda t: N.Member(*t)),
        st.tuples(children, st.sampled_from(["items", "price"])).map(lambda t: N.Dollar(*t)),
        st.tuples(children, children).map(lambda t: N.Index(*t)),
        st.tuples(children, st.lists(children, max_size=2)).map(lambda t: N.Call(N.Member(t[0], "map"), tuple(t[1]))),
        st.tuples(st.sampled_from([("x",), ("x", "y")]), children).map(lambda t: N.Lambda(*t)),
        st.tuples(children, children, children).map(lambda t: N.Cond(*t)),
        st.lists(children, max_size=3).map(lambda xs: N.ListLit(tuple(xs))),
        st.lists(st.tuples(st.sampled_from(["$id", "k"]), children), max_size=2, unique_by=lambda kv: kv[0]).map(
            lambda kv: N.RecordLit(tuple(kv))
        ),
    )


navex_trees = st.recursive(leaves, _extend, max_leaves=12)


# hypothesis warns about the size of the recursive strategy's own repr
@pytest.mark.filterwarnings("ignore:Generating overly large repr")
@settings(max_examples=300, deadline=None)
@given(navex_trees)
def test_printer_round_trip(tree):
    assert parse_navex(to_source(tree)) == tree


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet="data.$values=>()[]{}!&|?:'0123 \nab", min_size=1, max_size=30))
def test_error_positions_index_the_input(text):
    try:
        parse_navex(text)
    except ParseError as err:
        lines = text.split("\n")
        assert 1 <= err.line <= len(lines) and err.column >= 1
        offset = sum(len(row) + 1 for row in lines[: err.line - 1]) + err.column - 1
        assert offset < len(text)
