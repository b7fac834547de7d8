import pytest

from mvx.evaluation import Env, eval_navex, eval_ocl
from mvx.model import ObjRef
from mvx.navex import parse_navex
from mvx.ocl import parse_expression
from mvx.values import STORE, Coll, agree, from_portable, is_invalid, render

from conftest import load

STORES = {
    "shop-empty": ("shop", "shop_empty"),
    "shop-full": ("shop", "shop_full"),
    "shop-both": ("shop", "shop_both"),
    "uml": ("uml", "uml_person"),
    "people": ("people", "people"),
}


def ocl(store_key, text, context=None, **vars):
    store = load(*STORES[store_key])
    env = Env(store, context=ObjRef(context) if context else STORE, vars=vars)
    return eval_ocl(parse_expression(text, params=list(vars)), env)


def navex(store_key, text, context=None, writable=False):
    store = load(*STORES[store_key])
    env = Env(store, context=ObjRef(context) if context else STORE, writable=writable)
    return eval_navex(parse_navex(text), env)


def check(value, expected):
    if expected == "invalid":
        assert is_invalid(value), render(value)
        return
    exp = from_portable(expected)
    if isinstance(exp, Coll):
        assert isinstance(value, Coll) and value.kind == exp.kind, render(value)
    elif exp is not None and not isinstance(exp, (int, float)):
        assert type(value) is type(exp), render(value)
    assert agree(value, exp), f"{render(value)} != {render(exp)}"


OCL_CASES = [
    # invariant bodies
    ("shop-empty", "O0001", "self.items->size() > 0", False),
    ("shop-full", "O2", "self.items->collect(i | i.price)->sum()", 5.0),
    ("shop-empty", "O0001", "self.items->collect(i | i.price)->sum()", 0),
    ("shop-empty", "O0001", "self.totalPrice = self.items->collect(i | i.price)->sum()", True),
    ("people", None, "1/0", "invalid"),
    ("people", None, "true or (1/0 > 0)", True),
    ("people", None, "false and (1/0 > 0)", False),
    ("people", None, "false implies (1/0 > 0)", True),
    ("people", None, "null and true", None),
    ("people", None, "(1/0 > 0) = (1/0 > 0)", "invalid"),
    # numbers
    ("people", None, "7 / 2", 3.5),
    ("people", None, "6 / 3", 2.0),
    ("people", None, "-7.div(2)", -3),
    ("people", None, "(-7).div(2)", -3),
    ("people", None, "(-7).mod(2)", -1),
    ("people", None, "7.mod(-2)", 1),
    ("people", None, "(-2.5).round()", -3),
    ("people", None, "(2.4).round()", 2),
    ("people", None, "(-2.5).floor()", -3),
    ("people", None, "3.max(4.5)", 4.5),
    ("people", None, "5.div(0)", "invalid"),
    ("people", None, "1 = 1.0", True),
    ("people", None, "1 <> 2", True),
    ("people", None, "'a' < 'b'", True),
    ("people", None, "'a' < 1", "invalid"),
    # strings
    ("people", None, "'hello'.substring(2, 4)", "ell"),
    ("people", None, "'hello'.indexOf('z')", 0),
    ("people", None, "'hello'.indexOf('l')", 3),
    ("people", None, "'hello'.substring(0, 2)", "invalid"),
    ("people", None, "'ab'.concat('cd').size()", 4),
    # collections
    ("people", None, "Sequence{1, 2, 3}->sum()", 6),
    ("people", None, "Sequence{1, 2.5}->sum()", 3.5),
    ("people", None, "Sequence{'a'}->sum()", "invalid"),
    ("people", None, "Set{1, 2, 2}->size()", 2),
    ("people", None, "Bag{1, 2, 2}->count(2)", 2),
    ("people", None, "Sequence{3, 1, 2}->sortedBy(x | x)", {"Sequence": [1, 2, 3]}),
    ("people", None, "Sequence{1, 2}->at(3)", "invalid"),
    ("people", None, "Sequence{1, 2}->indexOf(2)", 2),
    ("people", None, "Set{1, 2}->union(Set{2, 3})", {"Set": [1, 2, 3]}),
    ("people", None, "Set{1, 2}->intersection(Set{2, 3})", {"Set": [2]}),
    ("people", None, "Sequence{1}->append(2)->prepend(0)", {"Sequence": [0, 1, 2]}),
    ("people", None, "Sequence{Sequence{1}, Sequence{2, 3}}->flatten()", {"Sequence": [1, 2, 3]}),
    ("people", None, "Sequence{1, 2}->including(3)->excluding(1)", {"Sequence": [2, 3]}),
    ("people", None, "Set{1, 2}->includesAll(Set{1})", True),
    ("people", None, "Sequence{}->isEmpty()", True),
    ("people", None, "Sequence{1, 1}->asSet()", {"Set": [1]}),
    ("people", None, "Sequence{1, 2, 3}->iterate(x; acc = 0 | acc + x)", 6),
    ("people", None, "Sequence{1, 2}->collect(x | Sequence{x, x})", {"Bag": [1, 1, 2, 2]}),
    ("people", None, "Sequence{1, 2, 3}->select(x | x > 1)", {"Sequence": [2, 3]}),
    ("people", None, "Set{1, 2, 3}->reject(x | x > 1)", {"Set": [1]}),
    ("people", None, "Sequence{1, 2}->exists(x | x = 2)", True),
    ("people", None, "Sequence{1, 2}->forAll(x, y | x + y > 1)", True),
    ("people", None, "Sequence{1, 2}->one(x | x > 0)", False),
    ("people", None, "Sequence{1, 2}->any(x | x > 5)", None),
    ("people", None, "Sequence{1, 2, 1}->isUnique(x | x)", False),
    ("people", None, "Sequence{1, 2}->select(x | x)", "invalid"),
    ("people", None, "let a = 2, b = 3 in a * b", 6),
    ("people", None, "if 1 > 2 then 'x' else 'y' endif", "y"),
    ("people", None, "if null then 1 else 2 endif", "invalid"),
    # model navigation
    ("people", None, "Person.allInstances()->size()", 3),
    ("people", None, "Person.allInstances()->select(p | p.age > 30)->size()", 2),
    ("people", "p2", "self.mentor.name", "Ada"),
    ("people", "p1", "self.mentor", None),
    ("people", "p1", "self.mentor.name", "invalid"),
    ("people", "p1", "self.mentor.oclIsUndefined()", True),
    ("people", None, "(1/0).oclIsUndefined()", True),
    ("people", "c1", "self.members.name", {"Bag": ["Ada", "Bob", "Cy"]}),
    ("people", "c1", "self.members->collect(age)->sum()", 105),
    ("people", "c1", "self.members->select(married)->size()", 2),
    ("people", "p1", "self.nope", "invalid"),
    ("uml", None, "Feature.allInstances()->size()", 4),
    ("uml", "a1", "self.oclIsKindOf(Feature)", True),
    ("uml", "a1", "self.oclIsTypeOf(Feature)", False),
    ("uml", "a1", "self.oclAsType(Operation)", "invalid"),
    ("uml", "p1", "self.ownedFeatures->select(f | f.oclIsTypeOf(Attribute))->size()", 3),
    ("people", "p1", "self.age.oclIsKindOf(Real)", True),
    ("people", "p1", "self.age.oclAsType(Real)", 36.0),
    ("people", "p1", "null.oclIsKindOf(Person)", False),
]


@pytest.mark.parametrize("fixture, context, text, expected", OCL_CASES, ids=[c[2] for c in OCL_CASES])
def test_ocl(fixture, context, text, expected):
    check(ocl(fixture, text, context), expected)


def test_ocl_params():
    check(ocl("people", "amount * 2", amount=21), 42)


NAVEX_CASES = [
    ("uml", "p1", "data.$ownedAttributes.values.map(a => a.name)", {"Sequence": ["name", "surname", "age"]}),
    ("shop-empty", "O0001", "data.$items.values.length > 0", False),
    (
        "uml",
        "p1",
        "data.$ownedFeatures.values.filter(f => f.instanceof.name === 'Attribute')",
        {"Sequence": [{"ref": "a1"}, {"ref": "a2"}, {"ref": "a3"}]},
    ),
    ("shop-full", "O2", "data.$totalPrice.value === data.$items.values.reduce((acc, i) => acc + i.$price.value, 0)", True),
    ("shop-full", "i1", "data.$price.value > 0", True),
    ("shop-both", None, "Order.allInstances.filter(o => o.$totalPrice.value > 0)", {"Sequence": [{"ref": "O2"}]}),
    ("people", "p1", "data.$mentor.value", None),
    ("people", "c1", "data.$members.value", "invalid"),
    ("people", "p1", "data.$name.values", {"Sequence": ["Ada"]}),
    ("people", "p1", "data.$nope", "invalid"),
    ("people", "p1", "data.frobnicate", "invalid"),
    ("people", "p1", "data.id", "p1"),
    ("people", "p1", "data.instanceof", {"class": "Person"}),
    ("people", "p1", "data.parent", {"store": True}),
    ("shop-full", "i1", "data.parent", {"ref": "O2"}),
    ("people", None, "1 === 1.0", False),
    ("people", None, "1 == 1.0", True),
    ("people", None, "1 !== 1", False),
    ("people", None, "'a' + 'b'", "ab"),
    ("people", None, "'a' + 1", "invalid"),
    ("people", None, "-7 % 3", -1),
    ("people", None, "7 / 2", 3.5),
    ("people", None, "1 / 0", "invalid"),
    ("people", None, "false && (1 / 0 > 0)", False),
    ("people", None, "true ? 1 : 2", 1),
    ("people", None, "[1, 2, 3].map((x, i) => x * i)", {"Sequence": [0, 2, 6]}),
    ("people", None, "[1, 2, 3].reduce((a, x) => a + x)", 6),
    ("people", None, "[].reduce((a, x) => a + x)", "invalid"),
    ("people", None, "[1, 2, 3].indexOf(4)", -1),
    ("people", None, "[1, 2, 3].includes(2.0)", False),
    ("people", None, "[1, 2, 3].slice(1)", {"Sequence": [2, 3]}),
    ("people", None, "[[1], [2, 3]].flat()", {"Sequence": [1, 2, 3]}),
    ("people", None, "[1, 2].concat([3])", {"Sequence": [1, 2, 3]}),
    ("people", None, "[1, 2, 3].find(x => x > 1)", 2),
    ("people", None, "[1, 2, 3].find(x => x > 5)", None),
    ("people", None, "[1, 2][5]", None),
    ("people", None, "'abc'.length", 3),
    ("people", None, "'Chess Club'.indexOf('Club')", 6),
    ("people", None, "'Chess'.startsWith('Ch')", True),
    ("people", None, "Math.round(-2.5)", -2),
    ("people", None, "Math.max(1, 5, 3)", 5),
    ("people", None, "Date.parse('1970-01-02')", 86400000),
    ("people", None, "Date.parse('yesterday')", "invalid"),
    ("people", None, "Person.allInstances.length", 3),
    ("people", None, "Person.name", "Person"),
    ("people", "p1", "data.parent.objects.length", 4),
    ("people", "p1", "data.parent.executeQuery('Person.allInstances.length')", 3),
    ("people", None, "(a => a)(5)", 5),
    ("people", "p1", "data.parent.addObject({$name: 'Zed'}, 'Person')", "invalid"),
]


@pytest.mark.parametrize("fixture, context, text, expected", NAVEX_CASES, ids=[c[2] for c in NAVEX_CASES])
def test_navex(fixture, context, text, expected):
    check(navex(fixture, text, context), expected)


def test_lambda_parameter_shadows_outer_binding():
    store = load("uml", "uml_person")
    env = Env(store, context=ObjRef("p1"), vars={"a": "outer"})
    value = eval_navex(parse_navex("data.$ownedAttributes.values.map(a => a.name)"), env)
    assert list(value) == ["name", "surname", "age"]


def test_add_object_on_writable_store():
    store = load("shop", "shop_full")
    env = Env(store, context=ObjRef("O2"), writable=True)
    out = eval_navex(parse_navex("data.parent.addObject({$id: \"O0001\", $totalPrice: 0, $items: []}, 'Order')"), env)
    assert out == ObjRef("O0001")
    assert store.objects["O0001"].slots == {"totalPrice": [0], "items": []}


def test_diagnostics_are_recorded():
    store = load("people", "people")
    env = Env(store, context=ObjRef("p1"))
    assert is_invalid(eval_navex(parse_navex("data.frobnicate"), env))
    assert any("frobnicate" in d for d in env.diagnostics)


def test_evaluation_is_pure_and_deterministic():
    store = load("people", "people")
    before = store.content_hash()
    texts = [c[2] for c in OCL_CASES if c[0] == "people"]
    first = [render(eval_ocl(parse_expression(t), Env(store))) for t in texts]
    second = [render(eval_ocl(parse_expression(t), Env(store))) for t in texts]
    assert first == second
    assert store.content_hash() == before
