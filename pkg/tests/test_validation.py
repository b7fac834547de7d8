import pytest

from mvx.errors import ParseError, RegistryError, TransitionError
from mvx.model import ObjRef
from mvx.registry import load_registry, load_registry_file, make_constraint, registry_from_ocl
from mvx.validation import Verdict, check_invariant, check_transition, execute_query, validate_model
from mvx.values import SEQUENCE, Coll, agree, is_invalid

from conftest import FIXTURES, load


@pytest.fixture
def shop_mm():
    return load("shop")


@pytest.fixture(params=["shop.registry.json", "shop_navex.registry.json", "shop.ocl"])
def shop_registry(request, shop_mm):
    return load_registry_file(FIXTURES / request.param, shop_mm)


def constraint(reg, name):
    return next(c for c in reg.constraints if c.name == name)


class TestInvariants:
    def test_items_nonempty_false_on_empty_order(self, shop_empty):
        reg = load_registry_file(FIXTURES / "shop.registry.json", shop_empty.metamodel)
        (r,) = check_invariant(shop_empty, constraint(reg, "items-nonempty"))
        assert (r.object_id, r.verdict) == ("O0001", Verdict.FALSE)
        assert r.message == "order O0001 has no items"

    def test_item_invariant_is_vacuous_without_items(self, shop_empty):
        reg = load_registry_file(FIXTURES / "shop.registry.json", shop_empty.metamodel)
        assert check_invariant(shop_empty, constraint(reg, "price-positive")) == []

    def test_total_consistent_holds_on_empty_order(self, shop_empty):
        reg = load_registry_file(FIXTURES / "shop.registry.json", shop_empty.metamodel)
        (r,) = check_invariant(shop_empty, constraint(reg, "total-consistent"))
        assert r.verdict is Verdict.TRUE and r.message == ""

    def test_verdict_classes(self, people):
        mm = people.metamodel
        cases = {
            "self.age > 0": Verdict.TRUE,
            "self.age < 0": Verdict.FALSE,
            "null and true": Verdict.NULL,
            "1/0 > 0": Verdict.INVALID,
            "self.age": Verdict.INVALID,
        }
        for text, verdict in cases.items():
            c = make_constraint(mm, "c", "ocl", "Person", text)
            assert {r.verdict for r in check_invariant(people, c)} == {verdict}, text

    def test_subclass_instances_are_checked(self, uml):
        c = make_constraint(uml.metamodel, "named", "ocl", "Feature", "self.name.size() > 0")
        assert [r.object_id for r in check_invariant(uml, c)] == ["a1", "a2", "a3", "op1"]

    def test_applicability_guard(self, people):
        c = make_constraint(
            people.metamodel, "mentored", "ocl", "Person", "self.mentor.age > self.age", applicability="not self.mentor.oclIsUndefined()"
        )
        assert [(r.object_id, r.verdict) for r in check_invariant(people, c)] == [("p2", Verdict.TRUE)]

    def test_navex_invariant(self, shop_full):
        c = make_constraint(shop_full.metamodel, "n", "navex", "Item", "data.$price.value > 0")
        assert [r.verdict for r in check_invariant(shop_full, c)] == [Verdict.TRUE, Verdict.TRUE]


class TestValidateModel:
    def test_shop_registry_over_empty_order(self, shop_empty, shop_registry):
        report = validate_model(shop_empty, shop_registry)
        assert report.overall is False
        falses = [e.constraint for e in report.entries if e.verdict is Verdict.FALSE]
        assert falses in (["items-nonempty"], ["itemsNonempty"])
        assert report.count(Verdict.FALSE) == 1
        assert len(report.entries) == 2

    def test_shop_registry_over_full_order(self, shop_full, shop_registry):
        report = validate_model(shop_full, shop_registry)
        assert report.overall is True
        assert len(report.entries) == 4

    def test_empty_registry(self, shop_empty):
        report = validate_model(shop_empty, [])
        assert report.overall is True and report.entries == []

    def test_warnings_do_not_flip_overall(self, shop_empty):
        c = make_constraint(shop_empty.metamodel, "w", "ocl", "Order", "false", severity="warning")
        report = validate_model(shop_empty, [c])
        assert report.overall is True and report.failures()[0].severity == "warning"

    def test_eval_errors_fail_overall(self, shop_empty):
        c = make_constraint(shop_empty.metamodel, "x", "ocl", "Order", "1/0 > 0")
        report = validate_model(shop_empty, [c])
        assert report.overall is False

    def test_report_dict(self, shop_empty):
        reg = load_registry_file(FIXTURES / "shop.registry.json", shop_empty.metamodel)
        doc = validate_model(shop_empty, reg).to_dict()
        assert doc["overall"] is False
        assert doc["entries"][0] == {
            "constraint": "items-nonempty",
            "object": "O0001",
            "verdict": "False",
            "severity": "error",
            "message": "order O0001 has no items",
        }

    def test_validation_is_pure(self, shop_both, shop_registry):
        before = shop_both.content_hash()
        first = validate_model(shop_both, shop_registry).to_dict()
        assert validate_model(shop_both, shop_registry).to_dict() == first
        assert shop_both.content_hash() == before


class TestRegistry:
    def test_unknown_context_class(self, shop_mm):
        with pytest.raises(RegistryError) as e:
            load_registry({"constraints": [{"name": "x", "context": "Nope", "expression": "true"}]}, shop_mm)
        assert e.value.kind == "UnknownClass"

    def test_parse_error_carries_json_path(self, shop_mm):
        with pytest.raises(RegistryError) as e:
            load_registry({"constraints": [{"name": "x", "context": "Order", "expression": "self.items->"}]}, shop_mm)
        assert e.value.kind == "ParseError" and e.value.path == "$.constraints[0].expression"

    def test_malformed_entry(self, shop_mm):
        with pytest.raises(RegistryError) as e:
            load_registry('{"constraints": [{"context": "Order"}]}', shop_mm)
        assert e.value.kind == "SchemaViolation"

    def test_unlabelled_invariants_get_names(self, shop_mm):
        reg = registry_from_ocl("context Order inv: true inv named: false", shop_mm)
        assert [c.name for c in reg.constraints] == ["Order-inv1", "named"]

    def test_contract_lookup(self):
        mm = load("bank")
        reg = load_registry_file(FIXTURES / "bank.registry.json", mm)
        assert reg.contract("withdraw").name == reg.contract("Account::withdraw").name == "Account::withdraw"
        with pytest.raises(RegistryError):
            reg.contract("transfer")


@pytest.fixture(params=["bank.registry.json", "bank.ocl"])
def withdraw(request):
    mm = load("bank")
    return load_registry_file(FIXTURES / request.param, mm).contract("withdraw")


def account(balance):
    return load("bank", f"account_{balance}")


class TestTransitions:
    def test_correct(self, withdraw):
        r = check_transition(account(100), account(70), withdraw, "acc", {"amount": 30})
        assert r.admissible and r.correct
        assert r.to_dict()["pre"] == ["True"] and r.to_dict()["post"] == ["True"]

    def test_inadmissible(self, withdraw):
        r = check_transition(account(100), account(70), withdraw, "acc", {"amount": 150})
        assert not r.admissible and not r.correct and r.post_verdicts == ()

    def test_incorrect(self, withdraw):
        r = check_transition(account(100), account(60), withdraw, "acc", {"amount": 30})
        assert r.admissible and not r.correct and r.post_verdicts == (Verdict.FALSE,)

    def test_real_argument(self, withdraw):
        assert check_transition(account(100), account(70), withdraw, "acc", {"amount": 30.0}).correct

    @pytest.mark.parametrize(
        "receiver, args, kind",
        [
            ("acc", {}, "MissingArgument"),
            ("acc", {"amount": "30"}, "TypeMismatch"),
            ("acc", {"amount": 30, "fee": 1}, "UnknownArgument"),
            ("nobody", {"amount": 30}, "UnknownReceiver"),
        ],
    )
    def test_errors(self, withdraw, receiver, args, kind):
        with pytest.raises(TransitionError) as e:
            check_transition(account(100), account(70), withdraw, receiver, args)
        assert e.value.kind == kind

    def test_result_type_is_checked(self, withdraw):
        with pytest.raises(TransitionError):
            check_transition(account(100), account(70), withdraw, "acc", {"amount": 30}, result=3)
        assert check_transition(account(100), account(70), withdraw, "acc", {"amount": 30}, result=True).correct

    def test_stores_untouched(self, withdraw):
        pre, post = account(100), account(70)
        hashes = pre.content_hash(), post.content_hash()
        check_transition(pre, post, withdraw, "acc", {"amount": 30})
        assert (pre.content_hash(), post.content_hash()) == hashes


class TestQueries:
    def test_navex_filter_over_orders(self, shop_both):
        value = execute_query(shop_both, "navex", "Order.allInstances.filter(o => o.$totalPrice.value > 0)")
        assert agree(value, Coll(SEQUENCE, [ObjRef("O2")]))

    def test_ocl_all_instances(self, people):
        assert execute_query(people, "ocl", "Person.allInstances()->size()") == 3

    def test_context_object(self, people):
        assert execute_query(people, "ocl", "self.name", context="p2") == "Bob"

    def test_malformed_text(self, people):
        with pytest.raises(ParseError):
            execute_query(people, "ocl", "self.items->")

    def test_diagnostics(self, people):
        diags = []
        assert is_invalid(execute_query(people, "navex", "data.$zzz", context="p1", diagnostics=diags))
        assert diags

    def test_query_is_pure(self, shop_both):
        before = shop_both.content_hash()
        execute_query(shop_both, "navex", "data.addObject({}, 'Order')")
        assert shop_both.content_hash() == before
        assert ObjRef("O2") in shop_both.all_instances("Order")
