import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mvx.errors import CorpusError
from mvx.metrics import CATEGORIES, coc, corpus_from_doc, load_corpus, load_report, render_report, run_corpus
from mvx.metrics import CorpusReport

from conftest import FIXTURES

FIXTURE_PATHS = {
    "shop-empty": {"metamodel": "shop.metamodel.json", "model": "shop_empty.model.json"},
    "payroll": {"metamodel": "payroll.metamodel.json", "model": "payroll.model.json"},
    "people": {"metamodel": "people.metamodel.json", "model": "people.model.json"},
    "account-100": {"metamodel": "bank.metamodel.json", "model": "account_100.model.json"},
    "account-70": {"metamodel": "bank.metamodel.json", "model": "account_70.model.json"},
}

ORDER_PAIR = {
    "id": "a",
    "category": "Booleans",
    "ocl": "context Order inv: self.items->size() > 0",
    "navex": "data.$items.values.length > 0",
    "fixture": "shop-empty",
    "context": "O0001",
    "expected": False,
}
SALARY_PAIR = {
    "id": "b",
    "category": "Numerics",
    "ocl": "context Employee::netSalary: Number derive: self.grossSalary - self.tax",
    "navex": "data.$grossSalary.value - data.$tax.value",
    "fixture": "payroll",
    "context": "e1",
    "expected": 800,
}


def corpus(*entries, fixtures=FIXTURE_PATHS):
    return corpus_from_doc({"fixtures": fixtures, "entries": list(entries)}, FIXTURES)


whitespace = st.sampled_from(" \t\r\n")


class TestCoc:
    @pytest.mark.parametrize(
        "text, n",
        [("context Order inv: self.items->size() > 0", 36), ("", 0), ("a b", 2), ("\t\r\n", 0), ("a b", 3)],
    )
    def test_examples(self, text, n):
        assert coc(text) == n

    @given(st.text(), st.text())
    def test_additive(self, a, b):
        assert coc(a + b) == coc(a) + coc(b)

    @given(st.text(), st.lists(st.tuples(st.integers(0, 1000), whitespace)))
    def test_whitespace_invariant(self, text, inserts):
        chars = list(text)
        for pos, ws in inserts:
            chars.insert(pos % (len(chars) + 1), ws)
        assert coc("".join(chars)) == coc(text)


class TestLoading:
    def test_shipped_corpus_loads(self):
        c = load_corpus(FIXTURES / "corpus.json")
        assert len(c.entries) >= 31

    def test_bad_json(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text("{oops")
        with pytest.raises(CorpusError) as e:
            load_corpus(p)
        assert e.value.kind == "SchemaViolation" and str(p) in e.value.path

    @pytest.mark.parametrize(
        "patch, kind",
        [
            ({"category": "Dates"}, "SchemaViolation"),
            ({"ocl": None, "navex": None}, "SchemaViolation"),
            ({"navex": None}, "SchemaViolation"),
            ({"fixture": "nowhere"}, "UnknownFixture"),
        ],
    )
    def test_bad_entries(self, patch, kind):
        with pytest.raises(CorpusError) as e:
            corpus({**ORDER_PAIR, **patch})
        assert e.value.kind == kind

    def test_duplicate_ids(self):
        with pytest.raises(CorpusError) as e:
            corpus(ORDER_PAIR, ORDER_PAIR)
        assert e.value.kind == "DuplicateId"

    def test_missing_fixture_file(self):
        c = corpus(ORDER_PAIR, fixtures={"shop-empty": {"metamodel": "shop.metamodel.json", "model": "gone.json"}})
        with pytest.raises(CorpusError) as e:
            run_corpus(c)
        assert e.value.kind == "UnknownFixture"

    def test_unknown_context_object(self):
        with pytest.raises(CorpusError) as e:
            run_corpus(corpus({**ORDER_PAIR, "context": "O9"}))
        assert e.value.kind == "UnknownContextObject"


class TestRunner:
    def test_two_entry_corpus(self):
        report = run_corpus(corpus(SALARY_PAIR, ORDER_PAIR))
        a = report.aggregates
        assert [e.id for e in report.entries] == ["a", "b"]
        assert a.agreementRate == 1.0 and a.oclCoverage == 1.0 and a.navexCoverage == 1.0
        assert a.expectedMismatches == 0
        assert a.meanCocOcl == (36 + 65) / 2
        assert report.entries[1].oclVerdict == 800

    def test_pre_post_entry_counts_against_navex(self):
        entry = {
            "id": "w",
            "category": "Booleans",
            "ocl": "context Account::withdraw(amount: Number): Boolean\npre: self.balance >= amount\n"
            "post: self.balance = self.balance@pre - amount",
            "navex": None,
            "fixture": "account-100",
            "context": "acc",
            "transition": {"post": "account-70", "args": {"amount": 30}},
            "expected": True,
            "notes": "pre/post unsupported",
        }
        report = run_corpus(corpus(ORDER_PAIR, entry))
        a = report.aggregates
        assert (a.oclCoverage, a.navexCoverage, a.paired) == (1.0, 0.5, 1)
        assert report.entries[1].oclVerdict is True and report.entries[1].agree is None

    def test_date_entry_counts_against_ocl(self):
        entry = {
            "id": "d",
            "category": "OclAny",
            "ocl": None,
            "navex": "Date.parse('2000-01-02') - Date.parse('2000-01-01')",
            "fixture": "people",
            "expected": 86400000,
            "notes": "no date arithmetic in ocl",
        }
        a = run_corpus(corpus(ORDER_PAIR, entry)).aggregates
        assert (a.oclCoverage, a.navexCoverage) == (0.5, 1.0)
        # means cover paired entries only
        assert a.meanCocNavex == 27

    def test_divergent_pair(self):
        bad = {**SALARY_PAIR, "navex": "data.$grossSalary.value + data.$tax.value"}
        report = run_corpus(corpus(bad))
        assert report.aggregates.agreementRate == 0.0
        assert [e.id for e in report.disagreements] == ["b"]
        assert report.entries[0].expectedOk is False

    def test_parse_error_is_reported_not_raised(self):
        report = run_corpus(corpus({**ORDER_PAIR, "navex": "data.$items.values.length >"}))
        e = report.entries[0]
        assert e.navexError.startswith("ParseError") and e.agree is False

    def test_fixture_store_is_untouched(self):
        c = load_corpus(FIXTURES / "corpus.json")
        run_corpus(c)
        hashes = {n: f.store().content_hash() for n, f in c.fixtures.items()}
        run_corpus(c)
        assert {n: f.store().content_hash() for n, f in c.fixtures.items()} == hashes


class TestRendering:
    def test_text_table(self):
        text = render_report(run_corpus(corpus(ORDER_PAIR, SALARY_PAIR)))
        lines = text.splitlines()
        assert lines[1].startswith("a ") and lines[2].startswith("b ")
        assert "2 entries, 2 paired" in text
        assert "2/2" in text
        assert "29/31 = 93.5%" in text and "64.8" in text and "74.2" in text

    def test_empty_report(self):
        text = render_report(CorpusReport())
        assert text.splitlines()[0].split()[0] == "id"
        assert "0 entries" in text

    def test_json_round_trip(self):
        report = run_corpus(corpus(ORDER_PAIR, SALARY_PAIR))
        doc = render_report(report, "json")
        assert load_report(doc) == report
        assert render_report(load_report(doc), "json") == doc
        json.loads(doc)


def _squash(text):
    return "".join(text.split()).rstrip(";")


# Texts the shipped corpus must carry, whitespace aside. The reduce
# callback is written (acc, item) so the fold actually sums prices.
REQUIRED_TEXTS = [
    "context Order inv: self.items->size() > 0",
    "context Order inv: self.totalPrice = self.items->collect(i | i.price)->sum()",
    "context Item inv: self.price > 0",
    "context Account::withdraw(amount: Number): Boolean pre: self.balance >= amount "
    "post: self.balance = self.balance@pre - amount",
    "context Employee::netSalary: Number derive: self.grossSalary - self.tax",
    "data.$items.values.length > 0;",
    "data.$totalPrice.value === data.$items.values.reduce((acc, i) => acc + i.$price.value, 0);",
    "data.$price.value > 0",
    "data.parent.addObject({$id: \"O0001\", $totalPrice: 0, $items: []}, 'Order');",
]


def test_shipped_corpus_shape():
    c = load_corpus(FIXTURES / "corpus.json")
    assert len(c.entries) >= 31
    assert {e.category for e in c.entries} == set(CATEGORIES)
    texts = {_squash(t) for e in c.entries for t in (e.ocl, e.navex) if t}
    missing = [t for t in REQUIRED_TEXTS if _squash(t) not in texts]
    assert not missing
