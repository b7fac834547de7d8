from pathlib import Path

import pytest

import mvx
from mvx.model import load_metamodel_file, load_model_file

FIXTURES = Path(mvx.__file__).parent / "fixtures"


def load(metamodel: str, model: str | None = None):
    mm = load_metamodel_file(FIXTURES / f"{metamodel}.metamodel.json")
    if model is None:
        return mm
    return load_model_file(FIXTURES / f"{model}.model.json", mm)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def shop_empty():
    return load("shop", "shop_empty")


@pytest.fixture
def shop_full():
    return load("shop", "shop_full")


@pytest.fixture
def shop_both():
    return load("shop", "shop_both")


@pytest.fixture
def uml():
    return load("uml", "uml_person")


@pytest.fixture
def people():
    return load("people", "people")


@pytest.fixture
def payroll():
    return load("payroll", "payroll")


def pytest_terminal_summary(terminalreporter):
    acceptance = __import__("sys").modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(acceptance.RESULTS, key=lambda s: int(s.split()[1])):
        terminalreporter.write_line(line)
