"""Judge observed account transitions against the withdraw contract."""

from pathlib import Path

import mvx
from mvx.model import load_metamodel_file, load_model_file
from mvx.registry import load_registry_file
from mvx.validation import check_transition

fixtures = Path(mvx.__file__).parent / "fixtures"
mm = load_metamodel_file(fixtures / "bank.metamodel.json")
withdraw = load_registry_file(fixtures / "bank.ocl", mm).contract("withdraw")


def account(balance):
    return load_model_file(fixtures / f"account_{balance}.model.json", mm)


for pre, post, amount in [(100, 70, 30), (100, 70, 150), (100, 60, 30)]:
    r = check_transition(account(pre), account(post), withdraw, "acc", {"amount": amount})
    print(f"{pre} -> {post}, amount {amount}: admissible={r.admissible} correct={r.correct}")
