"""Validate an empty order against the three shop invariants, in both languages."""

from pathlib import Path

import mvx
from mvx.model import load_metamodel_file, load_model_file
from mvx.registry import load_registry_file
from mvx.validation import validate_model

fixtures = Path(mvx.__file__).parent / "fixtures"
mm = load_metamodel_file(fixtures / "shop.metamodel.json")

for name in ("shop_empty", "shop_full"):
    store = load_model_file(fixtures / f"{name}.model.json", mm)
    for registry in ("shop.registry.json", "shop_navex.registry.json"):
        report = validate_model(store, load_registry_file(fixtures / registry, mm))
        print(f"{name} / {registry}: overall {str(report.overall).lower()}")
        for e in report.entries:
            print(f"  {e.constraint:<18} {e.object_id:<6} {e.verdict.value:<6} {e.message}")
