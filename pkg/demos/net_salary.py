"""Keep netSalary current while gross salary and tax change."""

from pathlib import Path

import mvx
from mvx.derived import DerivedEngine, recompute_all, register_derived
from mvx.model import load_metamodel_file, load_model_file
from mvx.registry import load_registry_file

fixtures = Path(mvx.__file__).parent / "fixtures"
mm = load_metamodel_file(fixtures / "payroll.metamodel.json")
store = load_model_file(fixtures / "payroll.model.json", mm)
plan = register_derived(load_registry_file(fixtures / "payroll.ocl", mm).derived, mm)

recompute_all(store, plan)
print("initial netSalary:", store.objects["e1"].slots["netSalary"])

DerivedEngine(store, plan).attach()
for feature, value in [("tax", 300), ("name", "Evelyn"), ("grossSalary", 1500)]:
    before = plan.recomputations
    store.set_value("e1", feature, [value])
    print(f"set {feature}={value!r}: netSalary {store.objects['e1'].slots['netSalary']}, "
          f"{plan.recomputations - before} recomputation(s)")
