"""Evaluate a few navigation expressions and their OCL counterparts."""

from pathlib import Path

import mvx
from mvx.model import load_metamodel_file, load_model_file
from mvx.validation import execute_query
from mvx.values import render

fixtures = Path(mvx.__file__).parent / "fixtures"
mm = load_metamodel_file(fixtures / "uml.metamodel.json")
store = load_model_file(fixtures / "uml_person.model.json", mm)

pairs = [
    ("self.ownedAttributes->collect(a | a.name)", "data.$ownedAttributes.values.map(a => a.name)"),
    ("self.ownedFeatures->select(f | f.oclIsTypeOf(Attribute))",
     "data.$ownedFeatures.values.filter(f => f.instanceof.name === 'Attribute')"),
    ("Feature.allInstances()->size()", "Feature.allInstances.length"),
]
for ocl, navex in pairs:
    print(f"ocl   {ocl}\n   => {render(execute_query(store, 'ocl', ocl, context='p1'))}")
    print(f"navex {navex}\n   => {render(execute_query(store, 'navex', navex, context='p1'))}\n")
