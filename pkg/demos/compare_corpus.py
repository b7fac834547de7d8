"""Run the paired corpus and print the comparison table."""

from pathlib import Path

import mvx
from mvx.metrics import load_corpus, render_report, run_corpus

corpus = load_corpus(Path(mvx.__file__).parent / "fixtures" / "corpus.json")
print(render_report(run_corpus(corpus)), end="")
