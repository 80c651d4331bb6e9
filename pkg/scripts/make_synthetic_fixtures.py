"""Regenerate the bundled synthetic theory/experiment density-matrix series.

Theory: ideal matched-phase states (n=2, tau=3, theta=phi=pi/2), steps 1-10.
Experiment: theory plus seeded traceless Hermitian noise.
Expected relative errors are computed here with plain-Python loops over the
values as written to disk, independently of gqsearch.analysis.
"""

import json
import math
from pathlib import Path

import numpy as np

from gqsearch.analysis import density_to_json
from gqsearch.nmr import pure_density
from gqsearch.search import SearchConfig, grover_generalized

SEED = 20020301
NOISE = 0.06
OUT = Path(__file__).resolve().parents[1] / "src" / "gqsearch" / "data" / "synthetic"


def frob(re, im):
    return math.sqrt(sum(re[i][j] ** 2 + im[i][j] ** 2 for i in range(len(re)) for j in range(len(re))))


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)
    trace = grover_generalized(SearchConfig(2, 3, math.pi / 2, math.pi / 2, 10))
    expected = []
    for rec in trace.steps:
        theory = pure_density(rec.state)
        g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        h = (g + g.conj().T) / 2
        h -= np.trace(h) / 4 * np.eye(4)
        experiment = theory + NOISE * h
        t_doc, e_doc = density_to_json(theory), density_to_json(experiment)
        (OUT / f"theory_{rec.step:02d}.json").write_text(json.dumps(t_doc) + "\n")
        (OUT / f"experiment_{rec.step:02d}.json").write_text(json.dumps(e_doc) + "\n")
        diff_re = [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(t_doc["re"], e_doc["re"])]
        diff_im = [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(t_doc["im"], e_doc["im"])]
        expected.append(frob(diff_re, diff_im) / frob(t_doc["re"], t_doc["im"]))
    doc = {"seed": SEED, "noise": NOISE, "norm": "frobenius", "steps": list(range(1, 11)), "delta_rho": expected}
    (OUT / "expected.json").write_text(json.dumps(doc, indent=2) + "\n")


if __name__ == "__main__":
    main()
