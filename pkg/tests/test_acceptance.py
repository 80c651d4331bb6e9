"""Exit criteria, one test per criterion.

Each check returns (passed, detail); the terminal summary prints one
PASS/FAIL line per criterion. ``python tests/test_acceptance.py`` prints the
same lines without pytest.
"""

import contextlib
import io
import itertools
import json
import math

import numpy as np
import pytest

from gqsearch import analysis, nmr
from gqsearch.algebra import global_phase_fidelity
from gqsearch.cli import main
from gqsearch.search import (
    SearchConfig,
    approx_step_size,
    diffusion_general,
    extract_rotation_angle,
    grover_generalized,
    oracle_phase,
    search_iteration,
    walsh_hadamard,
    zero_phase,
)

PI = math.pi
PHASES = {"matched": (PI / 2, PI / 2), "mismatched": (PI / 2, 3 * PI / 2)}
GRID = [PI / 4, PI / 2, 3 * PI / 4, PI, 5 * PI / 4, 3 * PI / 2]
RESULTS = {}


def _cli(*argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(list(argv))
    return code, buf.getvalue()


def _table_reproduction(label):
    theta, phi = PHASES[label]
    args = ["search", "--n", "2", "--tau", "3", "--theta", repr(theta), "--phi", repr(phi), "--iters", "10"]
    code, rounded = _cli(*args, "--round", "2")
    _, full = _cli(*args)
    printed = [(float(r.split(",")[3]), float(r.split(",")[4])) for r in rounded.splitlines()[1:]]
    exact = [(float(r.split(",")[3]), float(r.split(",")[4])) for r in full.splitlines()[1:]]
    bad = []
    for k, (p, e, ref) in enumerate(zip(printed, exact, analysis.REFERENCE_TRACE[label]), 1):
        within = all(abs(x - r) <= analysis.REFERENCE_TOL + 1e-12 for x, r in zip(e, ref))
        if p != ref or not within:
            bad.append(f"step {k}: printed {p} exact ({e[0]:.4f}, {e[1]:.4f}) vs {ref}")
    ok = code == 0 and len(printed) == 10 and not bad
    return ok, f"{10 - len(bad)}/10 rows" + ("" if not bad else "; " + "; ".join(bad))


def c1():
    return _table_reproduction("matched")


def c2():
    return _table_reproduction("mismatched")


def c3():
    trace = grover_generalized(SearchConfig(2, 3, PI, PI, 1))
    p = trace.steps[0].probability
    return abs(p - 1) < 1e-10, f"p_success after 1 iteration = {p!r}"


def c4():
    m = grover_generalized(SearchConfig(2, 3, *PHASES["matched"], 10)).best_step()
    x = grover_generalized(SearchConfig(2, 3, *PHASES["mismatched"], 10)).best_step()
    ok = m.probability >= 0.999 and m.step == 6 and x.probability <= 0.40 and x.step == 9
    return ok, f"matched max {m.probability:.6f} at step {m.step}; mismatched max {x.probability:.6f} at step {x.step}"


def c5():
    worst = min(
        global_phase_fidelity(nmr.sequence_unitary(nmr.compile_iteration(t, p)), search_iteration(2, 3, t, p))
        for t, p in itertools.product(GRID, GRID)
    )
    return worst >= 1 - 1e-8, f"36 points, worst fidelity 1 - {1 - worst:.2e}"


def c6():
    worst = 0.0
    for label, (theta, phi) in PHASES.items():
        _, states = nmr.run_pulse_path(theta, phi, 10)
        ideal = grover_generalized(SearchConfig(2, 3, theta, phi, 10)).probabilities()
        pulse = np.array([s[3, 3].real for s in states[1:]])
        worst = max(worst, float(np.max(np.abs(pulse - ideal))))
    return worst < 1e-6, f"k=1..10, both settings, max |p_pulse - p_ideal| = {worst:.2e}"


def c7():
    avg = nmr.temporal_average(nmr.thermal_state(), nmr.compile_pseudopure())
    off = float(np.max(np.abs(avg - np.diag(np.diag(avg)))))
    pops = np.diag(avg).real
    spread = float(np.max(pops[1:]) - np.min(pops[1:]))
    return off < 1e-10 and spread < 1e-10, f"max off-diagonal {off:.2e}, population spread {spread:.2e}"


def c8():
    trace = grover_generalized(SearchConfig(10, 0, PI / 2, PI / 2, 60), keep_states=False)
    measured = extract_rotation_angle(trace)
    predicted = 2 * math.sin(PI / 4) * 2**-5
    rel = abs(measured - predicted) / predicted
    assert predicted == approx_step_size(PI / 2, 10)
    return rel <= 0.05, f"measured {measured:.6f} vs {predicted:.6f} rad/iteration ({100 * rel:.2f}% off)"


def c9():
    hand = analysis.relative_error(np.diag([1, 0, 0, 0]), np.diag([0.9, 0.1, 0, 0]))
    rho = analysis.load_density(analysis.synthetic_fixture_dir() / "theory_03.json")
    same = analysis.relative_error(rho, rho.copy())
    root = analysis.synthetic_fixture_dir()
    expected = json.loads((root / "expected.json").read_text())
    report = analysis.error_table(
        [analysis.load_density(root / f"theory_{k:02d}.json") for k in expected["steps"]],
        [analysis.load_density(root / f"experiment_{k:02d}.json") for k in expected["steps"]],
    )
    fixture_dev = float(np.max(np.abs(np.array(report.values) - expected["delta_rho"])))
    ok = abs(hand - math.sqrt(0.02)) < 1e-12 and same == 0.0 and fixture_dev < 1e-12
    return ok, f"hand case {hand:.12f}, identical inputs {same}, synthetic series max dev {fixture_dev:.1e}"


def c10():
    worst_unitary = 0.0
    for n in (1, 2, 3, 4):
        for tau in range(2**n):
            for theta, phi in itertools.product((0.0, PI / 3, PI / 2, PI, 3 * PI / 2), repeat=2):
                for op in (walsh_hadamard(n), oracle_phase(n, tau, phi), zero_phase(n, theta),
                           diffusion_general(n, theta), search_iteration(n, tau, theta, phi)):
                    worst_unitary = max(worst_unitary, float(np.linalg.norm(op.conj().T @ op - np.eye(2**n))))
    for seq in [nmr.compile_walsh(), *nmr.compile_pseudopure()] + [
        nmr.compile_iteration(t, p, tau, compact) for t, p in itertools.product(GRID, GRID)
        for tau in range(4) for compact in (True, False)
    ]:
        u = nmr.sequence_unitary(seq)
        worst_unitary = max(worst_unitary, float(np.linalg.norm(u.conj().T @ u - np.eye(4))))

    worst_norm = 0.0
    for n, theta, phi in itertools.product((1, 2, 5, 8), GRID, GRID):
        trace = grover_generalized(SearchConfig(n, 0, theta, phi, 12))
        worst_norm = max(worst_norm, max(abs(np.linalg.norm(r.state) - 1) for r in trace.all_records()))

    worst_closed = max(
        float(np.max(np.abs(diffusion_general(2, t) - (np.eye(4) + (np.exp(1j * t) - 1) / 4 * np.ones((4, 4))))))
        for t in np.linspace(0, 2 * PI, 37)
    )

    rows = analysis.trace_rows(grover_generalized(SearchConfig(3, 5, 1.0, 2.0, 10)))
    csv_ok = analysis.trace_from_csv(analysis.trace_to_csv(rows)) == rows
    json_ok = json.loads(json.dumps(rows)) == rows
    rng = np.random.default_rng(7)
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = g @ g.conj().T / np.trace(g @ g.conj().T).real
    back = analysis.density_from_json(json.loads(json.dumps(analysis.density_to_json(rho))))
    rel = float(np.max(np.abs(back - rho) / np.abs(rho)))

    ok = worst_unitary < 1e-10 and worst_norm < 1e-10 and worst_closed < 1e-12 and csv_ok and json_ok and rel <= 5e-12
    return ok, (f"unitarity {worst_unitary:.1e}, norm {worst_norm:.1e}, closed form {worst_closed:.1e}, "
                f"trace CSV/JSON exact={csv_ok and json_ok}, density JSON rel {rel:.1e}")


CRITERIA = [
    ("C1", "Table reproduction, matched phases", c1),
    ("C2", "Table reproduction, mismatched phases", c2),
    ("C3", "Grover recovery theta=phi=pi, n=2", c3),
    ("C4", "Peak contrast matched vs mismatched", c4),
    ("C5", "Pulse-path equivalence on 36-point grid", c5),
    ("C6", "End-to-end pulse simulation", c6),
    ("C7", "Temporal averaging", c7),
    ("C8", "Step-size formula n=10", c8),
    ("C9", "Relative-error metric", c9),
    ("C10", "Property suites", c10),
]


@pytest.mark.parametrize("cid,title,check", CRITERIA, ids=[c[0] for c in CRITERIA])
def test_criterion(cid, title, check):
    ok, detail = check()
    RESULTS[cid] = (ok, title, detail)
    assert ok, f"{cid} {title}: {detail}"


def report_lines():
    return [
        f"[{'PASS' if ok else 'FAIL'}] {cid} {title}: {detail}"
        for cid, (ok, title, detail) in sorted(RESULTS.items(), key=lambda kv: int(kv[0][1:]))
    ]


if __name__ == "__main__":
    for cid, title, check in CRITERIA:
        ok, detail = check()
        RESULTS[cid] = (ok, title, detail)
    print("\n".join(report_lines()))
