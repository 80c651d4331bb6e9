"""Generalized quantum search with arbitrary phase rotations.

One iteration is ``Q = D(theta) I_tau(phi)`` with

    I_tau(phi) = I - (1 - e^{i phi}) |tau><tau|
    I_0(theta) = I - (1 - e^{i theta}) |0><0|
    D(theta)   = W I_0(theta) W

``theta = phi = pi`` gives Grover's iteration up to the global sign of
``Q = -W I_0 W I_tau``. No extra sign is carried here; every equivalence
check elsewhere is insensitive to global phase.

Explicit matrices are built for small registers (tests, pulse compilation).
The iteration engine never materializes them: both phase operators are
diagonal and ``W`` is applied as one butterfly pass per qubit, so traces for
n around 20 take seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from gqsearch.algebra import MAX_DIM

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


@dataclass(frozen=True)
class SearchConfig:
    n: int = 2
    tau: int = 3
    theta: float = math.pi / 2
    phi: float = math.pi / 2
    iterations: int = 10

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"qubit count must be a positive integer, got {self.n}")
        if not 0 <= self.tau < 2**self.n:
            raise ValueError(f"marked index {self.tau} out of range for n={self.n}")
        if not (math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise ValueError("phases must be finite")
        if int(self.iterations) != self.iterations or self.iterations < 0:
            raise ValueError(f"iteration count must be a nonnegative integer, got {self.iterations}")

    @property
    def dim(self) -> int:
        return 2**self.n

    @property
    def matched(self) -> bool:
        return math.isclose(self.theta, self.phi)


@dataclass(frozen=True)
class StepRecord:
    step: int
    amplitude: complex
    abs_amplitude: float
    abs_rest: float
    probability: float
    state: np.ndarray | None = field(default=None, repr=False, compare=False)


@dataclass(frozen=True)
class IterationTrace:
    """States after each application of Q; ``initial`` is the uniform start."""

    config: SearchConfig
    initial: StepRecord
    steps: tuple[StepRecord, ...]

    def __len__(self):
        return len(self.steps)

    def all_records(self) -> tuple[StepRecord, ...]:
        return (self.initial,) + self.steps

    def magnitudes(self, include_initial: bool = True) -> np.ndarray:
        recs = self.all_records() if include_initial else self.steps
        return np.array([r.abs_amplitude for r in recs])

    def probabilities(self, include_initial: bool = False) -> np.ndarray:
        recs = self.all_records() if include_initial else self.steps
        return np.array([r.probability for r in recs])

    def best_step(self) -> StepRecord:
        return max(self.steps, key=lambda r: r.probability)


def _check_explicit(n: int):
    if n < 1:
        raise ValueError(f"qubit count must be >= 1, got {n}")
    if 2**n > MAX_DIM:
        raise MemoryError(f"explicit {2**n}x{2**n} matrix exceeds the {MAX_DIM} dimension budget")


def walsh_hadamard(n: int) -> np.ndarray:
    _check_explicit(n)
    w = np.eye(1, dtype=complex)
    for _ in range(n):
        w = np.kron(w, HADAMARD)
    return w


def oracle_phase(n: int, tau: int, phi: float) -> np.ndarray:
    _check_explicit(n)
    if not 0 <= tau < 2**n:
        raise ValueError(f"marked index {tau} out of range for n={n}")
    d = np.ones(2**n, dtype=complex)
    d[tau] = np.exp(1j * phi)
    return np.diag(d)


def zero_phase(n: int, theta: float) -> np.ndarray:
    _check_explicit(n)
    d = np.ones(2**n, dtype=complex)
    d[0] = np.exp(1j * theta)
    return np.diag(d)


def diffusion_general(n: int, theta: float) -> np.ndarray:
    w = walsh_hadamard(n)
    return w @ zero_phase(n, theta) @ w


def search_iteration(n: int, tau: int, theta: float, phi: float) -> np.ndarray:
    """Explicit matrix of one generalized iteration D(theta) I_tau(phi)."""
    return diffusion_general(n, theta) @ oracle_phase(n, tau, phi)


def fast_walsh(v: np.ndarray) -> np.ndarray:
    """Apply the n-qubit Walsh-Hadamard transform to a length-2^n vector."""
    v = np.asarray(v, dtype=complex)
    dim = v.shape[0]
    if dim & (dim - 1):
        raise ValueError(f"length {dim} is not a power of two")
    out = v.copy()
    h = 1
    while h < dim:
        blocks = out.reshape(-1, 2, h)
        a = blocks[:, 0, :].copy()
        b = blocks[:, 1, :]
        blocks[:, 0, :] = a + b
        blocks[:, 1, :] = a - b
        out *= 1 / math.sqrt(2)
        h *= 2
    return out


def tau_c_decomposition(state, tau: int) -> tuple[complex, complex]:
    """Split a state into its |tau> and normalized unmarked-superposition parts.

    ``|c>`` is normalized as (N-1)^{-1/2} sum_{i != tau} |i>, so the two
    coefficients square-sum to one for any state reachable from the uniform
    start.
    """
    state = np.asarray(state, dtype=complex)
    dim = state.shape[0]
    a = complex(state[tau])
    if dim == 1:
        return a, 0j
    b = complex((state.sum() - state[tau]) / math.sqrt(dim - 1))
    return a, b


def _record(step: int, state: np.ndarray, tau: int, keep_state: bool) -> StepRecord:
    a, b = tau_c_decomposition(state, tau)
    return StepRecord(
        step=step,
        amplitude=a,
        abs_amplitude=abs(a),
        abs_rest=abs(b),
        probability=abs(a) ** 2,
        state=state.copy() if keep_state else None,
    )


def uniform_state(n: int) -> np.ndarray:
    dim = 2**n
    return np.full(dim, 1 / math.sqrt(dim), dtype=complex)


def grover_generalized(config: SearchConfig, keep_states: bool = True) -> IterationTrace:
    """Run ``config.iterations`` generalized search iterations from W|0...0>.

    Pass ``keep_states=False`` for large registers to drop the per-step state
    vectors and keep only the scalar records.
    """
    tau = config.tau
    oracle = np.exp(1j * config.phi)
    zero = np.exp(1j * config.theta)
    psi = uniform_state(config.n)
    initial = _record(0, psi, tau, keep_states)
    steps = []
    for k in range(1, config.iterations + 1):
        psi[tau] *= oracle
        psi = fast_walsh(psi)
        psi[0] *= zero
        psi = fast_walsh(psi)
        steps.append(_record(k, psi, tau, keep_states))
    return IterationTrace(config=config, initial=initial, steps=tuple(steps))


def approx_step_size(theta: float, n: int) -> float:
    """Approximate per-iteration search step 2 sin(theta/2) / sqrt(N)."""
    if n < 1:
        raise ValueError(f"qubit count must be >= 1, got {n}")
    return 2 * math.sin(theta / 2) * 2 ** (-n / 2)


def extract_rotation_angle(trace: IterationTrace) -> float:
    """Measure the mean per-iteration advance of arcsin|a_tau|.

    Uses the monotone rise from the start up to the first maximum. The last
    advance into that maximum is dropped because arcsin|a| folds back once
    the state passes |tau>, which shortens that step. If the trace is still
    rising at its end, every advance is used.
    """
    mags = trace.magnitudes(include_initial=True)
    if len(mags) < 3:
        raise ValueError(f"trace too short: need at least 2 iterations, got {len(mags) - 1}")
    angles = np.arcsin(np.clip(mags, 0.0, 1.0))
    advances = np.diff(angles)
    falling = np.flatnonzero(advances <= 0)
    if falling.size == 0:
        usable = advances
    else:
        peak = int(falling[0])
        if peak < 2:
            raise ValueError(
                "non-monotone early segment: |a_tau| stops rising after "
                f"{peak} iteration(s); phases are likely mismatched"
            )
        usable = advances[: peak - 1]
    return float(np.mean(usable))
