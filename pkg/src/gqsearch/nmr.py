"""Hard-pulse/delay compilation for a heteronuclear two-spin system.

Between pulses the system evolves in the doubly rotating frame, where only
the weak scalar coupling survives::

    U_delay(t) = exp(-2 pi i J I_zA I_zB t)

Delays are stored by their coupling phase ``alpha = 2 pi J t`` so compiled
sequences do not depend on J; seconds only show up in
:func:`sequence_duration`. Hard pulses are ideal instantaneous rotations
``exp(-i angle I_axis)`` on one spin.

Reading conventions
-------------------
Operator-notation listings (search iterations, Walsh-Hadamard) are applied
last-listed-first, and every transcribed hard-pulse angle is negated
(``LISTING_PULSE_SIGN``) because the static field points along -z. Delays keep
their sign. The temporal-averaging sequences P1/P2 are listed
chronologically. :func:`resolve_transcription_convention` re-derives these
choices numerically.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from gqsearch.algebra import dagger, global_phase_fidelity, hermiticity_deviation
from gqsearch.search import diffusion_general, oracle_phase, search_iteration, walsh_hadamard, zero_phase

J_COUPLING_HZ = 647.451
LARMOR_A_HZ = 500e6
LARMOR_B_HZ = 220e6
HARD_PULSE_SECONDS = 10e-6

FIDELITY_TOL = 1e-8
LISTING_PULSE_SIGN = -1

_I2 = np.eye(2, dtype=complex)
_SIGMA = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class Spin(str, enum.Enum):
    A = "A"
    B = "B"


class TimeOrder(str, enum.Enum):
    FIRST_LISTED_FIRST = "first-listed-first"
    LAST_LISTED_FIRST = "last-listed-first"


@dataclass(frozen=True)
class SpinSystem:
    j_coupling: float = J_COUPLING_HZ
    larmor_a: float = LARMOR_A_HZ
    larmor_b: float = LARMOR_B_HZ
    hard_pulse_duration: float = HARD_PULSE_SECONDS

    def __post_init__(self):
        if not self.j_coupling > 0:
            raise ValueError(f"J coupling must be positive, got {self.j_coupling}")
        if self.hard_pulse_duration < 0:
            raise ValueError("hard pulse duration must be nonnegative")

    def delay_phase(self, seconds: float) -> float:
        return 2 * math.pi * self.j_coupling * seconds

    def delay_seconds(self, alpha: float) -> float:
        return alpha / (2 * math.pi * self.j_coupling)


@dataclass(frozen=True)
class HardPulse:
    spin: Spin
    axis: str
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "spin", Spin(self.spin))
        if self.axis not in ("x", "y"):
            raise ValueError(f"hard pulse axis must be x or y, got {self.axis!r}")
        if not math.isfinite(self.angle):
            raise ValueError("pulse angle must be finite")

    def inverse(self) -> HardPulse:
        return HardPulse(self.spin, self.axis, -self.angle)


@dataclass(frozen=True)
class Delay:
    angle: float

    def __post_init__(self):
        if not math.isfinite(self.angle) or self.angle < 0:
            raise ValueError(f"delay coupling phase must be finite and >= 0, got {self.angle}")


Pulse = HardPulse | Delay


@dataclass(frozen=True)
class PulseSequence:
    pulses: tuple = ()
    time_order: TimeOrder = TimeOrder.FIRST_LISTED_FIRST
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "pulses", tuple(self.pulses))
        object.__setattr__(self, "time_order", TimeOrder(self.time_order))

    def __len__(self):
        return len(self.pulses)

    def chronological(self) -> tuple:
        if self.time_order is TimeOrder.FIRST_LISTED_FIRST:
            return self.pulses
        return self.pulses[::-1]

    def reordered(self, order: TimeOrder) -> PulseSequence:
        order = TimeOrder(order)
        if order is self.time_order:
            return self
        return PulseSequence(self.pulses[::-1], order, self.name)

    @property
    def hard_pulses(self) -> list[HardPulse]:
        return [p for p in self.pulses if isinstance(p, HardPulse)]

    @property
    def delays(self) -> list[Delay]:
        return [p for p in self.pulses if isinstance(p, Delay)]


def then(*seqs: PulseSequence, order: TimeOrder = TimeOrder.LAST_LISTED_FIRST, name: str = "") -> PulseSequence:
    """Sequence that applies ``seqs`` one after another, listed in ``order``."""
    timeline = [p for s in seqs for p in s.chronological()]
    return PulseSequence(timeline, TimeOrder.FIRST_LISTED_FIRST, name).reordered(order)


def _spin_operator(spin: Spin, op2: np.ndarray) -> np.ndarray:
    return np.kron(op2, _I2) if Spin(spin) is Spin.A else np.kron(_I2, op2)


def rotation(axis: str, angle: float) -> np.ndarray:
    """exp(-i angle sigma_axis / 2) on one spin-1/2."""
    return math.cos(angle / 2) * _I2 - 1j * math.sin(angle / 2) * _SIGMA[axis]


def delay_unitary(alpha: float) -> np.ndarray:
    """exp(-i alpha I_zA I_zB); I_zA I_zB has eigenvalues +1/4, -1/4, -1/4, +1/4."""
    q = np.exp(-1j * alpha / 4)
    return np.diag([q, q.conjugate(), q.conjugate(), q])


def pulse_unitary(p: Pulse, sys: SpinSystem | None = None) -> np.ndarray:
    if isinstance(p, Delay):
        return delay_unitary(p.angle)
    return _spin_operator(p.spin, rotation(p.axis, p.angle))


def sequence_unitary(seq: PulseSequence, sys: SpinSystem | None = None) -> np.ndarray:
    u = np.eye(4, dtype=complex)
    for p in seq.chronological():
        u = pulse_unitary(p, sys) @ u
    return u


def sequence_duration(seq: PulseSequence, sys: SpinSystem = SpinSystem()) -> float:
    hard = len(seq.hard_pulses) * sys.hard_pulse_duration
    return hard + sum(sys.delay_seconds(d.angle) for d in seq.delays)


# --- z-rotation gadget ------------------------------------------------------

def _gadget(spin: Spin, angle: float, signs) -> PulseSequence:
    s1, s2, s3 = signs
    return PulseSequence(
        (
            HardPulse(spin, "y", s1 * math.pi / 2),
            HardPulse(spin, "x", s2 * angle),
            HardPulse(spin, "y", s3 * math.pi / 2),
        ),
        TimeOrder.LAST_LISTED_FIRST,
        f"Rz_{Spin(spin).value}",
    )


def z_rotation(spin: Spin, angle: float) -> np.ndarray:
    return _spin_operator(spin, rotation("z", angle))


def resolve_gadget_signs(probe_angles=(0.7, 1.9, -2.3)) -> tuple[int, int, int]:
    """First (Y, X, Y) sign pattern whose triplet equals exp(-i a I_z) for all probes."""
    for signs in itertools.product((1, -1), repeat=3):
        if all(
            global_phase_fidelity(sequence_unitary(_gadget(spin, a, signs)), z_rotation(spin, a)) >= 1 - FIDELITY_TOL
            for a in probe_angles
            for spin in Spin
        ):
            return signs
    raise RuntimeError("no sign pattern realizes a z rotation")


# Frozen result of resolve_gadget_signs(); the test suite re-runs the search.
GADGET_SIGNS = (1, -1, -1)


def compile_rz_gadget(target: Spin, angle: float) -> PulseSequence:
    """Three hard pulses equal to exp(-i angle I_z) on ``target`` up to global phase."""
    return _gadget(Spin(target), angle, GADGET_SIGNS)


# --- operator-notation and chronological listings ---------------------------

def _transcribe(listing, order: TimeOrder, name: str) -> PulseSequence:
    """Build a sequence from (kind, spin, radians) tokens as written.

    Hard-pulse angles are multiplied by LISTING_PULSE_SIGN; "Xbar"/"Ybar" are
    the inverse rotations. Delays are ("D", coupling phase in radians).
    """
    pulses = []
    for tok in listing:
        if tok[0] == "D":
            pulses.append(Delay(tok[1]))
            continue
        kind, spin, angle = tok
        sign = -1 if kind.endswith("bar") else 1
        pulses.append(HardPulse(Spin(spin), kind[0].lower(), LISTING_PULSE_SIGN * sign * angle))
    return PulseSequence(pulses, order, name)


def _half_iteration_listing(a: float):
    half = math.pi / 2
    return [
        ("X", "A", a / 2), ("Y", "A", half),
        ("X", "B", a / 2), ("Y", "B", half),
        ("D", 2 * math.pi - a),
    ]


def _walsh_listing():
    half = math.pi / 2
    return [
        ("X", "A", half), ("X", "A", half), ("Ybar", "A", half),
        ("X", "B", half), ("X", "B", half), ("Ybar", "B", half),
    ]


def compile_walsh() -> PulseSequence:
    """Per-spin (X^{pi/2})^2 Ybar^{pi/2}; equals walsh_hadamard(2) up to global phase."""
    return _transcribe(_walsh_listing(), TimeOrder.LAST_LISTED_FIRST, "W")


def compile_pseudopure() -> tuple[PulseSequence, PulseSequence, PulseSequence]:
    """Temporal-averaging preparations P0, P1, P2 (chronological listings).

    On a diagonal input diag(a, b, c, d) they leave |00> alone and permute
    the other populations: P1 gives diag(a, c, d, b), P2 gives diag(a, d, b, c).
    P2 is P1 with the spins swapped.
    """
    half = math.pi / 2
    coupled = math.pi  # t = 1/(2J)
    p0 = PulseSequence((), TimeOrder.FIRST_LISTED_FIRST, "P0")
    p1 = _transcribe(
        [("Y", "B", half), ("D", coupled), ("X", "B", half), ("Y", "A", half), ("D", coupled), ("X", "A", half)],
        TimeOrder.FIRST_LISTED_FIRST,
        "P1",
    )
    p2 = _transcribe(
        [("Y", "A", half), ("D", coupled), ("Y", "B", half), ("X", "A", half), ("D", coupled), ("X", "B", half)],
        TimeOrder.FIRST_LISTED_FIRST,
        "P2",
    )
    return p0, p1, p2


def _check_phase(a: float, label: str) -> bool:
    """True for a nontrivial phase in (0, 2 pi); False for exactly 0."""
    if a == 0:
        return False
    if not (math.isfinite(a) and 0 < a < 2 * math.pi):
        raise ValueError(f"{label} must lie in (0, 2pi), got {a}")
    return True


def _flip_spins(tau: int) -> list[Spin]:
    """Spins whose bit of tau is 0 (tau=3, i.e. |11>, is the native target)."""
    if not 0 <= tau < 4:
        raise ValueError(f"marked index {tau} out of range for two spins")
    return [spin for spin, bit in ((Spin.A, (tau >> 1) & 1), (Spin.B, tau & 1)) if bit == 0]


def _conjugate_flips(seq: PulseSequence, tau: int) -> PulseSequence:
    flips = _flip_spins(tau)
    if not flips:
        return seq
    before = PulseSequence([HardPulse(s, "x", math.pi) for s in flips])
    after = PulseSequence([HardPulse(s, "x", -math.pi) for s in flips])
    return then(before, seq, after, order=seq.time_order, name=seq.name)


def _phase_block(a: float, rz_angle: float, name: str) -> PulseSequence:
    # Delay(2pi - a) = Delay(-a) * Z(x)Z up to phase; the pi offset in the
    # z rotations cancels the Z(x)Z.
    return PulseSequence(
        compile_rz_gadget(Spin.A, rz_angle).pulses
        + compile_rz_gadget(Spin.B, rz_angle).pulses
        + (Delay(2 * math.pi - a),),
        TimeOrder.LAST_LISTED_FIRST,
        name,
    )


def compile_oracle(phi: float, tau: int = 3) -> PulseSequence:
    """Pulse sequence for the marked-state rotation I_tau(phi)."""
    if not _check_phase(phi, "phi"):
        return PulseSequence((), TimeOrder.LAST_LISTED_FIRST, "I")
    seq = _phase_block(phi, phi / 2 - math.pi, "I")
    return _conjugate_flips(seq, tau)


def compile_zero_phase(theta: float) -> PulseSequence:
    """Pulse sequence for the |00> rotation I_0(theta)."""
    if not _check_phase(theta, "theta"):
        return PulseSequence((), TimeOrder.LAST_LISTED_FIRST, "I0")
    return _phase_block(theta, math.pi - theta / 2, "I0")


def compile_diffusion(theta: float) -> PulseSequence:
    """W, zero-state phase rotation, W."""
    if not _check_phase(theta, "theta"):
        return PulseSequence((), TimeOrder.LAST_LISTED_FIRST, "D")
    w = compile_walsh()
    return then(w, compile_zero_phase(theta), w, name="D")


def compile_iteration(theta: float, phi: float, tau: int = 3, compact: bool = True) -> PulseSequence:
    """Pulse sequence for one generalized search iteration D(theta) I_tau(phi).

    The compact form is two half-iterations of four hard pulses and one delay
    each. ``compact=False`` concatenates :func:`compile_oracle` and
    :func:`compile_diffusion` instead.
    """
    _check_phase(theta, "theta")
    _check_phase(phi, "phi")
    if not compact:
        return then(compile_oracle(phi, tau), compile_diffusion(theta), name="Q")
    if theta == 0 or phi == 0:
        raise ValueError("the compact iteration needs nonzero phases; use compact=False")
    listing = _half_iteration_listing(theta) + _half_iteration_listing(phi)
    seq = _transcribe(listing, TimeOrder.LAST_LISTED_FIRST, "Q")
    return _conjugate_flips(seq, tau)


def resolve_transcription_convention(grid=(math.pi / 4, math.pi / 2, math.pi, 3 * math.pi / 2)):
    """Find (hard-pulse sign, time order) under which the written search and
    Walsh listings reproduce the ideal operators."""
    found = []
    for sign, order in itertools.product((1, -1), TimeOrder):
        def build(listing):
            pulses = [
                Delay(t[1]) if t[0] == "D"
                else HardPulse(Spin(t[1]), t[0][0].lower(), sign * (-1 if t[0].endswith("bar") else 1) * t[2])
                for t in listing
            ]
            return sequence_unitary(PulseSequence(pulses, order))

        ok = global_phase_fidelity(build(_walsh_listing()), walsh_hadamard(2)) >= 1 - FIDELITY_TOL
        for theta, phi in itertools.product(grid, repeat=2):
            u = build(_half_iteration_listing(theta) + _half_iteration_listing(phi))
            ok = ok and global_phase_fidelity(u, search_iteration(2, 3, theta, phi)) >= 1 - FIDELITY_TOL
        if ok:
            found.append((sign, order))
    return found


# --- density matrices -------------------------------------------------------

def check_density(rho, deviation: bool = False, atol: float = 1e-10) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if hermiticity_deviation(rho) > atol:
        raise ValueError("density matrix is not Hermitian")
    target = 0.0 if deviation else 1.0
    if abs(np.trace(rho).real - target) > atol:
        raise ValueError(f"density matrix trace {np.trace(rho).real} != {target}")
    return rho


def pure_density(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def thermal_state(sys: SpinSystem = SpinSystem(), polarization: float = 0.1) -> np.ndarray:
    """High-temperature equilibrium (I + polarization * Delta) / 4.

    Delta = diag(eA+eB, eA-eB, -eA+eB, -eA-eB) with eA = 1 and eB the Larmor
    frequency ratio (0.44 for 1H/31P).
    """
    ea, eb = 1.0, sys.larmor_b / sys.larmor_a
    delta = np.array([ea + eb, ea - eb, -ea + eb, -ea - eb])
    return np.diag((1 + polarization * delta) / 4).astype(complex)


def evolve_density(rho, seq: PulseSequence, sys: SpinSystem | None = None) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"two-spin density matrix must be 4x4, got {rho.shape}")
    u = sequence_unitary(seq, sys)
    return u @ rho @ dagger(u)


def temporal_average(thermal, seqs) -> np.ndarray:
    thermal = np.asarray(thermal, dtype=complex)
    if np.max(np.abs(thermal - np.diag(np.diag(thermal)))) > 1e-12:
        raise ValueError("temporal averaging expects a diagonal input")
    seqs = list(seqs)
    if not seqs:
        raise ValueError("need at least one preparation sequence")
    return sum(evolve_density(thermal, s) for s in seqs) / len(seqs)


@dataclass(frozen=True)
class PseudoPure:
    """rho = background * I/4 + weight * sigma, with sigma a trace-1 state."""

    rho: np.ndarray
    background: float
    weight: float

    def effective(self, rho=None) -> np.ndarray:
        rho = self.rho if rho is None else np.asarray(rho, dtype=complex)
        return (rho - self.background / 4 * np.eye(rho.shape[0])) / self.weight


def split_pseudopure(rho) -> PseudoPure:
    """Decompose diag(a, m, m, m) as lam*I/4 + mu*|00><00|."""
    rho = np.asarray(rho, dtype=complex)
    pops = np.diag(rho).real
    m = pops[1:].mean()
    if np.max(np.abs(pops[1:] - m)) > 1e-10 or np.max(np.abs(rho - np.diag(np.diag(rho)))) > 1e-10:
        raise ValueError("not of the form lam*I/4 + mu*|00><00|")
    mu = pops[0] - m
    if mu <= 0:
        raise ValueError("no positive |00> excess")
    return PseudoPure(rho=rho, background=4 * m, weight=mu)


def prepare_pseudopure(sys: SpinSystem = SpinSystem(), polarization: float = 0.1) -> PseudoPure:
    return split_pseudopure(temporal_average(thermal_state(sys, polarization), compile_pseudopure()))


def ideal_reference(theta: float, phi: float, tau: int = 3) -> dict[str, np.ndarray]:
    """Ideal two-spin operators the compiled sequences are checked against."""
    return {
        "W": walsh_hadamard(2),
        "I": oracle_phase(2, tau, phi),
        "I0": zero_phase(2, theta),
        "D": diffusion_general(2, theta),
        "Q": search_iteration(2, tau, theta, phi),
    }


def run_pulse_path(
    theta: float,
    phi: float,
    iterations: int,
    tau: int = 3,
    sys: SpinSystem = SpinSystem(),
    iteration: PulseSequence | None = None,
    walsh: bool = True,
) -> tuple[PseudoPure, list[np.ndarray]]:
    """Pseudo-pure prep, optional W, then ``iterations`` repetitions.

    Returns the prepared state and the effective (pure-part) density matrix
    after each repetition, index 0 being the state before the first one.
    """
    prep = prepare_pseudopure(sys)
    seq = iteration if iteration is not None else compile_iteration(theta, phi, tau)
    rho = prep.rho
    if walsh:
        rho = evolve_density(rho, compile_walsh(), sys)
    u = sequence_unitary(seq, sys)
    states = [prep.effective(rho)]
    for _ in range(iterations):
        rho = u @ rho @ dagger(u)
        states.append(prep.effective(rho))
    return prep, states


# --- pulse-sequence text format ----------------------------------------------

class SequenceFormatError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def _degrees(angle: float) -> str:
    d = round(math.degrees(angle), 10)
    return repr(d + 0.0)


def format_sequence(seq: PulseSequence, sys: SpinSystem = SpinSystem()) -> str:
    """One pulse per line: ``X A 90.0``, ``Y B -45.0`` or ``DELAY 270.0`` (degrees)."""
    lines = [f"# order={seq.time_order.value}", f"# J={sys.j_coupling!r}Hz"]
    for p in seq.pulses:
        if isinstance(p, Delay):
            lines.append(f"DELAY {_degrees(p.angle)}")
        else:
            lines.append(f"{p.axis.upper()} {p.spin.value} {_degrees(p.angle)}")
    return "\n".join(lines) + "\n"


def parse_sequence(text: str) -> tuple[PulseSequence, float | None]:
    """Parse the text format; returns the sequence and the J header (if any)."""
    order = TimeOrder.FIRST_LISTED_FIRST
    j = None
    pulses = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("order="):
                try:
                    order = TimeOrder(body[len("order="):].strip())
                except ValueError:
                    raise SequenceFormatError(lineno, f"unknown order {body!r}") from None
            elif body.startswith("J="):
                value = body[2:].strip()
                value = value[:-2] if value.endswith("Hz") else value
                try:
                    j = float(value)
                except ValueError:
                    raise SequenceFormatError(lineno, f"bad J value {value!r}") from None
            continue
        parts = line.split()
        try:
            if parts[0].upper() == "DELAY" and len(parts) == 2:
                pulses.append(Delay(math.radians(float(parts[1]))))
            elif parts[0].upper() in ("X", "Y") and len(parts) == 3:
                pulses.append(HardPulse(Spin(parts[1].upper()), parts[0].lower(), math.radians(float(parts[2]))))
            else:
                raise ValueError(f"cannot parse {line!r}")
        except ValueError as exc:
            raise SequenceFormatError(lineno, str(exc)) from None
    return PulseSequence(pulses, order), j
