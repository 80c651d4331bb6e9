"""Generalized quantum search with arbitrary phase rotations.

Ideal state-vector simulation of the phase-rotation search iteration, a
compiler to NMR hard-pulse/delay sequences for a heteronuclear two-spin
system, and tools to compare density matrices between the two paths.
"""

from gqsearch.search import (
    IterationTrace,
    SearchConfig,
    approx_step_size,
    grover_generalized,
)

__version__ = "0.1.0"

__all__ = [
    "IterationTrace",
    "SearchConfig",
    "approx_step_size",
    "grover_generalized",
]
