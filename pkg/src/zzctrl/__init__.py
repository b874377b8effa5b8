"""Optimal control for measuring two-qubit concurrence with a single ZZ expectation."""
from .control import (
    ControlPath, SynthesisConfig, SynthesisResult, backward, composed_unitary, cost, cost_complex,
    forward, gradient, synthesize, terminal_costate,
)
from .controllability import GeneratorSet, LieBasis, control_generators, dla_closure, format_report, is_dmc
from .harness import ExperimentConfig, RunRecord, check_controllability, run_batch, summarize
from .quantum import (
    ControlVector, SpectrumBounds, bell_state, concurrence, evolve, hamiltonian, pure_state, sample_state,
    spectrum_bounds, werner_state, zz_expectation,
)

__version__ = "0.1.0"
