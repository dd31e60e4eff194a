"""Linear-optics collisional model of open-system dynamics.

Evolves an ancilla-system-environment photonic state through repeated
collision steps, tracks ancilla-system entanglement, quantifies its backflow,
and simulates the tomography that measures it.
"""
from .dynamics import NMResult, StepRecord, Trajectory, concurrence, evolve, nm_measure, post_select, sweep
from .errors import CapacityError, EmptySectorError, InvalidInputError, InvariantViolation
from .model import (
    ArmBasis,
    InputSpec,
    KrausChannel,
    StepConfig,
    apply_channel,
    bell_state,
    bs_unitary,
    filter_channel,
    hwp_unitary,
    loss_channel,
    phase_unitary,
    qwp_unitary,
    step_channel,
    werner_state,
)

__version__ = "0.1.0"
