"""Simulation of GHZ-assisted and reference-frame-free strategies for the three-player Z/X parity game."""
from .core import (
    MalformedStateError,
    ProjectiveObservable,
    Qubit1Unitary,
    RngStream,
    StateVector,
    apply_local,
    fidelity,
    haar_random_unitary,
    measure,
    tensor,
)
from .states import make_named, state

__all__ = [
    "MalformedStateError",
    "ProjectiveObservable",
    "Qubit1Unitary",
    "RngStream",
    "StateVector",
    "apply_local",
    "fidelity",
    "haar_random_unitary",
    "make_named",
    "measure",
    "state",
    "tensor",
]
