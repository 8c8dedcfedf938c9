"""Logical Z and X readout of a four-qubit block with single-qubit measurements.

The Z readout measures the block's qubits in the fixed bases (z, z, x, x).
The X readout is adaptive: z on the first qubit and x on the second pick the
basis for the third qubit, whose result picks the basis for the fourth.
Both classification tables are derived from the logical kets themselves
when the module is first used, and checked to be exact partitions.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cache
from typing import Sequence

import numpy as np

from .core import (
    ACCUMULATED_ATOL,
    MalformedStateError,
    ProjectiveObservable,
    Qubit1Unitary,
    RngStream,
    StateVector,
    _sample,
    measure,
    measure_qubit,
)
from .states import basis_pairs, state

ZERO_ATOL = 1e-12
LOGICAL_Z_BASES = ("z", "z", "x", "x")
THIRD_QUBIT_BASES = ("a", "b")
FOURTH_QUBIT_BASES = ("c", "d", "e", "f")


@dataclass(frozen=True)
class LogicalOutcome:
    """Answer bit plus the (qubit, basis, bit) record of every measurement made.

    The oracle readout is a single collective measurement and leaves the
    transcript empty.
    """

    answer: int
    transcript: tuple[tuple[int, str, int], ...]

    def bits(self) -> tuple[int, ...]:
        return tuple(b for _, _, b in self.transcript)

    def bases(self) -> str:
        return "".join(name for _, name, _ in self.transcript)


def _block_tensor(name: str) -> np.ndarray:
    return state(name).amplitudes.reshape(2, 2, 2, 2)


def _contract(t: np.ndarray, bra: np.ndarray) -> np.ndarray:
    """Contract the leading qubit of ``t`` with <bra|."""
    return np.tensordot(bra.conj(), t, axes=(0, 0))


def _vec(basis: str, bit: int) -> np.ndarray:
    return basis_pairs()[basis].ket(bit).amplitudes


@cache
def logical_z_table() -> dict[tuple[int, int, int, int], int]:
    """Map each (z, z, x, x) transcript to 0 (phi0 support) or 1 (phi1 support)."""
    table = {}
    for bits in itertools.product((0, 1), repeat=4):
        amps = []
        for name in ("phi0", "phi1"):
            t = _block_tensor(name)
            for basis, bit in zip(LOGICAL_Z_BASES, bits):
                t = _contract(t, _vec(basis, bit))
            amps.append(abs(complex(t)))
        nonzero = [k for k, a in enumerate(amps) if a > ZERO_ATOL]
        if len(nonzero) != 1:
            raise AssertionError(f"transcript {bits} is not exclusive to one logical state: {amps}")
        table[bits] = nonzero[0]
    return table


@dataclass(frozen=True)
class DecisionTree:
    """Adaptive readout of logical X.

    ``branch[(z, x)]`` is the third-qubit basis, ``leaf[(z, x, b3)]`` the
    fourth-qubit basis, ``verdict[(z, x, b3, b4)]`` the answer (0 for psi0).
    """

    root: tuple[str, str]
    branch: dict
    leaf: dict
    verdict: dict

    def to_json(self) -> dict:
        fmt = lambda key: "".join(map(str, key))  # noqa: E731
        return {
            "root": list(self.root),
            "branch": {fmt(k): v for k, v in sorted(self.branch.items())},
            "leaf": {fmt(k): v for k, v in sorted(self.leaf.items())},
            "verdict": {fmt(k): v for k, v in sorted(self.verdict.items())},
        }


def _separating_basis(v0: np.ndarray, v1: np.ndarray, candidates: Sequence[str]) -> list[str]:
    """Bases in which the two conditional one-qubit vectors never share an outcome."""
    good = []
    for name in candidates:
        amps = [[abs(np.vdot(_vec(name, bit), v)) for bit in (0, 1)] for v in (v0, v1)]
        if all(min(amps[0][bit], amps[1][bit]) <= ZERO_ATOL for bit in (0, 1)):
            good.append(name)
    return good


@cache
def decision_tree() -> DecisionTree:
    psi = {k: _block_tensor(f"psi{k}") for k in (0, 1)}
    branch, leaf, verdict = {}, {}, {}
    for zb, xb in itertools.product((0, 1), repeat=2):
        cond = {k: _contract(_contract(psi[k], _vec("z", zb)), _vec("x", xb)) for k in (0, 1)}
        options = []
        for b3 in THIRD_QUBIT_BASES:
            choice = {}
            for o3 in (0, 1):
                v = {k: _contract(cond[k], _vec(b3, o3)) for k in (0, 1)}
                found = _separating_basis(v[0], v[1], FOURTH_QUBIT_BASES)
                if len(found) != 1:
                    break
                choice[o3] = found[0]
            else:
                options.append((b3, choice))
        if len(options) != 1:
            raise AssertionError(f"prefix {(zb, xb)}: expected one adaptive branch, found {options}")
        b3, choice = options[0]
        branch[(zb, xb)] = b3
        for o3, b4 in choice.items():
            leaf[(zb, xb, o3)] = b4
            for o4 in (0, 1):
                amps = []
                for k in (0, 1):
                    t = _contract(_contract(cond[k], _vec(b3, o3)), _vec(b4, o4))
                    amps.append(abs(complex(t)))
                owners = [k for k in (0, 1) if amps[k] > ZERO_ATOL]
                if len(owners) != 1:
                    raise AssertionError(f"transcript {(zb, xb, o3, o4)} has owners {owners}")
                verdict[(zb, xb, o3, o4)] = owners[0]
    return DecisionTree(("z", "x"), branch, leaf, verdict)


def export_tables() -> dict:
    """Both classification tables in JSON-friendly form."""
    z = {"".join(map(str, k)): v for k, v in sorted(logical_z_table().items())}
    return {"logical_z": {"bases": list(LOGICAL_Z_BASES), "answers": z}, "logical_x": decision_tree().to_json()}


@cache
def _span_matrix() -> np.ndarray:
    return np.stack([state("phi0").amplitudes, state("phi1").amplitudes])


def logical_weight(s: StateVector, block: Sequence[int]) -> float:
    """Probability mass of ``s`` inside the logical span on ``block``."""
    n = s.n_qubits
    axes = [q - 1 for q in block]
    psi = np.moveaxis(s.amplitudes.reshape((2,) * n), axes, range(4)).reshape(16, -1)
    proj = _span_matrix().conj() @ psi
    return float(np.vdot(proj, proj).real)


def _require_logical(s: StateVector, block: Sequence[int]) -> None:
    if len(block) != 4:
        raise ValueError(f"a logical block has 4 qubits, got {tuple(block)}")
    w = logical_weight(s, block)
    if 1 - w > ACCUMULATED_ATOL:
        raise MalformedStateError(f"block {tuple(block)} has weight {1 - w:.3e} outside the logical span")


def _measure(s, basis: str, qubit: int, rng, frame, transcript, live):
    k0, k1 = basis_pairs()[basis].vectors()
    if frame is not None:
        m = frame.entries if isinstance(frame, Qubit1Unitary) else frame
        k0, k1 = m @ k0, m @ k1
    if live is None:
        bit, s = measure_qubit(s, k0, k1, qubit, rng)
    else:
        bit, s = measure_qubit(s, k0, k1, live.index(qubit) + 1, rng, discard=True)
        live.remove(qubit)
    transcript.append((qubit, basis, bit))
    return bit, s


def measure_logical_Z(
    s: StateVector,
    block: Sequence[int],
    rng: RngStream,
    frame: Qubit1Unitary | None = None,
    discard: bool = False,
) -> tuple[LogicalOutcome, StateVector]:
    """Logical Z readout from fixed single-qubit measurements on ``block``.

    ``frame`` rotates every measurement basis by the same unitary, as a
    player whose apparatus is turned would measure. With ``discard`` the
    measured block is dropped from the returned state; outcomes and rng use
    are identical either way.
    """
    _require_logical(s, block)
    live = list(range(1, s.n_qubits + 1)) if discard else None
    transcript: list = []
    bits = []
    for basis, q in zip(LOGICAL_Z_BASES, block):
        bit, s = _measure(s, basis, q, rng, frame, transcript, live)
        bits.append(bit)
    return LogicalOutcome(logical_z_table()[tuple(bits)], tuple(transcript)), s


def measure_logical_X(
    s: StateVector,
    block: Sequence[int],
    rng: RngStream,
    frame: Qubit1Unitary | None = None,
    swap_root: bool = False,
    discard: bool = False,
) -> tuple[LogicalOutcome, StateVector]:
    """Adaptive logical X readout following the generated decision tree.

    ``swap_root`` measures the second qubit before the first; both root
    measurements precede any adaptive choice, so statistics are unchanged.
    """
    _require_logical(s, block)
    live = list(range(1, s.n_qubits + 1)) if discard else None
    tree = decision_tree()
    q1, q2, q3, q4 = block
    transcript: list = []
    if swap_root:
        xb, s = _measure(s, tree.root[1], q2, rng, frame, transcript, live)
        zb, s = _measure(s, tree.root[0], q1, rng, frame, transcript, live)
    else:
        zb, s = _measure(s, tree.root[0], q1, rng, frame, transcript, live)
        xb, s = _measure(s, tree.root[1], q2, rng, frame, transcript, live)
    b3, s = _measure(s, tree.branch[(zb, xb)], q3, rng, frame, transcript, live)
    b4, s = _measure(s, tree.leaf[(zb, xb, b3)], q4, rng, frame, transcript, live)
    return LogicalOutcome(tree.verdict[(zb, xb, b3, b4)], tuple(transcript)), s


@cache
def logical_observable(which: str, block: tuple[int, ...]) -> ProjectiveObservable:
    names = {"Z": ("phi0", "phi1"), "X": ("psi0", "psi1")}[which]
    return ProjectiveObservable.from_vectors({0: state(names[0]).amplitudes, 1: state(names[1]).amplitudes}, block)


def measure_logical_oracle(
    s: StateVector, block: Sequence[int], which: str, rng: RngStream, discard: bool = False
) -> tuple[LogicalOutcome, StateVector]:
    """Collective two-projector measurement; the reference the single-qubit readouts must match.

    With ``discard`` the block, left in the measured logical ket, is dropped
    from the returned state.
    """
    if which not in ("Z", "X"):
        raise ValueError(f"which must be 'Z' or 'X', got {which!r}")
    if not discard:
        answer, s = measure(s, logical_observable(which, tuple(block)), rng)
        return LogicalOutcome(answer, ()), s
    names = {"Z": ("phi0", "phi1"), "X": ("psi0", "psi1")}[which]
    n = s.n_qubits
    axes = [q - 1 for q in block]
    psi = np.moveaxis(s.amplitudes.reshape((2,) * n), axes, range(4)).reshape(16, -1)
    comps = [state(name).amplitudes.conj() @ psi for name in names]
    weights = [float(np.vdot(c, c).real) for c in comps]
    total = sum(weights)
    if abs(total - 1.0) > ACCUMULATED_ATOL:
        raise MalformedStateError(f"logical {which} captures probability {total:.12f} on block {tuple(block)}")
    answer = _sample(weights, total, rng)
    return LogicalOutcome(answer, ()), StateVector(n - 4, comps[answer] / np.sqrt(weights[answer]))


def measure_logical(
    s: StateVector,
    block: Sequence[int],
    which: str,
    rng: RngStream,
    frame: Qubit1Unitary | None = None,
    discard: bool = False,
) -> tuple[LogicalOutcome, StateVector]:
    if which == "Z":
        return measure_logical_Z(s, block, rng, frame, discard=discard)
    if which == "X":
        return measure_logical_X(s, block, rng, frame, discard=discard)
    raise ValueError(f"which must be 'Z' or 'X', got {which!r}")


def transcript_rows(trial: int, block_id: int, outcome: LogicalOutcome) -> list[tuple]:
    """CSV rows ``(trial, block, qubit, basis, outcome)`` for one readout."""
    return [(trial, block_id, q, basis, bit) for q, basis, bit in outcome.transcript]
