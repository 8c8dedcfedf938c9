"""Dense state-vector engine.

Qubits are numbered from 1. Qubit 1 is the most significant bit of the
basis index, so the ket |b1,b2,...,bn> sits at index int("b1b2...bn", 2).
All values are treated as immutable: every operation returns a new state.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Mapping, Sequence

import numpy as np

NORM_ATOL = 1e-12
ACCUMULATED_ATOL = 1e-9
RNG_ALGORITHM = "PCG64"


class MalformedStateError(ValueError):
    """Raised when a state has weight outside the subspace an observable covers."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = _frozen(np.asarray(self.amplitudes).reshape(-1))
        if amps.shape[0] != 2**self.n_qubits:
            raise ValueError(
                f"expected {2**self.n_qubits} amplitudes for {self.n_qubits} qubits, got {amps.shape[0]}"
            )
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"state is not normalized (squared norm {norm!r})")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize: bool = False) -> StateVector:
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n = int(round(np.log2(amps.shape[0])))
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(n, amps)

    @classmethod
    def basis(cls, bits: str | Sequence[int]) -> StateVector:
        """Computational basis ket, e.g. ``basis("0101")`` is |z0,z1,z0,z1>."""
        bits = "".join(str(b) for b in bits)
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[int(bits, 2)] = 1.0
        return cls(len(bits), amps)

    def amplitude(self, bits: str) -> complex:
        return complex(self.amplitudes[int(bits, 2)])

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def __len__(self) -> int:
        return self.amplitudes.shape[0]


@dataclass(frozen=True)
class Qubit1Unitary:
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = _frozen(self.entries)
        if m.shape != (2, 2):
            raise ValueError("single-qubit unitary must be 2x2")
        if not np.allclose(m @ m.conj().T, np.eye(2), atol=NORM_ATOL, rtol=0):
            raise ValueError("matrix is not unitary")
        object.__setattr__(self, "entries", m)

    @classmethod
    def identity(cls) -> Qubit1Unitary:
        return cls(np.eye(2))

    def dagger(self) -> Qubit1Unitary:
        return Qubit1Unitary(self.entries.conj().T)

    def __matmul__(self, other: Qubit1Unitary) -> Qubit1Unitary:
        return Qubit1Unitary(self.entries @ other.entries)


@dataclass(frozen=True)
class ProjectiveObservable:
    """Labelled orthogonal projectors acting on an ordered subset of qubits.

    The projectors need not sum to the identity. Whatever weight a state has
    outside their joint range is the residual, and ``measure`` refuses states
    whose residual exceeds ``ACCUMULATED_ATOL``.
    """

    labels: tuple
    projectors: tuple = field(repr=False)
    acting_qubits: tuple[int, ...]

    def __post_init__(self):
        projs = tuple(_frozen(p) for p in self.projectors)
        dim = 2 ** len(self.acting_qubits)
        if len(projs) != len(self.labels):
            raise ValueError("one projector per label required")
        for i, p in enumerate(projs):
            if p.shape != (dim, dim):
                raise ValueError(f"projector {self.labels[i]!r} has shape {p.shape}, expected {(dim, dim)}")
            if not np.allclose(p, p.conj().T, atol=NORM_ATOL, rtol=0):
                raise ValueError(f"projector {self.labels[i]!r} is not Hermitian")
            if not np.allclose(p @ p, p, atol=NORM_ATOL, rtol=0):
                raise ValueError(f"projector {self.labels[i]!r} is not idempotent")
            for j in range(i):
                if not np.allclose(p @ projs[j], 0, atol=NORM_ATOL, rtol=0):
                    raise ValueError(f"projectors {self.labels[j]!r} and {self.labels[i]!r} overlap")
        object.__setattr__(self, "projectors", projs)
        object.__setattr__(self, "acting_qubits", tuple(self.acting_qubits))

    @classmethod
    def from_vectors(
        cls, vectors: Mapping[object, np.ndarray | Sequence[np.ndarray]], acting_qubits: Sequence[int]
    ) -> ProjectiveObservable:
        """Build from orthonormal spanning vectors, one vector or a list per label."""
        labels, projs = [], []
        for label, vecs in vectors.items():
            vecs = np.atleast_2d(np.asarray(vecs, dtype=complex))
            projs.append(sum(np.outer(v, v.conj()) for v in vecs))
            labels.append(label)
        return cls(tuple(labels), tuple(projs), tuple(acting_qubits))

    @classmethod
    def single_qubit(cls, ket0, ket1, qubit: int, labels=(0, 1)) -> ProjectiveObservable:
        return cls.from_vectors({labels[0]: ket0, labels[1]: ket1}, (qubit,))


class RngStream:
    """Seeded random stream; the seed and algorithm name are part of every record."""

    algorithm = RNG_ALGORITHM

    def __init__(self, seed: int, spawn_key: tuple[int, ...] = ()):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.spawn_key = tuple(spawn_key)
        self._gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=self.spawn_key)))

    def child(self, index: int) -> RngStream:
        """Independent per-trial stream; trial ``i`` of master seed ``s`` is always the same."""
        return RngStream(self.seed, self.spawn_key + (int(index),))

    def random(self) -> float:
        return float(self._gen.random())

    def integers(self, low: int, high: int | None = None) -> int:
        return int(self._gen.integers(low, high))

    def bit(self) -> int:
        return int(self._gen.integers(2))

    def normal(self, size) -> np.ndarray:
        return self._gen.standard_normal(size)

    def choice(self, options: Sequence):
        return options[int(self._gen.integers(len(options)))]

    def describe(self) -> dict:
        return {"seed": self.seed, "spawn_key": list(self.spawn_key), "algorithm": self.algorithm}

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, spawn_key={self.spawn_key})"


def as_rng(rng: RngStream | int | None) -> RngStream:
    if isinstance(rng, RngStream):
        return rng
    return RngStream(0 if rng is None else rng)


def tensor(a: StateVector, *rest: StateVector) -> StateVector:
    """Kronecker product, earlier arguments most significant."""
    states = (a,) + rest
    amps = reduce(np.kron, (s.amplitudes for s in states))
    return StateVector(sum(s.n_qubits for s in states), amps)


def _check_qubit(n: int, qubit: int) -> None:
    if not 1 <= qubit <= n:
        raise IndexError(f"qubit index {qubit} out of range 1..{n}")


def _matrix(u) -> np.ndarray:
    return u.entries if isinstance(u, Qubit1Unitary) else np.asarray(u, dtype=complex)


def _act(m: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """2x2 matrix on the middle axis of an (A, 2, B) array."""
    p0, p1 = psi[:, 0, :], psi[:, 1, :]
    return np.stack((m[0, 0] * p0 + m[0, 1] * p1, m[1, 0] * p0 + m[1, 1] * p1), axis=1)


def apply_local(state: StateVector, u: Qubit1Unitary | np.ndarray, qubit_index: int) -> StateVector:
    n = state.n_qubits
    _check_qubit(n, qubit_index)
    m = _matrix(u)
    psi = state.amplitudes.reshape(2 ** (qubit_index - 1), 2, 2 ** (n - qubit_index))
    return StateVector(n, _act(m, psi).reshape(-1))


def apply_all(state: StateVector, u: Qubit1Unitary | np.ndarray, qubits: Sequence[int]) -> StateVector:
    """The same single-qubit unitary on each listed qubit (a rigid rotation of one lab)."""
    for q in qubits:
        state = apply_local(state, u, q)
    return state


def apply_operator(state: StateVector, op: np.ndarray, qubits: Sequence[int]) -> StateVector:
    """Apply a unitary on the listed qubits, given as a 2^k x 2^k matrix in their listed order."""
    n = state.n_qubits
    qubits = list(qubits)
    for q in qubits:
        _check_qubit(n, q)
    k = len(qubits)
    op = np.asarray(op, dtype=complex)
    if op.shape != (2**k, 2**k):
        raise ValueError(f"operator shape {op.shape} does not match {k} qubits")
    psi = _apply_on(state.amplitudes, op, qubits, n)
    return StateVector(n, psi)


def _apply_on(amps: np.ndarray, op: np.ndarray, qubits: list[int], n: int) -> np.ndarray:
    k = len(qubits)
    axes = [q - 1 for q in qubits]
    psi = np.moveaxis(amps.reshape((2,) * n), axes, range(k)).reshape(2**k, -1)
    psi = (op @ psi).reshape((2,) * n)
    return np.moveaxis(psi, range(k), axes).reshape(-1)


def probabilities(state: StateVector, obs: ProjectiveObservable) -> dict:
    """Born probabilities per label, plus the residual under key ``None``."""
    n = state.n_qubits
    qubits = list(obs.acting_qubits)
    probs = {}
    for label, p in zip(obs.labels, obs.projectors):
        v = _apply_on(state.amplitudes, p, qubits, n)
        probs[label] = float(np.vdot(v, v).real)
    probs[None] = 1.0 - sum(probs.values())
    return probs


def measure(state: StateVector, obs: ProjectiveObservable, rng: RngStream) -> tuple[object, StateVector]:
    """Sample an outcome by the Born rule and return it with the collapsed state."""
    n = state.n_qubits
    qubits = list(obs.acting_qubits)
    for q in qubits:
        _check_qubit(n, q)
    projected, weights = [], []
    for p in obs.projectors:
        v = _apply_on(state.amplitudes, p, qubits, n)
        projected.append(v)
        weights.append(float(np.vdot(v, v).real))
    total = sum(weights)
    if abs(total - 1.0) > ACCUMULATED_ATOL:
        raise MalformedStateError(
            f"projectors {obs.labels} capture probability {total:.12f}; residual {1 - total:.3e}"
        )
    idx = _sample(weights, total, rng)
    v = projected[idx]
    return obs.labels[idx], StateVector(n, v / np.sqrt(weights[idx]))


def _sample(weights: Sequence[float], total: float, rng: RngStream) -> int:
    x = rng.random() * total
    acc = 0.0
    for i, w in enumerate(weights):
        acc += w
        if x < acc:
            return i
    # x landed in rounding slack past the last nonzero weight
    return max(i for i, w in enumerate(weights) if w > 0)


def measure_qubit(
    state: StateVector,
    ket0: np.ndarray,
    ket1: np.ndarray,
    qubit_index: int,
    rng: RngStream,
    discard: bool = False,
) -> tuple[int, StateVector]:
    """Projective measurement of one qubit in the orthonormal basis {ket0, ket1}.

    Same contract as ``measure`` with a two-outcome single-qubit observable,
    without building 2x2 projectors; returns outcome bit 0 for ket0. With
    ``discard`` the measured qubit, now in a known basis state, is dropped
    and the remaining ``n - 1`` qubit state is returned.
    """
    n = state.n_qubits
    _check_qubit(n, qubit_index)
    psi = state.amplitudes.reshape(2 ** (qubit_index - 1), 2, 2 ** (n - qubit_index))
    kets = np.array([ket0, ket1], dtype=complex)
    bras = kets.conj()
    p0, p1 = psi[:, 0, :], psi[:, 1, :]
    c0 = bras[0, 0] * p0 + bras[0, 1] * p1
    c1 = bras[1, 0] * p0 + bras[1, 1] * p1
    w0 = float(np.vdot(c0, c0).real)
    w1 = float(np.vdot(c1, c1).real)
    bit = _sample((w0, w1), w0 + w1, rng)
    c = (c0, c1)[bit] / np.sqrt((w0, w1)[bit])
    if discard:
        return bit, StateVector(n - 1, c.reshape(-1))
    out = np.stack((kets[bit, 0] * c, kets[bit, 1] * c), axis=1)
    return bit, StateVector(n, out.reshape(-1))


def apply_block(state: StateVector, u: Qubit1Unitary | np.ndarray, qubits: Sequence[int]) -> StateVector:
    """``u`` on every listed qubit at once, as one tensor-power operator; equals ``apply_all``."""
    m = _matrix(u)
    return apply_operator(state, reduce(np.kron, [m] * len(qubits)), qubits)


def haar_random_unitary(rng: RngStream) -> Qubit1Unitary:
    """Haar-distributed element of U(2): QR of a complex Ginibre matrix with phase fix."""
    g = (rng.normal((2, 2)) + 1j * rng.normal((2, 2))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    return Qubit1Unitary(q)


def fidelity(a: StateVector, b: StateVector) -> float:
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"dimension mismatch: {a.n_qubits} vs {b.n_qubits} qubits")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


PAULI_X = Qubit1Unitary(np.array([[0, 1], [1, 0]]))
