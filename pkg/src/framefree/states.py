"""Named kets, basis pairs and protocol constants, with identity checks.

Every constant is evaluated from its radical expression. The 12-qubit
state is built from the eta-product form and cross-checked against the
phi/psi decomposition by ``verify_decompositions``.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from functools import cache
from math import sqrt
from typing import Sequence

import numpy as np

from .core import (
    ACCUMULATED_ATOL,
    RngStream,
    StateVector,
    apply_all,
    apply_local,
    fidelity,
    haar_random_unitary,
    tensor,
)

IDENTITY_ATOL = 1e-10

BLOCKS = ((1, 2, 3, 4), (5, 6, 7, 8), (9, 10, 11, 12))


@dataclass(frozen=True)
class ProtocolConstants:
    alpha: float
    beta: float
    p: float
    q: float
    r: float
    s: float
    t: float
    u: float


@cache
def constants() -> ProtocolConstants:
    alpha = sqrt(3 + sqrt(6)) / (2 * sqrt(6))
    beta = sqrt(3 - sqrt(6)) / (2 * sqrt(6))
    p = sqrt(2 - sqrt(2)) / 2
    q = sqrt(2 + sqrt(2)) / 2
    return ProtocolConstants(
        alpha=alpha,
        beta=beta,
        p=p,
        q=q,
        r=(3 + sqrt(3)) * q / (12 * alpha),
        s=(3 - sqrt(3)) * q / (12 * beta),
        t=(3 - sqrt(3)) * p / (12 * alpha),
        u=(3 + sqrt(3)) * p / (12 * beta),
    )


@dataclass(frozen=True)
class BasisPair:
    name: str
    ket0: StateVector
    ket1: StateVector

    def __post_init__(self):
        if abs(np.vdot(self.ket0.amplitudes, self.ket1.amplitudes)) > 1e-12:
            raise ValueError(f"basis {self.name!r} is not orthogonal")

    def ket(self, bit: int) -> StateVector:
        return self.ket1 if bit else self.ket0

    def vectors(self) -> tuple[np.ndarray, np.ndarray]:
        return self.ket0.amplitudes, self.ket1.amplitudes


def _qubit(c0: complex, c1: complex) -> StateVector:
    return StateVector(1, [c0, c1])


@cache
def basis_pairs() -> dict[str, BasisPair]:
    k = constants()
    h = 1 / sqrt(2)
    p, q, r, s, t, u = k.p, k.q, k.r, k.s, k.t, k.u
    table = {
        "z": ((1, 0), (0, 1)),
        "x": ((h, h), (h, -h)),
        "y": ((h, 1j * h), (h, -1j * h)),
        "a": ((p, q), (q, -p)),
        "b": ((-p, q), (q, p)),
        "c": ((-r, s), (-s, -r)),
        "d": ((t, u), (u, -t)),
        "e": ((r, s), (s, -r)),
        "f": ((-t, u), (u, t)),
    }
    return {name: BasisPair(name, _qubit(*k0), _qubit(*k1)) for name, (k0, k1) in table.items()}


def ket(label: str) -> StateVector:
    """Single-qubit ket from a label such as ``"z0"`` or ``"b1"``."""
    return basis_pairs()[label[0]].ket(int(label[1]))


def product(labels: str | Sequence[str]) -> StateVector:
    """Product ket from comma-separated labels, ``"z0,x1,a0"``."""
    if isinstance(labels, str):
        labels = labels.split(",")
    return tensor(*(ket(lab.strip()) for lab in labels))


def superpose(terms: Sequence[tuple[complex, StateVector]], normalize: bool = False) -> StateVector:
    amps = sum(c * s.amplitudes for c, s in terms)
    return StateVector.from_amplitudes(amps, normalize=normalize)


def _z_expansion(coeffs: dict[str, float], scale: float) -> StateVector:
    amps = np.zeros(2 ** len(next(iter(coeffs))), dtype=complex)
    for bits, c in coeffs.items():
        amps[int(bits, 2)] = c * scale
    return StateVector.from_amplitudes(amps)


@cache
def _named() -> dict[str, StateVector]:
    h = 1 / sqrt(2)
    out: dict[str, StateVector] = {}
    out["GHZ"] = superpose([(h, product("y0,y0,y0")), (h, product("y1,y1,y1"))])
    out["GHZperp"] = _z_expansion({"001": 1j, "010": 1j, "100": 1j, "111": -1j}, 0.5)
    out["phi0"] = _z_expansion({"0101": 1, "0110": -1, "1001": -1, "1010": 1}, 0.5)
    out["phi1"] = _z_expansion(
        {"0011": 2, "0101": -1, "0110": -1, "1001": -1, "1010": -1, "1100": 2}, 1 / (2 * sqrt(3))
    )
    phi0, phi1 = out["phi0"], out["phi1"]
    out["psi0"] = superpose([(h, phi0), (h, phi1)])
    out["psi1"] = superpose([(h, phi0), (-h, phi1)])
    out["eta0"] = superpose([(h, phi0), (1j * h, phi1)])
    out["eta1"] = superpose([(h, phi0), (-1j * h, phi1)])
    eta0, eta1 = out["eta0"], out["eta1"]
    out["Psi12"] = superpose([(h, tensor(eta0, eta0, eta0)), (h, tensor(eta1, eta1, eta1))])
    return out


NAMES = ("GHZ", "GHZperp", "phi0", "phi1", "psi0", "psi1", "eta0", "eta1", "Psi12")


@dataclass(frozen=True)
class NamedState:
    name: str
    state: StateVector

    @property
    def n_qubits(self) -> int:
        return self.state.n_qubits


def make_named(name: str) -> NamedState:
    try:
        return NamedState(name, _named()[name])
    except KeyError:
        raise KeyError(f"unknown state {name!r}; choose from {', '.join(NAMES)}") from None


def state(name: str) -> StateVector:
    return make_named(name).state


# Right-hand sides of the four-term decompositions. Each entry is
# (sign, product labels); the overall factor is 1/2.
DECOMPOSITIONS: dict[str, tuple[str, list[tuple[int, tuple[str, ...]]]]] = {
    "GHZ:zzz": ("GHZ", [(+1, ("z0", "z0", "z0")), (-1, ("z0", "z1", "z1")),
                        (-1, ("z1", "z0", "z1")), (-1, ("z1", "z1", "z0"))]),
    "GHZ:zxx": ("GHZ", [(+1, ("z0", "x0", "x1")), (+1, ("z0", "x1", "x0")),
                        (-1, ("z1", "x0", "x0")), (+1, ("z1", "x1", "x1"))]),
    "GHZ:xzx": ("GHZ", [(+1, ("x0", "z0", "x1")), (-1, ("x0", "z1", "x0")),
                        (+1, ("x1", "z0", "x0")), (+1, ("x1", "z1", "x1"))]),
    "GHZ:xxz": ("GHZ", [(-1, ("x0", "x0", "z1")), (+1, ("x0", "x1", "z0")),
                        (+1, ("x1", "x0", "z0")), (+1, ("x1", "x1", "z1"))]),
    "Psi12:ZZZ": ("Psi12", [(+1, ("phi0", "phi0", "phi0")), (-1, ("phi0", "phi1", "phi1")),
                            (-1, ("phi1", "phi0", "phi1")), (-1, ("phi1", "phi1", "phi0"))]),
    "Psi12:ZXX": ("Psi12", [(+1, ("phi0", "psi0", "psi1")), (+1, ("phi0", "psi1", "psi0")),
                            (-1, ("phi1", "psi0", "psi0")), (+1, ("phi1", "psi1", "psi1"))]),
    "Psi12:XZX": ("Psi12", [(+1, ("psi0", "phi0", "psi1")), (-1, ("psi0", "phi1", "psi0")),
                            (+1, ("psi1", "phi0", "psi0")), (+1, ("psi1", "phi1", "psi1"))]),
    "Psi12:XXZ": ("Psi12", [(-1, ("psi0", "psi0", "phi1")), (+1, ("psi0", "psi1", "phi0")),
                            (+1, ("psi1", "psi0", "phi0")), (+1, ("psi1", "psi1", "phi1"))]),
}


def _factor(label: str) -> StateVector:
    return state(label) if label in _named() else ket(label)


def decomposition_rhs(key: str, flip_term: int | None = None) -> StateVector:
    """Build the four-term right-hand side; ``flip_term`` negates one term (negative control)."""
    _, terms = DECOMPOSITIONS[key]
    amps = 0
    for i, (sign, labels) in enumerate(terms):
        if i == flip_term:
            sign = -sign
        amps = amps + 0.5 * sign * tensor(*(_factor(lab) for lab in labels)).amplitudes
    return StateVector.from_amplitudes(amps)


@dataclass(frozen=True)
class Check:
    name: str
    fidelity: float
    passed: bool
    seed: int | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def verify_decompositions(flip: tuple[str, int] | None = None) -> list[Check]:
    """Fidelity of each four-term expansion against its left-hand state.

    ``flip=(key, i)`` negates term ``i`` of identity ``key`` to exercise the failure path.
    """
    checks = []
    for key, (lhs, _) in DECOMPOSITIONS.items():
        flip_term = flip[1] if flip is not None and flip[0] == key else None
        f = fidelity(state(lhs), decomposition_rhs(key, flip_term))
        checks.append(Check(key, f, f >= 1 - IDENTITY_ATOL))
    return checks


# Alternative single-qubit-basis expansions of phi0/phi1 and psi0/psi1.
_PHI_ZZXX = {
    "phi0": (0.5, [(-1, "z0,z1,x0,x1"), (+1, "z0,z1,x1,x0"), (+1, "z1,z0,x0,x1"), (-1, "z1,z0,x1,x0")]),
    "phi1": (1 / (2 * sqrt(3)), [
        (+1, "z0,z0,x0,x0"), (-1, "z0,z0,x0,x1"), (-1, "z0,z0,x1,x0"), (+1, "z0,z0,x1,x1"),
        (-1, "z0,z1,x0,x0"), (+1, "z0,z1,x1,x1"), (-1, "z1,z0,x0,x0"), (+1, "z1,z0,x1,x1"),
        (+1, "z1,z1,x0,x0"), (+1, "z1,z1,x0,x1"), (+1, "z1,z1,x1,x0"), (+1, "z1,z1,x1,x1"),
    ]),
}
_PSI_SEQUENTIAL = {
    "psi0": [("alpha", +1, "z0,x0,a0,c0"), ("beta", +1, "z0,x0,a1,d1"),
             ("alpha", +1, "z0,x1,b0,e0"), ("beta", +1, "z0,x1,b1,f1"),
             ("beta", +1, "z1,x0,b0,f0"), ("alpha", +1, "z1,x0,b1,e1"),
             ("beta", -1, "z1,x1,a0,d0"), ("alpha", +1, "z1,x1,a1,c1")],
    "psi1": [("beta", +1, "z0,x0,a0,c1"), ("alpha", +1, "z0,x0,a1,d0"),
             ("beta", +1, "z0,x1,b0,e1"), ("alpha", -1, "z0,x1,b1,f0"),
             ("alpha", +1, "z1,x0,b0,f1"), ("beta", -1, "z1,x0,b1,e0"),
             ("alpha", +1, "z1,x1,a0,d1"), ("beta", -1, "z1,x1,a1,c0")],
}


def sequential_expansion(name: str) -> list[tuple[float, str]]:
    """Signed coefficients and product labels of the adaptive-basis expansion of psi0/psi1."""
    k = constants()
    return [(sign * getattr(k, coef), labels) for coef, sign, labels in _PSI_SEQUENTIAL[name]]


def verify_expansions() -> list[Check]:
    """Amplitude-wise checks of the alternative expansions and the constants' normalizations."""
    checks = []
    for name, (scale, terms) in _PHI_ZZXX.items():
        rhs = superpose([(scale * sign, product(lab)) for sign, lab in terms])
        f = fidelity(state(name), rhs)
        ok = np.allclose(rhs.amplitudes, state(name).amplitudes, atol=1e-12, rtol=0)
        checks.append(Check(f"{name}:zzxx", f, bool(ok)))
    for name in _PSI_SEQUENTIAL:
        terms = sequential_expansion(name)
        amps = sum(c * product(lab).amplitudes for c, lab in terms)
        rhs = StateVector.from_amplitudes(amps)
        ok = np.allclose(rhs.amplitudes, state(name).amplitudes, atol=IDENTITY_ATOL, rtol=0)
        checks.append(Check(f"{name}:sequential", fidelity(state(name), rhs), bool(ok)))
    h = 1 / sqrt(2)
    for name, lhs, c in (("psi0", "phi1", h), ("psi1", "phi1", -h), ("eta0", "phi1", 1j * h), ("eta1", "phi1", -1j * h)):
        built = h * state("phi0").amplitudes + c * state(lhs).amplitudes
        ok = np.allclose(built, state(name).amplitudes, atol=1e-12, rtol=0)
        checks.append(Check(f"{name}:from-phi", fidelity(state(name), StateVector.from_amplitudes(built)), bool(ok)))
    route = psi12_from_decomposition()
    f = fidelity(state("Psi12"), route)
    checks.append(Check("Psi12:two-routes", f, f >= 1 - 1e-12))
    return checks


@dataclass(frozen=True)
class ConstantCheck:
    name: str
    value: float
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


def verify_constants() -> list[ConstantCheck]:
    """Normalizations that make the adaptive-basis kets unit vectors; each must equal 1."""
    k = constants()
    checks = []
    for label, val, tol in (
        ("4(alpha^2+beta^2)", 4 * (k.alpha**2 + k.beta**2), 1e-14),
        ("p^2+q^2", k.p**2 + k.q**2, 1e-12),
        ("r^2+s^2", k.r**2 + k.s**2, 1e-12),
        ("t^2+u^2", k.t**2 + k.u**2, 1e-12),
    ):
        checks.append(ConstantCheck(label, val, abs(val - 1) <= tol))
    return checks


def psi12_from_decomposition() -> StateVector:
    """The 12-qubit state rebuilt from its phi-basis expansion (independent of the eta route)."""
    phi0, phi1 = state("phi0"), state("phi1")
    terms = [(+0.5, (phi0, phi0, phi0)), (-0.5, (phi0, phi1, phi1)), (-0.5, (phi1, phi0, phi1)), (-0.5, (phi1, phi1, phi0))]
    return StateVector.from_amplitudes(sum(c * tensor(*fs).amplitudes for c, fs in terms))


def rotate_block(s: StateVector, unitaries: Sequence, qubits: Sequence[int]) -> StateVector:
    """Apply ``unitaries[i]`` to ``qubits[i]``."""
    for u, q in zip(unitaries, qubits):
        s = apply_local(s, u, q)
    return s


@dataclass(frozen=True)
class InvarianceReport:
    name: str
    trials: int
    min_fidelity: float
    passed: bool
    seed: int
    stream: tuple[int, ...] = ()

    def to_dict(self) -> dict:
        return asdict(self)


def verify_u4_invariance(name: str, trials: int, rng: RngStream) -> InvarianceReport:
    s = state(name)
    if s.n_qubits != 4:
        raise ValueError(f"{name} is not a 4-qubit state")
    worst = 1.0
    for _ in range(trials):
        u = haar_random_unitary(rng)
        worst = min(worst, fidelity(s, apply_all(s, u, (1, 2, 3, 4))))
    return InvarianceReport(name, trials, worst, worst >= 1 - IDENTITY_ATOL, rng.seed, rng.spawn_key)


def verify_psi12_invariance(trials: int, rng: RngStream) -> InvarianceReport:
    s = state("Psi12")
    worst = 1.0
    for _ in range(trials):
        rotated = s
        for block in BLOCKS:
            rotated = apply_all(rotated, haar_random_unitary(rng), block)
        worst = min(worst, fidelity(s, rotated))
    return InvarianceReport("Psi12", trials, worst, worst >= 1 - ACCUMULATED_ATOL, rng.seed, rng.spawn_key)
