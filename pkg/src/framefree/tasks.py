"""Apples parity game and logical secret sharing on the GHZ and 12-qubit states."""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cache
from typing import Sequence

import numpy as np

from .core import (
    Qubit1Unitary,
    RngStream,
    StateVector,
    apply_block,
    apply_local,
    apply_operator,
    measure_qubit,
)
from .games import LEGAL_QUESTIONS, draw_scramble
from .protocols import measure_logical, measure_logical_oracle
from .states import BLOCKS, basis_pairs, state

APPLE_VALUES = (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(3, 2))
QBER_SAMPLE_FRACTION = 0.25
EAVESDROPPERS = ("off", "intercept_resend")


@dataclass(frozen=True)
class AppleAllotment:
    n_a: Fraction
    n_b: Fraction
    n_c: Fraction

    def __post_init__(self):
        for n in self.counts:
            if Fraction(n) not in APPLE_VALUES:
                raise ValueError(f"apple count {n} not in {{0, 1/2, 1, 3/2}}")
        if self.total.denominator != 1:
            raise ValueError(f"total {self.total} is not an integer")

    @property
    def counts(self) -> tuple[Fraction, Fraction, Fraction]:
        return (Fraction(self.n_a), Fraction(self.n_b), Fraction(self.n_c))

    @property
    def total(self) -> Fraction:
        return sum(self.counts, Fraction(0))

    @property
    def parity(self) -> int:
        return int(self.total) % 2

    def label(self) -> str:
        return ",".join(str(n) for n in self.counts)


def all_allotments(values: Sequence[Fraction] = APPLE_VALUES) -> list[AppleAllotment]:
    return [AppleAllotment(*c) for c in itertools.product(values, repeat=3) if sum(c).denominator == 1]


def phase_rotation(n: Fraction | float) -> Qubit1Unitary:
    """|y0><y0| + exp(i n pi) |y1><y1|."""
    y0, y1 = basis_pairs()["y"].vectors()
    m = np.outer(y0, y0.conj()) + np.exp(1j * math.pi * float(n)) * np.outer(y1, y1.conj())
    return Qubit1Unitary(m)


def rotated_ghz(allotment: AppleAllotment) -> StateVector:
    s = state("GHZ")
    for i, n in enumerate(allotment.counts):
        s = apply_local(s, phase_rotation(n), i + 1)
    return s


def ghz_parity_rule(bits: Sequence[int]) -> int:
    """Even number of z1 outcomes: the GHZ support (even total); odd: the GHZ-perp support."""
    return sum(bits) % 2


def apples_quantum(allotment: AppleAllotment, rng: RngStream) -> int:
    """Alice's parity guess after everyone rotates and measures z; Bob and Charlie send one bit each."""
    s = rotated_ghz(allotment)
    z0, z1 = basis_pairs()["z"].vectors()
    bits = []
    for _ in range(3):
        bit, s = measure_qubit(s, z0, z1, 1, rng, discard=True)
        bits.append(bit)
    return ghz_parity_rule(bits)


def _nonempty_allotments(values: Sequence[Fraction]) -> list[AppleAllotment]:
    allotments = all_allotments(values)
    if not allotments:
        raise ValueError(f"no allotment over {[str(v) for v in values]} has an integer total")
    return allotments


def _apples_cells(values: Sequence[Fraction], b, c) -> Fraction:
    """Best success when Bob sends b(n_B) and Charlie c(n_C): Alice takes the majority parity per cell."""
    allotments = _nonempty_allotments(values)
    cells: dict[tuple, Counter] = {}
    for a in allotments:
        key = (a.n_a, b[a.n_b], c[a.n_c])
        cells.setdefault(key, Counter())[a.parity] += 1
    return Fraction(sum(max(cnt.values()) for cnt in cells.values()), len(allotments))


def _message_functions(values: Sequence[Fraction]):
    for bits in itertools.product((0, 1), repeat=len(values)):
        yield dict(zip(values, bits))


def apples_classical_bound(values: Sequence[Fraction] = APPLE_VALUES) -> Fraction:
    """Exact best success with one classical bit each from Bob and Charlie, uniform allotments.

    For fixed messages the optimal guess is the majority parity in every
    (n_A, b, c) cell, so only the 2^4 x 2^4 message pairs are searched.
    """
    return max(_apples_cells(values, b, c) for b in _message_functions(values) for c in _message_functions(values))


def apples_classical_bound_unpruned(values: Sequence[Fraction]) -> Fraction:
    """Search Alice's guess functions too; only feasible on a reduced value set.

    Every guess function is a row of a 0/1 table over the (n_A, b, c) cells,
    scored against the parity counts of each cell.
    """
    allotments = _nonempty_allotments(values)
    cells = list(itertools.product(values, (0, 1), (0, 1)))
    index = {cell: i for i, cell in enumerate(cells)}
    guesses = np.array(list(itertools.product((0, 1), repeat=len(cells))), dtype=np.int64)
    best = 0
    for b in _message_functions(values):
        for c in _message_functions(values):
            hits = np.zeros((2, len(cells)), dtype=np.int64)
            for a in allotments:
                hits[a.parity, index[(a.n_a, b[a.n_b], c[a.n_c])]] += 1
            won = guesses @ hits[1] + (1 - guesses) @ hits[0]
            best = max(best, int(won.max()))
    return Fraction(best, len(allotments))


@cache
def _eta_projectors() -> tuple[np.ndarray, np.ndarray]:
    e0, e1 = state("eta0").amplitudes, state("eta1").amplitudes
    return np.outer(e0, e0.conj()), np.outer(e1, e1.conj())


def logical_rotation(n: Fraction | float) -> np.ndarray:
    """16x16 block unitary: phase exp(i n pi) on eta1, identity on eta0 and on the complement of the logical span."""
    p0, p1 = _eta_projectors()
    return np.eye(16, dtype=complex) + (np.exp(1j * math.pi * float(n)) - 1) * p1


def rotated_psi12(allotment: AppleAllotment) -> StateVector:
    s = state("Psi12")
    for block, n in zip(BLOCKS, allotment.counts):
        s = apply_operator(s, logical_rotation(n), block)
    return s


def apples_frame_free(allotment: AppleAllotment, rng: RngStream, adversary: str = "none") -> int:
    """Alice's parity guess when each player holds a four-qubit block and reads logical Z."""
    s = rotated_psi12(allotment)
    for player, u in draw_scramble(adversary, rng).items():
        s = apply_block(s, u, BLOCKS[player])
    answers = []
    for _ in range(3):
        outcome, s = measure_logical(s, BLOCKS[0], "Z", rng, discard=True)
        answers.append(outcome.answer)
    return ghz_parity_rule(answers)


def run_apples(variant: str, trials_per_allotment: int, seed: int, adversary: str = "none") -> dict:
    """Play every allotment ``trials_per_allotment`` times; reports exact counts."""
    master = RngStream(seed)
    correct = total = 0
    perfect = 0
    job = 0
    for allot in all_allotments():
        ok = 0
        for _ in range(trials_per_allotment):
            rng = master.child(job)
            job += 1
            if variant == "apples":
                guess = apples_quantum(allot, rng)
            elif variant == "apples-frame-free":
                guess = apples_frame_free(allot, rng, adversary)
            else:
                raise ValueError(f"unknown apples variant {variant!r}")
            ok += guess == allot.parity
        correct += ok
        total += trials_per_allotment
        perfect += ok == trials_per_allotment
    return {
        "task": "apples",
        "variant": variant,
        "adversary": adversary,
        "n_trials": total,
        "correct": correct,
        "success_rate": correct / total if total else 0.0,
        "allotments_always_correct": perfect,
        "n_allotments": len(all_allotments()),
        "classical_bound": str(apples_classical_bound()),
        "seed": seed,
    }


@dataclass(frozen=True)
class SecretShareRound:
    round_id: int
    bases: str
    kept: bool
    answers: tuple[int, int, int] | None = None
    sampled: bool = False

    @property
    def reconstructed(self) -> int | None:
        """Alice's bit as Bob and Charlie jointly infer it from the parity rules."""
        if self.answers is None:
            return None
        _, b, c = self.answers
        return b ^ c ^ (0 if self.bases == "ZZZ" else 1)


@dataclass
class SecretShareResult:
    n_rounds: int
    seed: int
    adversary: str
    eavesdropper: str
    rounds: list[SecretShareRound] = field(repr=False)

    @property
    def kept(self) -> list[SecretShareRound]:
        return [r for r in self.rounds if r.kept]

    @property
    def sift_rate(self) -> float:
        return len(self.kept) / self.n_rounds

    @property
    def sample(self) -> list[SecretShareRound]:
        return [r for r in self.kept if r.sampled]

    @property
    def qber(self) -> float:
        sample = self.sample
        if not sample:
            return 0.0
        return sum(r.answers[0] != r.reconstructed for r in sample) / len(sample)

    @property
    def reconstruction_rate(self) -> float:
        kept = self.kept
        return sum(r.answers[0] == r.reconstructed for r in kept) / len(kept) if kept else 0.0

    def keys(self) -> dict[str, list[int]]:
        """Sifted key bits (kept rounds not spent on the error sample)."""
        rounds = [r for r in self.kept if not r.sampled]
        return {
            "alice": [r.answers[0] for r in rounds],
            "bob": [r.answers[1] for r in rounds],
            "charlie": [r.answers[2] for r in rounds],
            "bob_charlie": [r.reconstructed for r in rounds],
        }

    def mutual_information(self, party: int) -> float:
        """Plug-in estimate, in bits, of I(Alice; one other party's answer) over kept rounds."""
        pairs = Counter((r.answers[0], r.answers[party]) for r in self.kept)
        return _plugin_mi(pairs)

    def report(self) -> dict:
        keys = self.keys()
        return {
            "task": "secret-share",
            "variant": "frame-free",
            "adversary": self.adversary,
            "eavesdropper": self.eavesdropper,
            "n_trials": self.n_rounds,
            "kept": len(self.kept),
            "sift_rate": self.sift_rate,
            "qber_sample": len(self.sample),
            "qber": self.qber,
            "success_rate": self.reconstruction_rate,
            "key_bits": len(keys["alice"]),
            "keys_hex": {name: bits_to_hex(bits) for name, bits in keys.items()},
            "seed": self.seed,
        }


def _plugin_mi(pairs: Counter) -> float:
    n = sum(pairs.values())
    if n == 0:
        return 0.0
    pa, pb = Counter(), Counter()
    for (a, b), k in pairs.items():
        pa[a] += k
        pb[b] += k
    return sum(k / n * math.log2(k * n / (pa[a] * pb[b])) for (a, b), k in pairs.items() if k)


def bits_to_hex(bits: Sequence[int]) -> str:
    if not bits:
        return ""
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes().hex()


def secret_share_round(
    round_id: int, rng: RngStream, adversary: str = "none", eavesdropper: str = "off"
) -> SecretShareRound:
    """One round: random logical bases, readout, sift on the public basis announcement.

    Rounds with an illegal basis combination are discarded before anyone's
    result is used, so their readout is not simulated.
    """
    if eavesdropper not in EAVESDROPPERS:
        raise ValueError(f"unknown eavesdropper {eavesdropper!r}; choose from {EAVESDROPPERS}")
    bases = "".join("ZX"[rng.bit()] for _ in range(3))
    eve_basis = "ZX"[rng.bit()]
    sampled = rng.random() < QBER_SAMPLE_FRACTION
    if bases not in LEGAL_QUESTIONS:
        return SecretShareRound(round_id, bases, kept=False)
    s = state("Psi12")
    for player, u in draw_scramble(adversary, rng).items():
        s = apply_block(s, u, BLOCKS[player])
    if eavesdropper == "intercept_resend":
        # Eve measures Alice's block collectively and forwards the collapsed logical state
        _, s = measure_logical_oracle(s, BLOCKS[0], eve_basis, rng)
    answers = []
    for q in bases:
        outcome, s = measure_logical(s, BLOCKS[0], q, rng, discard=True)
        answers.append(outcome.answer)
    return SecretShareRound(round_id, bases, True, tuple(answers), sampled)


def secret_share(
    n_rounds: int, seed: int, adversary: str = "none", eavesdropper: str = "off"
) -> SecretShareResult:
    if n_rounds < 1:
        raise ValueError("n_rounds must be at least 1")
    master = RngStream(seed)
    rounds = [secret_share_round(i, master.child(i), adversary, eavesdropper) for i in range(n_rounds)]
    return SecretShareResult(n_rounds, seed, adversary, eavesdropper, rounds)
