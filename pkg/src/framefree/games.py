"""Three-player Z/X parity game: referee, strategies, adversary and exact bounds."""
from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

from .core import RngStream, apply_block, apply_local, haar_random_unitary, measure_qubit
from .protocols import LogicalOutcome, measure_logical
from .states import BLOCKS, basis_pairs, state

LEGAL_QUESTIONS = ("ZZZ", "ZXX", "XZX", "XXZ")
ADVERSARIES = ("none", "scramble_one", "scramble_all")
STRATEGIES = ("classical-best", "ghz", "frame-free")


def is_legal(questions: str) -> bool:
    return questions in LEGAL_QUESTIONS


def wins(questions: str, answers: tuple[int, int, int]) -> bool:
    """All-Z rounds need an odd number of 0 answers, one-Z rounds an even number."""
    if not is_legal(questions):
        raise ValueError(f"illegal question set {questions!r}")
    zeros = sum(1 for a in answers if a == 0)
    return zeros % 2 == (1 if questions == "ZZZ" else 0)


def referee_draw(rng: RngStream) -> str:
    return LEGAL_QUESTIONS[rng.integers(4)]


@dataclass(frozen=True)
class ClassicalStrategy:
    """Per player, the fixed answer to Z and to X."""

    answers: tuple[tuple[int, int], tuple[int, int], tuple[int, int]]

    def answer(self, player: int, question: str) -> int:
        return self.answers[player][0 if question == "Z" else 1]

    def play(self, questions: str) -> tuple[int, int, int]:
        return tuple(self.answer(i, q) for i, q in enumerate(questions))

    def label(self) -> str:
        return " ".join(f"Z{z}X{x}" for z, x in self.answers)


# Answer 1 to Z and 0 to X, every player.
SIMPLE_CLASSICAL = ClassicalStrategy(((1, 0), (1, 0), (1, 0)))


def all_classical_strategies() -> Iterator[ClassicalStrategy]:
    per_player = list(itertools.product((0, 1), repeat=2))
    for combo in itertools.product(per_player, repeat=3):
        yield ClassicalStrategy(combo)


def classical_score(strategy: ClassicalStrategy) -> Fraction:
    """Exact win probability under uniformly drawn legal questions."""
    won = sum(wins(q, strategy.play(q)) for q in LEGAL_QUESTIONS)
    return Fraction(won, len(LEGAL_QUESTIONS))


def classical_bound_bruteforce() -> tuple[Fraction, list[ClassicalStrategy]]:
    """Best deterministic win probability and every strategy attaining it.

    Shared randomness only mixes deterministic strategies, so it cannot beat
    this maximum.
    """
    scored = [(classical_score(s), s) for s in all_classical_strategies()]
    best = max(score for score, _ in scored)
    return best, [s for score, s in scored if score == best]


@dataclass(frozen=True)
class TrialRecord:
    questions: str
    answers: tuple[int, int, int]
    win: bool
    strategy: str
    adversary: str
    seed: int
    trial: int
    scrambled: tuple[int, ...] = ()
    unitaries: tuple = field(default=(), repr=False)

    def to_row(self) -> dict:
        return {
            "trial": self.trial,
            "seed": self.seed,
            "strategy": self.strategy,
            "adversary": self.adversary,
            "questions": self.questions,
            "answers": "".join(map(str, self.answers)),
            "win": int(self.win),
            "scrambled": "".join(str(p + 1) for p in self.scrambled),
        }


def draw_scramble(adversary: str, rng: RngStream) -> dict[int, object]:
    if adversary == "none":
        return {}
    if adversary == "scramble_one":
        return {rng.integers(3): haar_random_unitary(rng)}
    if adversary == "scramble_all":
        return {p: haar_random_unitary(rng) for p in range(3)}
    raise ValueError(f"unknown adversary {adversary!r}; choose from {ADVERSARIES}")


def _record(questions, answers, strategy, adversary, rng, scramble, trial) -> TrialRecord:
    answers = tuple(int(a) for a in answers)
    return TrialRecord(
        questions=questions,
        answers=answers,
        win=wins(questions, answers),
        strategy=strategy,
        adversary=adversary,
        seed=rng.seed,
        trial=trial,
        scrambled=tuple(sorted(scramble)),
        unitaries=tuple(scramble[p].entries.tolist() for p in sorted(scramble)),
    )


def play_classical(
    questions: str, rng: RngStream, adversary: str = "none", strategy: ClassicalStrategy = SIMPLE_CLASSICAL, trial: int = 0
) -> TrialRecord:
    # no quantum resource to disorient; the draw keeps rng consumption uniform across strategies
    scramble = draw_scramble(adversary, rng)
    return _record(questions, strategy.play(questions), "classical-best", adversary, rng, scramble, trial)


def play_ghz(questions: str, rng: RngStream, adversary: str = "none", trial: int = 0) -> TrialRecord:
    """Each player measures Z or X on one qubit of the shared three-qubit state."""
    if not is_legal(questions):
        raise ValueError(f"illegal question set {questions!r}")
    s = state("GHZ")
    scramble = draw_scramble(adversary, rng)
    for player, u in scramble.items():
        s = apply_local(s, u, player + 1)
    answers = []
    for player, q in enumerate(questions):
        k0, k1 = basis_pairs()[q.lower()].vectors()
        bit, s = measure_qubit(s, k0, k1, player + 1, rng)
        answers.append(bit)
    return _record(questions, answers, "ghz", adversary, rng, scramble, trial)


def play_frame_free(
    questions: str,
    rng: RngStream,
    adversary: str = "none",
    trial: int = 0,
    transcripts: list | None = None,
) -> TrialRecord:
    """Each player reads logical Z or X off a four-qubit block of the 12-qubit state.

    If ``transcripts`` is a list, the per-block readout outcomes are appended to it.
    """
    if not is_legal(questions):
        raise ValueError(f"illegal question set {questions!r}")
    s = state("Psi12")
    scramble = draw_scramble(adversary, rng)
    for player, u in scramble.items():
        s = apply_block(s, u, BLOCKS[player])
    answers = []
    for player, q in enumerate(questions):
        # earlier players' blocks are already measured out of the state
        outcome, s = measure_logical(s, BLOCKS[0], q, rng, discard=True)
        answers.append(outcome.answer)
        if transcripts is not None:
            relabel = dict(zip(BLOCKS[0], BLOCKS[player]))
            entries = tuple((relabel[qb], basis, bit) for qb, basis, bit in outcome.transcript)
            transcripts.append((player + 1, LogicalOutcome(outcome.answer, entries)))
    return _record(questions, answers, "frame-free", adversary, rng, scramble, trial)


PLAYERS: dict[str, Callable[..., TrialRecord]] = {
    "classical-best": play_classical,
    "ghz": play_ghz,
    "frame-free": play_frame_free,
}


def run_trials(
    strategy: str, adversary: str, n_trials: int, seed: int, transcripts: list | None = None
) -> list[TrialRecord]:
    """Trial ``i`` uses the child stream ``i`` of ``seed``, so results do not depend on execution order.

    For the frame-free strategy, ``transcripts`` collects ``(trial, block, LogicalOutcome)`` triples.
    """
    if strategy not in PLAYERS:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")
    master = RngStream(seed)
    play = PLAYERS[strategy]
    records = []
    for i in range(n_trials):
        rng = master.child(i)
        if transcripts is not None and strategy == "frame-free":
            log: list = []
            records.append(play_frame_free(referee_draw(rng), rng, adversary, trial=i, transcripts=log))
            transcripts.extend((i, block, outcome) for block, outcome in log)
        else:
            records.append(play(referee_draw(rng), rng, adversary, trial=i))
    return records


def summarize(records: list[TrialRecord], strategy: str, adversary: str, seed: int) -> dict:
    wins_ = sum(r.win for r in records)
    n = len(records)
    return {
        "strategy": strategy,
        "adversary": adversary,
        "n_trials": n,
        "wins": wins_,
        "win_rate": wins_ / n if n else 0.0,
        "seed": seed,
        "rng": RngStream.algorithm,
    }


# Parity constraints on predefined values (Z1, Z2, Z3, X1, X2, X3), one per legal question set.
CONSTRAINTS = LEGAL_QUESTIONS


@dataclass(frozen=True)
class HiddenVariableReport:
    satisfying: int
    total: int
    constraints: tuple[str, ...]
    # matrix[i][j]: assignment i satisfies constraint j
    matrix: tuple[tuple[bool, ...], ...] = field(repr=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["matrix"] = [[int(v) for v in row] for row in self.matrix]
        return d


def _assignment_answers(assignment: tuple[int, ...], questions: str) -> tuple[int, int, int]:
    z, x = assignment[:3], assignment[3:]
    return tuple(z[i] if q == "Z" else x[i] for i, q in enumerate(questions))


def hidden_variable_check(drop: int | None = None) -> HiddenVariableReport:
    """Count 0/1 assignments to the six logical observables meeting every parity constraint.

    ``drop`` is a 1-based constraint index to leave out.
    """
    active = tuple(c for i, c in enumerate(CONSTRAINTS, start=1) if i != drop)
    if drop is not None and not 1 <= drop <= len(CONSTRAINTS):
        raise ValueError(f"constraint index {drop} out of range 1..{len(CONSTRAINTS)}")
    matrix = []
    count = 0
    for assignment in itertools.product((0, 1), repeat=6):
        row = tuple(wins(q, _assignment_answers(assignment, q)) for q in CONSTRAINTS)
        matrix.append(row)
        if all(ok for q, ok in zip(CONSTRAINTS, row) if q in active):
            count += 1
    return HiddenVariableReport(count, len(matrix), active, tuple(matrix))


def question_counts(records: list[TrialRecord]) -> dict[str, int]:
    counts = dict.fromkeys(LEGAL_QUESTIONS, 0)
    for r in records:
        counts[r.questions] += 1
    return counts
