"""Acceptance gate: one test per criterion, at the stated trial counts and tolerances.

Run alone with ``pytest tests/test_acceptance.py``; a pass/fail line per
criterion is printed in the terminal summary.
"""
import itertools
import json
import subprocess
import sys
import time
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from framefree.core import RngStream, StateVector, apply_local, fidelity, probabilities
from framefree.games import classical_bound_bruteforce, hidden_variable_check, run_trials
from framefree.protocols import logical_observable, measure_logical_X, measure_logical_Z
from framefree.states import (
    basis_pairs,
    sequential_expansion,
    state,
    verify_decompositions,
    verify_psi12_invariance,
    verify_u4_invariance,
)
from framefree.tasks import (
    all_allotments,
    apples_classical_bound,
    rotated_ghz,
    run_apples,
    secret_share,
)

from . import conftest
from .conftest import within_sigma

SEED = 20031
BLOCK = (1, 2, 3, 4)
N_READOUT = 100_000
N_GAME = 10_000
N_SHARE = 100_000
SUITE_BUDGET_S = 600


def criterion(number, title):
    return pytest.mark.criterion(number, title)


@criterion(1, "decomposition identities, fidelity >= 1 - 1e-10, < 1 s")
def test_decompositions(record_property):
    t0 = time.perf_counter()
    checks = verify_decompositions()
    elapsed = time.perf_counter() - t0
    worst = min(c.fidelity for c in checks)
    record_property("detail", f"{len(checks)} identities, min fidelity {worst:.15f}, {elapsed:.3f} s")
    assert len(checks) == 8
    assert worst >= 1 - 1e-10
    assert elapsed < 1


@criterion(2, "U x4 invariance of Psi12 (50 triples, 1e-9) and phi/psi (1e-10), < 5 s")
def test_invariance(record_property):
    master = RngStream(SEED)
    t0 = time.perf_counter()
    psi12 = verify_psi12_invariance(50, master.child(0))
    singles = [verify_u4_invariance(n, 50, master.child(i + 1)) for i, n in enumerate(("phi0", "phi1", "psi0", "psi1"))]
    elapsed = time.perf_counter() - t0
    worst = min(r.min_fidelity for r in singles)
    record_property("detail", f"Psi12 min {psi12.min_fidelity:.12f}, blocks min {worst:.14f}, {elapsed:.2f} s")
    assert psi12.min_fidelity >= 1 - 1e-9
    assert worst >= 1 - 1e-10
    assert elapsed < 5


@criterion(3, "three-player game classical bound = 3/4 exactly, < 1 s")
def test_classical_bound(record_property):
    t0 = time.perf_counter()
    best, maximizers = classical_bound_bruteforce()
    elapsed = time.perf_counter() - t0
    record_property("detail", f"bound {best}, {len(maximizers)} maximizers of 64, {elapsed:.3f} s")
    assert isinstance(best, Fraction) and best == Fraction(3, 4)
    assert elapsed < 1


@criterion(4, "GHZ strategy, 10^4 trials, no adversary: zero losses")
def test_ghz_strategy(record_property):
    recs = run_trials("ghz", "none", N_GAME, SEED)
    losses = sum(not r.win for r in recs)
    record_property("detail", f"{N_GAME - losses}/{N_GAME} won")
    assert losses == 0


@criterion(5, "frame-free strategy, 10^4 trials, scramble_all: zero losses")
def test_frame_free_strategy(record_property):
    recs = run_trials("frame-free", "scramble_all", N_GAME, SEED)
    losses = sum(not r.win for r in recs)
    record_property("detail", f"{N_GAME - losses}/{N_GAME} won")
    assert losses == 0


def _zzxx_probabilities(name: str) -> dict[tuple[int, ...], float]:
    h = basis_pairs()["x"]
    rotate = np.array([h.ket0.amplitudes.conj(), h.ket1.amplitudes.conj()])
    s = state(name)
    for q in (3, 4):
        s = apply_local(s, rotate, q)
    probs = np.abs(s.amplitudes) ** 2
    return {bits: probs[int("".join(map(str, bits)), 2)] for bits in itertools.product((0, 1), repeat=4)}


@criterion(6, "phi readout, 10^5 runs each: 4 transcripts at 1/4 and 12 at 1/12 within 3 sigma, no misclassification")
def test_phi_statistics(record_property):
    master = RngStream(SEED)
    details, ok = [], True
    for k, (name, n_cells) in enumerate((("phi0", 4), ("phi1", 12))):
        exact = _zzxx_probabilities(name)
        support = {b for b, p in exact.items() if p > 1e-12}
        assert len(support) == n_cells
        assert all(abs(exact[b] - 1 / n_cells) < 1e-12 for b in support)
        rng = master.child(k)
        counts, wrong = Counter(), 0
        for _ in range(N_READOUT):
            out, _ = measure_logical_Z(state(name), BLOCK, rng)
            counts[out.bits()] += 1
            wrong += out.answer != k
        outside = sum(c for b, c in counts.items() if b not in support)
        worst = max(abs(counts[b] - N_READOUT / n_cells) / np.sqrt(N_READOUT * (1 / n_cells) * (1 - 1 / n_cells)) for b in support)
        ok &= wrong == 0 and outside == 0 and all(within_sigma(counts[b], N_READOUT, 1 / n_cells) for b in support)
        details.append(f"{name}: {wrong} wrong, worst {worst:.2f} sigma")
    record_property("detail", "; ".join(details))
    assert ok


def _expansion_probabilities(name: str) -> dict[str, float]:
    return {labels: abs(coef) ** 2 for coef, labels in sequential_expansion(name)}


@criterion(7, "adaptive X readout, 10^5 runs each: no misclassification, branch weights within 3 sigma, oracle chi-square p > 0.001")
def test_psi_statistics(record_property):
    master = RngStream(SEED)
    details, ok = [], True
    for k, name in enumerate(("psi0", "psi1")):
        expected = _expansion_probabilities(name)
        assert sum(expected.values()) == pytest.approx(1, abs=1e-12)
        rng = master.child(k)
        counts, wrong = Counter(), 0
        for _ in range(N_READOUT):
            out, _ = measure_logical_X(state(name), BLOCK, rng)
            counts[",".join(f"{b}{bit}" for _, b, bit in out.transcript)] += 1
            wrong += out.answer != k
        outside = sum(c for t, c in counts.items() if t not in expected)
        ok &= wrong == 0 and outside == 0
        ok &= all(within_sigma(counts[t], N_READOUT, p) for t, p in expected.items())
        heavy = sorted({round(p, 6) for p in expected.values()})
        details.append(f"{name}: {wrong} wrong, weights {heavy}")
    # collective projector on a generic logical state vs the sampled adaptive readout
    g = np.random.default_rng(SEED)
    c = g.standard_normal(2) + 1j * g.standard_normal(2)
    generic = StateVector.from_amplitudes(c[0] * state("psi0").amplitudes + c[1] * state("psi1").amplitudes, normalize=True)
    probs = probabilities(generic, logical_observable("X", BLOCK))
    rng = master.child(2)
    ones = sum(measure_logical_X(generic, BLOCK, rng)[0].answer for _ in range(N_READOUT))
    p_value = stats.chisquare([N_READOUT - ones, ones], [N_READOUT * probs[0], N_READOUT * probs[1]]).pvalue
    ok &= p_value > 0.001
    details.append(f"oracle chi-square p = {p_value:.3f}")
    record_property("detail", "; ".join(details))
    assert ok


@criterion(8, "hidden variables: 0 of 64 satisfy all four constraints; dropping any one yields 16")
def test_hidden_variables(record_property):
    full = hidden_variable_check()
    dropped = [hidden_variable_check(drop=i).satisfying for i in range(1, 5)]
    record_property("detail", f"all four: {full.satisfying}/{full.total}; drop one: {dropped}, stated target 16 each")
    assert full.satisfying == 0 and full.total == 64
    assert dropped == [16, 16, 16, 16]


@criterion(9, "apples: rotated GHZ identity over 32 allotments, quantum 100%, classical 3/4, frame-free 100% under scramble_all")
def test_apples(record_property):
    allotments = all_allotments()
    worst = min(
        fidelity(rotated_ghz(a), state("GHZ") if a.parity == 0 else state("GHZperp")) for a in allotments
    )
    quantum = run_apples("apples", 100, SEED)
    frame_free = run_apples("apples-frame-free", 100, SEED, "scramble_all")
    bound = apples_classical_bound()
    record_property(
        "detail",
        f"{len(allotments)} allotments, min fidelity {worst:.15f}; quantum {quantum['correct']}/{quantum['n_trials']}; "
        f"bound {bound}; frame-free {frame_free['correct']}/{frame_free['n_trials']}",
    )
    assert len(allotments) == 32 and abs(1 - worst) <= 1e-12
    assert quantum["success_rate"] == 1.0
    assert bound == Fraction(3, 4)
    assert frame_free["success_rate"] == 1.0


@criterion(10, "secret sharing: QBER 0 and full reconstruction, sift 1/2 within 3 sigma, intercept-resend QBER > 0.05 (10^5 rounds)")
def test_secret_sharing(record_property):
    honest = secret_share(N_SHARE, SEED)
    attacked = secret_share(N_SHARE, SEED, eavesdropper="intercept_resend")
    kept = len(honest.kept)
    record_property(
        "detail",
        f"honest QBER {honest.qber}, reconstruction {honest.reconstruction_rate}, sift {honest.sift_rate:.4f}; "
        f"intercept-resend QBER {attacked.qber:.4f} on {len(attacked.sample)} sampled bits",
    )
    assert honest.qber == 0.0 and honest.reconstruction_rate == 1.0
    assert within_sigma(kept, N_SHARE, 0.5)
    assert attacked.qber > 0.05


@criterion(11, "full suite within 10 minutes; seeded runs reproducible")
def test_runtime_and_reproducibility(record_property):
    commands = [
        ["verify", "--trials", "3"],
        ["play", "--trials", "200", "--adversary", "scramble_all"],
        ["play", "--strategy", "ghz", "--adversary", "scramble_one", "--trials", "200"],
        ["tasks", "--task", "secret-share", "--trials", "500", "--eavesdropper", "intercept_resend"],
        ["tasks", "--task", "apples-frame-free", "--trials", "2", "--adversary", "scramble_all"],
    ]
    same = 0
    for argv in commands:
        outputs = [
            subprocess.run([sys.executable, "-m", "framefree", *argv, "--seed", str(SEED)],
                           capture_output=True, check=True).stdout
            for _ in range(2)
        ]
        json.loads(outputs[0])
        same += outputs[0] == outputs[1]
    elapsed = time.perf_counter() - conftest.SESSION_START
    record_property("detail", f"{same}/{len(commands)} commands byte-identical; session so far {elapsed:.0f} s")
    assert same == len(commands)
    assert elapsed <= SUITE_BUDGET_S
