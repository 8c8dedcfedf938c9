import itertools
import json
from fractions import Fraction
from math import sqrt

import numpy as np
import pytest

from framefree.core import RngStream, apply_all, fidelity, haar_random_unitary, tensor
from framefree.states import (
    DECOMPOSITIONS,
    NAMES,
    basis_pairs,
    constants,
    make_named,
    psi12_from_decomposition,
    rotate_block,
    state,
    verify_constants,
    verify_decompositions,
    verify_expansions,
    verify_psi12_invariance,
    verify_u4_invariance,
)

QUBITS = {"GHZ": 3, "GHZperp": 3, "Psi12": 12}


@pytest.mark.parametrize("name", NAMES)
def test_named_states_normalized(name):
    s = make_named(name)
    assert s.n_qubits == QUBITS.get(name, 4)
    assert abs(s.state.norm() - 1) < 1e-12


def test_unknown_name():
    with pytest.raises(KeyError):
        make_named("W")


@pytest.mark.parametrize("pair", [("phi0", "phi1"), ("psi0", "psi1"), ("eta0", "eta1"), ("GHZ", "GHZperp")])
def test_pairs_orthogonal(pair):
    assert fidelity(state(pair[0]), state(pair[1])) < 1e-24


def test_phi_amplitudes():
    assert state("phi0").amplitude("0101") == pytest.approx(0.5)
    assert state("phi1").amplitude("0011") == pytest.approx(1 / sqrt(3))
    assert state("phi1").amplitude("0101") == pytest.approx(-1 / (2 * sqrt(3)))


def test_logical_combinations_amplitudewise():
    h = 1 / sqrt(2)
    p0, p1 = state("phi0").amplitudes, state("phi1").amplitudes
    np.testing.assert_allclose(state("psi0").amplitudes, h * (p0 + p1), atol=1e-12)
    np.testing.assert_allclose(state("psi1").amplitudes, h * (p0 - p1), atol=1e-12)
    np.testing.assert_allclose(state("eta0").amplitudes, h * (p0 + 1j * p1), atol=1e-12)
    np.testing.assert_allclose(state("eta1").amplitudes, h * (p0 - 1j * p1), atol=1e-12)


def _exact_phi():
    """phi0 as rationals; phi1 as rationals times 1/sqrt(3)."""
    phi0 = {"0101": Fraction(1, 2), "0110": Fraction(-1, 2), "1001": Fraction(-1, 2), "1010": Fraction(1, 2)}
    phi1 = {"0011": Fraction(1), "0101": Fraction(-1, 2), "0110": Fraction(-1, 2),
            "1001": Fraction(-1, 2), "1010": Fraction(-1, 2), "1100": Fraction(1)}
    return phi0, phi1


def test_psi12_against_exact_rational_expansion():
    # every term of the phi-basis expansion has zero or two phi1 factors, so 1/sqrt(3)^2 = 1/3 is rational
    phi0, phi1 = _exact_phi()
    terms = [(1, "000"), (-1, "011"), (-1, "101"), (-1, "110")]
    exact: dict[str, Fraction] = {}
    for sign, which in terms:
        factors = [phi1 if w == "1" else phi0 for w in which]
        scale = Fraction(sign, 2) * Fraction(1, 3) ** (which.count("1") // 2)
        for (k1, v1), (k2, v2), (k3, v3) in itertools.product(*(f.items() for f in factors)):
            key = k1 + k2 + k3
            exact[key] = exact.get(key, Fraction(0)) + scale * v1 * v2 * v3
    support = {k for k, v in exact.items() if v != 0}
    psi = state("Psi12").amplitudes
    numeric_support = {format(i, "012b") for i in np.flatnonzero(np.abs(psi) > 1e-12)}
    assert numeric_support == support
    # the eta route is fixed only up to a global phase
    phase = psi[int(next(iter(support)), 2)] / float(exact[next(iter(support))])
    for key in support:
        assert psi[int(key, 2)] == pytest.approx(phase * float(exact[key]), abs=1e-12)
    assert sum(v * v for v in exact.values()) == 1


def test_psi12_two_routes_agree():
    assert fidelity(state("Psi12"), psi12_from_decomposition()) == pytest.approx(1, abs=1e-12)


def test_constants_radicals():
    k = constants()
    assert k.alpha == sqrt(3 + sqrt(6)) / (2 * sqrt(6))
    assert k.beta == sqrt(3 - sqrt(6)) / (2 * sqrt(6))
    assert k.alpha**2 == pytest.approx((3 + sqrt(6)) / 24, rel=1e-14)
    assert k.beta**2 == pytest.approx((3 - sqrt(6)) / 24, rel=1e-14)
    assert k.alpha**2 == pytest.approx(0.227062, abs=1e-6)
    assert k.beta**2 == pytest.approx(0.022938, abs=1e-6)
    assert all(c.passed for c in verify_constants())


def test_basis_pairs_orthonormal():
    for name, pair in basis_pairs().items():
        k0, k1 = pair.vectors()
        assert abs(np.vdot(k0, k1)) < 1e-12, name
        assert abs(np.linalg.norm(k0) - 1) < 1e-12 and abs(np.linalg.norm(k1) - 1) < 1e-12


def test_adaptive_bases_not_mutually_orthogonal():
    a0, a1 = basis_pairs()["a"].vectors()
    b0, _ = basis_pairs()["b"].vectors()
    assert abs(np.vdot(b0, a0)) > 0.1 and abs(np.vdot(b0, a1)) > 0.1


def test_all_eight_decompositions():
    checks = verify_decompositions()
    assert len(checks) == 8
    for c in checks:
        assert c.fidelity >= 1 - 1e-10, c.name
        assert c.passed


def test_flipped_sign_gives_quarter():
    # four orthonormal terms of weight 1/4; negating one leaves overlap (3 - 1)/4
    checks = {c.name: c for c in verify_decompositions(flip=("GHZ:zzz", 1))}
    assert checks["GHZ:zzz"].fidelity == pytest.approx(0.25, abs=1e-12)
    assert not checks["GHZ:zzz"].passed
    assert checks["Psi12:XXZ"].passed


@pytest.mark.parametrize("key", list(DECOMPOSITIONS))
def test_any_single_flip_is_detected(key):
    for i in range(4):
        c = next(c for c in verify_decompositions(flip=(key, i)) if c.name == key)
        assert c.fidelity == pytest.approx(0.25, abs=1e-10)


def test_alternative_expansions():
    checks = verify_expansions()
    assert {c.name for c in checks} >= {"phi0:zzxx", "phi1:zzxx", "psi0:sequential", "psi1:sequential", "Psi12:two-routes"}
    assert all(c.passed for c in checks), [c for c in checks if not c.passed]


@pytest.mark.parametrize("name", ["phi0", "phi1", "psi0", "psi1"])
def test_u4_invariance(name):
    report = verify_u4_invariance(name, 100, RngStream(17))
    assert report.passed and report.min_fidelity >= 1 - 1e-10


def test_u4_negative_control_recorded():
    rng = RngStream(7)
    u, v = haar_random_unitary(rng), haar_random_unitary(rng)
    s = state("phi0")
    f = fidelity(s, rotate_block(s, [u, u, u, v], (1, 2, 3, 4)))
    assert f == pytest.approx(0.5092600579600906, abs=1e-9)


def test_psi12_invariance():
    report = verify_psi12_invariance(50, RngStream(3))
    assert report.passed and report.min_fidelity >= 1 - 1e-9


def test_psi12_identity_rotation():
    s = state("Psi12")
    u = np.eye(2)
    rotated = s
    for block in ((1, 2, 3, 4), (5, 6, 7, 8), (9, 10, 11, 12)):
        rotated = apply_all(rotated, u, block)
    assert fidelity(s, rotated) == pytest.approx(1)


def test_psi12_malformed_rotation_recorded():
    u = haar_random_unitary(RngStream(7))
    s = state("Psi12")
    assert fidelity(s, apply_all(s, u, (1, 2, 3))) == pytest.approx(0.005700900393226667, abs=1e-9)


def test_ghz_is_not_rotation_invariant():
    u = haar_random_unitary(RngStream(1))
    s = state("GHZ")
    assert fidelity(s, apply_all(s, u, (1, 2, 3))) < 0.99


def test_reports_serialize():
    payload = [c.to_dict() for c in verify_decompositions()]
    payload.append(verify_u4_invariance("phi0", 3, RngStream(1)).to_dict())
    text = json.dumps(payload)
    assert '"fidelity"' in text and '"seed"' in text


def test_tensor_of_named_states():
    s = tensor(state("phi0"), state("GHZ"))
    assert s.n_qubits == 7
