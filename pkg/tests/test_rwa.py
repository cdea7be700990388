import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cavityqed.algebra import SIGMA_1, AlgebraKind, unitarity_defect
from cavityqed.model import ModelParams, dressed_frame
from cavityqed.rwa import (
    Family,
    PulseTarget,
    ResonanceSpec,
    coupled_positions,
    rabi_frequency,
    rabi_frequency_adjoint,
    rabi_solution,
    rabi_value,
    resonance_condition_value,
    rwa_propagator,
    scan_window,
    solve_resonance,
    synthesize_gate,
)
from cavityqed.specfun import bessel_j

N = AlgebraKind.heisenberg()
BASE = ModelParams(N, g1=0.25, g2=0.4, delta=0.05, dim=32)
# smallest root above the scan floor from an independent scan + bisection
# using scipy.special.jv and the closed-form diagonal element
ONE_QUBIT_ROOT = 0.0011500696858653824
TWO_FAMILIES = [Family.TWO1, Family.TWO2, Family.TWO3, Family.TWO4]


@pytest.fixture(scope="module")
def frame():
    return dressed_frame(BASE)


def test_one_qubit_root_oracle(frame):
    roots = solve_resonance(Family.ONE_QUBIT, BASE, frame, 1, None, 0)
    assert roots
    assert roots[0].omega_E == pytest.approx(ONE_QUBIT_ROOT, rel=1e-12)
    assert all(r.residual <= 1e-10 for r in roots)
    assert [r.omega_E for r in roots] == sorted(r.omega_E for r in roots)


def test_scan_floor_tracks_bessel_range():
    lo, hi = scan_window(BASE, None)
    assert lo == pytest.approx(0.8 / 700)
    assert hi == 10.0
    lo, _ = scan_window(BASE.replace(g2=0.01), None)
    assert lo == pytest.approx(1e-3)


def test_no_splitting_means_no_one_qubit_root(frame):
    p = BASE.replace(delta=0.0)
    assert resonance_condition_value(Family.ONE_QUBIT, p, frame, 3, None, 0, 0.7) == pytest.approx(2.1)
    assert solve_resonance(Family.ONE_QUBIT, p, frame, 1, None, 0) == []


@pytest.mark.parametrize("alpha", [1, 2, 3])
def test_linear_two_qubit_case(frame, alpha):
    p = BASE.replace(delta=0.0)
    roots = solve_resonance(Family.TWO1, p, frame, alpha, 0, 2)
    assert len(roots) == 1
    assert roots[0].omega_E == pytest.approx(2.0 / alpha, rel=1e-12)


def test_grid_doubling_keeps_roots(frame):
    window = (1.15e-3, 1.25e-3)
    a = solve_resonance(Family.ONE_QUBIT, BASE, frame, 1, None, 0, window=window)
    b = solve_resonance(Family.ONE_QUBIT, BASE, frame, 1, None, 0, window=window, grid_points=20_000)
    assert len(a) == len(b) > 0
    assert np.allclose([r.omega_E for r in a], [r.omega_E for r in b], rtol=1e-12)


@pytest.mark.parametrize("family", list(Family))
def test_mirrored_condition(frame, family):
    m = 0 if family.is_two_qubit else None
    for w in (0.05, 0.6, 2.4):
        direct = resonance_condition_value(family, BASE, frame, 2, m, 1, w)
        mirror = resonance_condition_value(family, BASE, frame, 2, m, 1, w, mirrored=True)
        assert abs(direct + mirror) <= 1e-15


def test_condition_argument_errors(frame):
    with pytest.raises(ValueError):
        resonance_condition_value(Family.ONE_QUBIT, BASE, frame, 1, None, 0, 0.0)
    with pytest.raises(ValueError):
        resonance_condition_value(Family.ONE_QUBIT, BASE, frame, 0, None, 0, 1.0)
    with pytest.raises(ValueError):
        resonance_condition_value(Family.TWO1, BASE, frame, 1, 2, 1, 1.0)
    with pytest.raises(ValueError):
        resonance_condition_value(Family.TWO1, BASE, frame, 1, None, 1, 1.0)


def test_even_alpha_one_qubit(frame):
    # a weaker drive keeps the even-alpha roots above the scan floor
    p = BASE.replace(g2=0.05)
    roots = solve_resonance(Family.ONE_QUBIT, p, frame, 2, None, 0)
    assert roots
    assert all(rabi_frequency(p, frame, s) == 0 for s in roots)


def test_one_qubit_oscillator_ground_rabi(frame):
    s = solve_resonance(Family.ONE_QUBIT, BASE, frame, 1, None, 0)[0]
    p = BASE.replace(omega_E=s.omega_E)
    expected = BASE.delta * math.exp(-0.125) * bessel_j(1, p.gamma)
    assert rabi_frequency(BASE, frame, s) == pytest.approx(expected, rel=1e-8)


def test_unsolved_spec_is_refused(frame):
    bad = ResonanceSpec(Family.ONE_QUBIT, 1, 0, 0.5, 1e-3)
    with pytest.raises(ValueError, match="not solved"):
        rabi_frequency(BASE, frame, bad)


@given(
    st.integers(min_value=-6, max_value=6),
    st.integers(min_value=0, max_value=5),
    st.integers(min_value=1, max_value=4),
    st.floats(min_value=0.05, max_value=3.0),
)
def test_type1_plus_type3_identity(alpha, m, dn, w):
    frame = dressed_frame(BASE)
    p = BASE.replace(omega_E=w)
    n = m + dn
    r1 = rabi_value(Family.TWO1, p, frame, alpha, m, n)
    r3 = rabi_value(Family.TWO3, p, frame, alpha, m, n)
    expected = p.delta * bessel_j(alpha, p.gamma) * frame.table.entry(m, n)
    assert abs(r1 + r3 - expected) <= 1e-14


@pytest.mark.parametrize(
    "kind,dim,g1", [(N, 32, 0.25), (AlgebraKind.su11(0.5), 64, 0.2), (AlgebraKind.su2(3), None, 0.6)]
)
@pytest.mark.parametrize("family", list(Family))
def test_adjoint_route_agrees(kind, dim, g1, family):
    p = ModelParams(kind, g1=g1, g2=0.4, delta=0.05, dim=dim)
    frame = dressed_frame(p)
    m = 0 if family.is_two_qubit else None
    n = 2 if family.is_two_qubit else 1
    for alpha in (-3, -2, 1, 2, 5):
        for w in (0.3, 1.7):
            spec = ResonanceSpec(family, alpha, n, w, 0.0, m)
            direct = rabi_frequency(p, frame, spec)
            adj = rabi_frequency_adjoint(p, frame, spec)
            assert abs(direct.conjugate() - adj) <= 1e-12


@given(
    st.sampled_from(list(Family)),
    st.complex_numbers(max_magnitude=5.0, allow_nan=False, allow_infinity=False),
    st.floats(min_value=-50, max_value=50),
    st.floats(min_value=-50, max_value=50),
)
def test_propagator_group_and_unitarity(family, r, t1, t2):
    u1, u2 = rwa_propagator(family, r, t1), rwa_propagator(family, r, t2)
    assert unitarity_defect(u1) <= 1e-12
    assert np.max(np.abs(u1 @ u2 - rwa_propagator(family, r, t1 + t2))) <= 1e-12
    assert np.array_equal(rwa_propagator(family, r, 0.0), np.eye(u1.shape[0]))


def test_zero_rabi_gives_identity():
    for family in Family:
        u = rwa_propagator(family, 0.0, 3.0)
        assert np.array_equal(u, np.eye(u.shape[0]))


def test_one_qubit_exchange_symmetry():
    u = rwa_propagator(Family.ONE_QUBIT, 0.7, 2.3)
    assert np.allclose(SIGMA_1 @ u @ SIGMA_1, u)
    r = 0.4 - 0.3j
    swapped = SIGMA_1 @ rwa_propagator(Family.ONE_QUBIT, r, 2.3) @ SIGMA_1
    assert np.allclose(swapped, rwa_propagator(Family.ONE_QUBIT, r.conjugate(), 2.3))


@pytest.mark.parametrize(
    "family,pair,sign",
    [(Family.TWO1, (0, 2), -1), (Family.TWO2, (1, 3), 1), (Family.TWO3, (0, 3), 1), (Family.TWO4, (1, 2), -1)],
)
def test_two_qubit_block_structure(family, pair, sign):
    r = 0.3 * np.exp(0.4j)
    t = math.pi / abs(r)
    u = rwa_propagator(family, r, t)
    i, k = pair
    assert coupled_positions(family) == pair
    assert u[i, k] == pytest.approx(sign * 1j * r / abs(r))
    assert u[k, i] == pytest.approx(sign * 1j * np.conj(r) / abs(r))
    assert abs(u[i, i]) < 1e-15 and abs(u[k, k]) < 1e-15
    rest = [j for j in range(4) if j not in pair]
    assert np.allclose(u[np.ix_(rest, rest)], np.eye(2))


def test_pulse_synthesis_one_qubit():
    spec = ResonanceSpec(Family.ONE_QUBIT, 1, 0, 1.0, 0.0)
    from cavityqed.rwa import RabiSolution

    pi = RabiSolution(0.25 + 0j, spec, PulseTarget.PI)
    assert pi.duration == pytest.approx(4 * math.pi)
    assert np.allclose(pi.gate, 1j * SIGMA_1)
    half = RabiSolution(0.25 + 0j, spec, PulseTarget.HALF)
    assert np.allclose(half.gate, np.array([[1, 1j], [1j, 1]]) / math.sqrt(2))


def test_synthesized_two3_gate_exchanges_pair():
    p = ModelParams(N, g1=0.5, g2=0.4, delta=0.02, dim=32)
    fr = dressed_frame(p)
    spec = solve_resonance(Family.TWO3, p, fr, 2, 0, 1)[0]
    sol = synthesize_gate(p, fr, spec)
    assert sol.subspace == ((0, 1), (1, -1))
    g = sol.gate
    e0 = np.array([1, 0, 0, 0])
    assert abs(g @ e0)[3] == pytest.approx(1.0)
    assert "Two3" in sol.describe()


def test_zero_rabi_gate_is_refused():
    p = ModelParams(N, g1=0.5, g2=0.4, delta=0.02, dim=32)
    fr = dressed_frame(p)
    spec = solve_resonance(Family.TWO3, p, fr, 1, 0, 1)[0]
    assert rabi_solution(p, fr, spec).r == 0
    assert math.isinf(rabi_solution(p, fr, spec).pi_pulse_time)
    with pytest.raises(ValueError, match="zero Rabi"):
        synthesize_gate(p, fr, spec)
