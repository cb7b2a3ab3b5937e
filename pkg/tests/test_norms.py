import numpy as np
import pytest
from hypothesis import given

from resosplit.flows import rk4_reference
from resosplit.models import Cubic, Linear
from resosplit.norms import (
    EQUIV_LOWER,
    EQUIV_UPPER,
    energy_HK,
    forward_difference,
    gn_bound,
    gn_ratio,
    gn_sharp_ratio,
    h1_seminorm,
    h1_seminorm_spectral_sq,
    h1_seminorm_sq,
    kinetic_TK,
    l2_norm,
    l2_norm_sq,
    laplacian_quadratic_form,
    linf_norm,
    norm_report,
    potential_energy,
    quartic_term,
)
from resosplit.spectral import (
    FourierSeries,
    PhysicalState,
    SpectralState,
    forward_dft,
    make_grid,
    plane_wave,
    sample_function,
)

from strategies import grid_sizes, nonzero_states, states

K4 = make_grid(4)
PAIR = PhysicalState(K4, [1.5, 0.5, 1.5, 0.5])
WAVE = sample_function(plane_wave(1), K4)


def test_l2_examples():
    assert l2_norm(PhysicalState(K4, np.zeros(4))) == 0
    for K in (4, 8, 64):
        assert l2_norm(PhysicalState(make_grid(K), np.ones(K))) == pytest.approx(np.sqrt(2 * np.pi))
    assert l2_norm(PAIR) == pytest.approx(np.sqrt(5 * np.pi / 2))
    assert l2_norm_sq(PAIR) == pytest.approx(5 * np.pi / 2)


def test_h1_examples():
    assert h1_seminorm(PhysicalState(make_grid(8), np.full(8, 3 + 1j))) == 0
    assert h1_seminorm(WAVE) == pytest.approx(4 / np.sqrt(np.pi))


def test_forward_difference_wraps():
    d = forward_difference(np.array([0.0, 1.0, 3.0, 6.0]), 1.0)
    np.testing.assert_allclose(d, [1, 2, 3, -6])


def test_kinetic_examples():
    g = make_grid(8)
    assert kinetic_TK(SpectralState.from_modes(g, {1: 1})) == 1
    assert kinetic_TK(SpectralState.from_modes(g, {0: 1})) == 0
    assert kinetic_TK(SpectralState.from_modes(K4, {-2: 0.5})) == pytest.approx(1)


def test_linf_examples():
    assert linf_norm(PAIR) == 1.5
    assert linf_norm(PhysicalState(K4, np.zeros(4))) == 0
    assert linf_norm(WAVE) == pytest.approx(1)


def test_quartic_examples():
    assert quartic_term(PhysicalState(make_grid(16), np.ones(16))) == pytest.approx(2 * np.pi)
    assert quartic_term(PhysicalState(K4, np.zeros(4))) == 0
    assert quartic_term(PAIR) == pytest.approx(np.pi / 2 * 10.25)


def test_energy_examples():
    assert energy_HK(WAVE, Linear(PhysicalState(K4, np.zeros(4)))) == pytest.approx(np.pi)
    assert energy_HK(PhysicalState(K4, np.zeros(4)), Cubic(1)) == 0
    const = PhysicalState(make_grid(8), np.full(8, 2.0))
    for sigma in (1, -1):
        assert energy_HK(const, Cubic(sigma)) == pytest.approx(potential_energy(const, Cubic(sigma)))
        assert potential_energy(const, Cubic(sigma)) == pytest.approx(sigma * 0.25 * quartic_term(const))


def test_gn_ratio_examples():
    assert gn_ratio(PhysicalState(make_grid(8), np.full(8, 1 - 2j))) is None
    expected = 2 * np.pi / ((4 / np.sqrt(np.pi)) * (2 * np.pi) ** 1.5)
    assert gn_ratio(WAVE) == pytest.approx(expected)


def test_gn_seminorm_ratio_unbounded_near_constants():
    g = make_grid(16)
    ratios = [gn_ratio(PhysicalState(g, 1 + eps * np.exp(1j * g.points))) for eps in (1e-1, 1e-3, 1e-5)]
    assert ratios[0] < ratios[1] < ratios[2] and ratios[2] > 1e3


def test_gn_sharp_ratio_is_one_at_constants():
    assert gn_sharp_ratio(PhysicalState(make_grid(8), np.full(8, 0.7))) == pytest.approx(1)
    assert gn_sharp_ratio(PhysicalState(K4, np.zeros(4))) is None


@given(nonzero_states())
def test_gn_bound_holds(U):
    assert quartic_term(U) <= gn_bound(U) * (1 + 1e-12)


@given(states())
def test_h1_spectral_identity(U):
    lhs, rhs = h1_seminorm_sq(U), h1_seminorm_spectral_sq(forward_dft(U))
    assert abs(lhs - rhs) <= 1e-10 * max(lhs, 1e-12)


@given(states())
def test_parseval(U):
    lhs = l2_norm_sq(U)
    rhs = 2 * np.pi * np.sum(np.abs(forward_dft(U).coeffs) ** 2)
    assert abs(lhs - rhs) <= 1e-12 * max(lhs, 1e-300)


@given(nonzero_states(sizes=grid_sizes))
def test_norm_equivalence(U):
    T, h2 = kinetic_TK(forward_dft(U)), h1_seminorm_sq(U)
    assert EQUIV_LOWER * h2 <= T * (1 + 1e-12) + 1e-300
    assert T <= EQUIV_UPPER * h2 * (1 + 1e-12) + 1e-300


@pytest.mark.parametrize("K", [4, 8, 64, 512])
def test_equivalence_witnesses(K):
    g = make_grid(K)
    nyquist = sample_function(plane_wave(-K // 2), g)
    assert kinetic_TK(forward_dft(nyquist)) == pytest.approx(EQUIV_UPPER * h1_seminorm_sq(nyquist), rel=1e-12)
    low = sample_function(plane_wave(1), g)
    ratio = kinetic_TK(forward_dft(low)) / h1_seminorm_sq(low)
    assert ratio == pytest.approx(EQUIV_LOWER / np.sinc(1 / K) ** 2, rel=1e-12)


@given(states())
def test_inverse_inequality(U):
    assert h1_seminorm(U) <= 2 / U.grid.delta_x * l2_norm(U) * (1 + 1e-12) + 1e-300


@pytest.mark.parametrize("K", [4, 8, 16])
def test_kinetic_matches_laplacian_form(K, rng):
    U = PhysicalState(make_grid(K), rng.standard_normal(K) + 1j * rng.standard_normal(K))
    form = laplacian_quadratic_form(U)
    assert abs(form.imag) <= 1e-12 * abs(form)
    assert np.pi * kinetic_TK(forward_dft(U)) == pytest.approx(np.pi / K * form.real, rel=1e-12)


@given(states(), states(real=True))
def test_energy_is_real_and_finite(U, V):
    if V.grid != U.grid:
        V = PhysicalState(U.grid, np.resize(V.values.real, U.grid.K))
    for model in (Linear(V), Cubic(1), Cubic(-1)):
        assert np.isfinite(energy_HK(U, model))


@pytest.mark.parametrize("sigma", [1, -1])
def test_cubic_energy_conserved_by_semidiscrete_flow(sigma):
    # The quartic factor 1/4 is the one conserved by i U' = Delta^K U + sigma |U|^2 U.
    g = make_grid(16)
    U0 = sample_function(FourierSeries({0: 1.0, 1: 0.3, -2: 0.2j}), g)
    U1 = rk4_reference(U0, 0.05, Cubic(sigma), substeps=400)
    H0, H1 = energy_HK(U0, Cubic(sigma)), energy_HK(U1, Cubic(sigma))
    assert abs(H1 - H0) <= 1e-10 * abs(H0)
    alt = lambda U: np.pi * kinetic_TK(forward_dft(U)) + sigma * quartic_term(U)
    assert abs(alt(U1) - alt(U0)) > 1e-6 * abs(alt(U0))


def test_norm_report_fields():
    r = norm_report(PAIR, Cubic(1))
    assert r.l2 == pytest.approx(l2_norm(PAIR)) and r.linf == 1.5
    assert r.energy_HK == pytest.approx(energy_HK(PAIR, Cubic(1)))
