import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from resosplit.fixtures import cubic_k4
from resosplit.flows import (
    NonFiniteStateError,
    evolve,
    free_flow,
    iterate,
    lie_step,
    potential_flow,
    rk4_reference,
    strang_step,
)
from resosplit.models import Cubic, Linear, ResonantStep
from resosplit.norms import kinetic_TK, l2_norm
from resosplit.spectral import (
    FourierSeries,
    PhysicalState,
    SpectralState,
    forward_dft,
    inverse_dft,
    make_grid,
    sample_function,
)

from strategies import states

times = st.floats(min_value=-10, max_value=10, allow_nan=False)


def test_free_flow_zero_time_and_dc():
    g = make_grid(8)
    U = SpectralState(g, np.arange(8) + 1j)
    np.testing.assert_array_equal(free_flow(U, 0.0).coeffs, U.coeffs)
    dc = SpectralState.from_modes(g, {0: 2.0})
    np.testing.assert_allclose(free_flow(dc, 1.234).coeffs, dc.coeffs)


def test_free_flow_phase_sign():
    g = make_grid(8)
    out = free_flow(SpectralState.from_modes(g, {3: 1.0}), 0.1)
    assert out[3] == pytest.approx(np.exp(-0.9j))


def test_free_flow_resonant_mode_unchanged():
    g = make_grid(4)
    U = SpectralState.from_modes(g, {-2: 0.5})
    np.testing.assert_allclose(free_flow(U, ResonantStep(1, 2)).coeffs, U.coeffs, atol=0)


def test_potential_flow_examples():
    g = make_grid(4)
    U = PhysicalState(g, [1.5, 0.5, 1.5, 0.5])
    out = potential_flow(U, np.pi, Cubic(1))
    expected = np.array([1.5 * np.exp(-2.25j * np.pi), 0.5 * np.exp(-0.25j * np.pi)] * 2)
    np.testing.assert_allclose(out.values, expected, atol=1e-15)
    np.testing.assert_array_equal(potential_flow(U, 0.0, Cubic(1)).values, U.values)
    V = Linear(PhysicalState(g, np.full(4, 2.0)))
    np.testing.assert_allclose(potential_flow(U, 0.3, V).values, np.exp(-0.6j) * U.values)


@given(states(), times)
def test_potential_flow_preserves_moduli(U, t):
    # |exp(i theta)| is 1 only to within an ulp, and the complex product rounds again
    out = potential_flow(U, t, Cubic(-1))
    np.testing.assert_array_max_ulp(np.abs(out.values), np.abs(U.values), maxulp=4)


@given(states(), times)
def test_free_flow_preserves_kinetic(U, t):
    U_hat = forward_dft(U)
    T0, T1 = kinetic_TK(U_hat), kinetic_TK(free_flow(U_hat, t))
    assert abs(T1 - T0) <= 1e-13 * max(T0, 1e-300)


@given(states(), times, times)
def test_free_flow_group(U, s, t):
    U_hat = forward_dft(U)
    lhs = free_flow(free_flow(U_hat, s), t).coeffs
    rhs = free_flow(U_hat, s + t).coeffs
    scale = max(1.0, float(np.max(np.abs(U_hat.coeffs))))
    # phases j^2 t with |j| <= 32 and |t| <= 20 lose about 1e-13 of absolute accuracy
    assert np.max(np.abs(lhs - rhs)) <= 1e-11 * scale


@given(states(), times, times)
def test_potential_flow_group(U, s, t):
    model = Cubic(1)
    lhs = potential_flow(potential_flow(U, s, model), t, model).values
    rhs = potential_flow(U, s + t, model).values
    scale = max(1.0, float(np.max(np.abs(U.values)))) ** 3
    assert np.max(np.abs(lhs - rhs)) <= 1e-11 * scale * (1 + abs(s) + abs(t))


@given(states(), st.floats(0.01, 5))
def test_lie_step_conserves_l2(U, tau):
    for model in (Cubic(1), Cubic(-1), Linear(PhysicalState(U.grid, np.cos(U.grid.points)))):
        l0, l1 = l2_norm(U), l2_norm(lie_step(U, tau, model))
        assert abs(l1 - l0) <= 1e-12 * max(l0, 1e-300)


def test_lie_step_zero_tau_and_zero_potential(rng):
    g = make_grid(16)
    U = PhysicalState(g, rng.standard_normal(16) + 1j * rng.standard_normal(16))
    np.testing.assert_allclose(lie_step(U, 0.0, Cubic(1)).values, U.values, atol=1e-14)
    free = Linear(PhysicalState(g, np.zeros(16)))
    expected = inverse_dft(free_flow(forward_dft(U), 0.4)).values
    np.testing.assert_allclose(lie_step(U, 0.4, free).values, expected, atol=1e-14)
    np.testing.assert_allclose(strang_step(U, 0.4, free).values, expected, atol=1e-14)
    np.testing.assert_allclose(strang_step(U, 0.0, Cubic(1)).values, U.values, atol=1e-14)


def test_lie_closed_form_k4():
    fx = cubic_k4()
    U = fx.U0
    for n in range(1, 51):
        U = lie_step(U, fx.step, fx.model)
        exact = fx.U0.values * np.exp(-1j * n * np.pi * np.abs(fx.U0.values) ** 2)
        assert np.max(np.abs(U.values - exact)) <= 1e-10


def _local_error(step, tau, model, U0):
    ref = rk4_reference(U0, tau, model, substeps=200)
    return float(np.max(np.abs(step(U0, tau, model).values - ref.values)))


@pytest.mark.parametrize("model", [Cubic(1), Cubic(-1)])
def test_splitting_orders(model):
    g = make_grid(16)
    U0 = sample_function(FourierSeries({0: 1.0, 1: 0.4, -1: 0.2j, 2: 0.1}), g)
    taus = [0.02, 0.01, 0.005]
    strang = [_local_error(strang_step, t, model, U0) for t in taus]
    lie = [_local_error(lie_step, t, model, U0) for t in taus]
    for a, b in zip(strang, strang[1:]):
        assert 7.0 <= a / b <= 9.0
    for a, b in zip(lie, lie[1:]):
        assert 3.5 <= a / b <= 4.5


def test_evolve_records_and_observers():
    fx = cubic_k4()
    traj = evolve(fx.U0, fx.step, 0, fx.model, lambda n, U: (n, l2_norm(U)))
    assert len(traj.records) == 1 and traj.records[0][0] == 0
    traj = evolve(fx.U0, fx.step, 5, fx.model, [lambda n, U: n, lambda n, U: l2_norm(U)])
    assert [r[0] for r in traj.records] == list(range(6))
    traj = evolve(fx.U0, fx.step, 3, fx.model)
    assert isinstance(traj.records[-1], PhysicalState) and traj.final is traj.records[-1]


def test_evolve_matches_iterate():
    fx = cubic_k4()
    states_ = list(iterate(fx.U0, fx.step, fx.model, 4))
    traj = evolve(fx.U0, fx.step, 4, fx.model)
    for a, b in zip(states_, traj.records):
        np.testing.assert_array_equal(a.values, b.values)


def test_evolve_rejects_negative_steps():
    fx = cubic_k4()
    with pytest.raises(ValueError):
        evolve(fx.U0, fx.step, -1, fx.model)


def test_evolve_aborts_on_non_finite():
    g = make_grid(4)
    U0 = PhysicalState(g, [1.0, 2.0, 1e200, 1.0])
    with pytest.raises(NonFiniteStateError) as info:
        evolve(U0, 0.1, 10, Cubic(1))
    assert info.value.step_index == 1
