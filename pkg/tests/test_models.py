from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from resosplit.models import Cubic, ExactTime, Linear, ResonantStep, step_fraction, step_value
from resosplit.spectral import PhysicalState, make_grid


def test_linear_accepts_tiny_imaginary_noise():
    V = Linear(PhysicalState(make_grid(4), np.ones(4) + 1e-15j))
    assert np.all(V.V.values.imag == 0)


def test_linear_rejects_complex_potential():
    with pytest.raises(ValueError, match="real"):
        Linear(PhysicalState(make_grid(4), np.ones(4) + 0.1j))


@pytest.mark.parametrize("sigma", [0, 2, -2])
def test_cubic_sigma(sigma):
    with pytest.raises(ValueError):
        Cubic(sigma)


def test_resonant_step_tau():
    assert ResonantStep(1, 2).tau == pytest.approx(np.pi)
    assert ResonantStep(3, 2, 2).tau == pytest.approx(2 * np.pi * 3 / 4)
    assert float(ResonantStep(1, 4)) == pytest.approx(np.pi / 2)


@pytest.mark.parametrize(
    "given_, expected",
    [
        ((2, 4, 1), (1, 2, 1)),
        ((2, 2, 2), (1, 2, 1)),
        ((3, 6, 2), (1, 12, 1)),
        ((4, 4, 2), (1, 2, 2)),
        ((5, 1, 2), (5, 1, 1)),
        ((3, 2, 2), (3, 2, 2)),
    ],
)
def test_resonant_step_canonical(given_, expected):
    s = ResonantStep(*given_)
    assert (s.p, s.q, s.power) == expected
    assert s.fraction == Fraction(given_[0], given_[1] ** given_[2])


@pytest.mark.parametrize("args", [(0, 2), (1, 0), (-1, 2), (1, 2, 3)])
def test_resonant_step_rejects(args):
    with pytest.raises(ValueError):
        ResonantStep(*args)


@given(st.integers(1, 60), st.integers(1, 60), st.sampled_from([1, 2]))
def test_canonical_form_keeps_the_step(p, q, power):
    s = ResonantStep(p, q, power)
    assert s.fraction == Fraction(p, q**power)
    assert np.gcd(s.p, s.q) == 1


def test_resonance_on_grid():
    assert ResonantStep(1, 2).is_resonant_on(make_grid(4))
    assert not ResonantStep(1, 4).is_resonant_on(make_grid(4))
    assert ResonantStep(1, 3).is_resonant_on(make_grid(6))
    assert not ResonantStep(1, 6).is_resonant_on(make_grid(6))
    assert ResonantStep(1, 3).is_resonant_on(make_grid(12))


def test_exact_time():
    t = ResonantStep(1, 3).times(6)
    assert isinstance(t, ExactTime) and t.fraction == 2
    assert step_value(t) == pytest.approx(4 * np.pi)
    assert step_fraction(0.5) is None and step_fraction(t) == 2
