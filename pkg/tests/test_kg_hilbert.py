from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from conftest import rel
from kgqm.errors import DimensionError
from kgqm.grid import Field, GridSpec, apply_D_power, gaussian, inner_l2, plane_wave, random_field, to_momentum
from kgqm.kg_hilbert import (
    KGState,
    apply_h,
    evaluate_at,
    frequency_split,
    from_two_component,
    inner_physical,
    inner_physical_at,
    negative_frequency,
    norm_physical,
    positive_frequency,
    random_kg_state,
    time_translate,
    to_two_component,
    velocity_at,
)
from kgqm.two_component import apply_H, inner_eta


def charged(spec, rng, sign):
    f = random_field(spec, rng)
    return positive_frequency(f) if sign > 0 else negative_frequency(f)


class TestEvaluate:
    def test_at_t0(self, rng):
        spec = GridSpec(n=32, t0=1.25)
        s = random_kg_state(spec, rng)
        assert rel(evaluate_at(s, spec.t0), s.phi) == 0
        assert rel(velocity_at(s, spec.t0), s.phidot) == 0

    @pytest.mark.parametrize("mode", [0, 3, -7])
    def test_positive_frequency_mode(self, spec, mode):
        phi = plane_wave(spec, mode)
        w = np.sqrt((2 * np.pi * mode / spec.box_len) ** 2 + spec.mu**2)
        s = KGState(phi, -1j * w * phi)
        for t in (0.4, 3.3, -11.0):
            assert rel(evaluate_at(s, t), np.exp(-1j * w * t) * phi) < 1e-13

    def test_finite_difference_order(self, rng):
        spec = GridSpec(n=32, box_len=20.0)
        s = random_kg_state(spec, rng)
        t = 0.9

        def residual(h):
            second = (evaluate_at(s, t + h) - 2 * evaluate_at(s, t) + evaluate_at(s, t - h)) * (1 / h**2)
            return (second + apply_D_power(evaluate_at(s, t), 1)).norm()

        r1, r2 = residual(1e-2), residual(5e-3)
        # halving h shrinks an O(h²) residual fourfold
        assert r1 / r2 == pytest.approx(4.0, rel=0.05)


class TestInnerPhysical:
    def test_zero_mode_unit(self):
        spec = GridSpec(n=16, mu=1.0)
        s = positive_frequency(plane_wave(spec, 0))
        assert_allclose(inner_physical(s, s), 1.0, atol=1e-14)

    @pytest.mark.parametrize("mode", [1, 4, -6])
    def test_mode_norm(self, mode):
        spec = GridSpec(n=32, mu=0.8, box_len=10.0)
        s = positive_frequency(plane_wave(spec, mode))
        w = np.sqrt((2 * np.pi * mode / spec.box_len) ** 2 + spec.mu**2)
        assert_allclose(inner_physical(s, s), w / spec.mu, rtol=1e-13)

    def test_charge_sectors_orthogonal(self, spec_any_dim, rng):
        a, b = charged(spec_any_dim, rng, 1), charged(spec_any_dim, rng, -1)
        assert abs(inner_physical(a, b)) < 1e-12 * norm_physical(a) * norm_physical(b)

    def test_positive_definite(self, spec_any_dim, rng):
        for _ in range(5):
            s = random_kg_state(spec_any_dim, rng)
            value = inner_physical(s, s)
            assert value.real > 0 and abs(value.imag) < 1e-13 * value.real

    def test_hermitian_sesquilinear(self, spec, rng):
        a, b = random_kg_state(spec, rng), random_kg_state(spec, rng)
        assert_allclose(inner_physical(a, b), np.conj(inner_physical(b, a)), rtol=1e-14)
        assert_allclose(inner_physical(a, 3j * b), 3j * inner_physical(a, b), rtol=1e-14)

    def test_conservation(self, spec_any_dim, rng):
        spec = spec_any_dim
        a, b = random_kg_state(spec, rng), random_kg_state(spec, rng)
        ref = inner_physical(a, b)
        for t in (0.3, 1.7, 13.1):
            got = inner_physical_at(a, b, t / spec.mu)
            assert abs(got - ref) < 1e-11 * norm_physical(a) * norm_physical(b)

    def test_mismatched_grids(self, rng):
        with pytest.raises(DimensionError):
            inner_physical(random_kg_state(GridSpec(n=8), rng), random_kg_state(GridSpec(n=8, mu=2), rng))

    def test_equals_eta_inner_product_of_U_t0(self, rng):
        spec = GridSpec(n=32, lam=3.0)
        a, b = random_kg_state(spec, rng), random_kg_state(spec, rng)
        assert_allclose(inner_eta(to_two_component(a), to_two_component(b)), inner_physical(a, b), rtol=1e-12)

    def test_nonrelativistic_deviation_scales(self):
        spec = GridSpec(n=64, box_len=80.0)

        def deviation(width):
            s = positive_frequency(gaussian(spec, width=width))
            return abs(inner_physical(s, s) - inner_l2(s.phi, s.phi))

        # halving the momentum spread quarters the O(k²/μ²) deviation
        assert deviation(4.0) / deviation(8.0) == pytest.approx(4.0, abs=0.5)


class TestH:
    @pytest.mark.parametrize("sign", [1, -1])
    def test_mode_eigenvalue(self, spec, sign):
        phi = plane_wave(spec, 2)
        w = np.sqrt((2 * np.pi * 2 / spec.box_len) ** 2 + spec.mu**2)
        s = positive_frequency(phi) if sign > 0 else negative_frequency(phi)
        assert rel(apply_h(s), sign * spec.hbar * w * s) < 1e-13

    def test_cauchy_data(self, spec, rng):
        s = random_kg_state(spec, rng)
        h = apply_h(s)
        assert rel(h.phi, 1j * spec.hbar * s.phidot) == 0
        assert rel(h.phidot, -1j * spec.hbar * apply_D_power(s.phi, 1)) < 1e-15

    def test_hermitian(self, spec_any_dim, rng):
        a, b = random_kg_state(spec_any_dim, rng), random_kg_state(spec_any_dim, rng)
        lhs, rhs = inner_physical(a, apply_h(b)), inner_physical(apply_h(a), b)
        assert abs(lhs - rhs) < 1e-12 * abs(lhs)


class TestTimeTranslate:
    def test_zero(self, spec, rng):
        s = random_kg_state(spec, rng)
        assert rel(time_translate(s, 0.0), s) == 0

    @settings(max_examples=20, deadline=None)
    @given(dt=st.floats(-30, 30))
    def test_unitary(self, dt):
        spec = GridSpec(n=32)
        r = np.random.default_rng(3)
        a, b = random_kg_state(spec, r), random_kg_state(spec, r)
        got = inner_physical(time_translate(a, dt), time_translate(b, dt))
        assert abs(got - inner_physical(a, b)) < 1e-12 * norm_physical(a) * norm_physical(b)

    @settings(max_examples=20, deadline=None)
    @given(dt1=st.floats(-20, 20), dt2=st.floats(-20, 20))
    def test_group_law(self, dt1, dt2):
        spec = GridSpec(n=32)
        s = random_kg_state(spec, np.random.default_rng(4))
        assert rel(time_translate(time_translate(s, dt1), dt2), time_translate(s, dt1 + dt2)) < 1e-12

    def test_matches_evaluate(self, spec, rng):
        s = random_kg_state(spec, rng)
        moved = time_translate(s, 2.5)
        assert rel(moved.phi, evaluate_at(s, spec.t0 + 2.5)) < 1e-14


class TestFrequencySplit:
    def test_pure_positive(self, spec, rng):
        s = charged(spec, rng, 1)
        plus, minus = frequency_split(s)
        assert rel(plus, s) < 1e-14
        assert np.linalg.norm(minus.flat()) < 1e-14 * np.linalg.norm(s.flat())

    def test_static_mode_halves(self, spec):
        phi = plane_wave(spec, 3)
        plus, minus = frequency_split(KGState(phi, Field.zeros(spec)))
        coeff_p = to_momentum(plus.phi).values[3]
        coeff_full = to_momentum(phi).values[3]
        assert_allclose(coeff_p / coeff_full, 0.5, atol=1e-14)
        assert rel(plus.phi, minus.phi) < 1e-14

    def test_decomposition(self, spec_any_dim, rng):
        s = random_kg_state(spec_any_dim, rng)
        plus, minus = frequency_split(s)
        assert rel(plus + minus, s) < 1e-15
        assert abs(inner_physical(plus, minus)) < 1e-12 * norm_physical(s) ** 2

    def test_projectors(self, spec, rng):
        s = random_kg_state(spec, rng)
        plus, minus = frequency_split(s)
        assert rel(frequency_split(plus)[0], plus) < 1e-14
        assert rel(frequency_split(minus)[1], minus) < 1e-14
        assert np.linalg.norm(frequency_split(plus)[1].flat()) < 1e-14 * np.linalg.norm(s.flat())
        assert rel(frequency_split(apply_h(s))[0], apply_h(plus)) < 1e-13


class TestTwoComponentMap:
    @pytest.mark.parametrize("lam", [0.1, 1.0, 10.0])
    def test_round_trip(self, rng, lam):
        spec = GridSpec(n=32, lam=lam)
        s = random_kg_state(spec, rng)
        assert rel(from_two_component(to_two_component(s)), s) < 1e-14

    def test_H_intertwines_h(self, spec, rng):
        s = random_kg_state(spec, rng)
        assert rel(apply_H(to_two_component(s)), to_two_component(apply_h(s))) < 1e-13
