from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from conftest import rel
from kgqm.foldy import (
    FoldyState,
    apply_H_prime,
    apply_kernel,
    apply_s3,
    from_foldy,
    from_wavefunction,
    operator_kernel,
    position_ket,
    schrodinger_evolve_f,
    to_foldy,
    wavefunction,
)
from kgqm.grid import (
    Field,
    GridSpec,
    apply_D_power,
    apply_multiplier,
    inner_l2,
    lattice_delta,
    multiply_coordinate,
    plane_wave,
    random_field,
)
from kgqm.kg_hilbert import (
    KGState,
    evaluate_at,
    inner_physical,
    positive_frequency,
    random_kg_state,
    time_translate,
    to_two_component,
)
from kgqm.observables import localized_state, position_apply
from kgqm.two_component import apply_H, apply_rho, apply_rho_inv, inner_two, random_two_state


def random_foldy(spec, rng):
    return FoldyState(random_field(spec, rng), random_field(spec, rng))


class TestMap:
    def test_zero_mode_positive_frequency(self):
        spec = GridSpec(n=16, mu=1.0)
        phi0 = plane_wave(spec, 0)
        f = to_foldy(positive_frequency(phi0))
        assert rel(f.upper, phi0) < 1e-14
        assert f.lower.norm() < 1e-14

    def test_formula(self, rng):
        spec = GridSpec(n=32, mu=1.7)
        s = random_kg_state(spec, rng)
        f = to_foldy(s)
        a = apply_D_power(s.phi, 0.25)
        b = 1j * apply_D_power(s.phidot, -0.25)
        c = 1 / (2 * np.sqrt(spec.mu))
        assert rel(f.upper, c * (a + b)) < 1e-14
        assert rel(f.lower, c * (a - b)) < 1e-14

    def test_lambda_independent(self, rng):
        base = GridSpec(n=32, mu=2.0)
        phi, phidot = random_field(base, rng).values, random_field(base, rng).values
        outs = []
        for lam in (0.1 / base.mu, 10 / base.mu):
            spec = base.with_(lam=lam)
            s = KGState(Field(spec, phi), Field(spec, phidot))
            outs.append(apply_rho(to_two_component(s)).flat())
        assert np.linalg.norm(outs[0] - outs[1]) < 1e-12 * np.linalg.norm(outs[1])

    def test_unitary(self, spec_any_dim, rng):
        a, b = random_kg_state(spec_any_dim, rng), random_kg_state(spec_any_dim, rng)
        lhs = inner_two(to_foldy(a), to_foldy(b))
        assert_allclose(lhs, inner_physical(a, b), rtol=1e-12)

    def test_single_mode_inverse(self):
        spec = GridSpec(n=16, mu=1.0)
        phi0 = plane_wave(spec, 0)
        s = from_foldy(FoldyState(phi0, Field.zeros(spec)))
        assert rel(s.phi, phi0) < 1e-14
        assert rel(s.phidot, -1j * phi0) < 1e-14

    def test_round_trip(self, spec_any_dim, rng):
        s = random_kg_state(spec_any_dim, rng)
        assert rel(from_foldy(to_foldy(s)), s) < 1e-13
        f = random_foldy(spec_any_dim, rng)
        assert rel(to_foldy(from_foldy(f)), f) < 1e-13

    def test_trajectory(self, rng):
        spec = GridSpec(n=32, mu=0.9, t0=0.4)
        xi = random_field(spec, rng)
        s = from_foldy(FoldyState(xi, Field.zeros(spec)))
        for t in (0.4, 2.0, -6.1):
            phase = np.exp(-1j * (t - spec.t0) * spec.omega)
            expected = np.sqrt(spec.mu) * apply_D_power(apply_multiplier(xi, phase), -0.25)
            assert rel(evaluate_at(s, t), expected) < 1e-12

    def test_wavefunction_alias(self, spec, rng):
        s = random_kg_state(spec, rng)
        assert rel(wavefunction(s), to_foldy(s)) == 0
        f = wavefunction(s)
        assert rel(from_wavefunction(f.upper, f.lower), s) < 1e-13


class TestHPrime:
    @pytest.mark.parametrize("mode", [0, 3, -10])
    def test_modes(self, spec, mode):
        phi = plane_wave(spec, mode)
        zero = Field.zeros(spec)
        w = np.sqrt((2 * np.pi * mode / spec.box_len) ** 2 + spec.mu**2)
        assert rel(apply_H_prime(FoldyState(phi, zero)), FoldyState(spec.hbar * w * phi, zero)) < 1e-13
        assert rel(apply_H_prime(FoldyState(zero, phi)), FoldyState(zero, -spec.hbar * w * phi)) < 1e-13

    @settings(max_examples=15, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), lam=st.floats(0.05, 20))
    def test_diagonalizes_H(self, seed, lam):
        spec = GridSpec(n=32, lam=lam)
        s = random_two_state(spec, np.random.default_rng(seed))
        assert rel(apply_rho(apply_H(apply_rho_inv(s))), apply_H_prime(s)) < 1e-11

    def test_hermitian(self, spec, rng):
        x, z = random_foldy(spec, rng), random_foldy(spec, rng)
        assert_allclose(inner_two(x, apply_H_prime(z)), inner_two(apply_H_prime(x), z), rtol=1e-12)

    def test_real(self, spec_any_dim, rng):
        s = random_foldy(spec_any_dim, rng)
        assert rel(apply_H_prime(s.conj()).conj(), apply_H_prime(s)) < 1e-12

    def test_hbar(self, rng):
        spec = GridSpec(n=16, hbar=2.0)
        f = random_foldy(spec, rng)
        assert rel(apply_H_prime(f).upper, 2.0 * apply_D_power(f.upper, 0.5)) < 1e-13


class TestWaveFunction:
    def test_localized_state_is_delta(self, spec):
        site = (20,)
        f = wavefunction(localized_state(spec, 1, site))
        assert rel(f.upper, lattice_delta(spec, site)) < 1e-12
        assert f.lower.norm() < 1e-12 * f.upper.norm()

    def test_norm(self, spec_any_dim, rng):
        s = random_kg_state(spec_any_dim, rng)
        f = wavefunction(s)
        total = spec_any_dim.cell_volume * (np.abs(f.upper.values) ** 2 + np.abs(f.lower.values) ** 2).sum()
        assert_allclose(total, inner_physical(s, s).real, rtol=1e-12)

    def test_s3(self, spec, rng):
        f = random_foldy(spec, rng)
        assert rel(apply_s3(f), FoldyState(f.upper, -f.lower)) == 0


class TestEvolution:
    def test_zero(self, spec, rng):
        f = random_foldy(spec, rng)
        assert rel(schrodinger_evolve_f(f, 0.0), f) == 0

    def test_single_mode_phase(self, spec):
        phi = plane_wave(spec, 5)
        w = np.sqrt((2 * np.pi * 5 / spec.box_len) ** 2 + spec.mu**2)
        out = schrodinger_evolve_f(FoldyState(phi, Field.zeros(spec)), 1.9)
        assert rel(out.upper, np.exp(-1j * w * 1.9) * phi) < 1e-13

    def test_norm_preserving(self, spec, rng):
        f = random_foldy(spec, rng)
        g = schrodinger_evolve_f(f, 12.3)
        assert_allclose(inner_two(g, g), inner_two(f, f), rtol=1e-13)

    @settings(max_examples=15, deadline=None)
    @given(dt=st.floats(-30, 30))
    def test_intertwines(self, dt):
        spec = GridSpec(n=32)
        s = random_kg_state(spec, np.random.default_rng(5))
        assert rel(to_foldy(time_translate(s, dt)), schrodinger_evolve_f(to_foldy(s), dt)) < 1e-12

    def test_klein_gordon_finite_difference(self, rng):
        spec = GridSpec(n=32, box_len=20.0)
        f = random_foldy(spec, rng)
        t = 0.6

        def residual(h):
            a, b, c = (schrodinger_evolve_f(f, t + dh) for dh in (h, 0.0, -h))
            second = (a - 2 * b + c) * (1 / h**2)
            kg = second + FoldyState(apply_D_power(b.upper, 1), apply_D_power(b.lower, 1))
            return np.linalg.norm(kg.flat())

        assert residual(1e-2) / residual(5e-3) == pytest.approx(4.0, rel=0.05)


class TestKernel:
    def test_position_kernel_is_diagonal(self):
        spec = GridSpec(n=8)

        def x_op(v):
            return FoldyState(multiply_coordinate(v.upper, 0), multiply_coordinate(v.lower, 0))

        kernel = operator_kernel(x_op, spec)
        # ⟨ξ_x, x ξ_x'⟩ = x δ_{xx'} / Δx in lattice-delta normalization
        expected = np.diag(np.tile(spec.x1d, 2)) / spec.cell_volume
        assert_allclose(kernel, expected, atol=1e-12)

    def test_kernel_reproduces_position_operator(self, rng):
        spec = GridSpec(n=8)

        def x_via_kg(v):
            return to_foldy(position_apply(from_foldy(v), 0))

        kernel = operator_kernel(x_via_kg, spec)
        f = random_foldy(spec, rng)
        direct = FoldyState(multiply_coordinate(f.upper, 0), multiply_coordinate(f.lower, 0))
        assert rel(apply_kernel(kernel, f), direct) < 1e-11

    def test_kernel_of_H_prime(self, rng):
        spec = GridSpec(n=8)
        kernel = operator_kernel(apply_H_prime, spec)
        f = random_foldy(spec, rng)
        assert rel(apply_kernel(kernel, f), apply_H_prime(f)) < 1e-12

    def test_position_ket_normalization(self, spec):
        a, b = position_ket(spec, 1, (3,)), position_ket(spec, 1, (4,))
        assert_allclose(inner_two(a, a), 1 / spec.cell_volume)
        assert inner_two(a, b) == 0
        assert inner_two(a, position_ket(spec, -1, (3,))) == 0

    def test_position_ket_bad_sign(self, spec):
        with pytest.raises(ValueError):
            position_ket(spec, 0, (1,))

    def test_inner_l2_used(self, spec, rng):
        f = random_foldy(spec, rng)
        assert_allclose(inner_two(f, f), inner_l2(f.upper, f.upper) + inner_l2(f.lower, f.lower))
