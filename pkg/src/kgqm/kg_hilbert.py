"""
The physical Hilbert space of Klein-Gordon solutions.

A solution is stored as its Cauchy data (ψ(t₀), ψ̇(t₀)); evolution to any
other time is exact through cos(τ√D) and sin(τ√D)D^{-1/2}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .grid import Field, GridSpec, apply_multiplier, inner_l2, random_field
from .two_component import TwoCompState


@dataclass(frozen=True, eq=False)
class KGState:
    """Cauchy data of a Klein-Gordon field at the reference time ``spec.t0``."""

    phi: Field
    phidot: Field

    def __post_init__(self):
        if self.phi.spec != self.phidot.spec:
            raise DimensionError("Cauchy data live on different grids")

    @property
    def spec(self) -> GridSpec:
        return self.phi.spec

    @classmethod
    def zeros(cls, spec: GridSpec) -> KGState:
        return cls(Field.zeros(spec), Field.zeros(spec))

    def __add__(self, other):
        if not isinstance(other, KGState):
            return NotImplemented
        return KGState(self.phi + other.phi, self.phidot + other.phidot)

    def __sub__(self, other):
        if not isinstance(other, KGState):
            return NotImplemented
        return KGState(self.phi - other.phi, self.phidot - other.phidot)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return KGState(scalar * self.phi, scalar * self.phidot)

    __rmul__ = __mul__

    def __neg__(self):
        return KGState(-self.phi, -self.phidot)

    def map(self, fn) -> KGState:
        """Apply a Field -> Field map to both pieces of Cauchy data."""
        return KGState(fn(self.phi), fn(self.phidot))

    def flat(self) -> np.ndarray:
        return np.concatenate([self.phi.values.ravel(), self.phidot.values.ravel()])


def _evolve_coefficients(s: KGState, tau: float):
    w = s.spec.omega
    c, sn = np.cos(tau * w), np.sin(tau * w)
    p = np.fft.fftn(s.phi.values)
    v = np.fft.fftn(s.phidot.values)
    return c * p + sn / w * v, -w * sn * p + c * v


def evaluate_at(s: KGState, t: float) -> Field:
    """ψ(t) = cos[(t-t₀)√D]ψ(t₀) + sin[(t-t₀)√D]D^{-1/2}ψ̇(t₀)."""
    tau = t - s.spec.t0
    if tau == 0:
        return s.phi
    return Field(s.spec, np.fft.ifftn(_evolve_coefficients(s, tau)[0]))


def velocity_at(s: KGState, t: float) -> Field:
    tau = t - s.spec.t0
    if tau == 0:
        return s.phidot
    return Field(s.spec, np.fft.ifftn(_evolve_coefficients(s, tau)[1]))


def time_translate(s: KGState, dt: float) -> KGState:
    """Cauchy data at t₀ of the translated solution t ↦ ψ(t + dt), i.e. e^{-i dt h/ħ} s."""
    if dt == 0:
        return s
    p, v = _evolve_coefficients(s, dt)
    return KGState(Field(s.spec, np.fft.ifftn(p)), Field(s.spec, np.fft.ifftn(v)))


def inner_physical(a: KGState, b: KGState) -> complex:
    """(ψ₁, ψ₂) = (1/2μ)[⟨ψ₁|D^{1/2}ψ₂⟩ + ⟨ψ̇₁|D^{-1/2}ψ̇₂⟩] at t₀."""
    if a.spec != b.spec:
        raise DimensionError("inner product of states on different grids")
    spec = a.spec
    w = spec.omega
    first = inner_l2(a.phi, apply_multiplier(b.phi, w))
    second = inner_l2(a.phidot, apply_multiplier(b.phidot, 1 / w))
    return (first + second) / (2 * spec.mu)


def inner_physical_at(a: KGState, b: KGState, t: float) -> complex:
    """The same inner product evaluated from data at time t; conserved, so equal to ``inner_physical``."""
    spec = a.spec
    w = spec.omega
    pa, va, pb, vb = evaluate_at(a, t), velocity_at(a, t), evaluate_at(b, t), velocity_at(b, t)
    return (inner_l2(pa, apply_multiplier(pb, w)) + inner_l2(va, apply_multiplier(vb, 1 / w))) / (2 * spec.mu)


def norm_physical(s: KGState) -> float:
    return float(np.sqrt(inner_physical(s, s).real))


def apply_h(s: KGState) -> KGState:
    """hψ = iħψ̇: Cauchy data (iħψ̇(t₀), -iħDψ(t₀))."""
    hb = s.spec.hbar
    return KGState(1j * hb * s.phidot, -1j * hb * apply_multiplier(s.phi, s.spec.omega**2))


def frequency_split(s: KGState) -> tuple[KGState, KGState]:
    """
    Split into positive- and negative-frequency parts.

    In momentum space f±(k) = ½[ψ̃(t₀,k) ± iψ̇̃(t₀,k)/ω_k]; the part ψ± has
    Cauchy data (f±, ∓iω f±).
    """
    spec = s.spec
    w = spec.omega
    p = np.fft.fftn(s.phi.values)
    v = np.fft.fftn(s.phidot.values)
    fp = 0.5 * (p + 1j * v / w)
    fm = 0.5 * (p - 1j * v / w)
    plus = KGState(Field(spec, np.fft.ifftn(fp)), Field(spec, np.fft.ifftn(-1j * w * fp)))
    minus = KGState(Field(spec, np.fft.ifftn(fm)), Field(spec, np.fft.ifftn(1j * w * fm)))
    return plus, minus


def positive_frequency(f: Field) -> KGState:
    """The solution Σ e^{-iω(t-t₀)} f̃(k) φ_k, i.e. Cauchy data (f, -i√D f)."""
    return KGState(f, -1j * apply_multiplier(f, f.spec.omega))


def negative_frequency(f: Field) -> KGState:
    return KGState(f, 1j * apply_multiplier(f, f.spec.omega))


def to_two_component(s: KGState) -> TwoCompState:
    """U_{t₀}ψ = (2√(λμ))⁻¹ (ψ + iλψ̇, ψ - iλψ̇) at t₀."""
    spec = s.spec
    c = 1 / (2 * np.sqrt(spec.lam * spec.mu))
    return TwoCompState(c * (s.phi + 1j * spec.lam * s.phidot), c * (s.phi - 1j * spec.lam * s.phidot))


def from_two_component(x: TwoCompState) -> KGState:
    spec = x.spec
    c = np.sqrt(spec.lam * spec.mu)
    return KGState(c * x.xi_plus, (-1j * c / spec.lam) * x.xi_minus)


def random_kg_state(spec: GridSpec, rng: np.random.Generator) -> KGState:
    return KGState(random_field(spec, rng), random_field(spec, rng))
