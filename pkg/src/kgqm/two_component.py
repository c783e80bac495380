"""
Two-component representation ℋ′ = L² ⊕ L².

The pair Ψ = (ψ + iλψ̇, ψ - iλψ̇) obeys iħ dΨ/dt = HΨ with the non-Hermitian
but σ₃-pseudo-Hermitian Hamiltonian H. Everything here acts mode-wise: each
Fourier mode carries a 2×2 block built from ω_k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .grid import Field, GridSpec, apply_multiplier, inner_l2, mode_omega, plane_wave, random_field


@dataclass(frozen=True, eq=False)
class TwoCompState:
    upper: Field
    lower: Field

    def __post_init__(self):
        if self.upper.spec != self.lower.spec:
            raise DimensionError("components live on different grids")

    @property
    def spec(self) -> GridSpec:
        return self.upper.spec

    @property
    def xi_plus(self) -> Field:
        return self.upper + self.lower

    @property
    def xi_minus(self) -> Field:
        return self.upper - self.lower

    @classmethod
    def zeros(cls, spec: GridSpec) -> TwoCompState:
        return cls(Field.zeros(spec), Field.zeros(spec))

    def __add__(self, other):
        if not isinstance(other, type(self)):
            return NotImplemented
        return type(self)(self.upper + other.upper, self.lower + other.lower)

    def __sub__(self, other):
        if not isinstance(other, type(self)):
            return NotImplemented
        return type(self)(self.upper - other.upper, self.lower - other.lower)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return type(self)(scalar * self.upper, scalar * self.lower)

    __rmul__ = __mul__

    def __neg__(self):
        return type(self)(-self.upper, -self.lower)

    def conj(self):
        return type(self)(self.upper.conj(), self.lower.conj())

    def flat(self) -> np.ndarray:
        """Stack (upper, lower) into one vector of length 2nᵈ."""
        return np.concatenate([self.upper.values.ravel(), self.lower.values.ravel()])

    @classmethod
    def from_flat(cls, spec: GridSpec, vec: np.ndarray):
        size = int(np.prod(spec.shape))
        if vec.shape != (2 * size,):
            raise DimensionError(f"expected a vector of length {2 * size}")
        return cls(Field(spec, vec[:size].reshape(spec.shape)), Field(spec, vec[size:].reshape(spec.shape)))


def inner_two(x: TwoCompState, z: TwoCompState) -> complex:
    """Plain inner product of ℋ′."""
    return inner_l2(x.upper, z.upper) + inner_l2(x.lower, z.lower)


def apply_block(s, a, b, c, d):
    """
    Apply the mode-wise 2×2 block [[a, b], [c, d]].

    Entries are scalars or arrays broadcastable to the mode grid. The result
    has the same type as ``s`` so the helper serves both ℋ′ and the Foldy
    representation.
    """
    u = np.fft.fftn(s.upper.values)
    l = np.fft.fftn(s.lower.values)
    spec = s.spec
    return type(s)(
        Field(spec, np.fft.ifftn(a * u + b * l)),
        Field(spec, np.fft.ifftn(c * u + d * l)),
    )


def apply_sigma3(s: TwoCompState) -> TwoCompState:
    return type(s)(s.upper, -s.lower)


def _H_blocks(spec: GridSpec):
    lam, hb = spec.lam, spec.hbar
    D = spec.omega**2
    return (
        hb / 2 * (lam * D + 1 / lam),
        hb / 2 * (lam * D - 1 / lam),
        hb / 2 * (-lam * D + 1 / lam),
        hb / 2 * (-lam * D - 1 / lam),
    )


def apply_H(s: TwoCompState) -> TwoCompState:
    return apply_block(s, *_H_blocks(s.spec))


def apply_Hdag(s: TwoCompState) -> TwoCompState:
    # H† = σ₃ H σ₃ flips the off-diagonal signs
    a, b, c, d = _H_blocks(s.spec)
    return apply_block(s, a, -b, -c, d)


def x_power(spec: GridSpec, power: int) -> np.ndarray:
    """Multiplier of X^power with X = √λ D^{1/4}."""
    return (np.sqrt(spec.lam) * np.sqrt(spec.omega)) ** power


def _plus_minus_block(s, on_plus, on_minus):
    # acts as on_plus on ξ₊ and on_minus on ξ₋, returning (ξ¹, ξ²)
    return apply_block(
        s,
        (on_plus + on_minus) / 2,
        (on_plus - on_minus) / 2,
        (on_plus - on_minus) / 2,
        (on_plus + on_minus) / 2,
    )


def apply_eta_plus(s: TwoCompState) -> TwoCompState:
    """The positive-definite metric η₊ = ½[[X²+X⁻², X²-X⁻²], [X²-X⁻², X²+X⁻²]]."""
    return _plus_minus_block(s, x_power(s.spec, 2), x_power(s.spec, -2))


def apply_eta_plus_inv(s: TwoCompState) -> TwoCompState:
    return _plus_minus_block(s, x_power(s.spec, -2), x_power(s.spec, 2))


def apply_rho(s: TwoCompState) -> TwoCompState:
    """Positive square root of η₊."""
    return _plus_minus_block(s, x_power(s.spec, 1), x_power(s.spec, -1))


def apply_rho_inv(s: TwoCompState) -> TwoCompState:
    return _plus_minus_block(s, x_power(s.spec, -1), x_power(s.spec, 1))


def inner_eta(x: TwoCompState, z: TwoCompState) -> complex:
    """⟨⟨x, z⟩⟩ = ½[⟨x₊|X² z₊⟩ + ⟨x₋|X⁻² z₋⟩]."""
    if x.spec != z.spec:
        raise DimensionError("inner product of states on different grids")
    spec = x.spec
    zp = apply_multiplier(z.xi_plus, x_power(spec, 2))
    zm = apply_multiplier(z.xi_minus, x_power(spec, -2))
    return 0.5 * (inner_l2(x.xi_plus, zp) + inner_l2(x.xi_minus, zm))


@dataclass(frozen=True)
class EigenLabel:
    eps: int
    mode: tuple[int, ...]

    def __post_init__(self):
        if self.eps not in (1, -1):
            raise ValueError(f"eps must be +1 or -1, got {self.eps}")
        object.__setattr__(self, "mode", tuple(int(m) for m in np.atleast_1d(self.mode)))


def eigenvalue(spec: GridSpec, label: EigenLabel) -> float:
    """E_{ε,k} = ε ħ ω_k."""
    return label.eps * spec.hbar * mode_omega(spec, label.mode)


def _r(spec: GridSpec, label: EigenLabel) -> float:
    return np.sqrt(spec.lam * mode_omega(spec, label.mode))


def eigenmode_H(spec: GridSpec, label: EigenLabel) -> TwoCompState:
    """Ψ_{ε,k} = ½ (r⁻¹ + εr, r⁻¹ - εr)ᵀ φ_k."""
    r, eps = _r(spec, label), label.eps
    phi = plane_wave(spec, label.mode)
    return TwoCompState(0.5 * (1 / r + eps * r) * phi, 0.5 * (1 / r - eps * r) * phi)


def eigenmode_Hdag(spec: GridSpec, label: EigenLabel) -> TwoCompState:
    """Φ_{ε,k} = ½ (r + εr⁻¹, r - εr⁻¹)ᵀ φ_k."""
    r, eps = _r(spec, label), label.eps
    phi = plane_wave(spec, label.mode)
    return TwoCompState(0.5 * (r + eps / r) * phi, 0.5 * (r - eps / r) * phi)


def random_two_state(spec: GridSpec, rng: np.random.Generator) -> TwoCompState:
    return TwoCompState(random_field(spec, rng), random_field(spec, rng))


def evolve_two_component(s: TwoCompState, t: float) -> TwoCompState:
    """
    e^{-iHt/ħ} s, using H² = ħ²D per mode:
    e^{-iHt/ħ} = cos(ωt) I - i sin(ωt) H / (ħω).
    """
    spec = s.spec
    w = spec.omega
    c, sn = np.cos(w * t), np.sin(w * t) / (spec.hbar * w)
    a, b, cc, d = _H_blocks(spec)
    return apply_block(s, c - 1j * sn * a, -1j * sn * b, -1j * sn * cc, c - 1j * sn * d)
