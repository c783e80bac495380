"""
Position, momentum and angular momentum on Klein-Gordon fields; localized and
coherent states.

The position operator is defined by conjugating lattice-coordinate
multiplication with 𝒰. Everything else here (the Newton-Wigner form, the
closed trigonometric form, the series) is a cross-check against that.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import ConfigurationError, UnsupportedDimensionError
from .foldy import FoldyState, from_foldy, position_ket, to_foldy
from .grid import (
    Field,
    GridSpec,
    apply_momentum,
    apply_multiplier,
    gaussian,
    inner_l2,
    multiply_coordinate,
)
from .kg_hilbert import KGState, evaluate_at, norm_physical


def position_apply(s: KGState, axis: int) -> KGState:
    """x₀ = 𝒰⁻¹ (x ⊗ σ₀) 𝒰."""
    f = to_foldy(s)
    return from_foldy(FoldyState(multiply_coordinate(f.upper, axis), multiply_coordinate(f.lower, axis)))


def momentum_apply(s: KGState, axis: int) -> KGState:
    """p₀ acts as -iħ∂ on ψ(t) for every t, hence on both pieces of Cauchy data."""
    return s.map(lambda f: apply_momentum(f, axis))


def q_multiplier(spec: GridSpec, axis: int) -> np.ndarray:
    """Mode-wise value of q = iħp / (2(p² + m²)); note p² + m² = ħ²ω²."""
    return 1j * spec.p_axis(axis) / (2 * spec.hbar * spec.omega**2)


def newton_wigner_apply(f: Field, axis: int) -> Field:
    """𝒳f = x f + iħp/(2(p²+m²)) f."""
    return multiply_coordinate(f, axis) + apply_multiplier(f, q_multiplier(f.spec, axis))


def J1_multiplier(spec: GridSpec, tau: float, order: int | None = None) -> np.ndarray:
    """
    J₁(τ) = -cos(τ√D) - 2τ sin(τ√D)√D, or its Taylor polynomial
    Σ_{ℓ≤order} (-1)^ℓ (4ℓ-1)/(2ℓ)! τ^{2ℓ} D^ℓ when ``order`` is given.
    """
    w = spec.omega
    if order is None:
        return -np.cos(tau * w) - 2 * tau * np.sin(tau * w) * w
    _check_order(order)
    D = w**2
    return sum((-1) ** l * (4 * l - 1) / factorial(2 * l) * tau ** (2 * l) * D**l for l in range(order + 1))


def J2_multiplier(spec: GridSpec, tau: float, order: int | None = None) -> np.ndarray:
    """J₂(τ) = 2τ cos(τ√D) - sin(τ√D)D^{-1/2}, or Σ_{ℓ≤order} (-1)^ℓ (4ℓ+1)/(2ℓ+1)! τ^{2ℓ+1} D^ℓ."""
    w = spec.omega
    if order is None:
        return 2 * tau * np.cos(tau * w) - np.sin(tau * w) / w
    _check_order(order)
    D = w**2
    return sum((-1) ** l * (4 * l + 1) / factorial(2 * l + 1) * tau ** (2 * l + 1) * D**l for l in range(order + 1))


def _check_order(order: int):
    if order < 1:
        raise ValueError(f"series truncation order must be >= 1, got {order}")


def closed_form_position(s: KGState, t: float, axis: int, order: int | None = None) -> Field:
    """
    [x₀ψ](t) = x ψ(t) - q [J₁(t-t₀)ψ(t₀) + J₂(t-t₀)ψ̇(t₀)].

    With ``order`` set, J₁ and J₂ are replaced by their truncated series.
    """
    spec = s.spec
    tau = t - spec.t0
    q = q_multiplier(spec, axis)
    corr = apply_multiplier(s.phi, q * J1_multiplier(spec, tau, order)) + apply_multiplier(
        s.phidot, q * J2_multiplier(spec, tau, order)
    )
    return multiply_coordinate(evaluate_at(s, t), axis) - corr


def _check_pair(spec: GridSpec, pair):
    if spec.d < 2:
        raise UnsupportedDimensionError("angular momentum needs d >= 2")
    i, j = pair
    if i == j:
        raise ValueError("angular momentum needs two distinct axes")
    return i, j


def angular_momentum_apply(s: KGState, pair=(0, 1)) -> KGState:
    """L_ij = x_i p_j - x_j p_i applied to ψ(t) directly (the q-terms cancel)."""
    i, j = _check_pair(s.spec, pair)

    def lij(f: Field) -> Field:
        return multiply_coordinate(apply_momentum(f, j), i) - multiply_coordinate(apply_momentum(f, i), j)

    return s.map(lij)


def angular_momentum_composite(s: KGState, pair=(0, 1)) -> KGState:
    """x₀_i p₀_j - x₀_j p₀_i built from ``position_apply`` and ``momentum_apply``."""
    i, j = _check_pair(s.spec, pair)
    return position_apply(momentum_apply(s, j), i) - position_apply(momentum_apply(s, i), j)


def localized_state(spec: GridSpec, eps: int, site) -> KGState:
    """ψ_{ε,x} = 𝒰⁻¹ ξ_{ε,x}; the site must be a lattice index tuple."""
    return from_foldy(position_ket(spec, eps, site))


@dataclass(frozen=True)
class CoherentSpec:
    """Eigenvalue ``z`` of the annihilation operator, charge sign ``eps`` and oscillator constant ``k_osc``."""

    z: tuple
    eps: int = 1
    k_osc: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "z", tuple(complex(v) for v in np.atleast_1d(self.z)))
        if self.eps not in (1, -1):
            raise ConfigurationError(f"eps must be +1 or -1, got {self.eps}")
        if not self.k_osc > 0:
            raise ConfigurationError(f"k_osc must be positive, got {self.k_osc}")

    def width(self, hbar: float = 1.0) -> float:
        return float(np.sqrt(hbar / self.k_osc))


def coherent_packet(spec: GridSpec, cs: CoherentSpec) -> Field:
    """Normalized Gaussian with ⟨x⟩ + i⟨p⟩/k = z √(2ħ/k)."""
    if len(cs.z) != spec.d:
        raise ConfigurationError(f"z needs {spec.d} components, got {len(cs.z)}")
    sigma = cs.width(spec.hbar)
    if sigma > spec.box_len / 12:
        raise ConfigurationError(f"Gaussian width {sigma:g} exceeds L/12 = {spec.box_len / 12:g}")
    w = np.asarray(cs.z) * np.sqrt(2 * spec.hbar / cs.k_osc)
    g = gaussian(spec, center=w.real, width=sigma, momentum=cs.k_osc * w.imag)
    return g / np.sqrt(inner_l2(g, g).real)


def coherent_state(spec: GridSpec, cs: CoherentSpec) -> KGState:
    """|z, ε) = 𝒰⁻¹ (Gaussian ⊗ e_ε)."""
    g = coherent_packet(spec, cs)
    zero = Field.zeros(spec)
    pair = FoldyState(g, zero) if cs.eps == 1 else FoldyState(zero, g)
    return from_foldy(pair)


def annihilation_apply(s: KGState, axis: int, k_osc: float) -> KGState:
    """a = √(k/2ħ) (x₀ + i p₀ / k)."""
    hb = s.spec.hbar
    return np.sqrt(k_osc / (2 * hb)) * (position_apply(s, axis) + (1j / k_osc) * momentum_apply(s, axis))


def coherent_residual(s: KGState, cs: CoherentSpec) -> float:
    """max over axes of ‖(a_j - z_j)s‖ / (1 + |z|), in the physical norm."""
    zabs = float(np.linalg.norm(cs.z))
    worst = 0.0
    for axis, zj in enumerate(cs.z):
        r = annihilation_apply(s, axis, cs.k_osc) - zj * s
        worst = max(worst, norm_physical(r) / (1 + zabs))
    return worst
