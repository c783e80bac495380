"""
Foldy representation (ℋ′, H′) and position-space wave functions f(ε, x).

𝒰 = ρ U_{t₀} maps a Klein-Gordon field onto a pair of L² functions on which
the Hamiltonian is diagonal, H′ = ħ√D σ₃. The components of 𝒰ψ are the wave
functions f(+, ·) and f(-, ·); no separate storage is kept for them.
"""

from __future__ import annotations

import numpy as np

from .grid import Field, GridSpec, apply_multiplier, lattice_delta
from .kg_hilbert import KGState
from .two_component import TwoCompState, apply_block


class FoldyState(TwoCompState):
    """Pair (f(+, ·), f(-, ·)) in the Foldy representation."""


def to_foldy(s: KGState) -> FoldyState:
    """𝒰ψ = (2√μ)⁻¹ (D^{1/4}ψ + iD^{-1/4}ψ̇, D^{1/4}ψ - iD^{-1/4}ψ̇)."""
    spec = s.spec
    q = np.sqrt(spec.omega)
    a = apply_multiplier(s.phi, q)
    b = 1j * apply_multiplier(s.phidot, 1 / q)
    c = 1 / (2 * np.sqrt(spec.mu))
    return FoldyState(c * (a + b), c * (a - b))


def from_foldy(s: TwoCompState) -> KGState:
    spec = s.spec
    q = np.sqrt(spec.omega)
    c = np.sqrt(spec.mu)
    return KGState(c * apply_multiplier(s.xi_plus, 1 / q), -1j * c * apply_multiplier(s.xi_minus, q))


wavefunction = to_foldy


def from_wavefunction(upper: Field, lower: Field) -> KGState:
    return from_foldy(FoldyState(upper, lower))


def apply_H_prime(s: TwoCompState) -> FoldyState:
    """H′ = ħ√D σ₃."""
    e = s.spec.hbar * s.spec.omega
    return FoldyState(*_pair(apply_block(s, e, 0.0, 0.0, -e)))


def apply_s3(s: TwoCompState) -> FoldyState:
    """Charge grading ŝ₃ f(ε, x) = ε f(ε, x)."""
    return FoldyState(s.upper, -s.lower)


def schrodinger_evolve_f(s: TwoCompState, dt: float) -> FoldyState:
    """Solve iħ∂ₜf = ε√(-ħ²∇²+m²) f over ``dt``: phases e^{∓iω dt} on the two components."""
    if dt == 0:
        return FoldyState(s.upper, s.lower)
    ph = np.exp(-1j * dt * s.spec.omega)
    return FoldyState(*_pair(apply_block(s, ph, 0.0, 0.0, ph.conj())))


def _pair(s: TwoCompState):
    return s.upper, s.lower


def position_ket(spec: GridSpec, eps: int, site) -> FoldyState:
    """ξ_{ε,x} = |x⟩ ⊗ e_ε with |x⟩ the lattice delta."""
    delta = lattice_delta(spec, site)
    zero = Field.zeros(spec)
    if eps == 1:
        return FoldyState(delta, zero)
    if eps == -1:
        return FoldyState(zero, delta)
    raise ValueError(f"eps must be +1 or -1, got {eps}")


def operator_kernel(op, spec: GridSpec) -> np.ndarray:
    """
    Position-space kernel Ô(ε,x; ε′,x′) = ⟨ξ_{ε,x}, O′ ξ_{ε′,x′}⟩ of a Foldy-space operator.

    Returned as a (2N, 2N) matrix with the ε = + block first and sites in C
    order. Intended for small grids only.
    """
    size = int(np.prod(spec.shape))
    kernel = np.empty((2 * size, 2 * size), dtype=complex)
    col = 0
    for eps in (1, -1):
        for site in np.ndindex(*spec.shape):
            image = op(position_ket(spec, eps, site))
            # ⟨ξ_{ε,x}, χ⟩ = Δxᵈ · (1/Δxᵈ) χ_ε(x) = χ_ε(x)
            kernel[:, col] = image.flat()
            col += 1
    return kernel


def apply_kernel(kernel: np.ndarray, s: TwoCompState) -> FoldyState:
    """Ôf(ε,x) = Σ_{ε′} Δxᵈ Σ_{x′} Ô(ε,x; ε′,x′) f(ε′,x′)."""
    spec = s.spec
    out = FoldyState.from_flat(spec, spec.cell_volume * kernel @ s.flat())
    return out
