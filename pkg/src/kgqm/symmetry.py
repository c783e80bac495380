"""
Generalized parity, time-reversal and charge-conjugation.

In ℋ′ the eigen-sums collapse to 𝒫 = σ₃, 𝒯 = σ₃⋆, 𝒫𝒯 = ⋆ and a 𝒞 built from
X = √λ D^{1/4}. On Klein-Gordon fields they are pulled back through U_{t₀};
in the Foldy picture 𝒞′ = σ₃ and 𝒫′𝒯′ = ⋆.

⋆ is pointwise complex conjugation of lattice values. Because D is a real
operator this agrees with the eigen-sum form of 𝒯 when the sum runs over
real standing-wave eigenvectors of D.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .foldy import FoldyState
from .grid import GridSpec, apply_multiplier
from .kg_hilbert import KGState, frequency_split
from .two_component import TwoCompState, x_power, apply_block, apply_H


def apply_P2(s: TwoCompState) -> TwoCompState:
    return TwoCompState(s.upper, -s.lower)


def apply_T2(s: TwoCompState) -> TwoCompState:
    return TwoCompState(s.upper.conj(), -s.lower.conj())


def apply_PT2(s: TwoCompState) -> TwoCompState:
    return TwoCompState(s.upper.conj(), s.lower.conj())


def apply_C2(s: TwoCompState) -> TwoCompState:
    """𝒞 = ½[[X²+X⁻², X²-X⁻²], [-X²+X⁻², -(X²+X⁻²)]]."""
    x2, xm2 = x_power(s.spec, 2), x_power(s.spec, -2)
    out = apply_block(s, (x2 + xm2) / 2, (x2 - xm2) / 2, (xm2 - x2) / 2, -(x2 + xm2) / 2)
    return TwoCompState(out.upper, out.lower)


def apply_C2_from_H(s: TwoCompState) -> TwoCompState:
    """𝒞 = ħ⁻¹D^{-1/2}H = H/√(H²); an independent route to ``apply_C2``."""
    h = apply_H(s)
    inv = 1 / (s.spec.hbar * s.spec.omega)
    return TwoCompState(apply_multiplier(h.upper, inv), apply_multiplier(h.lower, inv))


def apply_PT_kg(s: KGState) -> KGState:
    """
    PT = U_{t₀}⁻¹ ⋆ U_{t₀} on Cauchy data: (ψ, ψ̇) ↦ (ψ*, -ψ̇*).

    The resulting solution is t ↦ ψ(2t₀ - t)*. For real fields this is the
    plain time reflection ψ(2t₀ - t).
    """
    return KGState(s.phi.conj(), -s.phidot.conj())


def apply_C_kg(s: KGState) -> KGState:
    """Charge grading Cψ = ψ₊ - ψ₋."""
    plus, minus = frequency_split(s)
    return plus - minus


def apply_C_foldy(s: TwoCompState) -> FoldyState:
    return FoldyState(s.upper, -s.lower)


def apply_PT_foldy(s: TwoCompState) -> FoldyState:
    return FoldyState(s.upper.conj(), s.lower.conj())


@dataclass
class SymmetryReport:
    """Outcome of checking one operator identity over a random ensemble."""

    identity_name: str
    max_residual: float
    ensemble_size: int
    seed: int | None = None
    grid: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.max_residual >= 0:
            raise ValueError(f"residual must be non-negative, got {self.max_residual}")

    def to_dict(self) -> dict:
        return {
            "identity": self.identity_name,
            "residual": self.max_residual,
            "ensemble": self.ensemble_size,
            "seed": self.seed,
            "grid": self.grid,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> SymmetryReport:
        data = json.loads(text)
        return cls(data["identity"], data["residual"], data["ensemble"], data.get("seed"), data.get("grid", {}))


def grid_summary(spec: GridSpec) -> dict:
    return {k: (float(v) if isinstance(v, float) else v) for k, v in spec.to_mapping().items()}


def relative_residual(a, b) -> float:
    """‖a - b‖ / max(‖b‖, tiny) using the flattened coefficient vectors."""
    va, vb = _vector(a), _vector(b)
    scale = np.linalg.norm(vb)
    return float(np.linalg.norm(va - vb) / (scale if scale > 0 else 1.0))


def _vector(x) -> np.ndarray:
    if hasattr(x, "flat") and callable(x.flat):
        return x.flat()
    if hasattr(x, "values"):
        return np.asarray(x.values).ravel()
    return np.asarray(x).ravel()
