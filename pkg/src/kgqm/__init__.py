"""Quantum mechanics of Klein-Gordon fields on a periodic spectral lattice."""

from .errors import ConfigurationError, DimensionError, KGError, UnsupportedDimensionError
from .foldy import (
    FoldyState,
    apply_H_prime,
    apply_s3,
    from_foldy,
    schrodinger_evolve_f,
    to_foldy,
    wavefunction,
)
from .grid import (
    Field,
    GridSpec,
    apply_D_power,
    apply_trig_of_sqrtD,
    from_momentum,
    inner_l2,
    lattice_delta,
    plane_wave,
    to_momentum,
)
from .kg_hilbert import (
    KGState,
    apply_h,
    evaluate_at,
    frequency_split,
    from_two_component,
    inner_physical,
    time_translate,
    to_two_component,
)
from .observables import (
    CoherentSpec,
    angular_momentum_apply,
    closed_form_position,
    coherent_state,
    localized_state,
    momentum_apply,
    newton_wigner_apply,
    position_apply,
)
from .symmetry import (
    SymmetryReport,
    apply_C2,
    apply_C_foldy,
    apply_C_kg,
    apply_P2,
    apply_PT2,
    apply_PT_kg,
    apply_T2,
)
from .two_component import (
    EigenLabel,
    TwoCompState,
    apply_eta_plus,
    apply_H,
    apply_Hdag,
    apply_rho,
    apply_rho_inv,
    eigenmode_H,
    eigenmode_Hdag,
    inner_eta,
)

__version__ = "0.1.0"
