"""
Dense-matrix oracle for tiny one-dimensional grids.

D is assembled from the closed-form periodic spectral second-derivative
matrix (no FFT anywhere), and every operator function is obtained from a
full eigendecomposition or from explicit biorthonormal eigen-sums. The
results are compared against the FFT-based implementations; the two routes
share nothing but the grid parameters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

from .errors import ConfigurationError, KGError
from .grid import Field, GridSpec, apply_D_power
from .kg_hilbert import KGState
from .observables import position_apply
from .symmetry import SymmetryReport, apply_C2, apply_P2, apply_T2, grid_summary
from .foldy import apply_H_prime
from .two_component import TwoCompState, apply_eta_plus, apply_H, apply_Hdag, apply_rho, apply_rho_inv

MAX_N = 16


@dataclass
class DenseOperator:
    """Explicit matrix; ``antilinear`` operators act as ``entries @ conj(v)``."""

    name: str
    entries: np.ndarray
    antilinear: bool = False
    hermitian: bool | None = None
    positive: bool | None = None

    def __post_init__(self):
        if not np.all(np.isfinite(self.entries)):
            raise KGError(f"dense operator {self.name} has non-finite entries")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.entries @ (v.conj() if self.antilinear else v)


def periodic_second_derivative(n: int, box_len: float) -> np.ndarray:
    """Closed-form Fourier spectral d²/dx² on n periodic points (n even)."""
    h = 2 * np.pi / n
    j = np.arange(1, n)
    col = np.r_[-np.pi**2 / (3 * h**2) - 1 / 6, -0.5 * (-1.0) ** j / np.sin(j * h / 2) ** 2]
    return (2 * np.pi / box_len) ** 2 * toeplitz(col)


def dense_D(spec: GridSpec) -> np.ndarray:
    return spec.mu**2 * np.eye(spec.n) - periodic_second_derivative(spec.n, spec.box_len)


def hermitian_function(a: np.ndarray, fn) -> np.ndarray:
    """fn(a) for Hermitian a by eigendecomposition."""
    a = (a + a.conj().T) / 2
    w, v = np.linalg.eigh(a)
    return (v * fn(w)) @ v.conj().T


def _check_guard(spec: GridSpec):
    if spec.d != 1 or spec.n > MAX_N:
        raise ConfigurationError(f"dense oracle needs d = 1 and n <= {MAX_N}, got d={spec.d}, n={spec.n}")


def eigen_system(spec: GridSpec, basis: np.ndarray | None = None):
    """
    Biorthonormal eigenvectors (Ψ_{ε,j}, Φ_{ε,j}) built on unit eigenvectors of dense D.

    Returns (energies, psi, phi) with columns ordered (ε=+, all j) then (ε=-, all j).
    ``basis`` may supply an alternative orthonormal eigenbasis of D (columns).
    """
    D = dense_D(spec)
    w2, vecs = np.linalg.eigh(D)
    if basis is not None:
        vecs = basis
        w2 = np.real(np.einsum("ij,ik,kj->j", vecs.conj(), D, vecs))
    omega = np.sqrt(w2)
    r = np.sqrt(spec.lam * omega)
    energies, psi, phi = [], [], []
    for eps in (1, -1):
        psi.append(0.5 * np.vstack([(1 / r + eps * r) * vecs, (1 / r - eps * r) * vecs]))
        phi.append(0.5 * np.vstack([(r + eps / r) * vecs, (r - eps / r) * vecs]))
        energies.append(eps * spec.hbar * omega)
    return np.concatenate(energies), np.hstack(psi), np.hstack(phi)


def build_all(spec: GridSpec) -> dict[str, DenseOperator]:
    """Assemble the dense catalogue from eigen-sums and eigendecompositions only."""
    _check_guard(spec)
    n = spec.n
    D = dense_D(spec)
    E, Psi, Phi = eigen_system(spec)
    sign = np.sign(E)

    H = (Psi * E) @ Phi.conj().T
    Hdag = (Phi * E) @ Psi.conj().T
    eta = Phi @ Phi.conj().T
    rho = hermitian_function(eta, np.sqrt)
    rho_inv = hermitian_function(eta, lambda w: 1 / np.sqrt(w))
    P = (Phi * sign) @ Phi.conj().T
    T = (Phi * sign) @ Phi.T
    C = (Psi * sign) @ Phi.conj().T
    H2 = H @ H
    C_from_H = H @ hermitian_function(H2, lambda w: 1 / np.sqrt(w))
    H_prime = rho @ H @ rho_inv

    # x₀ = 𝒰⁻¹ (x ⊗ σ₀) 𝒰 with 𝒰 = ρ U_{t₀} acting on (ψ, ψ̇)
    lam, mu = spec.lam, spec.mu
    I = np.eye(n)
    U_t0 = np.block([[I, 1j * lam * I], [I, -1j * lam * I]]) / (2 * np.sqrt(lam * mu))
    U = rho @ U_t0
    X = np.kron(np.eye(2), np.diag(spec.x1d))
    x0 = np.linalg.solve(U, X @ U)

    ops = {
        "D": DenseOperator("D", D, hermitian=True, positive=True),
        "D_half": DenseOperator("D_half", hermitian_function(D, np.sqrt), hermitian=True, positive=True),
        "D_quarter": DenseOperator("D_quarter", hermitian_function(D, lambda w: w**0.25), hermitian=True),
        "D_minus_half": DenseOperator("D_minus_half", hermitian_function(D, lambda w: w**-0.5), hermitian=True),
        "H": DenseOperator("H", H),
        "H_dag": DenseOperator("H_dag", Hdag),
        "eta_plus": DenseOperator("eta_plus", eta, hermitian=True, positive=True),
        "rho": DenseOperator("rho", rho, hermitian=True, positive=True),
        "rho_inv": DenseOperator("rho_inv", rho_inv, hermitian=True, positive=True),
        "P2": DenseOperator("P2", P, hermitian=True),
        "T2": DenseOperator("T2", T, antilinear=True),
        "C2": DenseOperator("C2", C),
        "C2_from_H": DenseOperator("C2_from_H", C_from_H),
        "H_prime": DenseOperator("H_prime", H_prime, hermitian=True),
        "x0": DenseOperator("x0", x0),
    }
    return ops


def _two(spec: GridSpec, fn):
    return lambda v: fn(TwoCompState.from_flat(spec, v)).flat()


def _one(spec: GridSpec, fn):
    return lambda v: fn(Field(spec, v)).values.ravel()


def _kg(spec: GridSpec, fn):
    def run(v):
        s = KGState(Field(spec, v[: spec.n]), Field(spec, v[spec.n :]))
        return fn(s).flat()

    return run


def spectral_counterparts(spec: GridSpec) -> dict:
    """FFT-based implementations keyed like the dense catalogue, acting on flat vectors."""
    return {
        "D": _one(spec, lambda f: apply_D_power(f, 1.0)),
        "D_half": _one(spec, lambda f: apply_D_power(f, 0.5)),
        "D_quarter": _one(spec, lambda f: apply_D_power(f, 0.25)),
        "D_minus_half": _one(spec, lambda f: apply_D_power(f, -0.5)),
        "H": _two(spec, apply_H),
        "H_dag": _two(spec, apply_Hdag),
        "eta_plus": _two(spec, apply_eta_plus),
        "rho": _two(spec, apply_rho),
        "rho_inv": _two(spec, apply_rho_inv),
        "P2": _two(spec, apply_P2),
        "T2": _two(spec, apply_T2),
        "C2": _two(spec, apply_C2),
        "C2_from_H": _two(spec, apply_C2),
        "H_prime": _two(spec, apply_H_prime),
        "x0": _kg(spec, lambda s: position_apply(s, 0)),
    }


def compare(
    op_name: str,
    ensemble_size: int = 32,
    spec: GridSpec | None = None,
    seed: int = 0,
    catalogue: dict[str, DenseOperator] | None = None,
) -> SymmetryReport:
    """Max relative residual between dense and spectral application over random vectors."""
    spec = spec or GridSpec(n=8, box_len=2 * np.pi)
    catalogue = catalogue or build_all(spec)
    spectral = spectral_counterparts(spec)
    if op_name not in catalogue or op_name not in spectral:
        raise KeyError(f"unknown operator {op_name!r}; known: {sorted(catalogue)}")
    dense = catalogue[op_name]
    fn = spectral[op_name]
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(ensemble_size):
        v = rng.standard_normal(dense.dim) + 1j * rng.standard_normal(dense.dim)
        ref = dense.apply(v)
        got = fn(v)
        worst = max(worst, float(np.linalg.norm(got - ref) / np.linalg.norm(ref)))
    return SymmetryReport(f"dense_{op_name}", worst, ensemble_size, seed, grid_summary(spec))
