"""
Periodic lattice and spectral calculus for D = -∇² + μ².

The continuum space L²(ℝᵈ) is replaced by complex functions on a periodic
box [-L/2, L/2)ᵈ sampled at n cell-centred points per axis. D is diagonal in
the discrete Fourier basis, so every real power and every trigonometric
function of √D is applied exactly, mode by mode.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from functools import cached_property
from pathlib import Path
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from .errors import ConfigurationError, DimensionError

ComplexArray = NDArray[np.complexfloating]

CONFIG_KEYS = ("d", "n", "box_len", "mu", "lambda", "t0", "hbar")


@dataclass(frozen=True)
class GridSpec:
    """
    Physical and discretization parameters.

    Attributes:
        d: Spatial dimension (1, 2 or 3).
        n: Grid points per axis, a power of two.
        box_len: Box length L per axis.
        mu: Mass parameter m/ħ (inverse length).
        lam: Two-component parameter λ (length, positive). Defaults to 1/μ.
        t0: Reference time at which Cauchy data are given.
        hbar: Reduced Planck constant.
    """

    d: int = 1
    n: int = 64
    box_len: float = 80.0
    mu: float = 1.0
    lam: float | None = None
    t0: float = 0.0
    hbar: float = 1.0

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ConfigurationError(f"d must be 1, 2 or 3, got {self.d}")
        if self.n < 2 or self.n & (self.n - 1):
            raise ConfigurationError(f"n must be a power of two >= 2, got {self.n}")
        if not self.box_len > 0:
            raise ConfigurationError(f"box_len must be positive, got {self.box_len}")
        if not self.mu > 0:
            raise ConfigurationError(f"mu must be positive, got {self.mu}")
        if not self.hbar > 0:
            raise ConfigurationError(f"hbar must be positive, got {self.hbar}")
        if self.lam is None:
            object.__setattr__(self, "lam", 1.0 / self.mu)
        # X = √λ D^{1/4} must be real for η₊ to be positive-definite
        if not (np.isfinite(self.lam) and self.lam > 0):
            raise ConfigurationError(f"lambda must be finite and positive, got {self.lam}")

    # -- construction -----------------------------------------------------

    @classmethod
    def from_mapping(cls, values: dict) -> GridSpec:
        unknown = set(values) - set(CONFIG_KEYS)
        if unknown:
            raise ConfigurationError(f"unknown grid keys: {sorted(unknown)}")
        kwargs = {}
        try:
            for key, raw in values.items():
                if key in ("d", "n"):
                    kwargs[key] = int(raw)
                elif key == "lambda":
                    kwargs["lam"] = float(raw)
                else:
                    kwargs[key] = float(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(str(exc)) from exc
        return cls(**kwargs)

    @classmethod
    def from_config(cls, text: str) -> GridSpec:
        """Parse a plain ``key=value`` config; blank lines and ``#`` comments are ignored."""
        return cls.from_mapping(parse_key_values(text))

    @classmethod
    def from_file(cls, path: str | Path) -> GridSpec:
        return cls.from_config(Path(path).read_text())

    def to_mapping(self) -> dict:
        out = {}
        for f in fields(self):
            key = "lambda" if f.name == "lam" else f.name
            out[key] = getattr(self, f.name)
        return out

    def to_config(self) -> str:
        return "".join(f"{k}={v!r}\n" for k, v in self.to_mapping().items())

    def with_(self, **changes) -> GridSpec:
        if "lambda" in changes:
            changes["lam"] = changes.pop("lambda")
        return replace(self, **changes)

    # -- lattice geometry -------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    @property
    def dx(self) -> float:
        return self.box_len / self.n

    @property
    def cell_volume(self) -> float:
        return self.dx**self.d

    @cached_property
    def k1d(self) -> NDArray[np.floating]:
        """Wavenumbers 2πm/L in FFT order, m = 0..n/2-1, -n/2..-1."""
        k = 2 * np.pi * np.fft.fftfreq(self.n, d=self.dx)
        k.flags.writeable = False
        return k

    @cached_property
    def x1d(self) -> NDArray[np.floating]:
        # cell centres: symmetric about 0, so Σ x = 0 exactly
        x = (np.arange(self.n) + 0.5) * self.dx - self.box_len / 2
        x.flags.writeable = False
        return x

    def _along(self, arr: np.ndarray, axis: int) -> np.ndarray:
        if not 0 <= axis < self.d:
            raise DimensionError(f"axis {axis} out of range for d={self.d}")
        shape = [1] * self.d
        shape[axis] = self.n
        return arr.reshape(shape)

    def k_axis(self, axis: int) -> np.ndarray:
        return self._along(self.k1d, axis)

    def p_axis(self, axis: int) -> np.ndarray:
        """Momentum multiplier ħk along one axis; the Nyquist mode is zeroed so p stays real and Hermitian."""
        k = self.k1d.copy()
        if self.n > 1:
            k[self.n // 2] = 0.0
        return self.hbar * self._along(k, axis)

    def x_axis(self, axis: int) -> np.ndarray:
        return self._along(self.x1d, axis)

    @cached_property
    def ksq(self) -> NDArray[np.floating]:
        total = np.zeros(self.shape)
        for axis in range(self.d):
            total = total + self.k_axis(axis) ** 2
        total.flags.writeable = False
        return total

    @cached_property
    def omega(self) -> NDArray[np.floating]:
        """ω_k = √(k·k + μ²) on the full mode grid."""
        w = np.sqrt(self.ksq + self.mu**2)
        w.flags.writeable = False
        return w

    def site_index(self, site) -> tuple[int, ...]:
        idx = tuple(int(i) for i in np.atleast_1d(site))
        if len(idx) != self.d or any(i != j for i, j in zip(idx, np.atleast_1d(site))):
            raise DimensionError(f"site {site!r} is not a lattice point of a d={self.d} grid")
        if any(not 0 <= i < self.n for i in idx):
            raise DimensionError(f"site {site!r} lies outside the lattice")
        return idx

    def coordinates(self, site) -> NDArray[np.floating]:
        return np.array([self.x1d[i] for i in self.site_index(site)])


def parse_key_values(text: str) -> dict[str, str]:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key] = value
    return out


@dataclass(frozen=True, eq=False)
class Field:
    """A complex grid function; an element of the discretized L²(ℝᵈ)."""

    spec: GridSpec
    values: ComplexArray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != self.spec.shape:
            raise DimensionError(f"values shape {values.shape} != grid shape {self.spec.shape}")
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, spec: GridSpec) -> Field:
        return cls(spec, np.zeros(spec.shape, dtype=complex))

    def _check(self, other: Field):
        if not isinstance(other, Field):
            return NotImplemented
        if other.spec != self.spec:
            raise DimensionError("fields live on different grids")

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Field(self.spec, self.values + other.values)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Field(self.spec, self.values - other.values)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return Field(self.spec, scalar * self.values)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Field(self.spec, self.values / scalar)

    def __neg__(self):
        return Field(self.spec, -self.values)

    def conj(self) -> Field:
        return Field(self.spec, self.values.conj())

    def norm(self) -> float:
        return float(np.sqrt(inner_l2(self, self).real))


def to_momentum(f: Field) -> Field:
    """Unitary discrete Fourier transform; coefficients are returned in FFT order."""
    return Field(f.spec, np.fft.fftn(f.values, norm="ortho"))


def from_momentum(f: Field) -> Field:
    return Field(f.spec, np.fft.ifftn(f.values, norm="ortho"))


def apply_multiplier(f: Field, multiplier) -> Field:
    """Multiply every Fourier coefficient of ``f`` by ``multiplier`` (broadcast over the mode grid)."""
    return Field(f.spec, np.fft.ifftn(multiplier * np.fft.fftn(f.values)))


def apply_D_power(f: Field, nu: float) -> Field:
    if nu == 0:
        return Field(f.spec, f.values.copy())
    return apply_multiplier(f, f.spec.omega ** (2 * nu))


def trig_multiplier(spec: GridSpec, tau: float, kind: Literal["cos", "sinc"]) -> np.ndarray:
    w = spec.omega
    if kind == "cos":
        return np.cos(tau * w)
    if kind == "sinc":
        return np.sin(tau * w) / w
    raise ValueError(f"kind must be 'cos' or 'sinc', got {kind!r}")


def apply_trig_of_sqrtD(f: Field, tau: float, kind: Literal["cos", "sinc"]) -> Field:
    """Apply cos(τ√D) or sin(τ√D)D^{-1/2}."""
    return apply_multiplier(f, trig_multiplier(f.spec, tau, kind))


def apply_momentum(f: Field, axis: int) -> Field:
    """-iħ ∂/∂x_axis, spectrally."""
    return apply_multiplier(f, f.spec.p_axis(axis))


def multiply_coordinate(f: Field, axis: int) -> Field:
    return Field(f.spec, f.spec.x_axis(axis) * f.values)


def inner_l2(f: Field, g: Field) -> complex:
    """Discrete L² inner product Δxᵈ Σ f* g, antilinear in the first slot."""
    if f.spec != g.spec:
        raise DimensionError("inner product of fields on different grids")
    return complex(f.spec.cell_volume * np.vdot(f.values, g.values))


def plane_wave(spec: GridSpec, mode) -> Field:
    """Normalized lattice plane wave L^{-d/2} exp(i k·x) for integer mode indices."""
    mode = np.atleast_1d(mode)
    if len(mode) != spec.d:
        raise DimensionError(f"mode needs {spec.d} indices")
    phase = np.zeros(spec.shape)
    for axis, m in enumerate(mode):
        phase = phase + (2 * np.pi * m / spec.box_len) * spec.x_axis(axis)
    return Field(spec, np.exp(1j * phase) / spec.box_len ** (spec.d / 2))


def mode_omega(spec: GridSpec, mode) -> float:
    k = 2 * np.pi * np.atleast_1d(mode) / spec.box_len
    return float(np.sqrt(np.dot(k, k) + spec.mu**2))


def lattice_delta(spec: GridSpec, site) -> Field:
    """Discrete Dirac delta: 1/Δxᵈ at ``site``, zero elsewhere."""
    values = np.zeros(spec.shape, dtype=complex)
    values[spec.site_index(site)] = 1.0 / spec.cell_volume
    return Field(spec, values)


def gaussian(spec: GridSpec, center=None, width: float = 1.0, momentum=None) -> Field:
    """
    L²-normalized Gaussian packet Π_j (πσ²)^{-1/4} exp(-(x_j-c_j)²/(2σ²) + i p_j x_j / ħ).
    """
    center = np.zeros(spec.d) if center is None else np.broadcast_to(np.asarray(center, float), (spec.d,))
    momentum = np.zeros(spec.d) if momentum is None else np.broadcast_to(np.asarray(momentum, float), (spec.d,))
    values = np.ones(spec.shape, dtype=complex)
    for axis in range(spec.d):
        x = spec.x_axis(axis)
        values = values * (np.pi * width**2) ** -0.25 * np.exp(
            -((x - center[axis]) ** 2) / (2 * width**2) + 1j * momentum[axis] * x / spec.hbar
        )
    return Field(spec, values)


def random_field(spec: GridSpec, rng: np.random.Generator) -> Field:
    return Field(spec, rng.standard_normal(spec.shape) + 1j * rng.standard_normal(spec.shape))
