"""Named state generators shared by the CLI and the verification suites."""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError
from .grid import Field, GridSpec, gaussian, plane_wave
from .kg_hilbert import KGState, negative_frequency, positive_frequency
from .observables import CoherentSpec, coherent_state, localized_state


def packet_width(spec: GridSpec) -> float:
    """
    Default packet width, three lattice spacings (capped at L/16).

    Narrow enough that D^{±1/4} smearing, which decays like e^{-μ|x|} times
    e^{μ²σ²/2}, stays negligible at the box edge; wide enough to be
    band-limited on the lattice.
    """
    return min(3 * spec.dx, spec.box_len / 16)


def random_packet(spec: GridSpec, rng: np.random.Generator, count: int = 3) -> Field:
    """
    Sum of ``count`` Gaussian packets with random complex weights, centres within
    ±L/16 of the origin and momenta up to an eighth of the lattice cutoff.
    Band-limited and negligible at the box boundary.
    """
    width = packet_width(spec)
    k_cut = np.pi / spec.dx
    total = Field.zeros(spec)
    for _ in range(count):
        center = rng.uniform(-1, 1, spec.d) * spec.box_len / 16
        momentum = spec.hbar * rng.uniform(-1, 1, spec.d) * min(k_cut / 8, 4 / width)
        weight = complex(rng.standard_normal(), rng.standard_normal())
        total = total + weight * gaussian(spec, center, width, momentum)
    return total


def random_packet_state(spec: GridSpec, rng: np.random.Generator, charge: int | None = None) -> KGState:
    """Random boundary-avoiding Cauchy data; ``charge`` = ±1 restricts to one frequency sign."""
    if charge == 1:
        return positive_frequency(random_packet(spec, rng))
    if charge == -1:
        return negative_frequency(random_packet(spec, rng))
    return KGState(random_packet(spec, rng), random_packet(spec, rng))


GENERATORS = ("gaussian", "plane-wave", "localized", "coherent")


def build_state(spec: GridSpec, name: str, *, mode=1, eps: int = 1, z=0.0, k_osc: float | None = None) -> KGState:
    """Construct one of the built-in ``GENERATORS`` as a Klein-Gordon state."""
    if name == "gaussian":
        g = gaussian(spec, width=packet_width(spec))
        return positive_frequency(g) if eps == 1 else negative_frequency(g)
    if name == "plane-wave":
        mode = np.broadcast_to(np.atleast_1d(mode), (spec.d,))
        return positive_frequency(plane_wave(spec, mode))
    if name == "localized":
        return localized_state(spec, eps, (spec.n // 2,) * spec.d)
    if name == "coherent":
        if k_osc is None:
            # width L/24 leaves room for |z| up to 2 inside the box
            k_osc = spec.hbar / (spec.box_len / 24) ** 2
        zs = np.broadcast_to(np.atleast_1d(z), (spec.d,))
        return coherent_state(spec, CoherentSpec(tuple(zs), eps, k_osc))
    raise ConfigurationError(f"unknown generator {name!r}; choose from {', '.join(GENERATORS)}")
