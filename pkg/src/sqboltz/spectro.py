"""Radiative rates of a quantized molecular vibration mode.

Dipole-approximation rates between the levels E_n = hbar*omega*(n + 1/2)
of a harmonic internal mode, in Gaussian-CGS units:

    spontaneous (downward, 1 -> 0):   A = 4 omega^3 d^2 / (3 hbar c^3)
    equilibrium (stimulated, either): k = A / (exp(hbar*omega/kB*T) - 1)

i.e. k equals A times the Planck photon occupation at the bath
temperature, which is exactly the Einstein relation obtained from the
stationarity of the level populations:

    k n0 = (k + A) n1   =>   n1/n0 = k/(k+A) = exp(-hbar*omega/kB*T).

The multi-level generator extends the 1<->0 rates up the harmonic ladder
using the standard dipole matrix elements |d_{n,n-1}|^2 = n d^2, so only
Delta n = +-1 transitions appear:

    rate(n -> n-1) = n (A + k)        (spontaneous + stimulated emission)
    rate(n -> n+1) = (n+1) k          (absorption from the bath)

The generator kappa is column-stochastic in the Markov sense: populations
evolve as df/dt = kappa @ f, every column sums to zero, off-diagonal
entries are non-negative, and the full-mode stationary vector is the
Boltzmann distribution at the bath temperature.

Everything here is a pure function of its arguments; temperatures are in
kelvin and rates in 1/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import C_LIGHT, HBAR, K_BOLTZMANN

RADIATION_MODES = ("off", "spontaneous-only", "full")


@dataclass(frozen=True)
class OscillatorSpec:
    """One internal vibration mode of a molecule.

    omega: angular frequency [rad/s]; dipole: 1->0 transition dipole
    moment [esu cm]; n_levels: number of retained levels (>= 2).
    """

    omega: float
    dipole: float
    n_levels: int = 2

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if self.dipole < 0:
            raise ValueError(f"dipole must be non-negative, got {self.dipole}")
        if self.n_levels < 2:
            raise ValueError(f"n_levels must be >= 2, got {self.n_levels}")

    @property
    def quantum(self) -> float:
        """Energy of one vibrational quantum, hbar*omega [erg]."""
        return HBAR * self.omega


@dataclass(frozen=True)
class RateSet:
    """All radiative quantities of one mode at one temperature."""

    boltzmann: float        # population ratio n1/n0 (dimensionless)
    k_eq: float             # equilibrium (stimulated) rate [1/s]
    a_spont: float          # spontaneous rate [1/s]
    kappa: np.ndarray = field(repr=False)   # level-transition generator [1/s]

    def __post_init__(self):
        if min(self.boltzmann, self.k_eq, self.a_spont) < 0:
            raise ValueError("rates must be non-negative")
        kappa = np.asarray(self.kappa, dtype=float)
        if kappa.ndim != 2 or kappa.shape[0] != kappa.shape[1]:
            raise ValueError("kappa must be a square matrix")
        col = kappa.sum(axis=0)
        if np.max(np.abs(col)) > 1e-9 * max(1.0, np.max(np.abs(kappa))):
            raise ValueError("kappa columns must sum to zero")
        off = kappa - np.diag(np.diag(kappa))
        if off.min() < 0:
            raise ValueError("off-diagonal kappa entries must be >= 0")


def boltzmann_ratio(e_j: float, e_k: float, t: float) -> float:
    """Equilibrium population ratio n_j/n_k = exp(-(E_j - E_k)/kB*T).

    Energies in erg, temperature in kelvin (t > 0).
    """
    if t <= 0:
        raise ValueError(f"temperature must be positive, got {t}")
    return math.exp(-(e_j - e_k) / (K_BOLTZMANN * t))


def spontaneous_rate(spec: OscillatorSpec) -> float:
    """Spontaneous 1 -> 0 emission rate A = 4 omega^3 d^2 / (3 hbar c^3)."""
    return 4.0 * spec.omega**3 * spec.dipole**2 / (3.0 * HBAR * C_LIGHT**3)


def equilibrium_rate(spec: OscillatorSpec, t: float) -> float:
    """Equilibrium (stimulated) rate k = A / (exp(hbar*omega/kB*T) - 1)."""
    if t <= 0:
        raise ValueError(f"temperature must be positive, got {t}")
    x = HBAR * spec.omega / (K_BOLTZMANN * t)
    if x > 700.0:       # Planck occupation underflows
        return 0.0
    return spontaneous_rate(spec) / math.expm1(x)


def ladder_generator(a_spont: float, k_eq: float, n_levels: int,
                     mode: str = "full") -> np.ndarray:
    """Harmonic-ladder population generator from bare 1<->0 rates.

    Unit-agnostic core shared with the reduced-unit simulation engine:
    pass physical rates for physical output, reduced rates for reduced
    output.  Convention df/dt = kappa @ f; columns sum to zero.
    """
    if mode not in RADIATION_MODES:
        raise ValueError(f"unknown radiation mode {mode!r}, expected one of {RADIATION_MODES}")
    if n_levels < 2:
        raise ValueError(f"n_levels must be >= 2, got {n_levels}")
    kappa = np.zeros((n_levels, n_levels))
    if mode == "off":
        return kappa
    k_up = 0.0 if mode == "spontaneous-only" else k_eq
    k_down = a_spont if mode == "spontaneous-only" else a_spont + k_eq
    for n in range(1, n_levels):
        kappa[n - 1, n] = n * k_down            # n -> n-1
    for n in range(n_levels - 1):
        kappa[n + 1, n] = (n + 1) * k_up        # n -> n+1
    kappa -= np.diag(kappa.sum(axis=0))
    return kappa


def relaxation_generator(spec: OscillatorSpec, t: float,
                         mode: str = "full") -> np.ndarray:
    """Level-transition generator kappa [1/s] for spec at temperature t.

    mode selects which radiative channels act: "off" (zero matrix),
    "spontaneous-only" (downward A only) or "full" (spontaneous plus
    equilibrium up/down transitions balanced at temperature t).
    """
    if mode == "off":
        return np.zeros((spec.n_levels, spec.n_levels))
    a = spontaneous_rate(spec)
    k = equilibrium_rate(spec, t) if mode == "full" else 0.0
    return ladder_generator(a, k, spec.n_levels, mode)


def rate_set(spec: OscillatorSpec, t: float, mode: str = "full") -> RateSet:
    """Bundle boltzmann ratio, k, A and kappa for one mode/temperature."""
    return RateSet(
        boltzmann=boltzmann_ratio(spec.quantum, 0.0, t),
        k_eq=equilibrium_rate(spec, t),
        a_spont=spontaneous_rate(spec),
        kappa=relaxation_generator(spec, t, mode),
    )


def stationary_distribution(kappa: np.ndarray) -> np.ndarray:
    """Normalized null vector of the generator (kappa @ f = 0, sum f = 1)."""
    kappa = np.asarray(kappa, dtype=float)
    n = kappa.shape[0]
    # append the normalization row and solve the overdetermined system
    a = np.vstack([kappa, np.ones(n)])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    f, *_ = np.linalg.lstsq(a, b, rcond=None)
    return f
