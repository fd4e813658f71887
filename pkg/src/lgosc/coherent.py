"""Closed form of the freely evolving coherent state.

Dimensionless convention (see units module): x measured in units of the
ground-state width sigma0, time as the oscillator phase tau = omega*t.
The initial packet

    psi(x, 0) = (2 pi)^(-1/4) exp(-x^2/4 + i (p/sqrt(2)) x)

evolves under the harmonic propagator into a rigidly oscillating Gaussian

    psi(x, tau) = (2 pi)^(-1/4) exp(-i tau/2)
                  * exp(-(x - c)^2/4 + i k x + i phi)

with center c(tau) = sqrt(2) p sin(tau), wavenumber
k(tau) = (p/sqrt(2)) cos(tau) and accumulated phase
phi(tau) = -(p^2/4) sin(2 tau).  The density is a unit-width Gaussian for
all times; the complex width parameter sigma_t = exp(i tau) keeps modulus
1 identically.  The derivation and its check against the dimensional
propagator form are spelled out in docs/analytic_forms.md.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

TWO_PI = 2.0 * math.pi
SQRT2 = math.sqrt(2.0)


def center(p_tilde: float, tau: float) -> float:
    """Density center sqrt(2) * p * sin(tau)."""
    return SQRT2 * p_tilde * math.sin(tau)


def wavenumber(p_tilde: float, tau: float) -> float:
    """Mean wavenumber (p/sqrt(2)) cos(tau) conjugate to x."""
    return p_tilde / SQRT2 * math.cos(tau)


@dataclass(frozen=True)
class EvolvedGaussian:
    """Coherent state parameters frozen at one instant."""

    p_tilde: float
    tau: float

    @property
    def center(self) -> float:
        return center(self.p_tilde, self.tau)

    @property
    def wavenumber(self) -> float:
        return wavenumber(self.p_tilde, self.tau)

    @property
    def phase(self) -> float:
        return -0.25 * self.p_tilde ** 2 * math.sin(2.0 * self.tau) \
            - 0.5 * self.tau

    @property
    def sigma_t(self) -> complex:
        """Complex width parameter exp(i tau); |sigma_t| == 1 for all tau."""
        return complex(math.cos(self.tau), math.sin(self.tau))


def psi(state: EvolvedGaussian, x) -> np.ndarray:
    """Wavefunction at dimensionless positions x."""
    x = np.asarray(x, dtype=float)
    gauss = -0.25 * (x - state.center) ** 2
    return (TWO_PI ** -0.25) * np.exp(
        gauss + 1j * (state.wavenumber * x + state.phase))


def density(state: EvolvedGaussian, x) -> np.ndarray:
    """|psi|^2: unit-width Gaussian centered on the classical trajectory."""
    x = np.asarray(x, dtype=float)
    return (TWO_PI ** -0.5) * np.exp(-0.5 * (x - state.center) ** 2)


def marginal_plus(p_tilde: float, tau: float) -> float:
    """Probability of finding the particle on x < 0 at phase tau.

    Closed form (1/2) erfc(p sin tau); the erf argument equals
    <x(tau)> / (sqrt(2) |sigma_t|) with |sigma_t| = sigma0.
    """
    return 0.5 * float(_sp.erfc(p_tilde * math.sin(tau)))


def marginal_minus(p_tilde: float, tau: float) -> float:
    """Probability of x > 0 at phase tau; complements marginal_plus."""
    return 0.5 * float(_sp.erfc(-p_tilde * math.sin(tau)))
