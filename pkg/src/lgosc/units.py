"""Laboratory-unit parameters and the dimensionless form used internally.

All physics in this package is computed in dimensionless variables

    x_tilde = x / sigma0,     tau = omega * t,

where sigma0 = sqrt(hbar / (2 m omega)) is the ground-state width.  In these
variables the packet width is exactly 1, the density center follows
sqrt(2) * p_tilde * sin(tau), and everything is controlled by the three
numbers (p_tilde, tau1, dtau) with p_tilde = p0 / sqrt(m omega hbar).

Angular frequencies are rad/s throughout.  Note that quoted oscillator
"frequencies" for levitated-particle setups are sometimes labelled Hz while
actually meaning rad/s (a 2e6 value paired with a 3.14e-6 s period pins the
rad/s reading); this package never applies a 2*pi on input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError

# CODATA values, fixed so table regeneration is bit-stable across builds.
HBAR = 1.054571817e-34      # J s
AMU_KG = 1.66053906660e-27  # kg


def _require_finite(name, value):
    if not math.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class PhysicalParams:
    """Laboratory-frame oscillator description.

    mass_amu : particle mass in atomic mass units (> 0)
    omega    : angular trap frequency in rad/s (> 0)
    p0       : initial peak momentum in kg m/s (any sign)
    t1       : first measurement instant in s (>= 0)
    dt       : uniform inter-measurement interval in s (> 0)
    """

    mass_amu: float
    omega: float
    p0: float
    t1: float
    dt: float

    def __post_init__(self):
        for name in ("mass_amu", "omega", "p0", "t1", "dt"):
            _require_finite(name, getattr(self, name))
        if self.mass_amu <= 0.0:
            raise ParameterError(f"mass_amu must be > 0, got {self.mass_amu}")
        if self.omega <= 0.0:
            raise ParameterError(f"omega must be > 0, got {self.omega}")
        if self.dt <= 0.0:
            raise ParameterError(f"dt must be > 0, got {self.dt}")
        if self.t1 < 0.0:
            raise ParameterError(f"t1 must be >= 0, got {self.t1}")

    @property
    def mass_kg(self) -> float:
        return self.mass_amu * AMU_KG

    @property
    def sigma0(self) -> float:
        """Ground-state width sqrt(hbar / (2 m omega)) in meters."""
        return math.sqrt(HBAR / (2.0 * self.mass_kg * self.omega))

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega

    @property
    def v0(self) -> float:
        """Initial peak velocity p0 / m in m/s."""
        return self.p0 / self.mass_kg


@dataclass(frozen=True)
class DimensionlessParams:
    """The three numbers that fully determine the LGI quantity.

    p_tilde : peak momentum p0 / sqrt(m omega hbar)
    tau1    : first measurement phase omega * t1 (radians)
    dtau    : inter-measurement phase omega * dt (radians, > 0)
    """

    p_tilde: float
    tau1: float
    dtau: float

    def __post_init__(self):
        for name in ("p_tilde", "tau1", "dtau"):
            _require_finite(name, getattr(self, name))
        if self.dtau <= 0.0:
            raise ParameterError(f"dtau must be > 0, got {self.dtau}")

    def times(self) -> tuple[float, float, float, float]:
        """The four measurement phases tau_k = tau1 + (k-1) dtau."""
        return (self.tau1,
                self.tau1 + self.dtau,
                self.tau1 + 2.0 * self.dtau,
                self.tau1 + 3.0 * self.dtau)


def to_dimensionless(p: PhysicalParams) -> DimensionlessParams:
    """Map laboratory parameters to the internal dimensionless triple."""
    scale = math.sqrt(p.mass_kg * p.omega * HBAR)
    return DimensionlessParams(
        p_tilde=p.p0 / scale,
        tau1=p.omega * p.t1,
        dtau=p.omega * p.dt,
    )


def from_dimensionless(d: DimensionlessParams, mass_amu: float,
                       omega: float) -> PhysicalParams:
    """Reconstruct laboratory parameters realizing `d` at the given mass
    and frequency.  Round-trips with `to_dimensionless` to full precision."""
    mass_kg = mass_amu * AMU_KG
    scale = math.sqrt(mass_kg * omega * HBAR)
    return PhysicalParams(
        mass_amu=mass_amu,
        omega=omega,
        p0=d.p_tilde * scale,
        t1=d.tau1 / omega,
        dt=d.dtau / omega,
    )


def classical_amplitude(p: PhysicalParams) -> float:
    """Oscillation amplitude p0 / (m omega) of the packet center, meters."""
    return p.p0 / (p.mass_kg * p.omega)
