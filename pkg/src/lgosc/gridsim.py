"""Brute-force engine: wavefunction on a uniform grid, split-operator
spectral stepping in the harmonic potential, sharp or smeared projection.

Dimensionless Schroedinger equation (see units module):

    i d/dtau psi = (-d^2/dx^2 + x^2/4) psi,

whose classical flow is a rotation of period 2 pi.  A Strang step of size
dt realizes an exact metaplectic map whose rotation angle per step is
2 asin(dt/2) (conjugated by an O(dt^2) squeeze that commutes with
half-line measurements), so each evolution leg picks its step size as
dt = 2 sin(leg / (2 n)): the leg's total rotation is then exact and the
remaining dt-dependence of the measured probabilities is far below the
grid's own resolution error.

The engine exists to validate the closed-form engine and to run unsharp
measurements.  Its accuracy on sharply cut states is limited by the box:
a sharp cut produces density tails ~ 1/x^2 whose mass beyond the box
half-extent L (and beyond the momentum Nyquist K) is lost or aliased, so
half-line probabilities carry O(1/L + 1/K) errors whenever a measurement
cuts through the bulk of the packet.  This is a physics-of-discretization
limit, not a stepping error; see docs/analytic_forms.md.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import fft as _fft

from . import coherent
from .errors import BranchUnreachableError, ConfigurationError, ParameterError
from .lgi import PAIRS, LgiResult
from .measurement import JointTable, SmearedMeasurement
from .units import DimensionlessParams

TWO_PI = 2.0 * math.pi
DEFAULT_DTAU = TWO_PI / 4096.0
_MAX_POINTS = 1 << 22
#: documented desk-scale feasibility bound on the dimensionless momentum
P_TILDE_FEASIBLE = 50.0


def _next_pow2(n: int) -> int:
    return 1 << max(int(n) - 1, 1).bit_length()


@dataclass(frozen=True)
class GridSpec:
    """Spatial box [-half_extent, half_extent] with n_points samples."""

    half_extent: float
    n_points: int
    dtau_step: float = DEFAULT_DTAU

    def __post_init__(self):
        if self.half_extent <= 0 or not math.isfinite(self.half_extent):
            raise ConfigurationError("half_extent must be finite > 0")
        n = self.n_points
        if n < 16 or (n & (n - 1)) != 0:
            raise ConfigurationError("n_points must be a power of two >= 16")
        if n > _MAX_POINTS:
            raise ConfigurationError(
                f"n_points {n} exceeds the {_MAX_POINTS} cap")
        if not 0.0 < self.dtau_step <= 0.5:
            raise ConfigurationError("dtau_step must be in (0, 0.5]")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_extent / self.n_points

    @property
    def nyquist(self) -> float:
        return math.pi / self.dx

    def positions(self) -> np.ndarray:
        j = np.arange(self.n_points)
        return (j - self.n_points // 2) * self.dx

    def wavenumbers(self) -> np.ndarray:
        return TWO_PI * _fft.fftfreq(self.n_points, d=self.dx)

    def validate_for(self, p_tilde: float):
        """Check the orbit-coverage and Nyquist invariants for p_tilde."""
        orbit = math.sqrt(2.0) * abs(p_tilde)
        if self.half_extent < orbit + 12.0:
            raise ConfigurationError(
                f"half_extent {self.half_extent} < sqrt(2)|p|+12 = "
                f"{orbit + 12.0:.1f}")
        if self.nyquist < 2.0 * (abs(p_tilde) + 6.0):
            raise ConfigurationError(
                f"Nyquist {self.nyquist:.1f} < 2(|p|+6) = "
                f"{2.0 * (abs(p_tilde) + 6.0):.1f}")


def default_grid_spec(p_tilde: float,
                      dtau_step: float = DEFAULT_DTAU) -> GridSpec:
    """Smallest default box satisfying the coverage invariants."""
    if abs(p_tilde) > P_TILDE_FEASIBLE:
        need = _next_pow2(int(4.0 * (math.sqrt(2.0) * abs(p_tilde) + 12.0)
                              * (abs(p_tilde) + 6.0) / math.pi))
        raise ConfigurationError(
            f"|p_tilde| = {abs(p_tilde):.1f} beyond grid feasibility "
            f"{P_TILDE_FEASIBLE}; would need >= {need} points; "
            "use the closed-form engine (validated at reduced momentum)")
    half = math.sqrt(2.0) * abs(p_tilde) + 12.0
    n_min = 2.0 * half * 2.0 * (abs(p_tilde) + 6.0) / math.pi
    n = max(4096, _next_pow2(int(math.ceil(n_min))))
    return GridSpec(half_extent=half, n_points=n, dtau_step=dtau_step)


@dataclass
class GridState:
    """Complex amplitudes at spec.positions(), plus the current phase."""

    spec: GridSpec
    psi: np.ndarray
    tau: float

    def norm(self) -> float:
        return float(np.sum(np.abs(self.psi) ** 2) * self.spec.dx)

    def density(self) -> np.ndarray:
        return np.abs(self.psi) ** 2

    def normalized(self) -> "GridState":
        return GridState(spec=self.spec, psi=self.psi / math.sqrt(self.norm()),
                         tau=self.tau)

    def copy(self) -> "GridState":
        return GridState(spec=self.spec, psi=self.psi.copy(), tau=self.tau)


def init_coherent(spec: GridSpec, p_tilde: float) -> GridState:
    """Sample the initial coherent state on the grid, normalized discretely."""
    spec.validate_for(p_tilde)
    x = spec.positions()
    psi = np.asarray(coherent.psi(
        coherent.EvolvedGaussian(p_tilde=p_tilde, tau=0.0), x))
    nrm = math.sqrt(float(np.sum(np.abs(psi) ** 2) * spec.dx))
    if nrm == 0.0:
        raise ConfigurationError("initial state underflows on this grid")
    return GridState(spec=spec, psi=psi / nrm, tau=0.0)


def evolve(state: GridState, delta_tau: float) -> GridState:
    """Strang-split evolution by a phase interval delta_tau > 0."""
    if delta_tau <= 0.0:
        raise ParameterError("delta_tau must be > 0")
    spec = state.spec
    n_steps = max(1, int(math.ceil(delta_tau / spec.dtau_step)))
    # rotation-exact step size: n * 2 asin(dt/2) == delta_tau
    dt = 2.0 * math.sin(delta_tau / (2.0 * n_steps))
    x = spec.positions()
    k = spec.wavenumbers()
    half_potential = np.exp(-0.25j * (x * x) * (dt / 2.0))
    kinetic = np.exp(-1j * (k * k) * dt)
    psi = state.psi * half_potential
    full_potential = half_potential * half_potential
    for step in range(n_steps):
        psi = _fft.ifft(_fft.fft(psi) * kinetic)
        psi *= full_potential if step < n_steps - 1 else half_potential
    return GridState(spec=spec, psi=psi, tau=state.tau + delta_tau)


def project_grid(state: GridState, smearing: float,
                 outcome: int) -> tuple[float, GridState]:
    """Apply the (possibly smeared) sign measurement.

    Returns (pre-normalization probability, normalized post-measurement
    state).  smearing = 0 zeroes the complementary half line with the
    boundary sample weighted 1/2, which makes P+ + P- = 1 exact on-grid.
    """
    out = int(outcome)
    if out not in (1, -1):
        raise ParameterError(f"outcome must be +1 or -1, got {outcome!r}")
    meas = SmearedMeasurement(width=float(smearing))
    w = meas.weight(out, state.spec.positions())
    prob = float(np.sum(w * np.abs(state.psi) ** 2) * state.spec.dx)
    if prob < 1e-14:
        raise BranchUnreachableError(
            f"outcome {out:+d} probability {prob:.3e} below 1e-14")
    psi = state.psi * np.sqrt(w) / math.sqrt(prob)
    return prob, GridState(spec=state.spec, psi=psi, tau=state.tau)


def measure_weights(state: GridState, smearing: float) -> tuple[float, float]:
    """Outcome probabilities of the (smeared) sign readout, no projection."""
    meas = SmearedMeasurement(width=float(smearing))
    x = state.spec.positions()
    dens = np.abs(state.psi) ** 2
    p_plus = float(np.sum(meas.weight(+1, x) * dens) * state.spec.dx)
    p_minus = float(np.sum(meas.weight(-1, x) * dens) * state.spec.dx)
    return p_plus, p_minus


def mean_momentum(state: GridState) -> float:
    """Mean momentum in p_tilde units (p / sqrt(m omega hbar)).

    The spectral mean wavenumber <k> conjugate to x/sigma0 relates to the
    momentum scale by p_tilde = sqrt(2) <k>.
    """
    psi_k = _fft.fft(state.psi)
    k = state.spec.wavenumbers()
    weights = np.abs(psi_k) ** 2
    return math.sqrt(2.0) * float(np.sum(k * weights) / np.sum(weights))


def energy(state: GridState) -> float:
    """<H> = <k^2 + x^2/4> for conservation checks."""
    psi_k = _fft.fft(state.psi)
    wk = np.abs(psi_k) ** 2
    kin = float(np.sum(state.spec.wavenumbers() ** 2 * wk) / np.sum(wk))
    x = state.spec.positions()
    dens = np.abs(state.psi) ** 2
    pot = float(np.sum(0.25 * x * x * dens) * state.spec.dx)
    return kin + pot


def joint_table_grid(initial: GridState, tau_i: float, tau_j: float,
                     smearing: float = 0.0) -> JointTable:
    """Joint probabilities for one ordered pair on the grid engine.

    `initial` must hold the state at some tau <= tau_i (fresh ensemble);
    it is not mutated.
    """
    if not tau_j > tau_i:
        raise ParameterError("need tau_i < tau_j")
    if initial.tau > tau_i + 1e-12:
        raise ParameterError("initial grid state is later than tau_i")
    state = initial.copy()
    if tau_i - state.tau > 1e-12:
        state = evolve(state, tau_i - state.tau)
    state.tau = tau_i
    joints = {}
    for a in (+1, -1):
        try:
            prob_a, branch = project_grid(state, smearing, a)
        except BranchUnreachableError:
            joints[(a, +1)] = 0.0
            joints[(a, -1)] = 0.0
            continue
        branch = evolve(branch, tau_j - tau_i)
        meas = SmearedMeasurement(width=float(smearing))
        dens = branch.density()
        x = branch.spec.positions()
        p_b_plus = float(np.sum(meas.weight(+1, x) * dens) * branch.spec.dx)
        p_b_plus /= branch.norm()
        joints[(a, +1)] = prob_a * p_b_plus
        joints[(a, -1)] = prob_a * (1.0 - p_b_plus)
    return JointTable(p_pp=joints[(1, 1)], p_pm=joints[(1, -1)],
                      p_mp=joints[(-1, 1)], p_mm=joints[(-1, -1)])


def lgi_value_grid(params: DimensionlessParams, smearing: float = 0.0,
                   spec: GridSpec | None = None) -> LgiResult:
    """Same contract as lgi.lgi_value, computed entirely on the grid."""
    if spec is None:
        spec = default_grid_spec(params.p_tilde)
    else:
        spec.validate_for(params.p_tilde)
    times = params.times()
    # free states at the four instants, shared across pairs
    state0 = init_coherent(spec, params.p_tilde)
    if times[0] > 0.0:
        state0 = evolve(state0, times[0])
    free = {0: state0}
    for idx in range(1, 4):
        free[idx] = evolve(free[idx - 1], times[idx] - times[idx - 1])
    tables = []
    for i, j in PAIRS:
        tables.append(joint_table_grid(free[i], times[i], times[j],
                                       smearing=smearing))
    c12, c23, c34, c14 = (t.correlator for t in tables)
    return LgiResult(c12=c12, c23=c23, c34=c34, c14=c14,
                     c_value=c12 + c23 + c34 - c14,
                     params=params, joint_tables=tuple(tables))


def dump_density_csv(state: GridState, path: str):
    """Write x, |psi|^2 rows for external plotting."""
    x = state.spec.positions()
    dens = state.density()
    with open(path, "w", newline="") as fh:
        fh.write("x,density\n")
        for xi, di in zip(x, dens):
            fh.write(f"{xi:.12g},{di:.12g}\n")
