"""Shuttle-gate error model: tweezer geometry, wavefunction overlap, perturbed pulses.

Units are SI throughout with hbar kept explicit; trap depths are given as
frequencies (``V0 / h`` in Hz).  Noise widths are fractions: radial and
axial offsets relative to the zero-point lengths, the radial trap frequency
relative to its nominal value.

Also home to the back-of-envelope budget numbers (heating, dephasing time,
move budget).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.constants import atomic_mass, h as PLANCK, hbar
from scipy.interpolate import CubicSpline

from .gates import GateSpec, ShuttleStep, pulse_gate, shuttle_protocol

QUAD_TOL = 1e-10


@dataclass(frozen=True)
class TrapParams:
    """Gaussian tweezer.  Defaults: 87Sr in a 515 nm tweezer, 1.1 um waist, 200 kHz deep."""

    depth_hz: float = 200e3
    waist_um: float = 1.1
    wavelength_um: float = 0.515
    mass_amu: float = 87.0
    pulse_time_s: float = 5e-6

    def __post_init__(self):
        for name in ("depth_hz", "waist_um", "wavelength_um", "mass_amu", "pulse_time_s"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def mass(self) -> float:
        return self.mass_amu * atomic_mass

    @property
    def depth(self) -> float:
        return PLANCK * self.depth_hz

    @property
    def waist(self) -> float:
        return self.waist_um * 1e-6

    @property
    def rayleigh_length(self) -> float:
        return math.pi * self.waist**2 / (self.wavelength_um * 1e-6)

    @property
    def omega_r(self) -> float:
        return math.sqrt(4 * self.depth / (self.mass * self.waist**2))

    @property
    def omega_z(self) -> float:
        return math.sqrt(2 * self.depth / (self.mass * self.rayleigh_length**2))

    @property
    def r_zp(self) -> float:
        return math.sqrt(hbar / (2 * self.mass * self.omega_r))

    @property
    def z_zp(self) -> float:
        return math.sqrt(hbar / (2 * self.mass * self.omega_z))


@dataclass(frozen=True)
class NoiseDistribution:
    """Independent Gaussian widths: radial/axial offsets and relative radial frequency."""

    delta_wr: float = 0.0
    delta_r: float = 0.0
    delta_z: float = 0.0

    def __post_init__(self):
        if min(self.delta_wr, self.delta_r, self.delta_z) < 0:
            raise ValueError("noise widths must be non-negative")

    @property
    def is_zero(self) -> bool:
        return self.delta_wr == 0 and self.delta_r == 0 and self.delta_z == 0

    def draw(self, rng: np.random.Generator, size: int | None = None) -> "NoiseSample":
        z = rng.standard_normal((3,) if size is None else (3, size))
        return NoiseSample(self.delta_r * z[0], self.delta_z * z[1], self.delta_wr * z[2])


@dataclass(frozen=True)
class NoiseSample:
    """One draw: offsets in units of the zero-point lengths, ``dwr`` relative to omega_r."""

    dr: float | np.ndarray = 0.0
    dz: float | np.ndarray = 0.0
    dwr: float | np.ndarray = 0.0

    def depth_shift_hz(self, trap: TrapParams):
        # V0 = m w_r^2 w0^2 / 4 at a fixed waist
        return trap.depth_hz * ((1.0 + self.dwr) ** 2 - 1.0)


# ---------------------------------------------------------------------------
# overlap
# ---------------------------------------------------------------------------

def _gauss(x, shift=0.0):
    # ground state with unit zero-point length: |psi|^2 has variance 1
    return np.exp(-((x + shift) ** 2) / 4.0) / (2 * math.pi) ** 0.25


@lru_cache(maxsize=4096)
def overlap_1d(offset: float) -> float:
    """Overlap of two unit-zero-point ground states displaced by ``offset``."""
    val, err = integrate.quad(lambda x: _gauss(x) * _gauss(x, offset), -np.inf, np.inf, epsabs=QUAD_TOL, epsrel=QUAD_TOL)
    if err > 1e-8:
        raise RuntimeError(f"overlap quadrature did not converge (error {err:.2g})")
    return val


def overlap_closed_form(dr: float, dz: float) -> float:
    return math.exp(-(dr**2) / 8.0 - dz**2 / 8.0)


@lru_cache(maxsize=1)
def _radial_norm(aspect: float) -> float:
    return _radial_raw(0.0, 0.0, aspect)


def _radial_raw(dr: float, dz: float, aspect: float) -> float:
    # literal 2 pi r measure; lengths in units of r_zp, axial width scaled by aspect = z_zp / r_zp
    def integrand(z, r):
        a = math.exp(-(r**2) / 4.0 - (z / aspect) ** 2 / 4.0)
        b = math.exp(-((r + dr) ** 2) / 4.0 - ((z + dz * aspect) / aspect) ** 2 / 4.0)
        return 2 * math.pi * r * a * b

    zmax = 20.0 * aspect
    val, err = integrate.dblquad(integrand, 0.0, 20.0, -zmax, zmax, epsabs=QUAD_TOL, epsrel=QUAD_TOL)
    return val


def overlap_factor(dr: float, dz: float, trap: TrapParams | None = None, measure: str = "cartesian") -> float:
    """Overlap ``f`` of storage and transport ground states for offsets in zero-point units.

    ``measure="cartesian"`` integrates the full 3D Gaussians (separable, one
    quadrature per axis).  ``measure="radial"`` uses a ``2 pi r dr dz``
    measure over a radial shift, normalised so that ``f(0, 0) = 1``.
    """
    if measure == "cartesian":
        return overlap_1d(float(dr)) * overlap_1d(float(dz))
    if measure == "radial":
        trap = trap or TrapParams()
        aspect = trap.z_zp / trap.r_zp
        return _radial_raw(float(dr), float(dz), aspect) / _radial_norm(aspect)
    raise ValueError(f"unknown overlap measure {measure!r}")


@lru_cache(maxsize=1)
def _overlap_table() -> CubicSpline:
    xs = np.linspace(0.0, 12.0, 481)
    ys = np.array([overlap_1d(float(x)) for x in xs])
    return CubicSpline(xs, ys, bc_type=((1, 0.0), "not-a-knot"))


def overlap_fast(dr, dz):
    """Tabulated Cartesian overlap for Monte Carlo (spline of the quadrature values)."""
    spline = _overlap_table()
    r = np.minimum(np.abs(dr), 12.0)
    z = np.minimum(np.abs(dz), 12.0)
    return spline(r) * spline(z)


# ---------------------------------------------------------------------------
# pulses
# ---------------------------------------------------------------------------

def perturbed_pulse(theta, sample: NoiseSample, trap: TrapParams, f: float | None = None) -> tuple[float, float, float]:
    """Pulse angles after the overlap loss and the trap-depth detuning.

    Rabi and detuning angles scale with the overlap ``f``; the depth mismatch
    adds ``dV0 * tau`` to the Z angle.
    """
    t1, t2, t3 = theta
    if f is None:
        f = float(overlap_fast(sample.dr, sample.dz))
    extra = 2 * math.pi * sample.depth_shift_hz(trap) * trap.pulse_time_s
    return (f * t1, t2, f * t3 + extra)


def noisy_shuttle_gates(
    theta, i: int, j: int, transport: int, trap: TrapParams, noise: NoiseDistribution, rng: np.random.Generator
) -> list[GateSpec]:
    """Pulse gates of one shuttle with an independent draw per pulse."""
    steps = [s for s in shuttle_protocol(theta, i, j) if s.action == "pulse"]
    draw = noise.draw(rng, size=len(steps))
    f = overlap_fast(draw.dr, draw.dz)
    out = []
    for n, st in enumerate(steps):
        sample = NoiseSample(float(draw.dr[n]), float(draw.dz[n]), float(draw.dwr[n]))
        out.append(pulse_gate(st.site, perturbed_pulse(st.theta, sample, trap, float(f[n])), transport))
    return out


def ideal_shuttle_pulses(steps: list[ShuttleStep], transport: int) -> list[GateSpec]:
    return [pulse_gate(s.site, s.theta, transport) for s in steps if s.action == "pulse"]


# ---------------------------------------------------------------------------
# budgets
# ---------------------------------------------------------------------------

def rydberg_heating_probability(omega: float, t_gate: float) -> float:
    """Chance of leaving the motional ground state during a Rydberg gate, ``(omega t)^2 / 4`` capped at 1."""
    if omega < 0 or t_gate < 0:
        raise ValueError("frequency and gate time must be non-negative")
    return min((omega * t_gate) ** 2 / 4.0, 1.0)


def dephasing_time_estimate(depth_hz: float, relative_sigma: float) -> float:
    """``T2* = 1 / (2 pi depth sigma)`` in seconds; infinite when ``sigma`` is zero."""
    if depth_hz < 0 or relative_sigma < 0:
        raise ValueError("depth and spread must be non-negative")
    sigma = depth_hz * relative_sigma
    return math.inf if sigma == 0 else 1.0 / (2 * math.pi * sigma)


def motion_budget(move_time: float, n_ops: int, t2: float | None = None) -> tuple[float, float | None]:
    """Total move time and, if ``t2`` is given, how many moves fit in it."""
    if move_time < 0 or n_ops < 0:
        raise ValueError("move time and operation count must be non-negative")
    total = move_time * n_ops
    fits = None
    if t2 is not None:
        fits = math.inf if move_time == 0 else t2 / move_time
    return total, fits
