"""Single-qubit phase-covariant channel: NMAD emission plus NMRTN dephasing.

Absorption is switched off (gamma_1 = 0).  Decoherence functions come from
pole-free closed forms

    h(t) = exp(-l t / 2) [cosh(z t / 2) + (l / z) sinh(z t / 2)],  z^2 = l^2 - 2 kappa l
    q(t) = exp(-eta t) [cos(mu eta t) + sin(mu eta t) / mu],      mu^2 = (2 nu / eta)^2 - 1

with lambda_z = h^4, G = lambda_z - 1 and lambda_x = h^2 q^2.  Both square
roots may be imaginary; everything is evaluated in real arithmetic through
the even functions cosh(sqrt(u)) and sinh(sqrt(u))/sqrt(u) of u = z^2 t^2 / 4.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .quantum_core import InvalidArgument, bloch_vector, check_density_matrix

SERIES_CUTOFF = 1e-8  # |u| below which the Taylor series replaces cosh/sinhc


class RatePole(ArithmeticError):
    """A time-dependent rate is evaluated at (or numerically on) one of its poles."""


class Regime(str, enum.Enum):
    MARKOVIAN = "markovian"
    NON_MARKOVIAN = "non-markovian"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class PhaseCovariantParams:
    kappa: float = 1.0
    l: float = 0.01
    nu: float = 1.0
    eta: float = 0.01
    gamma1_zero: bool = True

    def __post_init__(self):
        for name in ("kappa", "l", "nu", "eta"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise InvalidArgument(f"{name} must be finite and non-negative, got {v}")
        if self.l <= 0 or self.eta <= 0:
            raise InvalidArgument("spectral width l and bandwidth eta must be positive")
        if not self.gamma1_zero:
            raise InvalidArgument("only gamma_1 = 0 is supported")

    @property
    def z_squared(self) -> float:
        return self.l * self.l - 2 * self.kappa * self.l

    @property
    def mu_squared(self) -> float:
        return (2 * self.nu / self.eta) ** 2 - 1


@dataclass(frozen=True)
class DecoherenceFunctions:
    t: float
    Gamma2: float
    Gamma3: float
    G: float
    lambda_x: float
    lambda_z: float


def _ch(u, damp=0.0):
    """exp(-damp) cosh(sqrt(u)), continued to cos(sqrt(-u)) for u < 0.

    The damping is folded into the exponentials so large arguments do not
    overflow before they are multiplied down.
    """
    u, damp = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(damp, dtype=float))
    out = np.empty_like(u)
    small = np.abs(u) < SERIES_CUTOFF
    pos = (u > 0) & ~small
    neg = (u < 0) & ~small
    out[small] = (1 + u[small] / 2 + u[small] ** 2 / 24) * np.exp(-damp[small])
    r = np.sqrt(u[pos])
    out[pos] = 0.5 * (np.exp(r - damp[pos]) + np.exp(-r - damp[pos]))
    out[neg] = np.cos(np.sqrt(-u[neg])) * np.exp(-damp[neg])
    return out


def _shc(u, damp=0.0):
    """exp(-damp) sinh(sqrt(u))/sqrt(u), continued to sin(sqrt(-u))/sqrt(-u) for u < 0."""
    u, damp = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(damp, dtype=float))
    out = np.empty_like(u)
    small = np.abs(u) < SERIES_CUTOFF
    pos = (u > 0) & ~small
    neg = (u < 0) & ~small
    out[small] = (1 + u[small] / 6 + u[small] ** 2 / 120) * np.exp(-damp[small])
    r = np.sqrt(u[pos])
    out[pos] = 0.5 * (np.exp(r - damp[pos]) - np.exp(-r - damp[pos])) / r
    r = np.sqrt(-u[neg])
    out[neg] = np.sin(r) / r * np.exp(-damp[neg])
    return out


def _scalar(x, like):
    return float(x) if np.ndim(like) == 0 else x


def _check_time(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise InvalidArgument("time must be finite and non-negative")
    return t


def _nmad_parts(t, kappa, l, damp=0.0):
    """C = cosh(zt/2), S = sinh(zt/2)/z and their time derivatives, all times exp(-damp)."""
    s = l * l - 2 * kappa * l
    u = s * t * t / 4
    C = _ch(u, damp)
    S = 0.5 * t * _shc(u, damp)
    return C, S, 0.5 * s * S, 0.5 * C


def _nmrtn_parts(t, nu, eta, damp=0.0):
    """C = cos(mu eta t), S = sin(mu eta t)/mu and their time derivatives, all times exp(-damp)."""
    m = (2 * nu / eta) ** 2 - 1
    x = eta * t
    u = -m * x * x
    C = _ch(u, damp)
    S = x * _shc(u, damp)
    return C, S, -m * eta * S, eta * C


def gamma2(t, kappa: float, l: float):
    """NMAD emission rate 4 kappa l sinh(zt/2) / (z cosh(zt/2) + l sinh(zt/2))."""
    t = _check_time(t)
    C, S, _, _ = _nmad_parts(t, kappa, l, damp=l * t / 2)
    den = C + l * S
    if np.any(den == 0):
        raise RatePole("gamma2 evaluated at a pole")
    return _scalar(4 * kappa * l * S / den, t)


def gamma3(t, nu: float, eta: float):
    """NMRTN dephasing rate eta (mu^2 + 1) sin(mu eta t) / (mu cos + sin)."""
    t = _check_time(t)
    C, S, _, _ = _nmrtn_parts(t, nu, eta, damp=eta * t)
    den = C + S
    if np.any(den == 0):
        raise RatePole("gamma3 evaluated at a pole")
    m1 = (2 * nu / eta) ** 2
    return _scalar(eta * m1 * S / den, t)


def h_function(t, params: PhaseCovariantParams):
    """h(t) = exp(-Gamma_2 / 4) and its time derivative."""
    t = _check_time(t)
    C, S, dC, dS = _nmad_parts(t, params.kappa, params.l, damp=params.l * t / 2)
    h = C + params.l * S
    dh = -0.5 * params.l * h + dC + params.l * dS
    return _scalar(h, t), _scalar(dh, t)


def q_function(t, params: PhaseCovariantParams):
    """q(t), with q^2 = exp(-2 Gamma_3), and its time derivative."""
    t = _check_time(t)
    C, S, dC, dS = _nmrtn_parts(t, params.nu, params.eta, damp=params.eta * t)
    q = C + S
    dq = -params.eta * q + dC + dS
    return _scalar(q, t), _scalar(dq, t)


def decoherence_functions(t: float, params: PhaseCovariantParams) -> DecoherenceFunctions:
    h, _ = h_function(t, params)
    q, _ = q_function(t, params)
    lam_z = h**4
    lam_x = h * h * q * q
    with np.errstate(divide="ignore"):
        Gamma2 = -4 * math.log(abs(h)) if h != 0 else math.inf
        Gamma3 = -math.log(abs(q)) if q != 0 else math.inf
    return DecoherenceFunctions(float(t), Gamma2, Gamma3, lam_z - 1, lam_x, lam_z)


def _state_at(x0, y0, z0, h, q):
    lam_z = h**4
    lam_x = h * h * q * q
    G = lam_z - 1
    return np.array(
        [
            [1 + G + z0 * lam_z, lam_x * (x0 - 1j * y0)],
            [lam_x * (x0 + 1j * y0), 1 - G - z0 * lam_z],
        ],
        dtype=complex,
    ) / 2


def evolve_phase_covariant(rho0, t: float, params: PhaseCovariantParams) -> np.ndarray:
    """Apply the channel Phi_t to a single-qubit state."""
    rho0 = check_density_matrix(rho0, dims=(2,))
    if t == 0:
        return rho0.copy()
    x0, y0, z0 = bloch_vector(rho0)
    h, _ = h_function(t, params)
    q, _ = q_function(t, params)
    return _state_at(x0, y0, z0, h, q)


def phase_covariant_generator(rho0, t: float, params: PhaseCovariantParams) -> np.ndarray:
    """d/dt Phi_t[rho0], from derivatives of the closed forms (finite at rate poles)."""
    rho0 = check_density_matrix(rho0, dims=(2,))
    x0, y0, z0 = bloch_vector(rho0)
    h, dh = h_function(t, params)
    q, dq = q_function(t, params)
    dlam_z = 4 * h**3 * dh
    dlam_x = 2 * h * dh * q * q + 2 * h * h * q * dq
    dG = dlam_z
    return np.array(
        [
            [dG + z0 * dlam_z, dlam_x * (x0 - 1j * y0)],
            [dlam_x * (x0 + 1j * y0), -dG - z0 * dlam_z],
        ],
        dtype=complex,
    ) / 2


def trajectory(rho0, times, params: PhaseCovariantParams):
    """States and their time derivatives on a time grid, as (n, 2, 2) arrays."""
    rho0 = check_density_matrix(rho0, dims=(2,))
    t = _check_time(np.atleast_1d(times))
    x0, y0, z0 = bloch_vector(rho0)
    h, dh = h_function(t, params)
    q, dq = q_function(t, params)
    lam_z, lam_x = h**4, h * h * q * q
    dlam_z = 4 * h**3 * dh
    dlam_x = 2 * h * dh * q * q + 2 * h * h * q * dq
    off = complex(x0, y0)
    states = np.empty((t.size, 2, 2), dtype=complex)
    states[:, 0, 0] = lam_z * (1 + z0) / 2
    states[:, 1, 1] = 1 - states[:, 0, 0]
    states[:, 1, 0] = lam_x * off / 2
    states[:, 0, 1] = np.conj(states[:, 1, 0])
    states[t == 0] = rho0
    derivs = np.empty_like(states)
    derivs[:, 0, 0] = (1 + z0) * dlam_z / 2
    derivs[:, 1, 1] = -derivs[:, 0, 0]
    derivs[:, 1, 0] = dlam_x * off / 2
    derivs[:, 0, 1] = np.conj(derivs[:, 1, 0])
    return states, derivs


def _classify(value: float, threshold: float) -> Regime:
    if value < threshold:
        return Regime.NON_MARKOVIAN
    if value > threshold:
        return Regime.MARKOVIAN
    return Regime.BOUNDARY


def classify_regime(params: PhaseCovariantParams) -> tuple[Regime, Regime]:
    """(NMAD, NMRTN) regimes: non-Markovian when l < 2 kappa, resp. (2 nu / eta)^2 > 1."""
    nmad = _classify(params.l, 2 * params.kappa)
    ratio = (2 * params.nu / params.eta) ** 2
    nmrtn = _classify(1.0, ratio)
    return nmad, nmrtn


def state_from_amplitudes(a0: complex, a1: complex) -> np.ndarray:
    """|psi><psi| for a0|0> + a1|1>, normalised."""
    psi = np.array([a0, a1], dtype=complex)
    n = np.linalg.norm(psi)
    if n == 0:
        raise InvalidArgument("zero state vector")
    psi /= n
    return np.outer(psi, psi.conj())

