"""Two qubits coupled to a squeezed thermal bath with distance-dependent collective decay.

Units: hbar = k_B = 1.  Qubit n has lowering operator S_-^n = |g><e| with
|0> = |e>, so S_-^n is sigma_minus = [[0, 0], [1, 0]] on that factor.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .quantum_core import InvalidArgument, check_density_matrix, ket, pauli, projector

F_CONVENTIONS = ("corrected", "literal")
OMEGA_PREFACTORS = ("root-half", "standard")
_SMALL_X = 1e-2


class IntegrationFailure(RuntimeError):
    def __init__(self, message: str, last_good_time: float):
        super().__init__(f"{message} (last good time {last_good_time:.6g})")
        self.last_good_time = last_good_time


@dataclass(frozen=True)
class BathGeometryParams:
    """Bath and geometry of the two-qubit model.

    ``x12`` is k0 r12.  The default ``f_convention='corrected'`` uses the
    bracket cos x / x^2 - sin x / x^3, so F(0+) = 1; ``'literal'`` keeps a
    + sin x / x^3 sign, which diverges as x -> 0 and exists for regression
    checks.  ``omega_prefactor`` selects (3/4) sqrt(G1 G2 / 2) ('root-half')
    or (3/4) sqrt(G1 G2) ('standard').
    """

    T: float = 1.0
    r: float = -0.2
    phi_sq: float = 0.0
    omega1: float = 1.0
    omega2: float = 1.0
    Gamma1: float = 0.05
    Gamma2: float = 0.05
    x12: float = 0.1
    mu_dot_r: float = 0.0
    f_convention: str = "corrected"
    omega_prefactor: str = "root-half"

    def __post_init__(self):
        for name in ("T", "r", "phi_sq", "omega1", "omega2", "Gamma1", "Gamma2", "x12", "mu_dot_r"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidArgument(f"{name} must be finite")
        if self.T < 0:
            raise InvalidArgument("temperature must be >= 0")
        if self.Gamma1 <= 0 or self.Gamma2 <= 0:
            raise InvalidArgument("spontaneous emission rates must be > 0")
        if self.omega1 <= 0 or self.omega2 <= 0:
            raise InvalidArgument("qubit frequencies must be > 0")
        if self.x12 <= 0:
            raise InvalidArgument("k0 r12 must be > 0 (the dipole shift diverges at contact)")
        if abs(self.mu_dot_r) > 1:
            raise InvalidArgument("mu . r must lie in [-1, 1]")
        if self.f_convention not in F_CONVENTIONS:
            raise InvalidArgument(f"f_convention must be one of {F_CONVENTIONS}")
        if self.omega_prefactor not in OMEGA_PREFACTORS:
            raise InvalidArgument(f"omega_prefactor must be one of {OMEGA_PREFACTORS}")

    @property
    def omega0(self) -> float:
        return 0.5 * (self.omega1 + self.omega2)


@dataclass(frozen=True)
class DerivedCoefficients:
    N_th: float
    N_e: float
    M_e: complex
    F12: float
    Gamma12: float
    Omega12: float


def planck_occupation(omega0: float, T: float) -> float:
    """Thermal photon number 1 / (exp(omega / T) - 1); exactly 0 at T = 0."""
    if omega0 <= 0:
        raise InvalidArgument("frequency must be > 0")
    if T < 0:
        raise InvalidArgument("temperature must be >= 0")
    if T == 0:
        return 0.0
    x = omega0 / T
    # exp(-x) / (1 - exp(-x)) stays finite when omega / T is huge
    return math.exp(-x) / -math.expm1(-x)


def squeezed_moments(N_th: float, r: float, phi_sq: float) -> tuple[float, complex]:
    """Effective occupation N_e and squeezing correlation M_e of the bath."""
    ch2 = math.cosh(r) ** 2
    sh2 = math.sinh(r) ** 2
    N_e = N_th * (ch2 + sh2) + sh2
    M_e = -0.5 * math.sinh(2 * r) * (2 * N_th + 1) * complex(math.cos(phi_sq), math.sin(phi_sq))
    return N_e, M_e


def _bracket_cos_sin(x: float) -> float:
    """cos x / x^2 - sin x / x^3, with a series near 0 to avoid cancellation."""
    if x < _SMALL_X:
        x2 = x * x
        return -1.0 / 3 + x2 / 30 - x2 * x2 / 840
    return math.cos(x) / x**2 - math.sin(x) / x**3


def collective_decay_factor(x: float, mu_dot_r: float = 0.0, convention: str = "corrected") -> float:
    """F(k0 r12), the collective damping in units of sqrt(Gamma1 Gamma2)."""
    if x <= 0:
        raise InvalidArgument("k0 r12 must be > 0")
    a = 1 - mu_dot_r**2
    b = 1 - 3 * mu_dot_r**2
    if convention == "corrected":
        tail = _bracket_cos_sin(x)
    elif convention == "literal":
        tail = math.cos(x) / x**2 + math.sin(x) / x**3
    else:
        raise InvalidArgument(f"unknown F convention {convention!r}")
    return 1.5 * (a * math.sin(x) / x + b * tail)


def dipole_coupling(x: float, Gamma1: float, Gamma2: float, mu_dot_r: float = 0.0,
                    prefactor: str = "root-half") -> float:
    """Coherent dipole-dipole coupling Omega12."""
    if x <= 0:
        raise InvalidArgument("k0 r12 must be > 0")
    if prefactor == "root-half":
        pref = 0.75 * math.sqrt(Gamma1 * Gamma2 / 2)
    elif prefactor == "standard":
        pref = 0.75 * math.sqrt(Gamma1 * Gamma2)
    else:
        raise InvalidArgument(f"unknown Omega prefactor {prefactor!r}")
    a = mu_dot_r**2 - 1
    b = 1 - 3 * mu_dot_r**2
    return pref * (a * math.cos(x) / x + b * (math.sin(x) / x**2 + math.cos(x) / x**3))


def collective_coefficients(params: BathGeometryParams) -> DerivedCoefficients:
    N_th = planck_occupation(params.omega0, params.T)
    N_e, M_e = squeezed_moments(N_th, params.r, params.phi_sq)
    F = collective_decay_factor(params.x12, params.mu_dot_r, params.f_convention)
    G12 = math.sqrt(params.Gamma1 * params.Gamma2) * F
    W12 = dipole_coupling(params.x12, params.Gamma1, params.Gamma2, params.mu_dot_r, params.omega_prefactor)
    return DerivedCoefficients(N_th, N_e, M_e, F, G12, W12)


_I2 = np.eye(2, dtype=complex)
_SM = pauli("minus")
S_MINUS = (np.kron(_SM, _I2), np.kron(_I2, _SM))
S_PLUS = tuple(s.conj().T for s in S_MINUS)
S_Z = (np.kron(0.5 * pauli("z"), _I2), np.kron(_I2, 0.5 * pauli("z")))
SWAP = np.eye(4, dtype=complex)[[0, 2, 1, 3]]


def hamiltonian(coeffs: DerivedCoefficients, params: BathGeometryParams) -> np.ndarray:
    """omega_1 S_z^1 + omega_2 S_z^2 + Omega12 (S_+^1 S_-^2 + S_+^2 S_-^1)."""
    H = params.omega1 * S_Z[0] + params.omega2 * S_Z[1]
    H = H + coeffs.Omega12 * (S_PLUS[0] @ S_MINUS[1] + S_PLUS[1] @ S_MINUS[0])
    return H


def _gamma_matrix(coeffs, params) -> np.ndarray:
    return np.array([[params.Gamma1, coeffs.Gamma12], [coeffs.Gamma12, params.Gamma2]])


def master_rhs(rho, coeffs: DerivedCoefficients, params: BathGeometryParams) -> np.ndarray:
    """Right-hand side of the Born-Markov-RWA master equation."""
    rho = np.asarray(rho, dtype=complex)
    H = hamiltonian(coeffs, params)
    out = -1j * (H @ rho - rho @ H)
    G = _gamma_matrix(coeffs, params)
    N, M = coeffs.N_e, coeffs.M_e
    Sp, Sm = S_PLUS, S_MINUS
    for i in range(2):
        for j in range(2):
            g = 0.5 * G[i, j]
            A = Sp[i] @ Sm[j]
            out -= g * (1 + N) * (rho @ A + A @ rho - 2 * Sm[j] @ rho @ Sp[i])
            A = Sm[i] @ Sp[j]
            out -= g * N * (rho @ A + A @ rho - 2 * Sp[j] @ rho @ Sm[i])
            A = Sp[i] @ Sp[j]
            out += g * M * (rho @ A + A @ rho - 2 * Sp[j] @ rho @ Sp[i])
            A = Sm[i] @ Sm[j]
            out += g * np.conj(M) * (rho @ A + A @ rho - 2 * Sm[j] @ rho @ Sm[i])
    return out


def liouvillian(coeffs: DerivedCoefficients, params: BathGeometryParams) -> np.ndarray:
    """16x16 generator acting on row-major flattened density matrices."""
    L = np.empty((16, 16), dtype=complex)
    for k in range(16):
        E = np.zeros(16, dtype=complex)
        E[k] = 1.0
        L[:, k] = master_rhs(E.reshape(4, 4), coeffs, params).reshape(-1)
    return L


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (n_times, 4, 4)
    generator: np.ndarray  # 16x16 Liouvillian used
    metadata: dict = field(default_factory=dict)

    def derivatives(self) -> np.ndarray:
        flat = self.states.reshape(len(self.times), 16)
        return (flat @ self.generator.T).reshape(-1, 4, 4)

    def write_csv(self, fh) -> None:
        """Rows t, Re rho_ij (i <= j), Im rho_ij (i < j)."""
        upper = [(i, j) for i in range(4) for j in range(i, 4)]
        strict = [(i, j) for i, j in upper if i < j]
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + [f"re{i}{j}" for i, j in upper] + [f"im{i}{j}" for i, j in strict])
        for t, rho in zip(self.times, self.states):
            w.writerow(
                [repr(float(t))]
                + [repr(float(rho[i, j].real)) for i, j in upper]
                + [repr(float(rho[i, j].imag)) for i, j in strict]
            )


def _check_times(t_grid) -> np.ndarray:
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 1 or t[0] != 0 or np.any(np.diff(t) <= 0):
        raise InvalidArgument("time grid must start at 0 and be strictly increasing")
    return t


_PAULI_BASIS = np.array(
    [np.kron(a, b) for a in (np.eye(2), pauli("x"), pauli("y"), pauli("z"))
     for b in (np.eye(2), pauli("x"), pauli("y"), pauli("z"))]
)


def to_pauli_coords(rho) -> np.ndarray:
    """Real coordinates c_ab = Tr(rho sigma_a (x) sigma_b)."""
    return np.einsum("kij,ji->k", _PAULI_BASIS, np.asarray(rho, dtype=complex)).real


def from_pauli_coords(c) -> np.ndarray:
    rho = np.einsum("k,kij->ij", np.asarray(c, dtype=float), _PAULI_BASIS) / 4
    return 0.5 * (rho + rho.conj().T)


def real_generator(L: np.ndarray) -> np.ndarray:
    """The Liouvillian as a real 16x16 matrix on Pauli coordinates."""
    B = _PAULI_BASIS.reshape(16, 16)
    # c' = Tr(P_k L(rho)), rho = sum_m c_m P_m / 4
    M = (B.conj() @ L @ B.T) / 4
    return M.real


def evolve_two_qubit(rho0, t_grid, params: BathGeometryParams, rtol: float = 1e-8,
                     atol: float = 1e-10, method: str = "RK45") -> Trajectory:
    """Integrate the master equation and sample it on ``t_grid``.

    The state is carried as its 16 real Pauli coordinates, so every sample
    is exactly Hermitian.  ``method`` is any explicit scipy integrator name,
    or 'expm' for the exact propagator of the time-independent generator.
    """
    rho0 = check_density_matrix(rho0, dims=(4,))
    t = _check_times(t_grid)
    coeffs = collective_coefficients(params)
    L = liouvillian(coeffs, params)
    meta = {"method": method, "rtol": rtol, "atol": atol}
    if method == "expm":
        from scipy.linalg import expm

        states = np.array([(expm(L * tk) @ rho0.reshape(-1)).reshape(4, 4) for tk in t])
        states = 0.5 * (states + states.conj().transpose(0, 2, 1))
        states[0] = rho0
        return Trajectory(t, states, L, meta)
    if t.size == 1:
        return Trajectory(t, rho0[None].copy(), L, meta)
    R = real_generator(L)
    sol = solve_ivp(
        lambda _t, y: R @ y, (0.0, t[-1]), to_pauli_coords(rho0), method=method,
        t_eval=t, rtol=rtol, atol=atol,
    )
    if not sol.success:
        last = float(sol.t[-1]) if sol.t.size else 0.0
        raise IntegrationFailure(f"integration failed: {sol.message}", last)
    states = np.array([from_pauli_coords(c) for c in sol.y.T])
    states[0] = rho0
    meta["nfev"] = int(sol.nfev)
    return Trajectory(t, states, L, meta)


def rk4_fixed(L: np.ndarray, rho0, t_end: float, n_steps: int) -> np.ndarray:
    """Classical fixed-step RK4 for d(vec rho)/dt = L vec rho (order checks)."""
    y = np.asarray(rho0, dtype=complex).reshape(-1)
    h = t_end / n_steps
    for _ in range(n_steps):
        k1 = L @ y
        k2 = L @ (y + 0.5 * h * k1)
        k3 = L @ (y + 0.5 * h * k2)
        k4 = L @ (y + h * k3)
        y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    return y.reshape(4, 4)


BELL = (ket("00") + ket("11")) / math.sqrt(2)


def werner_state(P: float) -> np.ndarray:
    """P |Phi+><Phi+| + (1 - P) I / 4."""
    if not (0 <= P <= 1):
        raise InvalidArgument(f"mixing probability must be in [0, 1], got {P}")
    return P * projector(BELL) + (1 - P) * np.eye(4, dtype=complex) / 4


def build_state(spec) -> np.ndarray:
    """Two-qubit state from a label ('00', '01', '10', '11', 'bell') or a Werner weight P."""
    if isinstance(spec, str):
        if spec == "bell":
            return projector(BELL)
        if spec in ("00", "01", "10", "11"):
            return projector(ket(spec))
        try:
            spec = float(spec)
        except ValueError:
            raise InvalidArgument(f"unknown state label {spec!r}") from None
    return werner_state(float(spec))
