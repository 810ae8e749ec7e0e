"""SU(2) Wigner transform for spin-1/2 states on the sphere.

The Wigner function of a spin-j state is expanded in multipole operators
T_KQ (built from 3j symbols) and spherical harmonics Y_KQ.  Fields are
sampled on a Gauss-Legendre (in cos theta) x uniform (in phi) grid, which
integrates the K <= 1 harmonics of a qubit exactly.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import lpmv

from .quantum_core import InvalidArgument, as_matrix, check_density_matrix

SPIN = Fraction(1, 2)
MIN_NODES = 8


def _twice(x) -> int:
    """Return 2*x as an int, rejecting values that are not half-integers."""
    two = 2 * Fraction(x).limit_denominator(1000)
    if two.denominator != 1 or abs(float(two) - 2 * float(x)) > 1e-9:
        raise InvalidArgument(f"{x!r} is not a half-integer")
    return int(two)


def _lfact(n2: int) -> float:
    # log((n2/2)!) for even n2 >= 0
    return math.lgamma(n2 // 2 + 1)


def wigner_3j(j1, j2, j3, m1, m2, m3) -> float:
    """Wigner 3j symbol from the Racah sum.

    Arguments may be ints, floats or Fractions as long as they are
    half-integers.  Returns 0 when the selection rules are not met.
    """
    J1, J2, J3, M1, M2, M3 = (_twice(v) for v in (j1, j2, j3, m1, m2, m3))
    if min(J1, J2, J3) < 0:
        raise InvalidArgument("angular momenta must be non-negative")
    for J, M in ((J1, M1), (J2, M2), (J3, M3)):
        if (J - M) % 2:
            raise InvalidArgument("j and m must both be integer or both half-integer")
        if abs(M) > J:
            return 0.0
    if M1 + M2 + M3 != 0:
        return 0.0
    if (J1 + J2 + J3) % 2 or J3 > J1 + J2 or J3 < abs(J1 - J2):
        return 0.0

    # all quantities below are doubled, so factorial arguments are n2/2
    log_tri = (
        _lfact(J1 + J2 - J3) + _lfact(J1 - J2 + J3) + _lfact(-J1 + J2 + J3)
        - _lfact(J1 + J2 + J3 + 2)
    )
    log_m = sum(_lfact(J + M) + _lfact(J - M) for J, M in ((J1, M1), (J2, M2), (J3, -M3)))
    log_pref = 0.5 * (log_tri + log_m)

    kmin = max(0, J2 - J3 - M1, J1 - J3 + M2)
    kmax = min(J1 + J2 - J3, J1 - M1, J2 + M2)
    total = 0.0
    for k in range(kmin, kmax + 1, 2):
        log_den = (
            _lfact(k) + _lfact(J3 - J2 + k + M1) + _lfact(J3 - J1 + k - M2)
            + _lfact(J1 + J2 - J3 - k) + _lfact(J1 - k - M1) + _lfact(J2 - k + M2)
        )
        term = math.exp(log_pref - log_den)
        total += -term if (k // 2) % 2 else term
    phase = (J1 - J2 - M3) // 2
    return -total if phase % 2 else total


def multipole_labels(j=SPIN) -> list[tuple[int, int]]:
    """(K, Q) pairs for K = 0..2j, Q = -K..K, in expansion order."""
    kmax = _twice(j)
    return [(K, Q) for K in range(kmax + 1) for Q in range(-K, K + 1)]


@lru_cache(maxsize=None)
def _multipole(J2: int, K: int, Q: int) -> np.ndarray:
    dim = J2 + 1
    j = Fraction(J2, 2)
    T = np.zeros((dim, dim), dtype=complex)
    # row/column index i <-> m = j - i, so index 0 is the top (excited) level
    for a in range(dim):
        m = j - a
        for b in range(dim):
            mp = j - b
            c = wigner_3j(j, K, j, -m, Q, mp)
            if c:
                T[a, b] = (-1) ** int(j - m) * math.sqrt(2 * K + 1) * c
    T.setflags(write=False)
    return T


def multipole_operator(j, K: int, Q: int) -> np.ndarray:
    """Multipole operator T_KQ for spin j as a (2j+1)x(2j+1) matrix."""
    J2 = _twice(j)
    if J2 < 0 or not (0 <= K <= J2) or abs(Q) > K:
        raise InvalidArgument(f"(K, Q) = ({K}, {Q}) out of range for j = {j}")
    return _multipole(J2, int(K), int(Q)).copy()


def spherical_harmonic(K: int, Q: int, theta, phi):
    """Orthonormal Y_KQ with the Condon-Shortley phase; broadcasts over angles."""
    if abs(Q) > K:
        raise InvalidArgument(f"|Q| > K for (K, Q) = ({K}, {Q})")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    q = abs(Q)
    norm = math.sqrt((2 * K + 1) / (4 * math.pi) * math.factorial(K - q) / math.factorial(K + q))
    y = norm * lpmv(q, K, np.cos(theta)) * np.exp(1j * q * phi)
    if Q < 0:
        y = (-1) ** q * np.conj(y)
    return y


@dataclass(frozen=True, eq=False)
class SphereGrid:
    """Product quadrature on the unit sphere.

    ``theta_weights`` are Gauss-Legendre weights in cos(theta), so they
    already carry the sin(theta) Jacobian.
    """

    n_theta: int
    n_phi: int
    theta_nodes: np.ndarray
    theta_weights: np.ndarray
    phi_nodes: np.ndarray
    phi_weight: float

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_theta, self.n_phi)

    @property
    def weights(self) -> np.ndarray:
        return np.outer(self.theta_weights, np.full(self.n_phi, self.phi_weight))

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.theta_nodes, self.phi_nodes, indexing="ij")

    def doubled(self) -> "SphereGrid":
        return sphere_grid(2 * self.n_theta, 2 * self.n_phi)


@lru_cache(maxsize=32)
def sphere_grid(n_theta: int = 32, n_phi: int = 32) -> SphereGrid:
    if n_theta < MIN_NODES or n_phi < MIN_NODES:
        raise InvalidArgument(f"grid needs at least {MIN_NODES} nodes per axis")
    x, w = np.polynomial.legendre.leggauss(n_theta)
    # leggauss returns ascending cos(theta); flip so theta ascends
    theta = np.arccos(x[::-1])
    w = w[::-1].copy()
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    for arr in (theta, w, phi):
        arr.setflags(write=False)
    return SphereGrid(n_theta, n_phi, theta, w, phi, 2 * np.pi / n_phi)


@lru_cache(maxsize=32)
def _harmonic_table(grid: SphereGrid) -> np.ndarray:
    """Y_KQ for every multipole label, shape (n_labels, n_theta * n_phi)."""
    th, ph = grid.mesh()
    table = np.stack([spherical_harmonic(K, Q, th, ph).ravel() for K, Q in multipole_labels()])
    table.setflags(write=False)
    return table


@dataclass(frozen=True, eq=False)
class WignerField:
    """Real Wigner values sampled on one sphere or on a product of two.

    ``values`` has shape (n_theta, n_phi) for one qubit and
    (n_theta, n_phi, n_theta, n_phi) for two.  ``source`` is the operator the
    field was computed from, kept so metrics can resample on finer grids.
    """

    grids: tuple[SphereGrid, ...]
    values: np.ndarray
    imag_residual: float = 0.0
    source: np.ndarray | None = None

    @property
    def arity(self) -> int:
        return len(self.grids)

    @property
    def grid_spec(self) -> tuple[tuple[int, int], ...]:
        return tuple(g.shape for g in self.grids)

    def with_values(self, values: np.ndarray, source=None) -> "WignerField":
        return WignerField(self.grids, values, 0.0, source)


def multipole_coefficients(op) -> np.ndarray:
    """rho_KQ = Tr(T_KQ^+ op) for 2x2 ops, or the 4x4 matrix of
    Tr(op T_K1Q1^+ (x) T_K2Q2^+) for two-qubit ops."""
    op = as_matrix(op)
    Ts = [multipole_operator(SPIN, K, Q) for K, Q in multipole_labels()]
    if op.shape[0] == 2:
        return np.array([np.trace(T.conj().T @ op) for T in Ts])
    return np.array(
        [[np.trace(op @ np.kron(Ta.conj().T, Tb.conj().T)) for Tb in Ts] for Ta in Ts]
    )


def _check_reality(w: np.ndarray, what: str) -> tuple[np.ndarray, float]:
    resid = float(np.max(np.abs(w.imag))) if w.size else 0.0
    scale = max(1.0, float(np.max(np.abs(w.real))) if w.size else 1.0)
    if resid > 1e-10 * scale:
        raise InvalidArgument(f"{what} is not Hermitian: Wigner field has imaginary part {resid:.3g}")
    return w.real, resid


def wigner_transform(op, grids) -> WignerField:
    """Wigner transform of any Hermitian 2x2 or 4x4 operator (linear map).

    ``grids`` is one SphereGrid for a qubit operator or a pair for a
    two-qubit operator.  States and their time derivatives both go through
    here; no normalisation is assumed.
    """
    op = as_matrix(op)
    if isinstance(grids, SphereGrid):
        grids = (grids,)
    grids = tuple(grids)
    pref = (2 * SPIN + 1) / (4 * math.pi)
    if op.shape[0] == 2:
        if len(grids) != 1:
            raise InvalidArgument("a qubit operator needs exactly one grid")
        c = multipole_coefficients(op)
        w = math.sqrt(pref) * (c @ _harmonic_table(grids[0]))
        w = w.reshape(grids[0].shape)
    else:
        if len(grids) != 2:
            raise InvalidArgument("a two-qubit operator needs two grids")
        ga, gb = grids
        C = multipole_coefficients(op)
        # rank-1 accumulation of the 16 coefficient terms as one matmul
        w = pref * (_harmonic_table(ga).T @ (C @ _harmonic_table(gb)))
        w = w.reshape(ga.shape + gb.shape)
    values, resid = _check_reality(w, "operator")
    return WignerField(grids, values, resid, op.copy())


def wigner_single(rho, grid: SphereGrid | None = None) -> WignerField:
    """Wigner field of a single-qubit state."""
    rho = check_density_matrix(rho, dims=(2,))
    return wigner_transform(rho, grid if grid is not None else sphere_grid())


def wigner_two(rho, grid_a: SphereGrid | None = None, grid_b: SphereGrid | None = None) -> WignerField:
    """Wigner field of a two-qubit state on the product of two spheres."""
    rho = check_density_matrix(rho, dims=(4,))
    grid_a = grid_a if grid_a is not None else sphere_grid()
    grid_b = grid_b if grid_b is not None else grid_a
    return wigner_transform(rho, (grid_a, grid_b))


def wigner_at(op, *angles) -> float:
    """Evaluate the Wigner function at explicit angles.

    Pass (theta, phi) for a qubit operator and (theta1, phi1, theta2, phi2)
    for a two-qubit operator.
    """
    op = as_matrix(op)
    labels = multipole_labels()
    pref = (2 * SPIN + 1) / (4 * math.pi)
    if op.shape[0] == 2:
        theta, phi = angles
        y = np.array([spherical_harmonic(K, Q, theta, phi) for K, Q in labels])
        w = math.sqrt(pref) * (multipole_coefficients(op) @ y)
    else:
        t1, p1, t2, p2 = angles
        ya = np.array([spherical_harmonic(K, Q, t1, p1) for K, Q in labels])
        yb = np.array([spherical_harmonic(K, Q, t2, p2) for K, Q in labels])
        w = pref * (ya @ multipole_coefficients(op) @ yb)
    return float(np.real(w))


def _weights(field: WignerField) -> list[np.ndarray]:
    return [g.weights for g in field.grids]


def integrate_values(field: WignerField, values: np.ndarray) -> float:
    """Quadrature sum of ``values`` (same shape as field.values)."""
    if field.arity == 1:
        return float(np.sum(field.grids[0].weights * values))
    wa, wb = _weights(field)
    return float(np.einsum("ij,ijkl,kl->", wa, values, wb, optimize=True))


def integrate(field: WignerField) -> float:
    """Integral of the field over its sphere(s) with the sin(theta) measure."""
    return integrate_values(field, field.values)


def write_field_csv(field: WignerField, fh) -> None:
    """Write rows (theta[,theta2], phi[,phi2], weight, value) with a header."""
    writer = csv.writer(fh, lineterminator="\n")
    if field.arity == 1:
        g = field.grids[0]
        writer.writerow(["theta", "phi", "weight", "value"])
        w = g.weights
        for i, th in enumerate(g.theta_nodes):
            for k, ph in enumerate(g.phi_nodes):
                writer.writerow([repr(float(th)), repr(float(ph)), repr(float(w[i, k])), repr(float(field.values[i, k]))])
        return
    ga, gb = field.grids
    wa, wb = ga.weights, gb.weights
    writer.writerow(["theta", "theta2", "phi", "phi2", "weight", "value"])
    for i, t1 in enumerate(ga.theta_nodes):
        for k, p1 in enumerate(ga.phi_nodes):
            for a, t2 in enumerate(gb.theta_nodes):
                for b, p2 in enumerate(gb.phi_nodes):
                    writer.writerow([
                        repr(float(t1)), repr(float(t2)), repr(float(p1)), repr(float(p2)),
                        repr(float(wa[i, k] * wb[a, b])), repr(float(field.values[i, k, a, b])),
                    ])
