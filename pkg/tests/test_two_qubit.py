import io
import math

import numpy as np
import pytest
from scipy.linalg import expm

from qslwigner import two_qubit as tq
from qslwigner.quantum_core import (
    InvalidArgument,
    hermitian_eigenvalues,
    ket,
    partial_trace,
    projector,
    random_density_matrix,
)

GROUND = projector(ket("11"))


def vacuum(x12=50.0, **kw):
    return tq.BathGeometryParams(T=0.0, r=0.0, x12=x12, **kw)


def rhs(rho, params):
    return tq.master_rhs(rho, tq.collective_coefficients(params), params)


def test_planck_occupation():
    assert tq.planck_occupation(1.0, 1.0) == pytest.approx(1 / (math.e - 1), rel=1e-15)
    assert tq.planck_occupation(1.0, 0.0) == 0.0
    assert tq.planck_occupation(1.0, 1e-3) == 0.0
    with pytest.raises(InvalidArgument):
        tq.planck_occupation(1.0, -1.0)


def test_squeezed_moments_default_bath():
    N = tq.planck_occupation(1.0, 1.0)
    N_e, M_e = tq.squeezed_moments(N, -0.2, 0.0)
    assert N_e == pytest.approx(N * math.cosh(0.4) + math.sinh(0.2) ** 2, rel=1e-14)
    assert M_e == pytest.approx(-0.5 * math.sinh(-0.4) * (2 * N + 1), rel=1e-14)
    assert N_e == pytest.approx(0.669695, abs=1e-6)
    assert M_e.real == pytest.approx(0.444424, abs=1e-6)
    # |M|^2 <= N (N + 1) for a physical bath
    assert abs(M_e) ** 2 <= N_e * (N_e + 1)


def test_collective_factor_limits():
    assert tq.collective_decay_factor(1e-3) == pytest.approx(1.0, abs=1e-6)
    assert tq.collective_decay_factor(math.pi) == pytest.approx(-3 / (2 * math.pi**2), abs=1e-9)
    # continuity across the series cut-off
    lo, hi = tq.collective_decay_factor(0.01 - 1e-12), tq.collective_decay_factor(0.01 + 1e-12)
    assert lo == pytest.approx(hi, abs=1e-10)
    assert abs(tq.collective_decay_factor(200.0)) < 0.01


def test_literal_convention_diverges_at_contact():
    vals = [abs(tq.collective_decay_factor(x, convention="literal")) for x in (1e-1, 1e-2, 1e-3)]
    assert vals[0] < vals[1] < vals[2]
    assert vals[2] > 1e6
    with pytest.raises(InvalidArgument):
        tq.collective_decay_factor(0.1, convention="other")


def test_dipole_coupling_prefactors():
    root_half = tq.dipole_coupling(0.7, 0.05, 0.05)
    standard = tq.dipole_coupling(0.7, 0.05, 0.05, prefactor="standard")
    assert standard == pytest.approx(math.sqrt(2) * root_half, rel=1e-15)
    # the near-field 1/x^3 term dominates at short distance
    assert tq.dipole_coupling(0.01, 0.05, 0.05) == pytest.approx(0.75 * math.sqrt(0.05**2 / 2) / 1e-6, rel=1e-3)


@pytest.mark.parametrize(
    "kw",
    [dict(T=-1.0), dict(Gamma1=0.0), dict(x12=0.0), dict(omega2=-1.0), dict(mu_dot_r=2.0),
     dict(f_convention="x"), dict(omega_prefactor="x"), dict(r=math.nan)],
)
def test_parameter_validation(kw):
    with pytest.raises(InvalidArgument):
        tq.BathGeometryParams(**kw)


def test_vacuum_ground_state_is_fixed():
    for x in (0.1, 1.1, 50.0):
        assert np.abs(rhs(GROUND, vacuum(x))).max() < 1e-15


def test_rhs_traceless_hermitian_and_linear(rng):
    p = tq.BathGeometryParams()
    a, b = random_density_matrix(4, rng), random_density_matrix(4, rng)
    ra, rb = rhs(a, p), rhs(b, p)
    assert abs(np.trace(ra)) < 1e-14
    assert np.allclose(ra, ra.conj().T, atol=1e-14)
    assert np.allclose(rhs(0.3 * a + 0.7 * b, p), 0.3 * ra + 0.7 * rb, atol=1e-14)


def test_swap_symmetry_for_identical_qubits(rng):
    p = tq.BathGeometryParams(x12=0.4)
    rho = random_density_matrix(4, rng)
    S = tq.SWAP
    assert np.allclose(rhs(S @ rho @ S, p), S @ rhs(rho, p) @ S, atol=1e-14)


def test_liouvillian_matches_rhs(rng):
    p = tq.BathGeometryParams()
    c = tq.collective_coefficients(p)
    L = tq.liouvillian(c, p)
    rho = random_density_matrix(4, rng)
    assert np.allclose((L @ rho.reshape(-1)).reshape(4, 4), tq.master_rhs(rho, c, p), atol=1e-14)


def test_pauli_coordinates_round_trip(rng):
    rho = random_density_matrix(4, rng)
    c = tq.to_pauli_coords(rho)
    assert c[0] == pytest.approx(1.0)
    assert np.allclose(tq.from_pauli_coords(c), rho)


def test_exchange_oscillation_frequency():
    # |01> <-> |10> population swaps at angular frequency 2 Omega12
    p = tq.BathGeometryParams(x12=0.1)
    omega = tq.collective_coefficients(p).Omega12
    period = math.pi / abs(omega)
    t = np.linspace(0, 40 * period, 4096)
    traj = tq.evolve_two_qubit(projector(ket("01")), t, p, method="expm")
    pop = traj.states[:, 1, 1].real
    spec = np.abs(np.fft.rfft(pop - pop.mean()))
    freqs = 2 * math.pi * np.fft.rfftfreq(t.size, t[1] - t[0])
    peak = freqs[np.argmax(spec)]
    assert peak == pytest.approx(2 * abs(omega), rel=0.1)


def test_rk45_agrees_with_exact_propagator():
    p = tq.BathGeometryParams(x12=0.1)
    t = np.linspace(0, 5, 21)
    rho0 = tq.build_state(0.7)
    a = tq.evolve_two_qubit(rho0, t, p)
    b = tq.evolve_two_qubit(rho0, t, p, method="expm")
    assert np.abs(a.states - b.states).max() < 1e-6
    tr = np.trace(a.states, axis1=1, axis2=2)
    assert np.abs(tr - 1).max() < 1e-8
    assert min(hermitian_eigenvalues(s).min() for s in a.states) > -1e-7


def test_rk4_convergence_order():
    p = tq.BathGeometryParams(x12=0.5)
    c = tq.collective_coefficients(p)
    L = tq.liouvillian(c, p)
    rho0 = projector(ket("01"))
    exact = (expm(L * 2.0) @ rho0.reshape(-1)).reshape(4, 4)
    e1 = np.abs(tq.rk4_fixed(L, rho0, 2.0, 400) - exact).max()
    e2 = np.abs(tq.rk4_fixed(L, rho0, 2.0, 800) - exact).max()
    assert 12 <= e1 / e2 <= 20


def test_independent_vacuum_decay_reaches_ground_state():
    p = vacuum(50.0)
    t = np.linspace(0, 10 / p.Gamma1, 11)
    traj = tq.evolve_two_qubit(projector(ket("00")), t, p)
    assert np.trace(traj.states[-1] @ GROUND).real > 0.999


def test_thermal_steady_state_without_squeezing():
    p = tq.BathGeometryParams(T=1.0, r=0.0, x12=80.0)
    L = tq.liouvillian(tq.collective_coefficients(p), p)
    rho = (expm(L * 400.0) @ tq.build_state("00").reshape(-1)).reshape(4, 4)
    N = tq.planck_occupation(1.0, 1.0)
    excited = N / (2 * N + 1)
    # the residual far-field coupling F ~ 1e-2 perturbs the populations slightly
    assert partial_trace(rho, "A")[0, 0].real == pytest.approx(excited, abs=2e-3)


def test_time_grid_validation():
    p = tq.BathGeometryParams()
    for bad in ([0.1, 0.2], [0.0, 0.2, 0.1], []):
        with pytest.raises(InvalidArgument):
            tq.evolve_two_qubit(GROUND, bad, p)
    single = tq.evolve_two_qubit(GROUND, [0.0], p)
    assert single.states.shape == (1, 4, 4)


def test_state_labels():
    assert np.allclose(tq.build_state("01"), projector(ket("01")))
    assert np.allclose(tq.build_state("bell"), tq.werner_state(1.0))
    assert np.allclose(tq.build_state("0"), np.eye(4) / 4)
    for bad in ("2", "up", 1.5):
        with pytest.raises(InvalidArgument):
            tq.build_state(bad)


def test_trajectory_csv():
    traj = tq.evolve_two_qubit(GROUND, [0.0, 1.0], tq.BathGeometryParams())
    buf = io.StringIO()
    traj.write_csv(buf)
    lines = buf.getvalue().splitlines()
    header = lines[0].split(",")
    assert header[0] == "t" and len(header) == 1 + 10 + 6
    assert len(lines) == 3


def test_trajectory_hermiticity():
    traj = tq.evolve_two_qubit(tq.build_state("01"), np.linspace(0, 20, 81), tq.BathGeometryParams(x12=0.05, r=0.5))
    assert np.abs(traj.states - traj.states.conj().transpose(0, 2, 1)).max() <= 1e-10


def test_relabelling_qubits_conjugates_the_trajectory(rng):
    a = tq.BathGeometryParams(omega1=1.0, omega2=1.3, Gamma1=0.05, Gamma2=0.08, x12=0.4)
    b = tq.BathGeometryParams(omega1=1.3, omega2=1.0, Gamma1=0.08, Gamma2=0.05, x12=0.4)
    rho0 = random_density_matrix(4, rng)
    t = np.linspace(0, 10, 21)
    ta = tq.evolve_two_qubit(rho0, t, a)
    tb = tq.evolve_two_qubit(tq.SWAP @ rho0 @ tq.SWAP, t, b)
    S = tq.SWAP
    assert np.abs(np.einsum("ij,njk,kl->nil", S, ta.states, S) - tb.states).max() <= 1e-9
