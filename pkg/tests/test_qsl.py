import io
import math

import numpy as np
import pytest

from qslwigner import phase_covariant as pc
from qslwigner.quantum_core import InvalidArgument, pauli, random_density_matrix
from qslwigner.qsl import (
    PNormSpec,
    StationaryTrajectory,
    analyse_trajectory,
    p_norm,
    qsl_time,
    qsl_velocity,
    wigner_time_derivative,
    write_qsl_csv,
)
from qslwigner.wigner import integrate, sphere_grid, wigner_single, wigner_transform


def test_spec_is_a_sorted_set():
    s = PNormSpec((4, 1, 2, 1), include_sup_norm=False)
    assert s.p_values == (1.0, 2.0, 4.0)
    assert PNormSpec.bound().p_values == (1.0,)
    assert PNormSpec.min_over_p().include_sup_norm
    assert PNormSpec.from_mode("min-p") == PNormSpec.min_over_p()
    for bad in ((0,), (-1,), (math.inf,)):
        with pytest.raises(InvalidArgument):
            PNormSpec(bad)
    with pytest.raises(InvalidArgument):
        PNormSpec((), include_sup_norm=False)
    with pytest.raises(InvalidArgument):
        PNormSpec.from_mode("fastest")


def test_dephasing_velocity_norms():
    # rho' = (lambda_x' / 2) sigma_x  ->  dW = sqrt(3) lambda_x' n_x / (4 pi)
    dl = -0.37
    w = wigner_time_derivative(0.5 * dl * pauli("x"), sphere_grid(64, 64))
    assert p_norm(w, 1) == pytest.approx(math.sqrt(3) / 2 * abs(dl), rel=1e-3)
    assert p_norm(w, math.inf) == pytest.approx(math.sqrt(3) * abs(dl) / (4 * math.pi), rel=1e-3)
    # the L2 norm of n_x is sqrt(4 pi / 3): a polynomial integrand, so exact
    assert p_norm(w, 2) == pytest.approx(abs(dl) / (2 * math.sqrt(math.pi)), rel=1e-12)


def test_velocity_minimum_and_argmin():
    w = wigner_time_derivative(0.1 * pauli("z"), sphere_grid(32, 16))
    v_bound, p_bound = qsl_velocity(w, PNormSpec.bound())
    v_min, p_min = qsl_velocity(w, PNormSpec.min_over_p())
    assert p_bound == 1.0
    assert v_min <= v_bound
    assert p_min == math.inf  # the sup norm of a small-amplitude field is the smallest


def test_derivative_must_be_traceless():
    with pytest.raises(InvalidArgument):
        wigner_time_derivative(np.eye(2) * 0.1, sphere_grid(8, 8))


def test_generator_matches_central_differences(rng):
    # the analytic generator agrees with a central difference to O(h^2)
    p = pc.PhaseCovariantParams(kappa=1.0, l=0.3, nu=1.0, eta=0.2)
    rho0 = random_density_matrix(2, rng)
    t = 1.7
    exact = pc.phase_covariant_generator(rho0, t, p)
    errs = []
    for h in (1e-2, 5e-3):
        fd = (pc.evolve_phase_covariant(rho0, t + h, p) - pc.evolve_phase_covariant(rho0, t - h, p)) / (2 * h)
        errs.append(np.abs(fd - exact).max())
    assert 3.5 < errs[0] / errs[1] < 4.5


def test_qsl_time_bounds_driving_time():
    p = pc.PhaseCovariantParams(kappa=1.0, l=3.0, nu=1.0, eta=3.0)
    times = np.linspace(0, 5, 200)
    states, derivs = pc.trajectory(pc.state_from_amplitudes(1, 1), times, p)
    g = sphere_grid(32, 32)
    res = analyse_trajectory(times, states, derivs, g, PNormSpec.bound())
    assert not res.stationary
    assert 0 < res.tau_qsl <= res.driving_time
    fields = [wigner_single(s, g) for s in states]
    assert qsl_time(fields, res.v_qsl, times) == pytest.approx(res.tau_qsl)


def test_stationary_trajectory():
    g = sphere_grid(8, 8)
    rho = np.eye(2) / 2
    times = np.linspace(0, 1, 5)
    res = analyse_trajectory(times, [rho] * 5, [np.zeros((2, 2))] * 5, g)
    assert res.stationary and res.tau_qsl is None
    with pytest.raises(StationaryTrajectory):
        qsl_time([wigner_single(rho, g)] * 5, np.zeros(5), times)


def test_qsl_time_rejects_bad_nodes():
    g = sphere_grid(8, 8)
    f = wigner_single(np.eye(2) / 2, g)
    with pytest.raises(InvalidArgument):
        qsl_time([f], [1.0], [0.0])
    with pytest.raises(InvalidArgument):
        qsl_time([f, f], [1.0, 1.0], [1.0, 0.0])


def test_two_qubit_derivative_uses_product_grid(rng):
    g = sphere_grid(8, 8)
    d = random_density_matrix(4, rng) - np.eye(4) / 4
    w = wigner_time_derivative(d, g)
    assert w.arity == 2 and w.values.shape == (8, 8, 8, 8)


def test_csv_summary_row():
    p = pc.PhaseCovariantParams(l=3.0, eta=3.0)
    times = np.linspace(0, 1, 4)
    states, derivs = pc.trajectory(pc.state_from_amplitudes(1, 1), times, p)
    res = analyse_trajectory(times, states, derivs, sphere_grid(8, 8))
    buf = io.StringIO()
    write_qsl_csv(res, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "t,v_qsl,argmin_p"
    assert len(lines) == 1 + 4 + 2
    assert lines[5] == "tau,D,tau_qsl"


def test_velocity_field_has_zero_mean():
    p = pc.PhaseCovariantParams(kappa=1.0, l=0.5, nu=1.0, eta=0.5)
    times = np.linspace(0, 10, 60)
    _, derivs = pc.trajectory(pc.state_from_amplitudes(0.5, math.sqrt(3) / 2), times, p)
    g = sphere_grid(16, 16)
    for d in derivs:
        assert abs(integrate(wigner_time_derivative(d, g))) <= 1e-10


def test_exact_derivative_field_matches_finite_differences():
    p = pc.PhaseCovariantParams(kappa=1.0, l=0.5, nu=1.0, eta=0.5)
    rho0 = pc.state_from_amplitudes(1, 1)
    g = sphere_grid(16, 16)
    h = 1e-3
    for t in (0.7, 2.0, 5.0):
        exact = wigner_time_derivative(pc.phase_covariant_generator(rho0, t, p), g).values
        ahead = wigner_transform(pc.evolve_phase_covariant(rho0, t + h, p), g).values
        behind = wigner_transform(pc.evolve_phase_covariant(rho0, t - h, p), g).values
        assert np.abs((ahead - behind) / (2 * h) - exact).max() < 1e-5


def test_velocity_non_increasing_as_p_values_added():
    w = wigner_time_derivative(0.2 * pauli("x") - 0.1 * pauli("z"), sphere_grid(32, 32))
    grids = [(1,), (1, 2), (1, 2, 4), (1, 2, 4, 8)]
    v = [qsl_velocity(w, PNormSpec(ps, include_sup_norm=False))[0] for ps in grids]
    v.append(qsl_velocity(w, PNormSpec((1, 2, 4, 8), include_sup_norm=True))[0])
    assert all(b <= a for a, b in zip(v, v[1:]))
    shuffled = qsl_velocity(w, PNormSpec((8, 2, 4, 1)))
    assert shuffled == qsl_velocity(w, PNormSpec((1, 2, 4, 8)))
