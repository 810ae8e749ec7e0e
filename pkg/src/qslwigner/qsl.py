"""Wigner-space quantum speed limit: velocity from p-norms of dW/dt and the QSL time."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import trapezoid

from .metrics import l1_distance
from .quantum_core import InvalidArgument, as_matrix
from .wigner import SphereGrid, WignerField, integrate_values, wigner_transform

DEFAULT_P_VALUES = (1.0, 2.0, 4.0, 8.0)


class StationaryTrajectory(ArithmeticError):
    """The time-averaged velocity vanishes, so the QSL time is undefined."""


@dataclass(frozen=True)
class PNormSpec:
    """Set of p values over which the velocity is minimised.

    ``bound()`` (p = 1 only) guarantees tau_QSL <= tau; ``min_over_p()`` takes
    the minimum over {1, 2, 4, 8, sup}.  p < 1 is allowed in a custom spec but
    the weighted "norm" then grows without bound as p -> 0.
    """

    p_values: tuple[float, ...] = DEFAULT_P_VALUES
    include_sup_norm: bool = True

    def __post_init__(self):
        ps = tuple(sorted(set(float(p) for p in self.p_values)))
        if not ps and not self.include_sup_norm:
            raise InvalidArgument("p-norm spec is empty")
        if any(not (p > 0) or math.isinf(p) for p in ps):
            raise InvalidArgument("p values must be finite and > 0 (use include_sup_norm for p = inf)")
        object.__setattr__(self, "p_values", ps)

    @classmethod
    def bound(cls) -> "PNormSpec":
        return cls((1.0,), include_sup_norm=False)

    @classmethod
    def min_over_p(cls) -> "PNormSpec":
        return cls(DEFAULT_P_VALUES, include_sup_norm=True)

    @classmethod
    def from_mode(cls, mode: str) -> "PNormSpec":
        if mode == "bound":
            return cls.bound()
        if mode == "min-p":
            return cls.min_over_p()
        raise InvalidArgument(f"unknown p-norm mode {mode!r}; expected 'bound' or 'min-p'")


@dataclass
class QslResult:
    times: np.ndarray
    v_qsl: np.ndarray
    argmin_p: np.ndarray
    driving_time: float
    distance: float
    tau_qsl: float | None
    stationary: bool = False


def wigner_time_derivative(generator_output, grid, tol: float = 1e-10) -> WignerField:
    """Wigner transform of d(rho)/dt.

    ``grid`` is one SphereGrid for a qubit or a pair of grids for two qubits.
    """
    d = as_matrix(generator_output)
    tr = np.trace(d)
    if abs(tr) > tol * max(1.0, float(np.max(np.abs(d)))):
        raise InvalidArgument(f"d(rho)/dt must be traceless, got trace {tr:.3g}")
    return wigner_transform(d, _grids_for(d, grid))


def _grids_for(op, grid):
    if isinstance(grid, SphereGrid) and np.shape(op)[0] == 4:
        return (grid, grid)
    return grid


def p_norm(wdot: WignerField, p: float) -> float:
    if math.isinf(p):
        return float(np.max(np.abs(wdot.values)))
    a = np.abs(wdot.values)
    scale = float(np.max(a))
    if scale == 0:
        return 0.0
    # factor out the max to keep |f|^p in range for large p
    return scale * integrate_values(wdot, (a / scale) ** p) ** (1.0 / p)


def qsl_velocity(wdot: WignerField, spec: PNormSpec | None = None) -> tuple[float, float]:
    """Minimum weighted p-norm of dW/dt over the spec; returns (v, argmin p)."""
    spec = spec if spec is not None else PNormSpec.min_over_p()
    if not np.all(np.isfinite(wdot.values)):
        raise InvalidArgument("dW/dt has non-finite values")
    candidates = list(spec.p_values) + ([math.inf] if spec.include_sup_norm else [])
    if not candidates:
        raise InvalidArgument("p-norm spec is empty")
    best_v, best_p = math.inf, math.nan
    for p in candidates:
        v = p_norm(wdot, p)
        if v < best_v:
            best_v, best_p = v, p
    return best_v, best_p


def time_average(times, values) -> float:
    times = np.asarray(times, dtype=float)
    tau = times[-1] - times[0]
    return float(trapezoid(np.asarray(values, dtype=float), times) / tau)


def qsl_time(fields: Sequence[WignerField], velocities, times) -> float:
    """D(W(tau), W(0)) divided by the trapezoid time-average of v_QSL.

    ``times`` must span [0, tau] with one entry per field and velocity.
    Raises StationaryTrajectory when the average velocity is zero.
    """
    times = np.asarray(times, dtype=float)
    if len(fields) < 2 or len(fields) != len(times) or len(velocities) != len(times):
        raise InvalidArgument("need >= 2 aligned time nodes")
    if np.any(np.diff(times) <= 0):
        raise InvalidArgument("time nodes must be strictly increasing")
    num = l1_distance(fields[-1], fields[0])
    den = time_average(times, velocities)
    if den <= 0:
        raise StationaryTrajectory("stationary trajectory: average QSL velocity is zero")
    return num / den


def analyse_trajectory(times, states, derivatives, grids, spec: PNormSpec | None = None) -> QslResult:
    """v_QSL at every node plus the QSL time for a sampled trajectory."""
    spec = spec if spec is not None else PNormSpec.min_over_p()
    times = np.asarray(times, dtype=float)
    grids = _grids_for(states[0], grids)
    v = np.empty(len(times))
    argp = np.empty(len(times))
    for i, d in enumerate(derivatives):
        v[i], argp[i] = qsl_velocity(wigner_time_derivative(d, grids), spec)
    first = wigner_transform(states[0], grids)
    last = wigner_transform(states[-1], grids)
    dist = l1_distance(last, first)
    den = time_average(times, v)
    if den <= 0:
        return QslResult(times, v, argp, float(times[-1] - times[0]), dist, None, stationary=True)
    return QslResult(times, v, argp, float(times[-1] - times[0]), dist, dist / den)


def write_qsl_csv(result: QslResult, fh) -> None:
    """Rows (t, v_qsl, argmin_p) followed by a summary row (tau, D, tau_qsl)."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["t", "v_qsl", "argmin_p"])
    for t, v, p in zip(result.times, result.v_qsl, result.argmin_p):
        w.writerow([repr(float(t)), repr(float(v)), "inf" if math.isinf(p) else repr(float(p))])
    w.writerow(["tau", "D", "tau_qsl"])
    tq = "stationary" if result.stationary else repr(float(result.tau_qsl))
    w.writerow([repr(result.driving_time), repr(result.distance), tq])
