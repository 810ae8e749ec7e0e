"""Nonclassical volume and L1 (Wasserstein-1 as defined for Wigner fields) distance."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quantum_core import InvalidArgument
from .wigner import WignerField, integrate, integrate_values, wigner_transform

NORM_TOL = 1e-6
# |W| is exactly integrable only away from nodal lines; below this a
# nonclassical volume is indistinguishable from quadrature noise.
CLAMP_TOL = 1e-10


@dataclass(frozen=True)
class MetricResult:
    value: float
    grid_spec: tuple[tuple[int, int], ...]
    estimated_quadrature_error: float = math.nan


def _check_normalized(field: WignerField, tol: float = NORM_TOL) -> None:
    total = integrate(field)
    if abs(total - 1.0) > tol:
        raise InvalidArgument(f"Wigner field is not normalized (integral = {total:.10g})")


def _abs_integral(field: WignerField) -> float:
    return integrate_values(field, np.abs(field.values))


def _refine(field: WignerField) -> WignerField | None:
    if field.source is None:
        return None
    return wigner_transform(field.source, tuple(g.doubled() for g in field.grids))


def nonclassical_volume(field: WignerField, estimate_error: bool | None = None) -> MetricResult:
    """delta = integral of |W| minus one.

    The error estimate compares against the same state on a grid with twice
    the nodes per axis.  It is on by default for one sphere and off for two
    (the doubled product grid has 16x more points).
    """
    _check_normalized(field)
    delta = _abs_integral(field) - 1.0
    if abs(delta) < CLAMP_TOL:
        delta = 0.0
    if estimate_error is None:
        estimate_error = field.arity == 1
    err = math.nan
    if estimate_error:
        fine = _refine(field)
        if fine is not None:
            err = abs(_abs_integral(fine) - 1.0 - delta)
    if delta < 0:
        # negative beyond the clamp band cannot come from a valid field
        raise InvalidArgument(f"negative nonclassical volume {delta:.3g}; field is not a Wigner function")
    return MetricResult(delta, field.grid_spec, err)


def _check_same_grid(a: WignerField, b: WignerField) -> None:
    if a.arity != b.arity or a.grid_spec != b.grid_spec:
        raise InvalidArgument(f"fields live on different grids: {a.grid_spec} vs {b.grid_spec}")


def l1_distance(a: WignerField, b: WignerField) -> float:
    """Weighted integral of |W_a - W_b| without normalisation checks."""
    _check_same_grid(a, b)
    return integrate_values(a, np.abs(a.values - b.values))


def wasserstein1(a: WignerField, b: WignerField, estimate_error: bool = False) -> MetricResult:
    """D(W_a, W_b) = integral of |W_a - W_b| dOmega.

    This is the total-variation form used for quasiprobabilities, not an
    optimal-transport distance.
    """
    _check_same_grid(a, b)
    _check_normalized(a)
    _check_normalized(b)
    d = l1_distance(a, b)
    err = math.nan
    if estimate_error and a.source is not None and b.source is not None:
        fa, fb = _refine(a), _refine(b)
        err = abs(l1_distance(fa, fb) - d)
    return MetricResult(d, a.grid_spec, err)
