"""Spin Wigner functions, nonclassical volume and Wigner-space quantum speed limits
for a phase-covariant qubit and two qubits in a squeezed thermal bath."""

__version__ = "0.1.0"

from .quantum_core import InvalidArgument
from .wigner import (
    SphereGrid,
    WignerField,
    integrate,
    multipole_operator,
    spherical_harmonic,
    sphere_grid,
    wigner_3j,
    wigner_at,
    wigner_single,
    wigner_transform,
    wigner_two,
)
from .metrics import MetricResult, nonclassical_volume, wasserstein1
from .qsl import PNormSpec, QslResult, StationaryTrajectory, qsl_time, qsl_velocity, wigner_time_derivative
from .phase_covariant import PhaseCovariantParams, classify_regime, decoherence_functions, evolve_phase_covariant
from .two_qubit import BathGeometryParams, build_state, collective_coefficients, evolve_two_qubit, master_rhs
from .discord import conditional_entropy, quantum_discord


__all__ = [
    "InvalidArgument",
    "SphereGrid",
    "WignerField",
    "integrate",
    "multipole_operator",
    "spherical_harmonic",
    "sphere_grid",
    "wigner_3j",
    "wigner_at",
    "wigner_single",
    "wigner_transform",
    "wigner_two",
    "MetricResult",
    "nonclassical_volume",
    "wasserstein1",
    "PNormSpec",
    "QslResult",
    "StationaryTrajectory",
    "qsl_time",
    "qsl_velocity",
    "wigner_time_derivative",
    "PhaseCovariantParams",
    "classify_regime",
    "decoherence_functions",
    "evolve_phase_covariant",
    "BathGeometryParams",
    "build_state",
    "collective_coefficients",
    "evolve_two_qubit",
    "master_rhs",
    "conditional_entropy",
    "quantum_discord",
]
