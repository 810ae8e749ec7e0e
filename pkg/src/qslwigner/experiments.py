"""Named experiments: parameter schemas, defaults and row generators."""

from __future__ import annotations

import ast
import math
import operator
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import phase_covariant as pc
from . import two_qubit as tq
from .discord import quantum_discord
from .metrics import nonclassical_volume
from .qsl import PNormSpec, analyse_trajectory, qsl_velocity, wigner_time_derivative
from .quantum_core import InvalidArgument
from .wigner import sphere_grid, wigner_at, wigner_transform


@dataclass(frozen=True)
class Param:
    default: object
    kind: str  # float | floats | int | str
    help: str = ""


def parse_value(raw: str, kind: str):
    raw = raw.strip()
    if kind == "str":
        return raw
    if kind == "int":
        return int(raw)
    if kind == "float":
        return _parse_float(raw)
    if kind == "floats":
        if raw.count(":") == 2:
            a, b, n = raw.split(":")
            return [float(v) for v in np.linspace(_parse_float(a), _parse_float(b), int(n))]
        return [_parse_float(v) for v in raw.split(",") if v.strip()]
    raise ValueError(f"unknown parameter kind {kind}")


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def _eval_node(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id == "pi":
        return math.pi
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_node(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_node(node.left), _eval_node(node.right))
    if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "sqrt"
            and len(node.args) == 1 and not node.keywords):
        return math.sqrt(_eval_node(node.args[0]))
    raise ValueError("unsupported expression")


def _parse_float(raw: str) -> float:
    """A float literal or simple arithmetic with 'pi' and 'sqrt(...)', e.g. pi/3."""
    raw = raw.strip()
    try:
        value = float(raw)
    except ValueError:
        try:
            value = _eval_node(ast.parse(raw, mode="eval").body)
        except (SyntaxError, ValueError, ZeroDivisionError):
            raise ValueError(f"cannot parse number {raw!r}") from None
    if not math.isfinite(value):
        raise ValueError(f"{raw!r} is not a finite number")
    return value


def format_value(value) -> str:
    if isinstance(value, list):
        return ",".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


_GRID = {
    "n_theta": Param(64, "int", "theta nodes per sphere"),
    "n_phi": Param(64, "int", "phi nodes per sphere"),
}
_GRID2 = {
    "n_theta": Param(32, "int", "theta nodes per sphere"),
    "n_phi": Param(32, "int", "phi nodes per sphere"),
}
_PC = {
    "kappa": Param(1.0, "float", "NMAD coupling"),
    "l": Param(0.01, "float", "NMAD spectral width"),
    "nu": Param(1.0, "float", "NMRTN coupling"),
    "eta": Param(0.01, "float", "NMRTN bandwidth"),
    "t_max": Param(20.0, "float"),
    "n_t": Param(400, "int"),
}
_BATH = {
    "T": Param(1.0, "float", "temperature"),
    "r": Param(-0.2, "float", "bath squeezing magnitude"),
    "phi_sq": Param(0.0, "float", "bath squeezing phase"),
    "omega1": Param(1.0, "float"),
    "omega2": Param(1.0, "float"),
    "Gamma1": Param(0.05, "float"),
    "Gamma2": Param(0.05, "float"),
    "mu_dot_r": Param(0.0, "float"),
    "f_convention": Param("corrected", "str", "corrected | literal"),
    "omega_prefactor": Param("root-half", "str", "root-half | standard"),
}
_P_MODE = {"p_mode": Param("bound", "str", "bound (p = 1) | min-p (min over p in {1,2,4,8,inf})")}
_WORKERS = {"workers": Param(1, "int", "worker processes for sweeps")}


def _bath(params: dict, **override) -> tq.BathGeometryParams:
    keys = ("T", "r", "phi_sq", "omega1", "omega2", "Gamma1", "Gamma2", "mu_dot_r",
            "f_convention", "omega_prefactor")
    kw = {k: params[k] for k in keys}
    kw.update(override)
    return tq.BathGeometryParams(**kw)


def _pc_params(params: dict) -> pc.PhaseCovariantParams:
    return pc.PhaseCovariantParams(params["kappa"], params["l"], params["nu"], params["eta"])


def _times(params: dict) -> np.ndarray:
    if params["n_t"] < 2 or params["t_max"] <= 0:
        raise InvalidArgument("need t_max > 0 and n_t >= 2")
    return np.linspace(0.0, params["t_max"], params["n_t"])


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


# --- single-qubit experiments ---------------------------------------------------

def _phasecov_states(params):
    rho0 = pc.state_from_amplitudes(params["amp0"], params["amp1"])
    return pc.trajectory(rho0, _times(params), _pc_params(params))


def run_phasecov_wigner(params: dict):
    times = _times(params)
    states, _ = _phasecov_states(params)
    grid = sphere_grid(params["n_theta"], params["n_phi"])
    rows = []
    for t, rho in zip(times, states):
        w = wigner_at(rho, params["theta"], params["phi"])
        delta = nonclassical_volume(wigner_transform(rho, grid), estimate_error=False).value
        rows.append((t, w, delta))
    return ["t", "W", "delta"], rows, {}


def run_phasecov_volume(params: dict):
    times = _times(params)
    states, _ = _phasecov_states(params)
    grid = sphere_grid(params["n_theta"], params["n_phi"])
    rows = []
    for t, rho in zip(times, states):
        m = nonclassical_volume(wigner_transform(rho, grid), estimate_error=True)
        rows.append((t, m.value, m.estimated_quadrature_error))
    return ["t", "delta", "delta_err"], rows, {}


def run_phasecov_qsl(params: dict):
    times = _times(params)
    states, derivs = _phasecov_states(params)
    grid = sphere_grid(params["n_theta"], params["n_phi"])
    res = analyse_trajectory(times, states, derivs, grid, PNormSpec.from_mode(params["p_mode"]))
    rows = []
    for t, v, p, rho in zip(times, res.v_qsl, res.argmin_p, states):
        delta = nonclassical_volume(wigner_transform(rho, grid), estimate_error=False).value
        rows.append((t, v, p, delta))
    summary = {"tau": res.driving_time, "D": res.distance,
               "tau_qsl": "stationary" if res.stationary else res.tau_qsl}
    return ["t", "v_qsl", "argmin_p", "delta"], rows, summary


# --- two-qubit experiments -------------------------------------------------------

def _two_qubit_series(args):
    params, x12, kind = args
    times = _times(params)
    bath = _bath(params, x12=x12)
    traj = tq.evolve_two_qubit(tq.build_state(params["state"]), times, bath)
    rows = []
    if kind == "wigner":
        angles = (params["theta1"], params["phi1"], params["theta2"], params["phi2"])
        for t, rho in zip(times, traj.states):
            rows.append((t, x12, wigner_at(rho, *angles)))
    else:
        g = sphere_grid(params["n_theta"], params["n_phi"])
        for t, rho in zip(times, traj.states):
            delta = nonclassical_volume(wigner_transform(rho, (g, g))).value
            rows.append((t, x12, delta))
    return rows


def run_twoqubit_wigner(params: dict):
    chunks = _map(_two_qubit_series, [(params, x, "wigner") for x in params["x12"]], params["workers"])
    return ["t", "x12", "W"], [r for c in chunks for r in c], {}


def run_twoqubit_volume(params: dict):
    chunks = _map(_two_qubit_series, [(params, x, "volume") for x in params["x12"]], params["workers"])
    return ["t", "x12", "delta"], [r for c in chunks for r in c], {}


def velocity_at(rho0, t: float, bath: tq.BathGeometryParams, grid, spec: PNormSpec):
    """v_QSL of the two-qubit model at time t, plus the evolved state."""
    traj = tq.evolve_two_qubit(rho0, [0.0, t], bath)
    rho_t = traj.states[-1]
    v, p = qsl_velocity(wigner_time_derivative(traj.derivatives()[-1], grid), spec)
    return v, p, rho_t


def _velocity_point(args):
    params, x12, T, state = args
    g = sphere_grid(params["n_theta"], params["n_phi"])
    bath = _bath(params, x12=x12, T=T)
    v, _, rho_t = velocity_at(tq.build_state(state), params["t"], bath, g,
                              PNormSpec.from_mode(params["p_mode"]))
    return v, rho_t


def run_twoqubit_qsl_distance(params: dict):
    pts = [(params, x, T, params["state"]) for T in params["T"] for x in params["x12"]]
    out = _map(_velocity_point, pts, params["workers"])
    rows = [(x, T, v) for (_, x, T, _), (v, _) in zip(pts, out)]
    return ["x12", "T", "v_qsl"], rows, {}


def run_twoqubit_qsl_temperature(params: dict):
    pts = [(params, x, T, params["state"]) for x in params["x12"] for T in params["T"]]
    out = _map(_velocity_point, pts, params["workers"])
    rows = [(T, x, v) for (_, x, T, _), (v, _) in zip(pts, out)]
    return ["T", "x12", "v_qsl"], rows, {}


def run_discord_sweep(params: dict):
    pts = [(params, params["x12"], params["T"], P) for P in params["P"]]
    out = _map(_velocity_point, pts, params["workers"])
    rows = []
    for (_, _, _, P), (v, rho_t) in zip(pts, out):
        d = quantum_discord(0.5 * (rho_t + rho_t.conj().T))
        rows.append((P, v, d.discord, d.argmin_direction.theta_m, d.argmin_direction.phi_m))
    return ["P", "v_qsl", "discord", "theta_m", "phi_m"], rows, {}


@dataclass(frozen=True)
class Experiment:
    name: str
    summary_line: str
    schema: dict
    runner: Callable


_TWO_Q = {"state": Param("01", "str", "00|01|10|11|bell or a Werner weight P")}

EXPERIMENTS: dict[str, Experiment] = {
    e.name: e
    for e in [
        Experiment(
            "phasecov-wigner",
            "W(pi/3, pi) and delta vs t, phase-covariant channel",
            {**_PC, **_GRID,
             "amp0": Param(0.5, "float"), "amp1": Param(math.sqrt(3) / 2, "float"),
             "theta": Param(math.pi / 3, "float"), "phi": Param(math.pi, "float")},
            run_phasecov_wigner,
        ),
        Experiment(
            "phasecov-volume",
            "nonclassical volume vs t with a doubled-grid error estimate",
            {**_PC, **_GRID,
             "amp0": Param(0.5, "float"), "amp1": Param(math.sqrt(3) / 2, "float")},
            run_phasecov_volume,
        ),
        Experiment(
            "phasecov-qsl",
            "v_QSL and delta vs t from |+>, with the tau_QSL summary",
            {**_PC, **_GRID, **_P_MODE,
             "amp0": Param(1 / math.sqrt(2), "float"), "amp1": Param(1 / math.sqrt(2), "float")},
            run_phasecov_qsl,
        ),
        Experiment(
            "twoqubit-wigner",
            "W(pi/4, pi/8, pi/6, pi/6) vs t from |01>, squeezed thermal bath",
            {**_BATH, **_TWO_Q, **_WORKERS,
             "x12": Param([0.1, 1.1], "floats"), "t_max": Param(50.0, "float"), "n_t": Param(400, "int"),
             "theta1": Param(math.pi / 4, "float"), "phi1": Param(math.pi / 8, "float"),
             "theta2": Param(math.pi / 6, "float"), "phi2": Param(math.pi / 6, "float")},
            run_twoqubit_wigner,
        ),
        Experiment(
            "twoqubit-volume",
            "two-qubit nonclassical volume vs t from |01>",
            {**_BATH, **_TWO_Q, **_GRID2, **_WORKERS,
             "x12": Param([0.1, 1.1], "floats"), "t_max": Param(50.0, "float"), "n_t": Param(200, "int")},
            run_twoqubit_volume,
        ),
        Experiment(
            "twoqubit-qsl-distance",
            "v_QSL at t = 0.5 vs k0 r12 for T in {0.1, 1}",
            {**_BATH, **_TWO_Q, **_GRID2, **_P_MODE, **_WORKERS,
             "T": Param([0.1, 1.0], "floats"), "x12": Param(list(np.linspace(0.1, 3.0, 30)), "floats"),
             "t": Param(0.5, "float")},
            run_twoqubit_qsl_distance,
        ),
        Experiment(
            "twoqubit-qsl-temperature",
            "v_QSL at t = 0.5 vs T for k0 r12 in {0.1, 1.1}",
            {**_BATH, **_TWO_Q, **_GRID2, **_P_MODE, **_WORKERS,
             "T": Param(list(np.linspace(0.1, 5.0, 50)), "floats"), "x12": Param([0.1, 1.1], "floats"),
             "t": Param(0.5, "float")},
            run_twoqubit_qsl_temperature,
        ),
        Experiment(
            "discord-sweep",
            "v_QSL and discord vs Werner weight P at t = 1, k0 r12 = 0.05, r = 0.5",
            {**{k: v for k, v in _BATH.items() if k not in ("T", "r")}, **_GRID2, **_P_MODE, **_WORKERS,
             "T": Param(1.0, "float"), "r": Param(0.5, "float"), "x12": Param(0.05, "float"),
             "t": Param(1.0, "float"), "P": Param(list(np.linspace(0.0, 1.0, 21)), "floats")},
            run_discord_sweep,
        ),
    ]
}


def list_experiments() -> list[str]:
    return [f"{e.name}\t{e.summary_line}" for e in EXPERIMENTS.values()]


def resolve(name: str, overrides: dict[str, str]) -> dict:
    """Defaults of ``name`` updated with string overrides; validates every key."""
    if name not in EXPERIMENTS:
        raise InvalidArgument(f"unknown experiment {name!r}; available: {', '.join(EXPERIMENTS)}")
    schema = EXPERIMENTS[name].schema
    params = {k: p.default for k, p in schema.items()}
    for key, raw in overrides.items():
        if key not in schema:
            raise InvalidArgument(f"unknown parameter {key!r} for {name}; known: {', '.join(sorted(schema))}")
        try:
            params[key] = parse_value(raw, schema[key].kind)
        except ValueError as exc:
            raise InvalidArgument(f"bad value for {key}: {exc}") from None
    validate(name, params)
    return params


def validate(name: str, params: dict) -> None:
    """Build every parameter object up front so bad configs fail before any work."""
    if "n_theta" in params:
        sphere_grid(params["n_theta"], params["n_phi"])
    if "p_mode" in params:
        PNormSpec.from_mode(params["p_mode"])
    if "kappa" in params:
        _pc_params(params)
        _times(params)
        pc.state_from_amplitudes(params["amp0"], params["amp1"])
    if "Gamma1" in params:
        xs = params["x12"] if isinstance(params["x12"], list) else [params["x12"]]
        Ts = params["T"] if isinstance(params["T"], list) else [params["T"]]
        if not xs or not Ts:
            raise InvalidArgument("empty sweep")
        for x in xs:
            for T in Ts:
                _bath(params, x12=x, T=T)
    if "state" in params:
        tq.build_state(params["state"])
    if "P" in params:
        if not params["P"]:
            raise InvalidArgument("empty P sweep")
        for P in params["P"]:
            tq.werner_state(P)
    if "t_max" in params and "kappa" not in params:
        _times(params)
    if "t" in params and params["t"] <= 0:
        raise InvalidArgument("t must be > 0")
    if "workers" in params and params["workers"] < 1:
        raise InvalidArgument("workers must be >= 1")
