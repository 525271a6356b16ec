"""Scenario configuration, built-in experiments, CSV output and comparison.

A scenario is a JSON mapping::

    {
      "name": "kepler_pair",
      "model": "reduced",                      # exact | reduced | larmor | naive
      "system": [{"mass": 1836.15, "charge": 1}, {"mass": 1, "charge": -1}],
      "field": {"kind": "GradientB", "B0": 1.0, "b": 0.001},
      "initial": {"frame": "lab", "positions": [...], "velocities": [...]},
      "integrator": {"rel_tol": 1e-10, "sample_interval": 10.0},
      "duration": 1000.0,
      "outputs": {"trajectory": "kepler_pair.csv"},
      "seed": 0
    }

``initial`` may instead use ``"frame": "reduced"`` with ``R``, ``R_dot``,
``rho`` and ``rho_dot``. An optional ``jitter`` block
(``{"position": s, "velocity": s}``) perturbs the internal coordinates with
Gaussian noise drawn from ``seed``. A ``sweep`` block
(``{"scales": [...], "models": [a, b]}``) reruns the scenario with the
internal configuration shrunk by each scale and compares the two models.
A ``quantum`` block (``n_max``, ``B``, ``p_R``, ``diamagnetic``) turns the
scenario into a spectrum calculation instead of a trajectory.

All numbers are atomic units.
"""

import copy
import json
import os
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.spatial.transform import Rotation

from . import dynamics, quantum
from .core import C, M_PROTON, FullState, ReducedState, build_system, constraint_residual, to_internal_frame
from .errors import ConfigError, NadyError, NoOverlap
from .fields import FIELD_KINDS, field_from_dict
from .integrate import IntegratorConfig, Termination, integrate, project_vector
from .observables import observe

CSV_FORMAT = "%.17g"

_AXES = ("x", "y", "z")


def _vec_cols(prefix):
    return [f"{prefix}_{a}" for a in _AXES]


TRAJECTORY_COLUMNS = (
    ["t"]
    + _vec_cols("R")
    + _vec_cols("Rdot")
    + _vec_cols("P")
    + _vec_cols("Pdot")
    + _vec_cols("L")
    + _vec_cols("S")
    + ["energy", "hamilton"]
    + _vec_cols("F_gradE")
    + _vec_cols("F_dPdt")
    + _vec_cols("F_par")
    + _vec_cols("F_moment")
    + ["constraint_residual"]
)
SPECTRUM_COLUMNS = ("index", "eigenvalue", "n", "l", "m", "mix")

_TOP_KEYS = {
    "name", "model", "system", "field", "initial", "jitter", "integrator",
    "duration", "outputs", "seed", "quantum", "sweep", "description",
}


# ---------------------------------------------------------------- config


@dataclass
class ScenarioConfig:
    name: str
    model: str = "reduced"
    system: list = dc_field(default_factory=list)
    field: dict = dc_field(default_factory=lambda: {"kind": "NoField"})
    initial: dict = dc_field(default_factory=dict)
    integrator: dict = dc_field(default_factory=dict)
    duration: float = 0.0
    outputs: dict = dc_field(default_factory=dict)
    seed: int = 0
    jitter: dict | None = None
    quantum: dict | None = None
    sweep: dict | None = None
    description: str = ""

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise ConfigError("<root>", "config must be a JSON object")
        unknown = set(d) - _TOP_KEYS
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown key")
        if "name" not in d:
            raise ConfigError("name", "missing")
        cfg = cls(**copy.deepcopy(d))
        cfg.validate()
        return cfg

    def to_dict(self):
        out = {k: copy.deepcopy(v) for k, v in self.__dict__.items() if v is not None}
        return out

    @property
    def is_spectrum(self):
        return self.quantum is not None

    def validate(self):
        if self.is_spectrum:
            _validate_quantum(self.quantum)
            return
        if self.model not in dynamics.MODELS:
            raise ConfigError("model", f"unknown model {self.model!r}; expected one of {dynamics.MODELS}")
        self.build_field()
        spec = self.build_spec()
        if self.model == "larmor":
            try:
                dynamics.check_larmor_applicable(spec)
            except NadyError as exc:
                raise ConfigError("model", str(exc)) from exc
        self.integrator_config()
        if not (isinstance(self.duration, (int, float)) and self.duration > 0):
            raise ConfigError("duration", "must be a positive number")
        if not isinstance(self.seed, int):
            raise ConfigError("seed", "must be an integer")
        self.initial_lab(spec)
        if self.sweep is not None:
            scales = self.sweep.get("scales")
            if not scales or any(not (isinstance(s, (int, float)) and s > 0) for s in scales):
                raise ConfigError("sweep.scales", "must be a nonempty list of positive numbers")
            models = self.sweep.get("models", ["exact", "reduced"])
            if len(models) != 2 or any(m not in dynamics.MODELS for m in models):
                raise ConfigError("sweep.models", "must name two valid models")

    def build_spec(self):
        if not isinstance(self.system, list) or not self.system:
            raise ConfigError("system", "must be a nonempty list of particles")
        particles = []
        for i, p in enumerate(self.system):
            try:
                particles.append((float(p["mass"]), p["charge"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"system[{i}]", f"needs numeric mass and charge ({exc})") from exc
        try:
            # the exact model has no centre-of-mass reduction, so a net charge is fine there
            return build_system(particles, require_neutral=self.model != "exact")
        except NadyError as exc:
            raise ConfigError("system", str(exc)) from exc

    def build_field(self):
        if not isinstance(self.field, dict):
            raise ConfigError("field", "must be an object")
        return _field(self.field, "field")

    def integrator_config(self):
        if not isinstance(self.integrator, dict):
            raise ConfigError("integrator", "must be an object")
        allowed = set(IntegratorConfig.__dataclass_fields__)
        for k in self.integrator:
            if k not in allowed:
                raise ConfigError(f"integrator.{k}", "unknown integrator setting")
        try:
            return IntegratorConfig(**self.integrator)
        except (TypeError, ValueError) as exc:
            raise ConfigError("integrator", str(exc)) from exc

    def initial_lab(self, spec):
        """Initial condition as a FullState, jitter applied."""
        init = self.initial
        frame = init.get("frame", "lab") if isinstance(init, dict) else None
        try:
            if frame == "lab":
                full = FullState(init["positions"], init["velocities"])
            elif frame == "reduced":
                red = ReducedState(init["R"], init["R_dot"], init["rho"], init["rho_dot"])
                full = FullState(red.R + red.rho, red.R_dot + red.rho_dot)
            else:
                raise ConfigError("initial.frame", f"must be 'lab' or 'reduced', got {frame!r}")
        except KeyError as exc:
            raise ConfigError(f"initial.{exc.args[0]}", "missing") from exc
        except (NadyError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError("initial", str(exc)) from exc
        if full.n != spec.n:
            raise ConfigError("initial", f"{full.n} particles given, system has {spec.n}")
        if self.jitter:
            rng = np.random.default_rng(self.seed)
            red = to_internal_frame(full, spec)
            rho = red.rho + float(self.jitter.get("position", 0.0)) * rng.standard_normal(red.rho.shape)
            rho_dot = red.rho_dot + float(self.jitter.get("velocity", 0.0)) * rng.standard_normal(red.rho.shape)
            full = FullState(red.R + rho, red.R_dot + rho_dot)
        return full


def _field(d, key):
    if "kind" not in d:
        raise ConfigError(f"{key}.kind", "missing")
    kind = d["kind"]
    if kind == "Superposition":
        comps = d.get("components")
        if not isinstance(comps, list):
            raise ConfigError(f"{key}.components", "must be a list")
        for i, c in enumerate(comps):
            _field(c, f"{key}.components[{i}]")
    elif kind not in FIELD_KINDS:
        raise ConfigError(f"{key}.kind", f"unknown field kind {kind!r}")
    try:
        return field_from_dict(d)
    except (TypeError, ValueError) as exc:
        raise ConfigError(key, str(exc)) from exc


def _validate_quantum(q):
    if not isinstance(q, dict):
        raise ConfigError("quantum", "must be an object")
    n_max = q.get("n_max")
    if not isinstance(n_max, int) or not 1 <= n_max <= quantum.N_MAX_LIMIT:
        raise ConfigError("quantum.n_max", f"must be an integer in [1, {quantum.N_MAX_LIMIT}]")
    for k in ("B", "p_R"):
        v = q.get(k, [0.0, 0.0, 0.0])
        if not (isinstance(v, list) and len(v) == 3):
            raise ConfigError(f"quantum.{k}", "must be a 3-vector")
    B = q.get("B", [0.0, 0.0, 0.0])
    if B[0] != 0 or B[1] != 0:
        raise ConfigError("quantum.B", "must point along z")


def load_config(path):
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError("<file>", f"invalid JSON: {exc}") from exc
    return ScenarioConfig.from_dict(d)


def apply_override(d, assignment):
    """Set ``a.b.c=value`` in a config mapping; value is parsed as JSON when possible."""
    if "=" not in assignment:
        raise ConfigError(assignment, "override must look like key=value")
    key, raw = assignment.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    parts = key.split(".")
    node = d
    for p in parts[:-1]:
        node = node.setdefault(p, {})
        if not isinstance(node, dict):
            raise ConfigError(key, "cannot override inside a non-object")
    node[parts[-1]] = value
    return d


# ---------------------------------------------------------------- built-ins


def kepler_bodies(m1, m2, a, ecc, rotation=np.eye(3), sense=1):
    """Lab positions and velocities of a two-body Coulomb orbit (q1 q2 = -1)
    about the origin, starting at pericentre."""
    M = m1 + m2
    mu = m1 * m2 / M
    rp = a * (1 - ecc)
    v = np.sqrt((2 / rp - 1 / a) / mu)
    r = rotation @ np.array([rp, 0.0, 0.0])
    u = rotation @ np.array([0.0, sense * v, 0.0])
    return np.array([-m2 / M * r, m1 / M * r]), np.array([-m2 / M * u, m1 / M * u])


def kepler_period(m1, m2, a):
    return 2 * np.pi * np.sqrt(a**3 * m1 * m2 / (m1 + m2))


def _hydrogen():
    return [{"mass": M_PROTON, "charge": 1}, {"mass": 1.0, "charge": -1}]


def _lab(pos, vel):
    return {"frame": "lab", "positions": np.asarray(pos).tolist(), "velocities": np.asarray(vel).tolist()}


def _cyclotron():
    T = 2 * np.pi * C  # m = |q| = B = 1
    return {
        "name": "cyclotron",
        "description": "single electron in a uniform field; one cyclotron period",
        "model": "exact",
        "system": [{"mass": 1.0, "charge": -1}],
        "field": {"kind": "UniformB", "B0": 1.0},
        "initial": _lab([[0.0, 0.0, 0.0]], [[1.0, 0.0, 0.0]]),
        "integrator": {"rel_tol": 1e-10, "abs_tol": 1e-12, "sample_interval": T / 100},
        "duration": T,
    }


def _kepler_pair():
    pos, vel = kepler_bodies(M_PROTON, 1.0, 1.0, 0.3)
    T = 100 * kepler_period(M_PROTON, 1.0, 1.0)
    return {
        "name": "kepler_pair",
        "description": "field-free hydrogen-like pair, 100 orbits",
        "model": "reduced",
        "system": _hydrogen(),
        "field": {"kind": "NoField"},
        "initial": _lab(pos, vel),
        "integrator": {"rel_tol": 1e-10, "abs_tol": 1e-12, "sample_interval": T / 200},
        "duration": T,
    }


def _energy_drift():
    r_in, r_out = 4.0, 16.0
    pos = [[0, 0, 0], [r_in, 0, 0], [0, -r_out, 0.5]]
    vel = np.array([[0, 0, 0], [0, np.sqrt(2 / r_in), 0], [np.sqrt(1 / r_out), 0, 0]])
    vel = vel + np.array([0.003, 0.002, 0.004])
    T = 1e4
    return {
        "name": "energy_drift",
        "description": "helium-like three-body system drifting through a gradient field",
        "model": "reduced",
        "system": [{"mass": 4 * M_PROTON, "charge": 2}, {"mass": 1.0, "charge": -1}, {"mass": 1.0, "charge": -1}],
        "field": {"kind": "GradientB", "B0": 0.1, "b": 0.01},
        "initial": _lab(pos, vel),
        "integrator": {"rel_tol": 1e-10, "abs_tol": 1e-12, "sample_interval": T / 200},
        "duration": T,
    }


def _sg_deflect_L0():
    # pair B is pair A turned by pi about x: it counter-rotates, so L = 0
    # while the two dipole moment sums add up instead of cancelling
    D = 10.0
    pa, va = kepler_bodies(M_PROTON, 1.0, 1.0, 0.6)
    pa = pa + np.array([0.0, 0.0, D / 2])
    flip = np.diag([1.0, -1.0, -1.0])
    pos = np.vstack([pa, pa @ flip])
    vel = np.vstack([va, va @ flip]) + np.array([0.0, 0.01, 0.0])
    m = np.array([M_PROTON, 1.0, M_PROTON, 1.0])
    a_sys = float(np.max(np.linalg.norm(pos - m @ pos / m.sum(), axis=1)))
    T = 2000.0
    return {
        "name": "sg_deflect_L0",
        "description": "two counter-rotating pairs (L = 0) crossing a field gradient with a*b = 1e-3",
        "model": "reduced",
        "system": _hydrogen() + _hydrogen(),
        "field": {"kind": "GradientB", "B0": 1e-3, "b": 1e-3 / a_sys},
        "initial": _lab(pos, vel),
        "integrator": {"rel_tol": 1e-10, "abs_tol": 1e-12, "sample_interval": T / 20},
        "duration": T,
    }


def _f_parallel_demo():
    rot = Rotation.from_euler("zxz", [0.3, 0.7, 1.1]).as_matrix()
    pos, vel = kepler_bodies(M_PROTON, 1.0, 1.0, 0.5, rot)
    vel = vel + np.array([0.0, 0.0, 0.01])
    T = 200.0
    return {
        "name": "f_parallel_demo",
        "description": "hydrogen-like pair moving along the field direction of a gradient field",
        "model": "reduced",
        "system": _hydrogen(),
        "field": {"kind": "GradientB", "B0": 1.0, "b": 0.01},
        "initial": _lab(pos, vel),
        "integrator": {"rel_tol": 1e-10, "abs_tol": 1e-12, "sample_interval": T / 100},
        "duration": T,
    }


def _exact_vs_reduced_sweep():
    rot = Rotation.from_euler("zxz", [0.3, 0.7, 1.1]).as_matrix()
    pos, vel = kepler_bodies(M_PROTON, 1.0, 1.0, 0.5, rot)
    vel = vel + np.array([0.0, 0.01, 0.005])
    T = 300.0
    return {
        "name": "exact_vs_reduced_sweep",
        "description": "exact versus reduced dynamics with the pair size halved twice at fixed gradient",
        "model": "reduced",
        "system": _hydrogen(),
        "field": {"kind": "GradientB", "B0": 1.0, "b": 1e-3},
        "initial": _lab(pos, vel),
        "integrator": {"rel_tol": 1e-12, "abs_tol": 1e-14, "sample_interval": T / 50},
        "duration": T,
        "sweep": {"scales": [1.0, 0.5, 0.25], "models": ["exact", "reduced"]},
    }


def _crossed_spectrum():
    return {
        "name": "crossed_spectrum",
        "description": "hydrogen n <= 3 with a centre-of-mass momentum across the field",
        "quantum": {"n_max": 3, "B": [0.0, 0.0, 0.1], "p_R": [100.0, 0.0, 0.0], "diamagnetic": False},
    }


_BUILTINS = {
    "cyclotron": _cyclotron,
    "kepler_pair": _kepler_pair,
    "energy_drift": _energy_drift,
    "sg_deflect_L0": _sg_deflect_L0,
    "f_parallel_demo": _f_parallel_demo,
    "exact_vs_reduced_sweep": _exact_vs_reduced_sweep,
    "crossed_spectrum": _crossed_spectrum,
}
BUILTIN_NAMES = tuple(_BUILTINS)


def builtin_config(name, as_dict=False):
    if name not in _BUILTINS:
        raise ConfigError("scenario", f"unknown built-in {name!r}; expected one of {BUILTIN_NAMES}")
    d = _BUILTINS[name]()
    return d if as_dict else ScenarioConfig.from_dict(d)


# ---------------------------------------------------------------- running


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    trajectory: object = None
    table: np.ndarray | None = None
    spectrum: list | None = None
    files: list = dc_field(default_factory=list)
    members: list = dc_field(default_factory=list)
    metrics: list = dc_field(default_factory=list)

    @property
    def termination(self):
        if self.members:
            worst = [m.termination for m in self.members if m.termination is not Termination.COMPLETED]
            return worst[0] if worst else Termination.COMPLETED
        if self.trajectory is None:
            return Termination.COMPLETED
        return self.trajectory.termination

    @property
    def track(self):
        return Track.from_table(self.table)


def _forces(model, state, spec, field):
    if model == "larmor":
        return dynamics.larmor_force_terms(state, spec, field)
    if model == "naive":
        from .observables import internal_angular_momentum

        f = dynamics.naive_potential_force(internal_angular_momentum(state, spec), field, state.R)
        z = np.zeros(3)
        return dynamics.ForceDecomposition(z, z, z, f, f)
    return dynamics.cm_force_terms(state, spec, field)


def trajectory_table(traj, model, spec, field):
    """One row per sample, columns as in TRAJECTORY_COLUMNS."""
    rows = np.empty((len(traj.times), len(TRAJECTORY_COLUMNS)))
    for k, (t, y) in enumerate(zip(traj.times, traj.states)):
        if model == "exact":
            state = to_internal_frame(FullState.from_vector(y, t), spec)
        else:
            state = ReducedState.from_vector(y, t)
        obs = observe(state, spec, field)
        forces = _forces(model, state, spec, field)
        rows[k] = np.concatenate(
            [
                [t],
                state.R,
                state.R_dot,
                obs.P,
                obs.P_dot,
                obs.L,
                obs.S,
                [obs.energy, obs.hamilton],
                forces.as_array().ravel(),
                [constraint_residual(state, spec)],
            ]
        )
    return rows


def write_csv(path, columns, rows, fmt=CSV_FORMAT):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, np.asarray(rows), delimiter=",", header=",".join(columns), comments="", fmt=fmt)
    return path


def read_trajectory_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    if header[: len(TRAJECTORY_COLUMNS)] != TRAJECTORY_COLUMNS:
        raise ConfigError(str(path), "not a trajectory CSV (unexpected header)")
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def output_dir(out=None):
    return Path(out or os.environ.get("NADY_OUT_DIR") or ".")


def _simulate(cfg, spec, field, full0):
    icfg = cfg.integrator_config()
    rhs = dynamics.vector_field(cfg.model, spec, field)
    if cfg.model == "exact":
        return integrate(rhs, full0.to_vector(), (0.0, cfg.duration), icfg)
    y0 = to_internal_frame(full0, spec).to_vector()
    return integrate(rhs, y0, (0.0, cfg.duration), icfg, project=lambda y: project_vector(y, spec.masses))


def scale_internal(full, spec, s):
    """Shrink the internal configuration by ``s`` keeping the orbit shape
    (rho -> s rho, rho_dot -> rho_dot / sqrt(s)); the CM is untouched."""
    red = to_internal_frame(full, spec)
    rho = s * red.rho
    rho_dot = red.rho_dot / np.sqrt(s)
    return FullState(red.R + rho, red.R_dot + rho_dot)


def run_scenario(config, out_dir=None, write=True):
    """Run one scenario; returns a :class:`ScenarioResult`.

    Trajectory scenarios write ``<name>.csv`` (or ``outputs.trajectory``),
    spectrum scenarios ``outputs.spectrum``, sweeps one CSV per member plus
    ``<name>_summary.csv``. Dynamics failures end up in the termination
    status, not as exceptions.
    """
    if isinstance(config, dict):
        config = ScenarioConfig.from_dict(config)
    out = output_dir(out_dir)
    if config.is_spectrum:
        return _run_spectrum(config, out, write)

    spec = config.build_spec()
    field = config.build_field()
    full0 = config.initial_lab(spec)
    if config.sweep is not None:
        return _run_sweep(config, spec, field, full0, out, write)

    traj = _simulate(config, spec, field, full0)
    table = trajectory_table(traj, config.model, spec, field)
    result = ScenarioResult(config, trajectory=traj, table=table)
    if write:
        name = config.outputs.get("trajectory", f"{config.name}.csv")
        result.files.append(write_csv(out / name, TRAJECTORY_COLUMNS, table))
    return result


def _run_spectrum(config, out, write):
    q = config.quantum
    problem = quantum.assemble_hamiltonian(
        q["n_max"], q.get("B", [0.0, 0.0, 0.0]), q.get("p_R", [0.0, 0.0, 0.0]), bool(q.get("diamagnetic", False))
    )
    rows = quantum.spectrum_table(problem)
    result = ScenarioResult(config, spectrum=rows)
    if write:
        name = config.outputs.get("spectrum", f"{config.name}.csv")
        result.files.append(write_csv(out / name, SPECTRUM_COLUMNS, rows, fmt=["%d", CSV_FORMAT, "%d", "%d", "%d", CSV_FORMAT]))
    return result


def _run_sweep(config, spec, field, full0, out, write):
    models = config.sweep.get("models", ["exact", "reduced"])
    result = ScenarioResult(config)
    summary = []
    for s in config.sweep["scales"]:
        full = scale_internal(full0, spec, s)
        tracks = []
        for model in models:
            sub = copy.copy(config)
            sub.model = model
            sub.sweep = None
            spec_m = sub.build_spec()
            traj = _simulate(sub, spec_m, field, full)
            table = trajectory_table(traj, model, spec_m, field)
            member = ScenarioResult(sub, trajectory=traj, table=table)
            if write:
                member.files.append(write_csv(out / f"{config.name}_s{s:g}_{model}.csv", TRAJECTORY_COLUMNS, table))
                result.files.extend(member.files)
            result.members.append(member)
            tracks.append(member.track)
        metrics = compare_trajectories(*tracks)
        result.metrics.append((s, metrics))
        summary.append([s, metrics.max_cm_deviation, metrics.final_cm_deviation, metrics.energy_drift_rel, metrics.constraint_residual_max])
    if write:
        cols = ["scale", "max_cm_deviation", "final_cm_deviation", "energy_drift_rel", "constraint_residual_max"]
        result.files.append(write_csv(out / f"{config.name}_summary.csv", cols, summary))
    return result


# ---------------------------------------------------------------- comparison


@dataclass(frozen=True)
class Track:
    """The slice of a trajectory that comparisons need."""

    times: np.ndarray
    R: np.ndarray
    R_dot: np.ndarray
    energy: np.ndarray
    constraint_residual: np.ndarray

    @classmethod
    def from_table(cls, table):
        table = np.asarray(table)
        col = TRAJECTORY_COLUMNS.index
        return cls(
            times=table[:, 0],
            R=table[:, 1:4],
            R_dot=table[:, 4:7],
            energy=table[:, col("energy")],
            constraint_residual=table[:, col("constraint_residual")],
        )


@dataclass(frozen=True)
class ComparisonMetrics:
    max_cm_deviation: float
    final_cm_deviation: float
    energy_drift_rel: float
    constraint_residual_max: float


def _as_track(x):
    if isinstance(x, Track):
        return x
    if isinstance(x, ScenarioResult):
        return x.track
    return Track.from_table(x)


def compare_trajectories(a, b):
    """Compare two trajectories on the sparser one's samples inside their overlap.

    The denser trajectory is resampled with cubic Hermite interpolation of R
    using its stored R_dot; energies are interpolated linearly.
    ``energy_drift_rel`` is the largest energy difference relative to the
    reference energy at the start of the overlap, and
    ``constraint_residual_max`` the largest residual seen in either input.
    """
    a, b = _as_track(a), _as_track(b)
    lo = max(a.times[0], b.times[0])
    hi = min(a.times[-1], b.times[-1])
    if hi < lo:
        raise NoOverlap(f"time ranges [{a.times[0]}, {a.times[-1]}] and [{b.times[0]}, {b.times[-1]}] do not overlap")
    # interpolate the denser onto the sparser grid; ties resample b
    coarse, dense = (a, b) if len(a.times) <= len(b.times) else (b, a)
    keep = (coarse.times >= lo) & (coarse.times <= hi)
    t = coarse.times[keep]
    if np.array_equal(coarse.times, dense.times):
        R_d, E_d = dense.R[keep], dense.energy[keep]
    elif len(dense.times) == 1:
        R_d, E_d = np.repeat(dense.R, len(t), axis=0), np.repeat(dense.energy, len(t))
    else:
        R_d = CubicHermiteSpline(dense.times, dense.R, dense.R_dot, axis=0)(t)
        E_d = np.interp(t, dense.times, dense.energy)
    dev = np.linalg.norm(coarse.R[keep] - R_d, axis=1)
    E_c = coarse.energy[keep]
    e_ref = abs(E_c[0]) if E_c[0] != 0 else 1.0
    return ComparisonMetrics(
        max_cm_deviation=float(dev.max()),
        final_cm_deviation=float(dev[-1]),
        energy_drift_rel=float(np.max(np.abs(E_c - E_d)) / e_ref),
        constraint_residual_max=float(max(a.constraint_residual.max(), b.constraint_residual.max())),
    )
