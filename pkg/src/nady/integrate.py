"""Deterministic explicit Runge-Kutta integration on flat state vectors.

Two methods: classical fixed-step RK4 and the adaptive Dormand-Prince 5(4)
pair with a PI step-size controller. For reduced states the centre-of-mass
constraint is re-imposed after accepted steps by :func:`project_constraints`.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .core import ReducedState
from .errors import SingularityApproach, StepLimitReached

# Dormand-Prince 5(4) tableau
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_A_ROWS = [np.array(row) for row in _A]
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4

SAFETY = 0.9
FACTOR_MIN = 0.2
FACTOR_MAX = 5.0
# PI exponents for a 5th-order propagated solution
_BETA = 0.04
_ALPHA = 0.2 - 0.75 * _BETA


class Termination(enum.Enum):
    COMPLETED = "Completed"
    SINGULARITY_APPROACH = "SingularityApproach"
    STEP_LIMIT_REACHED = "StepLimitReached"


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "RK45"
    h_init: float = 1e-3
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_steps: int = 10_000_000
    sample_interval: float | None = None
    project_every: int = 1

    def __post_init__(self):
        if self.method not in ("RK4", "RK45"):
            raise ValueError(f"method must be RK4 or RK45, got {self.method!r}")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if not self.max_steps > 0:
            raise ValueError("max_steps must be positive")
        if not self.h_init > 0:
            raise ValueError("h_init must be positive")
        if self.sample_interval is not None and not self.sample_interval > 0:
            raise ValueError("sample_interval must be positive")
        if self.project_every < 0:
            raise ValueError("project_every must be >= 0")


@dataclass
class Trajectory:
    """Sampled solution. ``states[k]`` is the flat state vector at ``times[k]``."""

    times: np.ndarray
    states: np.ndarray
    observations: list = field(default_factory=list)
    termination: Termination = Termination.COMPLETED
    n_steps: int = 0
    n_rejected: int = 0
    message: str = ""

    @property
    def samples(self):
        return list(zip(self.times, self.states, self.observations or [None] * len(self.times)))

    @property
    def final_state(self):
        return self.states[-1]


def step_rk4(rhs, y, h, t=0.0):
    """One classical fourth-order Runge-Kutta step of ``y' = rhs(t, y)``."""
    if not h > 0:
        raise ValueError("step must be positive")
    k1 = rhs(t, y)
    k2 = rhs(t + h / 2, y + h / 2 * k1)
    k3 = rhs(t + h / 2, y + h / 2 * k2)
    k4 = rhs(t + h, y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _dopri_step(rhs, t, y, h, k1):
    K = np.empty((7, len(y)))
    K[0] = k1
    for i in range(1, 7):
        y_stage = y + h * (_A_ROWS[i] @ K[:i])
        K[i] = rhs(t + _C[i] * h, y_stage)
    # the last stage is evaluated at the propagated solution (first-same-as-last)
    return y_stage, h * (_E @ K), K[6]


def project_vector(y, masses):
    """Flat-vector form of :func:`project_constraints` (reduced layout)."""
    n = len(masses)
    M = masses.sum()
    out = y.copy()
    rho = out[6 : 6 + 3 * n].reshape(n, 3)
    rho_dot = out[6 + 3 * n :].reshape(n, 3)
    s = masses @ rho / M
    sd = masses @ rho_dot / M
    rho -= s
    rho_dot -= sd
    out[0:3] += s
    out[3:6] += sd
    return out


def project_constraints(state, spec):
    """Remove the mass-weighted mean from rho and rho_dot.

    The removed shift is added to R and R_dot, so lab positions and
    velocities ``R + rho_i`` are unchanged up to rounding.
    """
    y = project_vector(state.to_vector(), spec.masses)
    return ReducedState.from_vector(y, state.time)


def integrate(rhs, y0, t_span, cfg=IntegratorConfig(), observers=(), project=None):
    """Integrate ``y' = rhs(t, y)`` from ``t_span[0]`` to ``t_span[1]``.

    ``observers`` are callables ``obs(t, y) -> dict`` evaluated at every
    sample; their merged dicts land in ``Trajectory.observations``.
    ``project(y) -> y`` is applied every ``cfg.project_every`` accepted
    steps. Samples fall exactly on multiples of ``cfg.sample_interval``
    (steps are shortened to hit them) or on every accepted step when the
    interval is None. A singular Coulomb approach or exhausting
    ``max_steps`` ends the run early with the partial trajectory and the
    matching termination status.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise ValueError("t_span must be a nonempty forward interval")
    y = np.array(y0, dtype=float)

    times, states, obs = [], [], []

    def record(t, y):
        times.append(t)
        states.append(y.copy())
        if observers:
            snap = {}
            for o in observers:
                snap.update(o(t, y))
            obs.append(snap)

    record(t0, y)
    interval = cfg.sample_interval
    next_sample_idx = 1
    n_steps = n_rejected = 0
    termination = Termination.COMPLETED
    message = ""
    t = t0
    h = min(cfg.h_init, t1 - t0)
    err_prev = 1.0
    k1 = None

    def next_target():
        if interval is None:
            return t1
        return min(t0 + next_sample_idx * interval, t1)

    try:
        while t < t1:
            if n_steps >= cfg.max_steps:
                raise StepLimitReached(f"max_steps={cfg.max_steps} reached at t={t}")
            target = next_target()
            h_try = min(h, target - t)
            hit = h_try >= target - t
            if cfg.method == "RK4":
                y_new = step_rk4(rhs, y, h_try, t)
                accepted = True
            else:
                if k1 is None:
                    k1 = rhs(t, y)
                y_new, err, k_last = _dopri_step(rhs, t, y, h_try, k1)
                scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
                err_norm = float(np.max(np.abs(err) / scale))
                if not np.isfinite(err_norm):
                    err_norm = np.inf
                accepted = err_norm <= 1.0
                if accepted:
                    if err_norm == 0.0:
                        factor = FACTOR_MAX
                    else:
                        factor = SAFETY * err_norm**-_ALPHA * err_prev**_BETA
                    factor = min(FACTOR_MAX, max(FACTOR_MIN, factor))
                    err_prev = max(err_norm, 1e-4)
                    h_next = h_try * factor
                else:
                    n_rejected += 1
                    factor = max(FACTOR_MIN, SAFETY * err_norm**-_ALPHA) if np.isfinite(err_norm) else FACTOR_MIN
                    h = h_try * min(1.0, factor)
                    if h < 1e-14 * max(1.0, abs(t)):
                        raise StepLimitReached(f"step size underflow at t={t}")
                    continue
            n_steps += 1
            t = target if hit else t + h_try
            y = y_new
            if project is not None and cfg.project_every and n_steps % cfg.project_every == 0:
                y = project(y)
            if cfg.method == "RK45":
                k1 = k_last
                # a shortened step to reach a sample must not shrink the next one
                h = h_next if not hit else max(h_next, h)
            if interval is None or hit:
                record(t, y)
                if hit and interval is not None:
                    next_sample_idx += 1
    except SingularityApproach as exc:
        termination = Termination.SINGULARITY_APPROACH
        message = str(exc)
    except StepLimitReached as exc:
        termination = Termination.STEP_LIMIT_REACHED
        message = str(exc)
    if termination is not Termination.COMPLETED and t > times[-1]:
        record(t, y)

    return Trajectory(
        times=np.array(times),
        states=np.array(states),
        observations=obs,
        termination=termination,
        n_steps=n_steps,
        n_rejected=n_rejected,
        message=message,
    )
