"""Right-hand sides of the equations of motion.

Four models share one state layout per frame:

``exact``
    Newton-Lorentz for every particle, each sampling the field at its own
    position. This is the microscopic oracle the others are checked against.
``reduced``
    Centre-of-mass plus constrained internal coordinates with the field
    expanded to first order about R. The constraint force is eliminated in
    closed form, so ``sum m_i rho_ddot_i = 0`` holds identically.
``larmor``
    As ``reduced`` but the moment-sum gradient force on the CM is replaced
    by the equal charge-to-mass expression built from L.
``naive``
    CM driven only by the potential (e / 2 m_e c) L . H, internal motion
    pure Coulomb. Used as the falsified baseline.

The flat-vector closures returned by :func:`vector_field` are what the
integrator calls. For affine fields they dispatch to the compiled kernels
in :mod:`nady._kernels`; otherwise, and for all dataclass-level functions
here, the numpy implementations below are used.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import (
    C,
    CONSTRAINT_TOL,
    E_CHARGE,
    M_ELECTRON,
    MIN_SEPARATION,
    FullState,
    ReducedState,
    constraint_residual,
)
from .coulomb import coulomb
from .errors import ConstraintViolation, InapplicableApproximation, NeutralityViolation, SingularityApproach
from .observables import dipole, internal_angular_momentum

MODELS = ("exact", "reduced", "larmor", "naive")


def cross(a, b):
    """np.cross for (..., 3) arrays without its dispatch overhead."""
    a0, a1, a2 = a[..., 0], a[..., 1], a[..., 2]
    b0, b1, b2 = b[..., 0], b[..., 1], b[..., 2]
    return np.stack([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0], axis=-1)


@dataclass(frozen=True)
class ForceDecomposition:
    grad_E_term: np.ndarray
    dPdt_term: np.ndarray
    f_parallel: np.ndarray
    moment_term: np.ndarray
    total: np.ndarray

    def as_array(self):
        """The four named terms stacked as a (4, 3) array."""
        return np.stack([self.grad_E_term, self.dPdt_term, self.f_parallel, self.moment_term])


@dataclass(frozen=True)
class FullDerivatives:
    velocities: np.ndarray
    accelerations: np.ndarray

    def to_vector(self):
        return np.concatenate([self.velocities.ravel(), self.accelerations.ravel()])


@dataclass(frozen=True)
class ReducedDerivatives:
    R_dot: np.ndarray
    R_ddot: np.ndarray
    rho_dot: np.ndarray
    rho_ddot: np.ndarray

    def to_vector(self):
        return np.concatenate([self.R_dot, self.R_ddot, self.rho_dot.ravel(), self.rho_ddot.ravel()])


def _require_neutral(spec):
    if not spec.neutral:
        raise NeutralityViolation("the centre-of-mass reduction needs a neutral system")


def _cm_terms(R, V, rho, rho_dot, q, field):
    """(H, J, g, P, P_dot, grad_E, dPdt, f_par, moment) at one reduced state."""
    H = field.H(R)
    J = field.jacobian_H(R)
    P = q @ rho
    P_dot = q @ rho_dot
    g = J @ V
    if field.has_electric:
        grad_E = field.jacobian_E(R).T @ P
    else:
        grad_E = np.zeros(3)
    dPdt = cross(P_dot, H) / C
    f_par = cross(P, g) / C
    mvec = cross(P, V) / C + q @ cross(rho, rho_dot) / (2 * C)
    moment = J.T @ mvec
    return H, J, g, P, P_dot, grad_E, dPdt, f_par, moment


def _internal_accel(R, V, rho, rho_dot, m, q, M, H, g, P, P_dot, field):
    forces, _ = coulomb(rho, q)
    E = field.E(R)
    drive = E + cross(V, H) / C
    mu = (m / M)[:, None]
    a = (
        forces
        + q[:, None] * drive
        + cross(q[:, None] * rho - mu * P, g) / (2 * C)
        + cross(q[:, None] * rho_dot - mu * P_dot, H) / C
    )
    return a / m[:, None]


def _split_reduced(y, n):
    return y[0:3], y[3:6], y[6 : 6 + 3 * n].reshape(n, 3), y[6 + 3 * n :].reshape(n, 3)


def _pack_reduced(V, A, rho_dot, rho_ddot):
    return np.concatenate([V, A, rho_dot.ravel(), rho_ddot.ravel()])


def _exact_numpy(spec, field):
    m = spec.masses
    q = spec.charges
    n = spec.n

    def f(t, y):
        r = y[: 3 * n].reshape(n, 3)
        v = y[3 * n :].reshape(n, 3)
        forces, _ = coulomb(r, q)
        lorentz = q[:, None] * (field.E(r) + cross(v, field.H(r)) / C)
        a = (forces + lorentz) / m[:, None]
        return np.concatenate([v.ravel(), a.ravel()])

    return f


def _reduced_numpy(spec, field):
    _require_neutral(spec)
    m = spec.masses
    q = spec.charges
    M = spec.total_mass
    n = spec.n

    def f(t, y):
        R, V, rho, rho_dot = _split_reduced(y, n)
        H, J, g, P, P_dot, grad_E, dPdt, f_par, moment = _cm_terms(R, V, rho, rho_dot, q, field)
        A = (grad_E + dPdt + f_par + moment) / M
        rho_ddot = _internal_accel(R, V, rho, rho_dot, m, q, M, H, g, P, P_dot, field)
        return _pack_reduced(V, A, rho_dot, rho_ddot)

    return f


def check_larmor_applicable(spec):
    """Raise unless one nucleus plus a cloud of identical electrons.

    The nucleus is the heaviest particle; every other particle must carry
    charge -e and mass m_e exactly.
    """
    heaviest = int(np.argmax(spec.masses))
    for i, p in enumerate(spec.particles):
        if i == heaviest:
            continue
        if p.charge != -1 or p.mass != M_ELECTRON:
            raise InapplicableApproximation(
                f"particle {i} (m={p.mass}, q={p.charge}) breaks the common charge-to-mass ratio"
            )


def _larmor_moment(J, P, V, L):
    return J.T @ (cross(P, V) / C - (E_CHARGE / (2 * M_ELECTRON * C)) * L)


def _larmor_numpy(spec, field):
    _require_neutral(spec)
    check_larmor_applicable(spec)
    m = spec.masses
    q = spec.charges
    M = spec.total_mass
    n = spec.n

    def f(t, y):
        R, V, rho, rho_dot = _split_reduced(y, n)
        H, J, g, P, P_dot, grad_E, dPdt, f_par, _ = _cm_terms(R, V, rho, rho_dot, q, field)
        L = m @ cross(rho, rho_dot)
        A = (grad_E + dPdt + f_par + _larmor_moment(J, P, V, L)) / M
        rho_ddot = _internal_accel(R, V, rho, rho_dot, m, q, M, H, g, P, P_dot, field)
        return _pack_reduced(V, A, rho_dot, rho_ddot)

    return f


def _naive_numpy(spec, field):
    _require_neutral(spec)
    m = spec.masses
    q = spec.charges
    M = spec.total_mass
    n = spec.n

    def f(t, y):
        R, V, rho, rho_dot = _split_reduced(y, n)
        L = m @ cross(rho, rho_dot)
        A = naive_potential_force(L, field, R) / M
        forces, _ = coulomb(rho, q)
        return _pack_reduced(V, A, rho_dot, forces / m[:, None])

    return f


def _guard(dmin):
    if dmin <= MIN_SEPARATION:
        raise SingularityApproach(f"pair separation {dmin:.3e} <= {MIN_SEPARATION:.1e}")


def _exact_compiled(spec, aff):
    m = np.ascontiguousarray(spec.masses)
    q = np.ascontiguousarray(spec.charges)
    kernel = _kernels.exact_rhs_kernel

    def f(t, y):
        out = np.empty_like(y)
        _guard(kernel(y, m, q, aff.h0, aff.JH, aff.e0, aff.JE, out))
        return out

    return f


def _reduced_compiled(spec, aff, mode):
    m = np.ascontiguousarray(spec.masses)
    q = np.ascontiguousarray(spec.charges)
    M = spec.total_mass
    kernel = _kernels.reduced_rhs_kernel

    def f(t, y):
        out = np.empty_like(y)
        _guard(kernel(y, m, q, M, aff.h0, aff.JH, aff.e0, aff.JE, mode, out))
        return out

    return f


_NUMPY = {"exact": _exact_numpy, "reduced": _reduced_numpy, "larmor": _larmor_numpy, "naive": _naive_numpy}
_MODES = {"reduced": _kernels.MODE_REDUCED, "larmor": _kernels.MODE_LARMOR, "naive": _kernels.MODE_NAIVE}


def vector_field(model, spec, field, compiled=True):
    """Flat ``f(t, y)`` for ``model``.

    ``exact`` uses the lab layout (all positions, then all velocities); the
    other models use the reduced layout ``R, R_dot, rho, rho_dot``.
    """
    if model not in _NUMPY:
        raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")
    aff = field.affine() if compiled else None
    if aff is None:
        return _NUMPY[model](spec, field)
    if model == "exact":
        return _exact_compiled(spec, aff)
    _require_neutral(spec)
    if model == "larmor":
        check_larmor_applicable(spec)
    return _reduced_compiled(spec, aff, _MODES[model])


def exact_vector_field(spec, field):
    return vector_field("exact", spec, field)


def reduced_vector_field(spec, field):
    return vector_field("reduced", spec, field)


def exact_rhs(state, spec, field):
    y = state.to_vector()
    dy = _exact_numpy(spec, field)(state.time, y)
    n = spec.n
    return FullDerivatives(dy[: 3 * n].reshape(n, 3), dy[3 * n :].reshape(n, 3))


def _check_constraint(state, spec):
    resid = constraint_residual(state, spec)
    if resid > CONSTRAINT_TOL:
        raise ConstraintViolation(f"constraint residual {resid:.3e} exceeds {CONSTRAINT_TOL:.1e}")


def reduced_rhs(state, spec, field):
    _check_constraint(state, spec)
    dy = _reduced_numpy(spec, field)(state.time, state.to_vector())
    return ReducedDerivatives(*_split_reduced(dy, spec.n))


def lambda_multiplier(state, spec, field):
    """Constraint multiplier that keeps sum m_i rho_i = 0:
    ``-(P / 2Mc) x grad(R_dot . H0) - (P_dot / Mc) x H0``."""
    P, P_dot = dipole(state, spec)
    M = spec.total_mass
    g = field.jacobian_H(state.R) @ state.R_dot
    H = field.H(state.R)
    return -cross(P, g) / (2 * M * C) - cross(P_dot, H) / (M * C)


def cm_force_terms(state, spec, field):
    _, _, _, _, _, grad_E, dPdt, f_par, moment = _cm_terms(
        state.R, state.R_dot, state.rho, state.rho_dot, spec.charges, field
    )
    return ForceDecomposition(grad_E, dPdt, f_par, moment, grad_E + dPdt + f_par + moment)


def larmor_force_terms(state, spec, field):
    """The CM force decomposition with only the moment term swapped for its
    equal charge-to-mass form ``((1/c) P x R_dot - (e / 2 m_e c) L) . grad H0``."""
    check_larmor_applicable(spec)
    exact = cm_force_terms(state, spec, field)
    P, _ = dipole(state, spec)
    L = internal_angular_momentum(state, spec)
    moment = _larmor_moment(field.jacobian_H(state.R), P, state.R_dot, L)
    return ForceDecomposition(
        exact.grad_E_term,
        exact.dPdt_term,
        exact.f_parallel,
        moment,
        exact.grad_E_term + exact.dPdt_term + exact.f_parallel + moment,
    )


def larmor_cm_rhs(state, spec, field):
    """CM acceleration of the Larmor-substituted model."""
    return larmor_force_terms(state, spec, field).total / spec.total_mass


def naive_potential_force(L, field, R):
    """-grad_R of (e / 2 m_e c) L . H0(R) at fixed L."""
    J = field.jacobian_H(np.asarray(R, dtype=float))
    return -(E_CHARGE / (2 * M_ELECTRON * C)) * (J @ np.asarray(L, dtype=float))


def state_from_vector(model, y, time=0.0):
    if model == "exact":
        return FullState.from_vector(y, time)
    return ReducedState.from_vector(y, time)
