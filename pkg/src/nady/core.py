"""Units, particle systems, states and the lab <-> centre-of-mass frame maps.

Everything is in Gaussian atomic units: hbar = e = m_e = 1, lengths in
Bohr radii, energies in Hartree, and the speed of light is kept explicit
as ``C`` wherever a 1/c factor appears in the equations of motion.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import (
    ConstraintViolation,
    DimensionMismatch,
    NeutralityViolation,
    NonPositiveMass,
)

C = 137.035999084
HBAR = 1.0
E_CHARGE = 1.0
M_ELECTRON = 1.0
M_PROTON = 1836.15267343

CONSTRAINT_TOL = 1e-10
MIN_SEPARATION = 1e-6


@dataclass(frozen=True)
class Constants:
    c: float = C
    hbar: float = HBAR
    e_charge: float = E_CHARGE
    m_electron: float = M_ELECTRON


def _exact_charge(q):
    if isinstance(q, Rational):
        return Fraction(q)
    if isinstance(q, str):
        return Fraction(q)
    q = float(q)
    if not q.is_integer():
        # non-integer floats are accepted only through their exact decimal string
        return Fraction(repr(q))
    return Fraction(int(q))


@dataclass(frozen=True)
class Particle:
    mass: float
    charge: Fraction

    def __post_init__(self):
        object.__setattr__(self, "mass", float(self.mass))
        object.__setattr__(self, "charge", _exact_charge(self.charge))
        if not self.mass > 0:
            raise NonPositiveMass(f"particle mass must be > 0, got {self.mass}")


@dataclass(frozen=True)
class SystemSpec:
    particles: tuple
    total_mass: float
    masses: np.ndarray = field(repr=False, compare=False)
    charges: np.ndarray = field(repr=False, compare=False)
    neutral: bool = True

    @property
    def n(self):
        return len(self.particles)


def build_system(particles, require_neutral=True):
    """Validate a particle list and return its :class:`SystemSpec`.

    Charges are summed exactly, so ``[1/3, 1/3, -2/3]`` is neutral while
    any nonzero sum raises :class:`NeutralityViolation`. Passing
    ``require_neutral=False`` admits non-neutral sets (a lone test charge,
    say); only the microscopic Newton-Lorentz equations accept those.
    """
    particles = tuple(p if isinstance(p, Particle) else Particle(*p) for p in particles)
    if not particles:
        raise DimensionMismatch("particle list is empty")
    total_charge = sum((p.charge for p in particles), Fraction(0))
    if require_neutral:
        if len(particles) < 2:
            raise DimensionMismatch("a neutral system needs at least two particles")
        if total_charge != 0:
            raise NeutralityViolation(f"total charge is {total_charge}, not 0")
    masses = np.array([p.mass for p in particles], dtype=float)
    charges = np.array([float(p.charge) for p in particles], dtype=float)
    masses.setflags(write=False)
    charges.setflags(write=False)
    return SystemSpec(
        particles=particles,
        total_mass=float(masses.sum()),
        masses=masses,
        charges=charges,
        neutral=total_charge == 0,
    )


def _vecs(a, n=None, name="array"):
    a = np.array(a, dtype=float)
    if a.ndim == 1 and n is None:
        if a.shape != (3,):
            raise DimensionMismatch(f"{name} must be a 3-vector, got shape {a.shape}")
    elif a.ndim != 2 or a.shape[1] != 3 or (n is not None and a.shape[0] != n):
        raise DimensionMismatch(f"{name} must have shape ({n}, 3), got {a.shape}")
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FullState:
    positions: np.ndarray
    velocities: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        pos = _vecs(self.positions, n=len(self.positions), name="positions")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "velocities", _vecs(self.velocities, n=len(pos), name="velocities"))
        object.__setattr__(self, "time", float(self.time))

    @property
    def n(self):
        return len(self.positions)

    def to_vector(self):
        return np.concatenate([self.positions.ravel(), self.velocities.ravel()])

    @classmethod
    def from_vector(cls, y, time=0.0):
        n = len(y) // 6
        return cls(y[: 3 * n].reshape(n, 3), y[3 * n :].reshape(n, 3), time)


@dataclass(frozen=True)
class ReducedState:
    R: np.ndarray
    R_dot: np.ndarray
    rho: np.ndarray
    rho_dot: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "R", _vecs(self.R, name="R"))
        object.__setattr__(self, "R_dot", _vecs(self.R_dot, name="R_dot"))
        rho = _vecs(self.rho, n=len(self.rho), name="rho")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "rho_dot", _vecs(self.rho_dot, n=len(rho), name="rho_dot"))
        object.__setattr__(self, "time", float(self.time))

    @property
    def n(self):
        return len(self.rho)

    def to_vector(self):
        return np.concatenate([self.R, self.R_dot, self.rho.ravel(), self.rho_dot.ravel()])

    @classmethod
    def from_vector(cls, y, time=0.0):
        n = (len(y) - 6) // 6
        return cls(
            y[0:3],
            y[3:6],
            y[6 : 6 + 3 * n].reshape(n, 3),
            y[6 + 3 * n :].reshape(n, 3),
            time,
        )


def _relative_residual(masses, vecs):
    scale = np.sum(masses * np.linalg.norm(vecs, axis=1))
    resid = np.linalg.norm(masses @ vecs)
    if scale == 0.0:
        return resid
    return resid / scale


def constraint_residual(state, spec):
    """Largest of the relative residuals of sum(m rho) and sum(m rho_dot)."""
    return max(
        _relative_residual(spec.masses, state.rho),
        _relative_residual(spec.masses, state.rho_dot),
    )


def _check_count(n, spec):
    if n != spec.n:
        raise DimensionMismatch(f"state has {n} particles, system has {spec.n}")


def to_internal_frame(full, spec):
    _check_count(full.n, spec)
    m = spec.masses
    M = spec.total_mass
    R = m @ full.positions / M
    V = m @ full.velocities / M
    rho = full.positions - R
    rho_dot = full.velocities - V
    # second pass removes the O(eps * |r|) residual left by the first subtraction
    rho = rho - (m @ rho) / M
    rho_dot = rho_dot - (m @ rho_dot) / M
    return ReducedState(R, V, rho, rho_dot, full.time)


def to_lab_frame(reduced, spec, tol=CONSTRAINT_TOL):
    _check_count(reduced.n, spec)
    resid = constraint_residual(reduced, spec)
    if resid > tol:
        raise ConstraintViolation(f"constraint residual {resid:.3e} exceeds {tol:.1e}")
    return FullState(
        reduced.R + reduced.rho,
        reduced.R_dot + reduced.rho_dot,
        reduced.time,
    )
