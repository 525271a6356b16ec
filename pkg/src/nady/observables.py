"""Physical quantities derived from a reduced (centre-of-mass) state.

The energy is kinetic plus internal Coulomb energy and nothing else: a
static magnetic field does no work, so it never appears there. The
canonical momenta do carry field terms, and :func:`hamilton_value`
shows how they cancel again when the Hamilton function is evaluated.
"""

from dataclasses import dataclass

import numpy as np

from .core import C, E_CHARGE, M_ELECTRON
from .coulomb import coulomb


def dipole(state, spec):
    """Electric dipole ``P = sum q_i rho_i`` and its rate ``sum q_i rho_dot_i``."""
    q = spec.charges
    return q @ state.rho, q @ state.rho_dot


def internal_angular_momentum(state, spec):
    return spec.masses @ np.cross(state.rho, state.rho_dot)


def moment_sum(state, spec):
    """(1/2c) sum q_i rho_i x rho_dot_i, the magnetic-moment-like sum."""
    return spec.charges @ np.cross(state.rho, state.rho_dot) / (2 * C)


def spin_like(state, spec):
    """S defined through (e / m_e c) S = (1/c) P x R_dot."""
    P, _ = dipole(state, spec)
    return (M_ELECTRON / E_CHARGE) * np.cross(P, state.R_dot)


def kinetic_energy(state, spec):
    return 0.5 * spec.total_mass * (state.R_dot @ state.R_dot) + 0.5 * float(
        spec.masses @ np.einsum("ij,ij->i", state.rho_dot, state.rho_dot)
    )


def energy(state, spec):
    """Kinetic energy of CM and internal motion plus internal Coulomb energy.

    Deliberately takes no field argument. For purely magnetic static
    fields this is the conserved quantity; an electric field adds the
    dipole term ``-P . E0(R)`` to the conserved combination.
    """
    _, V = coulomb(state.rho, spec.charges)
    return kinetic_energy(state, spec) + V


def canonical_momenta(state, spec, field):
    """Return ``(p_R, p_rho)``: ``p_R = M R_dot + (1/c) H0 x P`` and
    ``p_rho_i = m_i rho_dot_i + (q_i / 2c) H0 x rho_i``, with H0 taken at R."""
    H = field.H(state.R)
    P, _ = dipole(state, spec)
    p_R = spec.total_mass * state.R_dot + np.cross(H, P) / C
    p_rho = spec.masses[:, None] * state.rho_dot + spec.charges[:, None] * np.cross(H, state.rho) / (2 * C)
    return p_R, p_rho


def hamilton_value(state, spec, field):
    H = field.H(state.R)
    P, _ = dipole(state, spec)
    p_R, p_rho = canonical_momenta(state, spec, field)
    k_R = p_R - np.cross(H, P) / C
    k_rho = p_rho - spec.charges[:, None] * np.cross(H, state.rho) / (2 * C)
    _, V = coulomb(state.rho, spec.charges)
    return float(
        k_R @ k_R / (2 * spec.total_mass)
        + np.sum(np.einsum("ij,ij->i", k_rho, k_rho) / (2 * spec.masses))
        + V
    )


@dataclass(frozen=True)
class ObservableSet:
    P: np.ndarray
    P_dot: np.ndarray
    L: np.ndarray
    moment_sum: np.ndarray
    S: np.ndarray
    energy: float
    hamilton: float
    p_R: np.ndarray
    p_rho: np.ndarray


def observe(state, spec, field):
    P, P_dot = dipole(state, spec)
    p_R, p_rho = canonical_momenta(state, spec, field)
    return ObservableSet(
        P=P,
        P_dot=P_dot,
        L=internal_angular_momentum(state, spec),
        moment_sum=moment_sum(state, spec),
        S=spin_like(state, spec),
        energy=energy(state, spec),
        hamilton=hamilton_value(state, spec, field),
        p_R=p_R,
        p_rho=p_rho,
    )
