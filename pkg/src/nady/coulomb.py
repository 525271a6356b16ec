"""Internal Coulomb interaction between the particles of a system."""

import numpy as np

from .core import MIN_SEPARATION
from .errors import SingularityApproach


def coulomb(rho, charges, min_separation=MIN_SEPARATION):
    """Pairwise Coulomb forces and energy.

    Returns ``(forces, V)`` with ``forces[i] = -dV/drho_i`` and
    ``V = sum_{i<j} q_i q_j / |rho_i - rho_j|``. Works equally on lab
    positions or on CM-relative coordinates.
    """
    rho = np.asarray(rho, dtype=float)
    q = np.asarray(charges, dtype=float)
    n = len(q)
    if n < 2:
        return np.zeros_like(rho), 0.0
    diff = rho[:, None, :] - rho[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    iu = np.triu_indices(n, 1)
    dmin = dist[iu].min()
    if dmin <= min_separation:
        raise SingularityApproach(f"pair separation {dmin:.3e} <= {min_separation:.1e}")
    np.fill_diagonal(dist, np.inf)
    qq = np.outer(q, q)
    V = float(np.sum(qq[iu] / dist[iu]))
    forces = np.einsum("ij,ijk->ik", qq / dist**3, diff)
    return forces, V
