"""Hydrogen in a magnetic field seen from a moving centre of mass.

Separating a plane wave ``exp(i p_R . R)`` for the centre of mass leaves an
internal problem with the Zeeman term ``(B / 2c) L_z`` plus a Stark-like
coupling to the motional electric field ``E_mot = p_R x H0 / (M c)``. The
two fields are crossed whenever p_R has a component perpendicular to H0,
and the Stark part then mixes magnetic quantum numbers. This module
diagonalises that internal Hamiltonian in a finite bound-state basis.

Atomic units throughout, Z = 1, infinite-nuclear-mass radial functions.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np
from scipy.special import eval_genlaguerre

from .core import C, M_ELECTRON, M_PROTON
from .errors import NonHermitianInput, QuadratureNonConvergence, RangeError

N_MAX_LIMIT = 6
HYDROGEN_MASS = M_PROTON + M_ELECTRON
QUAD_TOL = 1e-9
QUAD_POINTS = 600


@dataclass(frozen=True)
class HydrogenBasis:
    states: tuple

    def __len__(self):
        return len(self.states)

    @property
    def n(self):
        return np.array([s[0] for s in self.states])

    @property
    def l(self):  # noqa: E743
        return np.array([s[1] for s in self.states])

    @property
    def m(self):
        return np.array([s[2] for s in self.states])


def build_basis(n_max):
    """All bound (n, l, m) with n <= n_max, in lexicographic order."""
    if not (isinstance(n_max, (int, np.integer)) and 1 <= n_max <= N_MAX_LIMIT):
        raise RangeError(f"n_max must be an integer in [1, {N_MAX_LIMIT}], got {n_max!r}")
    states = tuple((n, l, m) for n in range(1, n_max + 1) for l in range(n) for m in range(-l, l + 1))
    return HydrogenBasis(states)


def radial_function(n, l, r):
    """Normalised hydrogen radial function R_nl(r), positive near the origin."""
    r = np.asarray(r, dtype=float)
    norm = np.sqrt((2.0 / n) ** 3 * factorial(n - l - 1) / (2 * n * factorial(n + l)))
    x = 2.0 * r / n
    return norm * x**l * np.exp(-x / 2) * eval_genlaguerre(n - l - 1, 2 * l + 1, x)


def _radial_quadrature(n1, l1, n2, l2, power, npts):
    # trapezoid rule on r = exp(s): exponentially convergent for this smooth,
    # doubly decaying integrand
    decay = 1.0 / n1 + 1.0 / n2
    s = np.linspace(np.log(1e-10), np.log(200.0 / decay), npts)
    r = np.exp(s)
    f = radial_function(n1, l1, r) * radial_function(n2, l2, r) * r ** (power + 3)
    ds = s[1] - s[0]
    return ds * (f.sum() - 0.5 * (f[0] + f[-1])), ds * np.abs(f).sum()


@lru_cache(maxsize=None)
def _radial_cached(n1, l1, n2, l2, power):
    coarse, _ = _radial_quadrature(n1, l1, n2, l2, power, QUAD_POINTS)
    fine, scale = _radial_quadrature(n1, l1, n2, l2, power, 2 * QUAD_POINTS)
    if abs(fine - coarse) > QUAD_TOL * max(abs(fine), scale, 1e-300):
        raise QuadratureNonConvergence(
            f"<{n1}{l1}|r^{power}|{n2}{l2}>: {coarse!r} vs {fine!r} at two resolutions"
        )
    return fine


def radial_integral(n1, l1, n2, l2, power):
    """Integral of R_{n1 l1} r^power R_{n2 l2} r^2 dr over [0, inf)."""
    for n, l in ((n1, l1), (n2, l2)):
        if not (n >= 1 and 0 <= l < n):
            raise RangeError(f"invalid quantum numbers n={n}, l={l}")
    if power not in (0, 1, 2):
        raise RangeError(f"power must be 0, 1 or 2, got {power}")
    # symmetric in the two states; canonical order shares the cache entry
    key = min((n1, l1), (n2, l2)) + max((n1, l1), (n2, l2))
    return _radial_cached(*key, power)


# Angular matrix elements <l' m'| f(theta, phi) |l m> between spherical harmonics
# with the Condon-Shortley phase.


def cos_theta_element(lp, mp, l, m):
    if mp != m or abs(m) > l or abs(mp) > lp:
        return 0.0
    if lp == l + 1:
        return np.sqrt(((l + 1) ** 2 - m**2) / ((2 * l + 1) * (2 * l + 3)))
    if lp == l - 1:
        return np.sqrt((l**2 - m**2) / ((2 * l - 1) * (2 * l + 1)))
    return 0.0


def sin_theta_exp_element(lp, mp, l, m, sign):
    """<l' m'| sin(theta) exp(sign * i phi) |l m> for sign = +1 or -1."""
    if mp != m + sign or abs(m) > l or abs(mp) > lp:
        return 0.0
    if sign > 0:
        if lp == l + 1:
            return -np.sqrt((l + m + 1) * (l + m + 2) / ((2 * l + 1) * (2 * l + 3)))
        if lp == l - 1:
            return np.sqrt((l - m) * (l - m - 1) / ((2 * l - 1) * (2 * l + 1)))
    else:
        if lp == l + 1:
            return np.sqrt((l - m + 1) * (l - m + 2) / ((2 * l + 1) * (2 * l + 3)))
        if lp == l - 1:
            return -np.sqrt((l + m) * (l + m - 1) / ((2 * l - 1) * (2 * l + 1)))
    return 0.0


def position_matrices(basis):
    """Matrices of x, y, z in the basis (complex Hermitian, atomic units)."""
    k = len(basis)
    X = np.zeros((k, k), dtype=complex)
    Y = np.zeros((k, k), dtype=complex)
    Z = np.zeros((k, k), dtype=complex)
    for i, (n1, l1, m1) in enumerate(basis.states):
        for j, (n2, l2, m2) in enumerate(basis.states):
            if abs(l1 - l2) != 1 or abs(m1 - m2) > 1:
                continue
            rad = radial_integral(n1, l1, n2, l2, 1)
            up = sin_theta_exp_element(l1, m1, l2, m2, +1)
            down = sin_theta_exp_element(l1, m1, l2, m2, -1)
            X[i, j] = rad * (up + down) / 2
            Y[i, j] = rad * (up - down) / 2j
            Z[i, j] = rad * cos_theta_element(l1, m1, l2, m2)
    return X, Y, Z


def transverse_r2_matrix(basis):
    """Matrix of x^2 + y^2 = r^2 sin^2(theta); diagonal in m, couples l and l +- 2."""
    k = len(basis)
    out = np.zeros((k, k))
    for i, (n1, l1, m1) in enumerate(basis.states):
        for j, (n2, l2, m2) in enumerate(basis.states):
            if m1 != m2 or abs(l1 - l2) not in (0, 2):
                continue
            # cos^2 only couples through l'' = l2 +- 1, so this sum is exact
            cos2 = sum(
                cos_theta_element(l1, m1, lm, m1) * cos_theta_element(lm, m1, l2, m2)
                for lm in (l2 - 1, l2 + 1)
                if lm >= abs(m1)
            )
            ang = (1.0 if l1 == l2 else 0.0) - cos2
            if ang != 0.0:
                out[i, j] = radial_integral(n1, l1, n2, l2, 2) * ang
    return out


def motional_field(p_R, B, mass=HYDROGEN_MASS):
    """Effective electric field p_R x H0 / (M c) seen by the internal motion."""
    return np.cross(np.asarray(p_R, dtype=float), np.asarray(B, dtype=float)) / (mass * C)


@dataclass(frozen=True)
class SpectralProblem:
    basis: HydrogenBasis
    B: np.ndarray
    p_R: np.ndarray
    include_diamagnetic: bool
    matrix: np.ndarray
    epsilon_shift: float
    mass: float = HYDROGEN_MASS

    @property
    def E_motional(self):
        return motional_field(self.p_R, self.B, self.mass)


def assemble_hamiltonian(n_max, B=(0.0, 0.0, 0.0), p_R=(0.0, 0.0, 0.0), include_diamagnetic=False, mass=HYDROGEN_MASS):
    """Internal Hamiltonian of hydrogen with CM plane-wave momentum ``p_R``.

    Terms: bound spectrum ``-1/2n^2``, Zeeman ``(B/2c) m``, and ``r . E_mot``
    (the electron dipole is -r, so ``-P . E_mot = +r . E_mot``). With
    ``include_diamagnetic`` the two quadratic terms
    ``B^2 (x^2 + y^2) (1/(2 M c^2) + 1/(8 c^2))`` are added. The
    eigenvalues are ``epsilon = E - p_R^2 / 2M``; ``epsilon_shift`` holds
    ``p_R^2 / 2M``.
    """
    B = np.asarray(B, dtype=float)
    p_R = np.asarray(p_R, dtype=float)
    if B.shape != (3,) or B[0] != 0.0 or B[1] != 0.0:
        raise ValueError("B must be a 3-vector along z")
    basis = build_basis(n_max)
    n, m = basis.n, basis.m
    Bz = B[2]
    H = np.diag(-0.5 / n**2 + Bz / (2 * C) * m).astype(complex)
    E_mot = motional_field(p_R, B, mass)
    if np.any(E_mot != 0.0):
        X, Y, Z = position_matrices(basis)
        H += E_mot[0] * X + E_mot[1] * Y + E_mot[2] * Z
    if include_diamagnetic and Bz != 0.0:
        H += Bz**2 * (1 / (2 * mass * C**2) + 1 / (8 * C**2)) * transverse_r2_matrix(basis)
    return SpectralProblem(
        basis=basis,
        B=B,
        p_R=p_R,
        include_diamagnetic=include_diamagnetic,
        matrix=H,
        epsilon_shift=float(p_R @ p_R / (2 * mass)),
        mass=mass,
    )


def hermiticity_defect(matrix):
    norm = np.linalg.norm(matrix)
    return np.linalg.norm(matrix - matrix.conj().T) / norm if norm > 0 else 0.0


def diagonalize(problem):
    """Ascending eigenvalues and orthonormal eigenvectors (as columns)."""
    H = problem.matrix if isinstance(problem, SpectralProblem) else np.asarray(problem)
    if hermiticity_defect(H) > 1e-12:
        raise NonHermitianInput(f"relative Hermiticity defect {hermiticity_defect(H):.3e}")
    return np.linalg.eigh(H)


def lz_commutator_norm(problem):
    """Frobenius norm of [H, L_z]; zero exactly when m is a good quantum number."""
    m = problem.basis.m.astype(float)
    H = problem.matrix
    return float(np.linalg.norm(H * (m[None, :] - m[:, None])))


def m_weights(basis, vector):
    """Total probability on each m value for one eigenvector."""
    m = basis.m
    w = np.abs(vector) ** 2
    return {int(mv): float(w[m == mv].sum()) for mv in np.unique(m)}


def spectrum_table(problem, eigenvalues=None, eigenvectors=None):
    """Rows ``(index, eigenvalue, n, l, m, mix)`` for the spectrum CSV.

    (n, l, m) label the largest basis component; ``mix`` is the largest
    amplitude on any basis state whose m differs from that label.
    """
    if eigenvalues is None:
        eigenvalues, eigenvectors = diagonalize(problem)
    basis = problem.basis
    rows = []
    for k, val in enumerate(eigenvalues):
        amp = np.abs(eigenvectors[:, k])
        dom = int(np.argmax(amp))
        n, l, m = basis.states[dom]
        other = amp[basis.m != m]
        rows.append((k, float(val), n, l, m, float(other.max()) if other.size else 0.0))
    return rows
