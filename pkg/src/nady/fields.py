"""Static external field models.

Each model returns the electric field E0(R), the magnetic field H0(R) and
their Jacobians. Jacobians follow the convention ``J[i, j] = dF_j / dR_i``,
so ``(a . grad) F = J.T @ a`` and ``grad(a . F) = J @ a`` for constant a.
All shipped magnetic models are linear, divergence-free and curl-free,
which makes the Jacobian symmetric and traceless.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.stats import qmc

FD_STEP = 1e-5

_ZERO33 = np.zeros((3, 3))


class Affine(NamedTuple):
    """Coefficients of an affine field: ``H(R) = h0 + R @ JH``, ``E(R) = e0 + R @ JE``."""

    h0: np.ndarray
    JH: np.ndarray
    e0: np.ndarray
    JE: np.ndarray


def _affine(h0=None, JH=None, e0=None, JE=None):
    z3 = np.zeros(3)
    z33 = np.zeros((3, 3))
    return Affine(
        z3 if h0 is None else np.asarray(h0, dtype=float),
        z33 if JH is None else np.asarray(JH, dtype=float),
        z3 if e0 is None else np.asarray(e0, dtype=float),
        z33 if JE is None else np.asarray(JE, dtype=float),
    )


def _broadcast_zero(R):
    return np.zeros(np.shape(R), dtype=float)


class FieldModel:
    """Base class. Subclasses override whichever of the four hooks apply."""

    kind = "Field"
    has_electric = False
    has_magnetic = False

    def E(self, R):
        return _broadcast_zero(R)

    def H(self, R):
        return _broadcast_zero(R)

    def jacobian_E(self, R):
        return _ZERO33.copy()

    def jacobian_H(self, R):
        return _ZERO33.copy()

    def affine(self):
        """Affine coefficients, or None when the field is not affine."""
        return None

    def to_dict(self):
        raise NotImplementedError


@dataclass(frozen=True)
class UniformB(FieldModel):
    B0: float = 1.0

    kind = "UniformB"
    has_magnetic = True

    def H(self, R):
        out = _broadcast_zero(R)
        out[..., 2] = self.B0
        return out

    def to_dict(self):
        return {"kind": self.kind, "B0": self.B0}

    def affine(self):
        return _affine(h0=(0.0, 0.0, self.B0))


@dataclass(frozen=True)
class GradientB(FieldModel):
    """H0(R) = (-b x, 0, B0 + b z): the minimal linear Maxwell-consistent gradient."""

    B0: float = 1.0
    b: float = 0.1

    kind = "GradientB"
    has_magnetic = True

    def H(self, R):
        R = np.asarray(R, dtype=float)
        out = _broadcast_zero(R)
        out[..., 0] = -self.b * R[..., 0]
        out[..., 2] = self.B0 + self.b * R[..., 2]
        return out

    def jacobian_H(self, R):
        return np.diag([-self.b, 0.0, self.b])

    def to_dict(self):
        return {"kind": self.kind, "B0": self.B0, "b": self.b}

    def affine(self):
        return _affine(h0=(0.0, 0.0, self.B0), JH=self.jacobian_H(None))


@dataclass(frozen=True)
class UniformE(FieldModel):
    E0: tuple = (0.0, 0.0, 0.0)

    kind = "UniformE"
    has_electric = True

    def __post_init__(self):
        object.__setattr__(self, "E0", tuple(float(x) for x in self.E0))
        if len(self.E0) != 3:
            raise ValueError("UniformE needs a 3-vector")

    def E(self, R):
        out = _broadcast_zero(R)
        out[...] = self.E0
        return out

    def to_dict(self):
        return {"kind": self.kind, "E0": list(self.E0)}

    def affine(self):
        return _affine(e0=self.E0)


@dataclass(frozen=True)
class Superposition(FieldModel):
    components: tuple = ()

    kind = "Superposition"

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def has_electric(self):
        return any(c.has_electric for c in self.components)

    @property
    def has_magnetic(self):
        return any(c.has_magnetic for c in self.components)

    def E(self, R):
        return sum((c.E(R) for c in self.components), _broadcast_zero(R))

    def H(self, R):
        return sum((c.H(R) for c in self.components), _broadcast_zero(R))

    def jacobian_E(self, R):
        return sum((c.jacobian_E(R) for c in self.components), _ZERO33.copy())

    def jacobian_H(self, R):
        return sum((c.jacobian_H(R) for c in self.components), _ZERO33.copy())

    def to_dict(self):
        return {"kind": self.kind, "components": [c.to_dict() for c in self.components]}

    def affine(self):
        parts = [c.affine() for c in self.components]
        if any(p is None for p in parts):
            return None
        return Affine(*(sum(x) for x in zip(*parts))) if parts else _affine()


class NoField(FieldModel):
    kind = "NoField"

    def __eq__(self, other):
        return isinstance(other, NoField)

    def __hash__(self):
        return hash(self.kind)

    def __repr__(self):
        return "NoField()"

    def to_dict(self):
        return {"kind": self.kind}

    def affine(self):
        return _affine()


FIELD_KINDS = {
    "UniformB": UniformB,
    "GradientB": GradientB,
    "UniformE": UniformE,
    "NoField": NoField,
}


def field_from_dict(d):
    """Build a field model from its config mapping (``{"kind": ..., params}``)."""
    d = dict(d)
    kind = d.pop("kind")
    if kind == "Superposition":
        return Superposition(tuple(field_from_dict(c) for c in d.pop("components")))
    return FIELD_KINDS[kind](**d)


def eval_E(field, R):
    return field.E(np.asarray(R, dtype=float))


def eval_H(field, R):
    return field.H(np.asarray(R, dtype=float))


def jacobian_H(field, R):
    return field.jacobian_H(np.asarray(R, dtype=float))


def grad_vdotH(field, R, v):
    """grad_R (v . H0(R)) with v held fixed, i.e. ``J @ v``."""
    return field.jacobian_H(np.asarray(R, dtype=float)) @ np.asarray(v, dtype=float)


def finite_difference_jacobian(func, R, h=FD_STEP):
    """Central-difference Jacobian ``J[i, j] = dF_j / dR_i`` of a vector field."""
    R = np.asarray(R, dtype=float)
    J = np.empty((3, 3))
    for i in range(3):
        dR = np.zeros(3)
        dR[i] = h
        J[i] = (func(R + dR) - func(R - dR)) / (2 * h)
    return J


def divergence(J):
    return float(np.trace(J))


def curl(J):
    # (curl F)_k = eps_kij dF_j/dR_i
    return np.array([J[1, 2] - J[2, 1], J[2, 0] - J[0, 2], J[0, 1] - J[1, 0]])


@dataclass(frozen=True)
class ValidationReport:
    max_div: float
    max_curl: float
    max_fd_deviation: float
    n_samples: int

    def ok(self, div_tol=1e-12, curl_tol=1e-12, fd_tol=1e-6):
        return self.max_div <= div_tol and self.max_curl <= curl_tol and self.max_fd_deviation <= fd_tol


def validate_field(field, region=((-1.0, -1.0, -1.0), (1.0, 1.0, 1.0)), n_samples=100, seed=0):
    """Check Maxwell consistency of ``field.H`` inside a box.

    Samples ``n_samples`` scrambled Halton points in ``region = (lo, hi)``
    and reports the largest |div H| and |curl H| of the analytic Jacobian
    together with its largest deviation from central finite differences.
    The deviation is relative to the largest analytic entry, or absolute
    where the analytic Jacobian vanishes.
    """
    lo, hi = (np.asarray(x, dtype=float) for x in region)
    if np.any(hi < lo):
        raise ValueError("empty region")
    pts = qmc.Halton(d=3, scramble=True, seed=seed).random(n_samples)
    pts = lo + pts * (hi - lo)
    max_div = max_curl = max_dev = 0.0
    for R in pts:
        J = field.jacobian_H(R)
        J_fd = finite_difference_jacobian(field.H, R)
        max_div = max(max_div, abs(divergence(J)))
        max_curl = max(max_curl, float(np.max(np.abs(curl(J)))))
        scale = np.max(np.abs(J))
        dev = np.max(np.abs(J - J_fd))
        max_dev = max(max_dev, dev / scale if scale > 0 else dev)
    return ValidationReport(max_div, max_curl, max_dev, n_samples)
