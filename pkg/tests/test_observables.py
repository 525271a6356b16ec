import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nady.core import C, E_CHARGE, M_ELECTRON, M_PROTON, FullState, ReducedState, build_system, to_internal_frame
from nady.fields import GradientB, NoField, Superposition, UniformB, UniformE
from nady.observables import (
    canonical_momenta,
    dipole,
    energy,
    hamilton_value,
    internal_angular_momentum,
    moment_sum,
    observe,
    spin_like,
)
from nady.scenarios import kepler_bodies


def _state(rho, rho_dot=None, R_dot=(0, 0, 0)):
    rho = np.asarray(rho, dtype=float)
    return ReducedState(np.zeros(3), R_dot, rho, np.zeros_like(rho) if rho_dot is None else rho_dot)


def test_dipole_examples():
    spec = build_system([(1, 1), (1, -1)])
    P, Pd = dipole(_state([[0.5, 0, 0], [-0.5, 0, 0]]), spec)
    np.testing.assert_array_equal(P, [1, 0, 0])
    np.testing.assert_array_equal(Pd, 0)
    sym = build_system([(2, 2), (1, -1), (1, -1)])
    P, _ = dipole(_state([[0, 0, 0], [0.3, 0.1, 0], [-0.3, -0.1, 0]]), sym)
    np.testing.assert_array_equal(P, 0)


def test_angular_momentum_examples():
    spec = build_system([(1, 1), (1, -1)])
    s = _state([[1, 0, 0], [-1, 0, 0]], [[0, 1, 0], [0, -1, 0]])
    np.testing.assert_array_equal(internal_angular_momentum(s, spec), [0, 0, 2])
    np.testing.assert_array_equal(internal_angular_momentum(_state([[1, 0, 0], [-1, 0, 0]]), spec), 0)


def test_counter_rotating_pairs_cancel():
    spec = build_system([(M_PROTON, 1), (1, -1)] * 2)
    pa, va = kepler_bodies(M_PROTON, 1, 1.0, 0.6)
    flip = np.diag([1.0, -1.0, -1.0])
    pa = pa + [0, 0, 5]
    full = FullState(np.vstack([pa, pa @ flip]), np.vstack([va, va @ flip]))
    s = to_internal_frame(full, spec)
    assert np.abs(internal_angular_momentum(s, spec)).max() < 1e-13
    # the moment sums of the two pairs add
    assert np.linalg.norm(moment_sum(s, spec)) > 1e-3


def test_energy_examples():
    spec = build_system([(1, 1), (1, -1)])
    s = _state([[0.5, 0, 0], [-0.5, 0, 0]])
    assert energy(s, spec) == -1
    assert energy(_state([[0.5, 0, 0], [-0.5, 0, 0]], R_dot=(np.sqrt(2), 0, 0)), spec) == pytest.approx(1, rel=1e-15)


def test_spin_like_definition(hydrogen, rng):
    s = to_internal_frame(FullState(rng.normal(size=(2, 3)), rng.normal(size=(2, 3))), hydrogen)
    P, _ = dipole(s, hydrogen)
    np.testing.assert_allclose(E_CHARGE / (M_ELECTRON * C) * spin_like(s, hydrogen), np.cross(P, s.R_dot) / C)


def test_zero_field_momenta(hydrogen, rng):
    s = to_internal_frame(FullState(rng.normal(size=(2, 3)), rng.normal(size=(2, 3))), hydrogen)
    p_R, p_rho = canonical_momenta(s, hydrogen, NoField())
    np.testing.assert_array_equal(p_R, hydrogen.total_mass * s.R_dot)
    assert hamilton_value(s, hydrogen, NoField()) == pytest.approx(energy(s, hydrogen), rel=1e-15)


def test_canonical_differs_but_hamilton_does_not(hydrogen):
    s = _state([[-1 / 1837.15, 0, 0], [1836.15 / 1837.15, 0, 0]])
    _, p_rho = canonical_momenta(s, hydrogen, UniformB(1.0))
    assert np.abs(p_rho).max() > 1e-3
    assert hamilton_value(s, hydrogen, UniformB(1.0)) == pytest.approx(energy(s, hydrogen), rel=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000), st.floats(0.0, 5.0), st.floats(-1.0, 1.0))
def test_hamilton_equals_energy(seed, B0, b):
    rng = np.random.default_rng(seed)
    spec = build_system([(4 * M_PROTON, 2), (1, -1), (1, -1)])
    s = to_internal_frame(FullState(3 * rng.normal(size=(3, 3)), rng.normal(size=(3, 3))), spec)
    field = Superposition((GradientB(B0, b), UniformE((0.1, 0, 0))))
    E = energy(s, spec)
    assert abs(hamilton_value(s, spec, field) - E) <= 1e-12 * abs(E)


def test_observe_bundle(hydrogen, rng):
    s = to_internal_frame(FullState(rng.normal(size=(2, 3)), rng.normal(size=(2, 3))), hydrogen)
    o = observe(s, hydrogen, GradientB(1.0, 0.1))
    np.testing.assert_array_equal(o.L, internal_angular_momentum(s, hydrogen))
    assert o.energy == energy(s, hydrogen)
