import numpy as np
import pytest

from nady.core import C, M_PROTON, FullState, ReducedState, build_system, constraint_residual, to_internal_frame
from nady.dynamics import vector_field
from nady.errors import SingularityApproach
from nady.fields import NoField, UniformB
from nady.integrate import (
    IntegratorConfig,
    Termination,
    integrate,
    project_constraints,
    project_vector,
    step_rk4,
)
from nady.observables import energy
from nady.scenarios import kepler_bodies, kepler_period


def test_rk4_zero_rhs():
    y = np.array([1.0, -2.0, 3.0])
    np.testing.assert_array_equal(step_rk4(lambda t, y: np.zeros_like(y), y, 0.3), y)


def test_rk4_exponential():
    y = step_rk4(lambda t, y: y, np.array([1.0]), 0.1)
    assert y[0] == pytest.approx(1.10517083333, abs=1e-11)
    assert abs(y[0] - np.exp(0.1)) < 1e-7


def test_rk4_global_order():
    errs = []
    for n in (20, 40):
        cfg = IntegratorConfig(method="RK4", h_init=1.0 / n)
        tr = integrate(lambda t, y: -y, [1.0], (0, 1), cfg)
        errs.append(abs(tr.final_state[0] - np.exp(-1)))
    assert errs[0] / errs[1] == pytest.approx(16, rel=0.05)


def test_zero_rhs_trajectory():
    tr = integrate(lambda t, y: np.zeros_like(y), [1.0, 2.0], (0, 1), IntegratorConfig(sample_interval=0.25))
    assert len(tr.times) == 5
    assert np.all(tr.states == [1.0, 2.0])
    assert tr.termination is Termination.COMPLETED


def test_adaptive_accuracy_and_sample_grid():
    cfg = IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12, sample_interval=0.1)
    tr = integrate(lambda t, y: np.array([y[1], -y[0]]), [1.0, 0.0], (0, 10), cfg)
    np.testing.assert_array_equal(tr.times, np.linspace(0, 10, 101)[: len(tr.times)])
    assert tr.times[-1] == 10
    np.testing.assert_allclose(tr.states[:, 0], np.cos(tr.times), atol=1e-8)


def test_observers_and_samples():
    obs = lambda t, y: {"sq": float(y[0] ** 2)}  # noqa: E731
    tr = integrate(lambda t, y: y, [1.0], (0, 1), IntegratorConfig(sample_interval=0.5), observers=[obs])
    assert [o["sq"] for o in tr.observations][0] == 1.0
    assert len(tr.samples) == 3


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(method="Euler")
    with pytest.raises(ValueError):
        IntegratorConfig(rel_tol=0)
    with pytest.raises(ValueError):
        IntegratorConfig(sample_interval=-1.0)
    with pytest.raises(ValueError):
        integrate(lambda t, y: y, [1.0], (1, 0))


def test_step_limit_is_reported():
    tr = integrate(lambda t, y: y, [1.0], (0, 100), IntegratorConfig(max_steps=5))
    assert tr.termination is Termination.STEP_LIMIT_REACHED
    assert tr.n_steps == 5
    assert tr.times[-1] > 0


def test_collision_is_reported():
    spec = build_system([(1, 1), (1, -1)])
    y0 = FullState([[1, 0, 0], [-1, 0, 0]], np.zeros((2, 3))).to_vector()
    tr = integrate(vector_field("exact", spec, NoField()), y0, (0, 10), IntegratorConfig())
    assert tr.termination is Termination.SINGULARITY_APPROACH
    assert "separation" in tr.message


def test_deterministic():
    spec = build_system([(M_PROTON, 1), (1, -1)])
    pos, vel = kepler_bodies(M_PROTON, 1, 1.0, 0.4)
    y0 = to_internal_frame(FullState(pos, vel), spec).to_vector()
    cfg = IntegratorConfig(sample_interval=1.0)
    runs = [integrate(vector_field("reduced", spec, UniformB(0.5)), y0, (0, 20), cfg) for _ in range(2)]
    assert runs[0].states.tobytes() == runs[1].states.tobytes()


def test_cyclotron_period_closes():
    spec = build_system([(1, -1)], require_neutral=False)
    y0 = FullState([[0, 0, 0]], [[1, 0, 0]]).to_vector()
    T = 2 * np.pi * C
    tr = integrate(vector_field("exact", spec, UniformB(1.0)), y0, (0, T), IntegratorConfig(rel_tol=1e-10))
    assert np.linalg.norm(tr.final_state[:3]) / C < 1e-8


def test_kepler_energy_drift():
    spec = build_system([(M_PROTON, 1), (1, -1)])
    pos, vel = kepler_bodies(M_PROTON, 1, 1.0, 0.3)
    s0 = to_internal_frame(FullState(pos, vel), spec)
    T = 100 * kepler_period(M_PROTON, 1, 1.0)
    tr = integrate(
        vector_field("reduced", spec, NoField()),
        s0.to_vector(),
        (0, T),
        IntegratorConfig(rel_tol=1e-10, sample_interval=T / 100),
        project=lambda y: project_vector(y, spec.masses),
    )
    E = np.array([energy(ReducedState.from_vector(y), spec) for y in tr.states])
    assert np.max(np.abs(E - E[0])) / abs(E[0]) <= 1e-8


def test_projection_examples(hydrogen, rng):
    s = to_internal_frame(FullState(rng.normal(size=(2, 3)), rng.normal(size=(2, 3))), hydrogen)
    again = project_constraints(s, hydrogen)
    np.testing.assert_allclose(again.rho, s.rho, atol=1e-16)
    eps = 1e-3
    shifted = ReducedState(s.R, s.R_dot, s.rho + np.array([eps / hydrogen.total_mass, 0, 0]), s.rho_dot)
    fixed = project_constraints(shifted, hydrogen)
    assert constraint_residual(fixed, hydrogen) <= 1e-16
    np.testing.assert_allclose(fixed.R + fixed.rho, shifted.R + shifted.rho, atol=1e-15)


def test_partial_trajectory_on_guard():
    def rhs(t, y):
        if t > 0.5:
            raise SingularityApproach("boom")
        return np.ones_like(y)

    tr = integrate(rhs, [0.0], (0, 1), IntegratorConfig(sample_interval=0.1, h_init=0.05))
    assert tr.termination is Termination.SINGULARITY_APPROACH
    assert 0.4 <= tr.times[-1] <= 0.6
