"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

The lines are repeated in the pytest terminal summary. Running this file
directly (``python tests/test_acceptance.py``) prints them without pytest.
"""

import time

import numpy as np

from conftest import builtin_run, record_criterion
from nady.core import C
from nady.fields import GradientB, NoField, Superposition, UniformB, UniformE, finite_difference_jacobian, validate_field
from nady.quantum import (
    assemble_hamiltonian,
    cos_theta_element,
    diagonalize,
    lz_commutator_norm,
    position_matrices,
    radial_integral,
    build_basis,
)
from nady.scenarios import BUILTIN_NAMES, TRAJECTORY_COLUMNS, builtin_config, run_scenario

COL = {name: i for i, name in enumerate(TRAJECTORY_COLUMNS)}


def _cols(table, prefix):
    i = COL[f"{prefix}_x"]
    return table[:, i : i + 3]


def test_energy_invariant():
    res = builtin_run("energy_drift")
    elapsed = res.elapsed
    E = res.table[:, COL["energy"]]
    drift = float(np.max(np.abs(E - E[0])) / abs(E[0]))
    ok = drift <= 1e-6 and res.termination.value == "Completed"
    record_criterion(1, "energy invariant", ok, f"relative drift {drift:.3e} (<= 1e-6), {elapsed:.1f} s")
    assert ok
    assert elapsed < 60


def test_hamilton_energy_identity():
    worst, where = 0.0, ""
    for name in BUILTIN_NAMES:
        res = builtin_run(name)
        runs = res.members or ([res] if res.table is not None else [])
        for r in runs:
            E = r.table[:, COL["energy"]]
            H = r.table[:, COL["hamilton"]]
            rel = float(np.max(np.abs(H - E) / np.abs(E)))
            if rel >= worst:
                worst, where = rel, f"{name}/{r.config.model}"
    ok = worst <= 1e-12
    record_criterion(2, "Hamilton value equals energy", ok, f"max relative gap {worst:.2e} ({where}); spectrum scenario has no trajectory")
    assert ok


def test_oracle_convergence():
    res = builtin_run("exact_vs_reduced_sweep")
    elapsed = res.elapsed
    devs = [m.final_cm_deviation for _, m in res.metrics]
    ratios = [devs[k] / devs[k + 1] for k in range(len(devs) - 1)]
    ok = all(3.5 <= r <= 4.5 for r in ratios) and res.termination.value == "Completed"
    detail = "final deviations " + ", ".join(f"{d:.3e}" for d in devs) + "; ratios " + ", ".join(f"{r:.3f}" for r in ratios)
    record_criterion(3, "exact vs reduced second-order convergence", ok, f"{detail}; {elapsed:.0f} s")
    assert ok
    assert elapsed < 300


def _model_run(name, model):
    d = builtin_config(name, as_dict=True)
    d["model"] = model
    return run_scenario(d, write=False)


def test_zero_L_deflection():
    reduced = builtin_run("sg_deflect_L0")
    naive = _model_run("sg_deflect_L0", "naive")
    exact = _model_run("sg_deflect_L0", "exact")

    def transverse(res):
        t = res.table
        R0, V0 = t[0, 1:4], t[0, 4:7]
        d = t[-1, 1:4] - R0 - V0 * t[-1, 0]
        u = V0 / np.linalg.norm(V0)
        return d - (d @ u) * u

    d_red = transverse(reduced)
    d_naive = transverse(naive)
    d_exact = transverse(exact)
    floor = max(np.linalg.norm(d_naive), 1e-12)
    L0 = np.abs(_cols(naive.table, "L")[0]).max()
    f_naive = float(np.abs(_cols(naive.table, "F_moment")).max())
    rel = float(np.linalg.norm(d_exact - d_red) / np.linalg.norm(d_red))
    ok = (
        np.linalg.norm(d_red) > 100 * floor
        and L0 <= 1e-12
        and f_naive <= 1e-15
        and rel <= 0.2
    )
    record_criterion(
        4,
        "deflection at zero internal angular momentum",
        ok,
        f"|d_reduced| {np.linalg.norm(d_red):.3e}, |d_naive| {np.linalg.norm(d_naive):.1e} "
        f"(max naive force {f_naive:.1e}, L(0) = {L0:g}), exact vs reduced {rel:.2e}",
    )
    assert ok


def test_f_parallel_force():
    from nady.core import ReducedState
    from nady.dynamics import cm_force_terms, larmor_force_terms

    res = builtin_run("f_parallel_demo")
    cfg = res.config
    field = cfg.build_field()
    spec = cfg.build_spec()
    t = res.table
    P, Rdot, f_par = _cols(t, "P"), _cols(t, "Rdot"), _cols(t, "F_par")
    worst = worst_fd = 0.0
    for k in range(len(t)):
        R = t[k, 1:4]
        ref = np.cross(P[k], field.jacobian_H(R) @ Rdot[k]) / C
        worst = max(worst, np.linalg.norm(f_par[k] - ref) / np.linalg.norm(ref))
        ref_fd = np.cross(P[k], finite_difference_jacobian(field.H, R) @ Rdot[k]) / C
        worst_fd = max(worst_fd, np.linalg.norm(f_par[k] - ref_fd) / np.linalg.norm(ref_fd))
    nonzero = float(np.linalg.norm(f_par, axis=1).min())

    # Larmor decomposition: identical terms except the moment term
    traj = res.trajectory
    same = True
    moment_differs = False
    for y in traj.states:
        s = ReducedState.from_vector(y)
        a, b = cm_force_terms(s, spec, field), larmor_force_terms(s, spec, field)
        same &= all(np.array_equal(x, z) for x, z in ((a.grad_E_term, b.grad_E_term), (a.dPdt_term, b.dPdt_term), (a.f_parallel, b.f_parallel)))
        moment_differs |= not np.array_equal(a.moment_term, b.moment_term)
    ok = worst <= 1e-12 and nonzero > 0 and same and moment_differs
    record_criterion(
        5,
        "parallel-velocity force term",
        ok,
        f"max relative mismatch {worst:.1e} (finite-difference Jacobian {worst_fd:.1e}), min |f_par| {nonzero:.2e}, "
        f"Larmor terms identical except moment: {same and moment_differs}",
    )
    assert ok


def test_cyclotron_closure():
    res = builtin_run("cyclotron")
    t = res.table
    radius = C  # m v c / |q| B with m = v = |q| = B = 1
    err = float(np.linalg.norm(t[-1, 1:4] - t[0, 1:4]) / radius)
    period = 2 * np.pi * C
    ok = err <= 1e-8 and abs(t[-1, 0] - period) < 1e-9
    record_criterion(6, "cyclotron orbit closes", ok, f"relative closure error {err:.2e} after T = {t[-1, 0]:.7f}")
    assert ok


def test_zeeman_blocks():
    p = assemble_hamiltonian(3, B=(0, 0, 0.1))
    vals, _ = diagonalize(p)
    n, m = p.basis.n, p.basis.m
    expected = np.sort(-0.5 / n**2 + 0.1 / (2 * C) * m)
    err = float(np.max(np.abs(vals - expected)))
    off = p.matrix[m[:, None] != m[None, :]]
    ok = err <= 1e-10 and np.all(off == 0)
    record_criterion(7, "Zeeman block structure", ok, f"max eigenvalue error {err:.1e}, off-block entries exactly zero: {bool(np.all(off == 0))}")
    assert ok


def degenerate_group_gaps(n_max, B, p_R, **kw):
    """Smallest gap inside each group of levels that is degenerate at p_R = 0.

    Groups share (n, m). Manifolds are far apart, so the n**2 lowest
    unassigned eigenvalues belong to manifold n; inside a manifold the
    sorted eigenvalues are matched to the sorted unperturbed levels.
    """
    vals, _ = diagonalize(assemble_hamiltonian(n_max, B, p_R, **kw))
    basis = build_basis(n_max)
    gaps = {}
    start = 0
    for n in range(1, n_max + 1):
        block = vals[start : start + n * n]
        start += n * n
        ms = sorted(int(mm) for nn, _, mm in basis.states if nn == n)
        for mv in set(ms):
            idx = [i for i, x in enumerate(ms) if x == mv]
            if len(idx) > 1:
                g = np.diff(np.sort(block[idx]))
                gaps[(n, mv)] = float(g.min())
    return gaps


def test_symmetry_breaking():
    t0 = time.perf_counter()
    B, p_R = (0.0, 0.0, 0.1), (100.0, 0.0, 0.0)
    p = assemble_hamiltonian(3, B, p_R)
    vals, vecs = diagonalize(p)
    comm = lz_commutator_norm(p)
    m = p.basis.m
    mix = 0.0
    for k in range(len(vals)):
        w = np.array([np.sum(np.abs(vecs[m == mv, k]) ** 2) for mv in np.unique(m)])
        second = np.sort(np.sqrt(w))[-2]
        mix = max(mix, float(second))
    gaps = degenerate_group_gaps(3, B, p_R)
    bad = {k: v for k, v in gaps.items() if v <= 1e-12}
    elapsed = time.perf_counter() - t0
    ok = comm > 0 and mix > 1e-4 and not bad and elapsed < 10
    detail = (
        f"[H, Lz] norm {comm:.2e}, max secondary-m amplitude {mix:.3f}, "
        f"min gap per (n, m) group: " + ", ".join(f"{k}={v:.1e}" for k, v in sorted(gaps.items()))
    )
    if bad:
        detail += f"; unsplit groups {sorted(bad)} (top manifold of the truncated basis)"
    record_criterion(8, "motional field breaks azimuthal symmetry", ok, detail)
    assert comm > 0 and mix > 1e-4
    assert not bad, f"degeneracies survive in {sorted(bad)}"


def test_quadrature_oracle():
    r1s = radial_integral(1, 0, 1, 0, 1)
    z = radial_integral(2, 1, 2, 0, 1) * cos_theta_element(1, 0, 0, 0)
    basis = build_basis(2)
    _, _, Z = position_matrices(basis)
    z_matrix = abs(Z[basis.states.index((2, 1, 0)), basis.states.index((2, 0, 0))])
    ok = abs(r1s - 1.5) <= 1e-8 and abs(abs(z) - 3.0) <= 1e-8 and abs(z_matrix - 3.0) <= 1e-8
    record_criterion(9, "radial quadrature", ok, f"<r>_1s = {r1s:.15f}, |<210|z|200>| = {abs(z):.15f}")
    assert ok


def test_field_validation():
    fields = [
        UniformB(1.0),
        GradientB(1.0, 0.1),
        UniformE((0.01, 0.0, 0.0)),
        NoField(),
        Superposition((GradientB(0.5, 0.05), UniformE((0.0, 0.02, 0.0)), UniformB(0.3))),
    ]
    parts = []
    ok = True
    for f in fields:
        rep = validate_field(f, region=((-5, -5, -5), (5, 5, 5)), n_samples=100)
        ok &= rep.ok(div_tol=1e-12, curl_tol=1e-12, fd_tol=1e-6) and rep.n_samples == 100
        parts.append(f"{type(f).__name__}: fd {rep.max_fd_deviation:.0e} div {rep.max_div:.0e} curl {rep.max_curl:.0e}")
    record_criterion(10, "field models are Maxwell-consistent", ok, "; ".join(parts))
    assert ok


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
