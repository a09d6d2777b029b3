"""Acceptance criteria 1-10, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line; the lines are repeated
in the terminal summary (see ``conftest.py``).
"""

import filecmp
import time
import warnings
from dataclasses import replace

import numpy as np
import pytest

from helpers import random_scalar
from oracles import dense_dirichlet_laplacian, dense_mass, weighted_q_continuous
from nlboussinesq.config import RunConfig
from nlboussinesq.coupled import build_problem, dt_study, galerkin_convergence, run, slack_constant
from nlboussinesq.heat import (
    CompatibilityWarning,
    boundary_residual,
    heat_step,
    init_heat,
    reconstruct_theta,
    run_heat,
    solve_shifted_mass,
    uniqueness_experiment,
)
from nlboussinesq.mesh import Mesh, ScalarField, VectorField, inner
from nlboussinesq.nonlocal_ops import NonlocalParams, apply_L, invert_mass
from nlboussinesq.scenarios import scenario
from nlboussinesq.stokes import build_basis, reconstruct

VERDICTS = []


def verdict(n, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d}: {detail}"
    VERDICTS.append(line)
    print(line)
    assert ok, line


# buoyant-cell setup shared by criteria 5, 6 and 8
BUOYANT = RunConfig().with_(
    physics={"mu": 0.02, "kappa": 0.02, "lambda": 1.0},
    scenario={"id": "buoyant-cell", "amplitude": 50.0, "T_B": 1.0},
    time={"dt": 2e-3, "T_end": 2.0, "output_every": 50},
    basis={"N": 16},
)


@pytest.fixture(scope="module")
def buoyant32():
    return run(BUOYANT.with_(mesh={"nx": 32}))


@pytest.fixture(scope="module")
def buoyant64():
    return run(BUOYANT.with_(mesh={"nx": 64}))


def test_criterion_01_rank_one_inverse():
    t0 = time.perf_counter()
    m32, m16 = Mesh(32), Mesh(16)
    err_id = err_dense = err_shifted = 0.0
    for lam in (0.5, 1.0, 4.0):
        for seed in range(100):
            f = random_scalar(m32, seed, trace=False)
            err_id = max(err_id, np.max(np.abs(invert_mass(apply_L(f, lam), lam).values - f.values)))
        M = dense_mass(16, lam)
        K = M - 0.25 * 1e-3 * dense_dirichlet_laplacian(16)  # alpha = dt kappa / 2
        for seed in range(10):
            g = random_scalar(m16, seed, trace=False)
            ref = np.linalg.solve(M, g.values.ravel())
            err_dense = max(err_dense, np.max(np.abs(invert_mass(g, lam).values.ravel() - ref)))
            ref = np.linalg.solve(K, g.values.ravel())
            got = solve_shifted_mass(g.values.ravel(), 16, 0.25 * 1e-3, lam)
            err_shifted = max(err_shifted, np.max(np.abs(got - ref)) / np.max(np.abs(ref)))
    dt = time.perf_counter() - t0
    ok = err_id <= 1e-12 and err_dense <= 1e-11 and err_shifted <= 1e-11 and dt < 5.0
    verdict(1, ok, f"identity {err_id:.1e}, dense {err_dense:.1e}, shifted {err_shifted:.1e}, {dt:.2f}s")


def test_criterion_02_self_adjoint():
    t0 = time.perf_counter()
    m = Mesh(32)
    worst = 0.0
    for k in range(100):
        lam = (0.5, 1.0, 4.0)[k % 3]
        V, W = random_scalar(m, 2 * k, trace=False), random_scalar(m, 2 * k + 1, trace=False)
        d = abs(inner(apply_L(V, lam), W) - inner(V, apply_L(W, lam)))
        worst = max(worst, d / max(1.0, abs(inner(V, W))))
    dt = time.perf_counter() - t0
    verdict(2, worst <= 1e-12 and dt < 1.0, f"max asymmetry {worst:.1e}, {dt:.2f}s")


def test_criterion_03_constant_equilibrium():
    t0 = time.perf_counter()
    m = Mesh(32)
    p = NonlocalParams(lam=1.0, kappa=1.0, mu=1.0)
    zero_v = VectorField.zeros(m)
    st = init_heat(ScalarField.constant(m, 1.0), 2.0, p)
    drift = 0.0
    for _ in range(1000):
        st = heat_step(st, zero_v, 1e-3)
        drift = max(drift, np.max(np.abs(reconstruct_theta(st).values - 1.0)))
    # arbitrary bounded data, incompatible with the boundary condition
    theta0 = random_scalar(m, 7) * 3.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CompatibilityWarning)
        st = init_heat(theta0, 2.0, p)
    out = run_heat(st, zero_v, 1e-2, 500)
    final = reconstruct_theta(out.states[-1])
    gap = np.max(np.abs(final.values - 1.0))
    dt = time.perf_counter() - t0
    ok = drift <= 1e-12 and gap <= 1e-8 and abs(out.states[-1].t - 5.0) < 1e-9 and dt < 30.0
    verdict(3, ok, f"per-step drift {drift:.1e}, |Theta(5) - 1| {gap:.1e}, {dt:.1f}s")


def test_criterion_04_uniqueness():
    t0 = time.perf_counter()
    m = Mesh(32)
    basis = build_basis(m, 16)
    p = NonlocalParams(lam=1.0, kappa=0.1, mu=1.0)
    b = scenario("uniqueness-pair", m, 1.0, basis=basis)
    twin = uniqueness_experiment(b.theta_0, b.theta_0, b.v_frozen, 1.0, 1e-3, b.theta_B, p)
    pert = uniqueness_experiment(b.theta_0, b.theta_0_b, b.v_frozen, 1.0, 1e-3, b.theta_B, p)

    # v = 0 decay rate against the dense pencil on 16^2
    m16 = Mesh(16)
    p16 = NonlocalParams(lam=1.0, kappa=1.0, mu=1.0)
    td = scenario("thermal-decay", m16, 1.0)
    d = random_scalar(m16, 3, trace=False) * 1e-3
    free = uniqueness_experiment(td.theta_0, td.theta_0 + d, VectorField.zeros(m16), 1.0, 1e-3, td.theta_B, p16)
    Vd = d.values + 1.0 * d.values.mean()  # V = Theta + lambda avint(Theta)
    q = weighted_q_continuous(Vd, 16, 1.0, 1.0, free.times)
    rel = []
    for a, c in ((0, 50), (50, 200), (200, 500), (500, 1000)):
        dt_ = free.times[c] - free.times[a]
        rd = -np.log(free.Q[c] / free.Q[a]) / dt_
        rc = -np.log(q[c] / q[a]) / dt_
        rel.append(abs(rd - rc) / rc)
    dt = time.perf_counter() - t0
    ok = (
        float(np.max(twin.Q)) <= 1e-24  # Q is quadratic, so differences <= 1e-12
        and pert.monotone
        and len(pert.Q) - 1 >= 1000
        and max(rel) <= 1e-4
        and dt < 60.0
    )
    verdict(4, ok, f"twin Q {np.max(twin.Q):.1e}, max Q increase {pert.max_increase:.1e} over "
                   f"{len(pert.Q) - 1} steps, decay-rate error {max(rel):.1e}, {dt:.1f}s")


def test_criterion_05_convection_no_work(buoyant32):
    t0 = time.perf_counter()
    conv = float(np.max(buoyant32.steps["conv_ratio"]))
    # Theta = 0: pure Navier-Stokes decay, the mechanical ledger is an identity
    base = RunConfig().with_(mesh={"nx": 32}, physics={"mu": 0.01}, scenario={"id": "equilibrium", "T_B": 0.0},
                             time={"T_end": 0.5, "dt": 4e-3, "output_every": 1000})
    prob = build_problem(base)
    c0 = np.linspace(1.0, -1.0, 16) * 0.5
    prob = replace(prob, bundle=replace(prob.bundle, v_0=reconstruct(c0, prob.basis)))
    resid = []
    for dt in (4e-3, 2e-3, 1e-3):
        res = run(replace(prob, config=base.with_(time={"dt": dt})))
        assert res.theta.max_abs() == 0.0
        resid.append(abs(res.steps["mechanical_excess"][-1]))
    ratios = [resid[0] / resid[1], resid[1] / resid[2]]
    dt = time.perf_counter() - t0
    ok = conv <= 1e-9 and all(3.5 < r < 4.5 for r in ratios) and dt < 120.0
    verdict(5, ok, f"max |b(c,c).c|/|c|^3 {conv:.1e}, slack {['%.2e' % r for r in resid]}, "
                   f"ratios {ratios[0]:.2f} {ratios[1]:.2f}")


def test_criterion_06_energy_inequalities(buoyant32, buoyant64):
    t0 = time.perf_counter()
    dt = BUOYANT.time.dt
    lines, ok = [], True
    C = {}
    for nx, res in ((32, buoyant32), (64, buoyant64)):
        s = res.steps
        scale = max(1.0, float(np.max(s["kinetic_energy"])), float(np.max(s["heat_quadratic"])))
        out_rows = res.ledger
        mech = max(r["mechanical_excess"] for r in out_rows)
        therm = max(r["thermal_excess"] for r in out_rows)
        ok &= mech <= 1e-12 * scale and therm <= 1e-12 * scale
        ok &= res.velocity.max_abs() > 1e-2  # a genuinely coupled flow
        C[nx] = slack_constant(s["weighted_excess"], s["t"], dt)
        lines.append(f"{nx}^2: mech {mech:.1e}, thermal {therm:.1e}, C {C[nx]:.3g}")
    # the finest mesh fixes C; the coarse run must obey the same bound
    C_ref = C[64]
    s = buoyant32.steps
    mask = s["t"] > 0
    ok &= bool(np.all(s["weighted_excess"][mask] <= 1.5 * C_ref * dt * s["t"][mask]))
    ok &= 1 / 1.5 <= C[32] / C_ref <= 1.5
    verdict(6, ok, "; ".join(lines) + f"; C ratio {C[32] / C_ref:.3f}")


def test_criterion_07_boundary_condition(buoyant32, buoyant64):
    worst = 0.0
    results = [buoyant32, buoyant64]
    for sid in ("equilibrium", "thermal-decay"):
        cfg = RunConfig().with_(mesh={"nx": 32}, scenario={"id": sid, "T_B": 2.0},
                                time={"T_end": 0.5, "dt": 2e-3, "output_every": 50})
        results.append(run(cfg))
    for res in results:
        s = res.steps
        b = res.heat.theta_B
        scale = max(1.0, float(np.max(np.abs(b))), float(np.max(np.abs(s["theta_min"]))),
                    float(np.max(np.abs(s["theta_max"]))))
        worst = max(worst, float(np.max(s["boundary_residual"])) / scale)
    # the twin runs of the uniqueness preset
    m = Mesh(32)
    p = NonlocalParams(lam=1.0, kappa=0.1, mu=1.0)
    bu = scenario("uniqueness-pair", m, 1.0, basis=build_basis(m, 16))
    for th0 in (bu.theta_0, bu.theta_0_b):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", CompatibilityWarning)
            st = init_heat(th0, bu.theta_B, p)
        for _ in range(200):
            st = heat_step(st, bu.v_frozen, 2e-3)
            worst = max(worst, boundary_residual(st) / max(1.0, bu.theta_B.max_abs(), th0.max_abs()))
    verdict(7, worst <= 1e-10, f"max scaled boundary residual {worst:.1e} over {len(results) + 2} runs")


def test_criterion_08_mean_rate_under_dt_halving():
    t0 = time.perf_counter()
    cfg = BUOYANT.with_(mesh={"nx": 32}, time={"dt": 4e-3})
    study = dt_study(cfg, k=2)
    sups = [d["sup_mean_rate"] for d in study["diagnostics"]]
    rel = study["relative_change"]
    dt = time.perf_counter() - t0
    ok = study["stable"] and max(rel) <= 0.2 and min(sups) > 0 and dt < 300.0
    verdict(8, ok, f"sup |d/dt avint Theta| {['%.4f' % x for x in sups]}, relative changes "
                   f"{['%.1e' % r for r in rel]}, {dt:.1f}s")


def test_criterion_09_galerkin_convergence():
    t0 = time.perf_counter()
    cfg = RunConfig().with_(
        mesh={"nx": 32},
        scenario={"id": "buoyant-cell", "T_B": 0.0, "amplitude": 0.01},
        time={"dt": 2e-3, "T_end": 0.5, "output_every": 50},
    )
    rep = galerkin_convergence(cfg, [8, 16, 32])
    vr, tr = rep["velocity_ratios"][0], rep["theta_ratios"][0]
    dt = time.perf_counter() - t0
    ok = rep["monotone"] and vr >= 2.0 and tr >= 2.0 and dt < 300.0
    verdict(9, ok, f"velocity differences {['%.2e' % x for x in rep['velocity_differences']]} (ratio {vr:.2f}), "
                   f"theta differences {['%.2e' % x for x in rep['theta_differences']]} (ratio {tr:.2f})")


def test_criterion_10_determinism_and_throughput(tmp_path):
    small = BUOYANT.with_(mesh={"nx": 16}, time={"T_end": 0.2, "dt": 2e-3, "output_every": 10})
    run(small, tmp_path / "a")
    run(small, tmp_path / "b")
    cmp = filecmp.dircmp(tmp_path / "a", tmp_path / "b")
    files = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*") if p.is_file())
    same = all(filecmp.cmp(tmp_path / "a" / f, tmp_path / "b" / f, shallow=False) for f in files)
    same &= not cmp.left_only and not cmp.right_only

    cfg = BUOYANT.with_(mesh={"nx": 64}, time={"T_end": 2.0, "dt": 2e-3, "output_every": 100})
    t0 = time.perf_counter()
    res = run(cfg)
    elapsed = time.perf_counter() - t0
    ok = same and len(files) > 5 and res.report["steps_completed"] == 1000 and elapsed < 60.0
    verdict(10, ok, f"{len(files)} files byte-identical: {same}; 64^2 N=16 1000 steps in {elapsed:.1f}s")
