"""The eleven acceptance criteria; each records PASS/FAIL parts for the terminal summary."""

from __future__ import annotations

import filecmp
import math

import numpy as np
import pytest

from lrb_lab.algebra import embed, pauli_op, spectral_norm
from lrb_lab.cli import main, shipped_configs
from lrb_lab.decay import eval_decay, finite_range, power_law, stretched_exp, tail_sum_at
from lrb_lab.dynamics import commutator_norm_measured, evolve_heisenberg
from lrb_lab.experiments import (
    ground_data,
    run_decay_correlations,
    run_localization_sweep,
    run_lppl,
    run_lrb_sweep,
    run_oracle_equivalence,
    run_sharpness,
    run_stability,
)
from lrb_lab.lattice import build_graph, neighborhood
from lrb_lab.model import (
    toric_code_long_range,
    toric_stabilizers,
    transverse_field,
    zz_field,
    zz_long_range,
)

T_GRID_8 = [0.1, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0]


def _diff(a, b):
    sup = sorted(set(a.support) | set(b.support))
    return spectral_norm(embed(a, sup).mat - embed(b, sup).mat)


# 1 ------------------------------------------------------------------------
def test_c1_finite_range_exact_locality(criterion):
    rec = criterion(1)
    g = build_graph("chain", 1, 8)
    psi = zz_long_range(g, 1.0, finite_range(1))
    A, B = pauli_op("X1"), pauli_op("Z5")
    ok = True
    for t in (0.5, 1.0, 5.0):
        comm = commutator_norm_measured(psi, A, B, t)
        local = _diff(evolve_heisenberg(psi, A, t), evolve_heisenberg(psi, A, t, neighborhood(g, [1], 1)))
        ok &= rec(f"t={t}", comm <= 1e-12 and local <= 1e-12, f"commutator {comm:.1e}, X_R mismatch {local:.1e}")
    assert ok


# 2 ------------------------------------------------------------------------
def test_c2_remark_3_4_closed_form(criterion):
    rec = criterion(2)
    g = build_graph("chain", 1, 8)
    t_grid = [0.1 * k for k in range(1, 21)]
    report = run_sharpness(g, "cnot_pair", {"x": 1, "y": 4, "alpha": 2.0}, t_grid)
    measured = {r.params["t"]: r.lhs for r in report.rows if r.params["check"] == "measured<=cor_3_7"}
    err = max(abs(measured[t] - 2 * abs(math.sin(t / 16))) for t in t_grid)
    assert eval_decay(power_law(2), 3) == 1 / 16
    assert rec("20 times in (0, 2]", err <= 1e-9 and report.violations == 0, f"max deviation {err:.1e}")


# 3 ------------------------------------------------------------------------
def test_c3_zz_sets_sharpness(criterion):
    rec = criterion(3)
    g = build_graph("chain", 1, 8)
    t_grid = [1e-3, 0.01, 0.1, 0.25, 0.5, 1.0, 2.0, 3.0]
    params = {"X": [0, 1], "Y": [5, 6], "alpha": 1.0, "C": 1.0}
    report = run_sharpness(g, "zz_sets", params, t_grid)
    lower = [r for r in report.rows if r.params["check"] == "analytic<=measured"]
    worst = min(r.rhs - r.lhs for r in lower)
    ok1 = rec("measured >= 2|sin(2tc)| - 1e-10", worst >= -1e-10, f"min margin {worst:.1e}")
    ratio = report.meta["sharpness_ratio"]
    ok2 = rec("t=1e-3 ratio in [0.98, 1]", report.meta["sharpness_t"] == 1e-3 and 0.98 <= ratio <= 1.0,
              f"ratio {ratio:.6f}")
    ok3 = rec("measured <= Cor. 3.7", report.violations == 0, f"min slack {report.min_slack:.2e}")
    assert ok1 and ok2 and ok3


# 4 ------------------------------------------------------------------------
def test_c4_oracle_equivalence(criterion):
    rec = criterion(4)
    g = build_graph("chain", 1, 8)
    report = run_oracle_equivalence(g, seed=20240601, n_models=100, t_grid=(0.3, 1.0, 3.0), tol=1e-10)
    worst = max(r.lhs for r in report.rows)
    assert rec("100 models x 3 times", len(report.rows) == 300 and report.violations == 0,
               f"max deviation {worst:.1e}")


# 5 / 6 --------------------------------------------------------------------
GRAPHS = {
    "chain8": lambda: build_graph("chain", 1, 8),
    "chain10": lambda: build_graph("chain", 1, 10),
    "box3x3": lambda: build_graph("box", 2, 3),
}
DECAYS = {
    "alpha0.5": power_law(0.5),
    "alpha1": power_law(1.0),
    "alpha2": power_law(2.0),
    "alpha3": power_law(3.0),
    "stretched_b1_p0.5": stretched_exp(1.0, 0.5),
}
SWEEPS = [(gname, dname) for gname in GRAPHS for dname in DECAYS]


def _x0(g):
    return 4 if g.dim == 2 else 0  # centre of the 3x3 box, end of a chain


@pytest.mark.parametrize("gname,dname", SWEEPS, ids=[f"{a}-{b}" for a, b in SWEEPS])
def test_c5_inequality_sweeps(criterion, gname, dname):
    rec = criterion(5)
    g, F = GRAPHS[gname](), DECAYS[dname]
    report = run_lrb_sweep(zz_long_range(g, 1.0, F), F, T_GRID_8, x0=_x0(g))
    assert rec(f"{gname} {dname}", report.violations == 0,
               f"{len(report.rows)} rows, {report.violations} violations, min slack {report.min_slack:.3e}")


@pytest.mark.parametrize("gname,dname", SWEEPS, ids=[f"{a}-{b}" for a, b in SWEEPS])
def test_c6_localization_sweeps(criterion, gname, dname):
    rec = criterion(6)
    g, F = GRAPHS[gname](), DECAYS[dname]
    report = run_localization_sweep(zz_long_range(g, 1.0, F), F, T_GRID_8, x0=_x0(g))
    ok = rec(f"{gname} {dname} error <= RHS", report.violations == 0,
             f"{len(report.rows)} rows, min slack {report.min_slack:.3e}")
    _MONOTONE[(gname, dname)] = report.meta["monotonicity_violations"]
    assert ok


_MONOTONE: dict = {}


@pytest.mark.xfail(strict=True, reason="the localization error is not monotone in r for ZZ models "
                   "(closed-form counterexample in test_dynamics; see notes/decisions.md)")
def test_c6_localization_monotone_in_r(criterion):
    rec = criterion(6)
    if len(_MONOTONE) < len(SWEEPS):
        for gname, dname in SWEEPS:
            if (gname, dname) not in _MONOTONE:
                g, F = GRAPHS[gname](), DECAYS[dname]
                rep = run_localization_sweep(zz_long_range(g, 1.0, F), F, T_GRID_8, x0=_x0(g))
                _MONOTONE[(gname, dname)] = rep.meta["monotonicity_violations"]
    bad = {k: v for k, v in _MONOTONE.items() if v}
    worst = max((inc for v in bad.values() for inc in _increments(v)), default=0.0)
    rec("error non-increasing in r on every curve", not bad,
        f"{sum(len(v) for v in bad.values())} increases on {len(bad)}/{len(SWEEPS)} sweeps, "
        f"largest increase {worst:.3f}")
    assert not bad


def _increments(violations):
    for v in violations:
        yield v["err_next"] - v["err_r"]


# 7 ------------------------------------------------------------------------
def test_c7_decay_of_correlations(criterion):
    rec = criterion(7)
    g = build_graph("chain", 1, 8)
    psi = zz_field(g, 1.0, 1.0, alpha=2.0)
    gd = ground_data(psi)
    ok1 = rec("unique gapped ground state", gd.degeneracy == 1 and gd.gap > 0,
              f"degeneracy {gd.degeneracy}, gap {gd.gap:.4f}")
    Bs = [pauli_op({r: "X"}) for r in range(3, 8)]
    report = run_decay_correlations(psi, pauli_op("X0"), Bs, power_law(2.0))
    ok2 = rec("LHS < corr_rhs for r = 3..7", all(r.slack > 0 for r in report.rows) and len(report.rows) == 5,
              f"min slack {report.min_slack:.3e}")
    assert ok1 and ok2


def test_c7_toric_code_frustration_free(criterion):
    rec = criterion(7)
    psi = toric_code_long_range(2, alpha=1.0, C_f=0.25, C_g=0.25)
    gd = ground_data(psi)
    stars, plaqs = toric_stabilizers(2)
    P = gd.P0
    worst = max(spectral_norm(embed(op, P.support).mat @ P.mat) for op in stars + plaqs)
    ok = rec("2x2 torus, f=g=F_1/4", gd.degeneracy == 4 and worst <= 1e-10,
             f"degeneracy {gd.degeneracy}, max ||S P|| {worst:.1e}, E0 {gd.E0:.1e}")
    assert ok


# 8 ------------------------------------------------------------------------
def test_c8_lppl(criterion):
    rec = criterion(8)
    g = build_graph("chain", 1, 6)
    psi = zz_field(g, 1.0, 1.0)
    report = run_lppl(psi, pauli_op("X0", 0.5), pauli_op("Z5"), power_law(2.0),
                      lam_grid=np.linspace(0, 1, 21), t_grid=(0.1, 0.25, 0.5, 1.0, 2.0), g_min=1.0)
    gaps = report.meta["gaps"]
    ok1 = rec("21 lambdas, degeneracy 1, gap >= 1", len(gaps) == 21 and min(gaps) >= 1.0,
              f"min gap {min(gaps):.4f}")
    main_row = report.rows[0]
    ok2 = rec("|<B>_0 - <B>_1| < lppl_rhs", main_row.slack > 0,
              f"lhs {main_row.lhs:.2e}, rhs {main_row.rhs:.3f}")
    premise = report.rows[1:]
    ts = {r.params["t"] for r in premise}
    ok3 = rec("perturbed LRB premise on 5 times", len(ts) == 5 and all(r.passed for r in premise),
              f"{len(premise)} rows, min slack {min(r.slack for r in premise):.2e}")
    assert ok1 and ok2 and ok3


# 9 ------------------------------------------------------------------------
def test_c9_stability(criterion):
    rec = criterion(9)
    g = build_graph("chain", 1, 6)
    psi = zz_long_range(g, 1.0, finite_range(1))
    report = run_stability(psi, transverse_field(g, 1.0), power_law(2.0), t=1.0, s=0.0, ode_tol=1e-8)
    ident, phi = report.rows
    ok1 = rec("decomposition identity", ident.lhs <= 1e-8, f"residual {ident.lhs:.1e}")
    ok2 = rec("||Phi^int||_F bound", phi.passed, f"{phi.lhs:.4g} <= {phi.rhs:.4g}")
    assert ok1 and ok2


# 10 -----------------------------------------------------------------------
@pytest.mark.parametrize("alpha", [3, 4])
@pytest.mark.parametrize("R", [2, 4])
def test_c10_tail_sum_lower_bound(criterion, alpha, R):
    rec = criterion(10)
    D = 2
    L = 8 * R + 1  # radius 4R around the centre
    g = build_graph("box", D, L)
    centre = (L // 2) * L + L // 2
    lhs = tail_sum_at(g, power_law(alpha), centre, R)
    rhs = eval_decay(power_law(alpha - D), R) / ((alpha - D) * math.factorial(D - 1))
    assert rec(f"alpha={alpha}, R={R}", lhs >= rhs, f"{lhs:.5f} >= {rhs:.5f}")


# 11 -----------------------------------------------------------------------
@pytest.mark.parametrize("name", sorted(shipped_configs()))
def test_c11_determinism(criterion, tmp_path, name):
    rec = criterion(11)
    outs = {}
    for threads in (1, 4):
        out = tmp_path / f"threads{threads}"
        status = main(["run", name, "--output-dir", str(out), "--threads", str(threads)])
        outs[threads] = (status, out / f"{name}.csv")
    same = filecmp.cmp(outs[1][1], outs[4][1], shallow=False)
    assert rec(name, same and outs[1][0] == outs[4][0] == 0, "byte-identical, exit 0" if same else "CSV differs")
