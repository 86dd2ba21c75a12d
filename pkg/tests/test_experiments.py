import math

import numpy as np
import pytest

from lrb_lab.algebra import identity, pauli_op
from lrb_lab.decay import power_law, stretched_exp
from lrb_lab.lattice import build_graph
from lrb_lab.model import Interaction, check_commuting, toric_code_long_range, zz_field, zz_long_range
from lrb_lab.experiments import (
    NotGappedError,
    SweepReport,
    ground_data,
    parallel_map,
    random_commuting_pauli_model,
    run_decay_correlations,
    run_localization_sweep,
    run_lppl,
    run_lrb_sweep,
    run_sharpness,
)


def test_ground_data_zz_field():
    gd = ground_data(zz_field(build_graph("chain", 1, 4), 1, 1))
    assert gd.degeneracy == 1 and gd.gap == pytest.approx(4)
    assert gd.expect(pauli_op("Z0")).real == pytest.approx(1)


def test_ground_data_toric():
    gd = ground_data(toric_code_long_range(2, 1.0, C_f=0, C_g=0))
    assert gd.degeneracy == 4 and gd.E0 == pytest.approx(0, abs=1e-10)


def test_zero_hamiltonian_not_gapped():
    g = build_graph("chain", 1, 3)
    gd = ground_data(Interaction(g, ()))
    assert not gd.gapped
    with pytest.raises(NotGappedError):
        run_decay_correlations(Interaction(g, ()), pauli_op("X0"), [pauli_op("X2")], power_law(1))


def test_report_bookkeeping():
    rep = SweepReport("x")
    assert rep.min_slack is None and rep.violations == 0
    rep.add({"a": 1}, 1.0, 2.0)
    rep.add({"a": 2}, 1.0, 1.0 - 1e-13)
    rep.add({"a": 3}, 1.0, 0.5)
    assert rep.min_slack == pytest.approx(-0.5)
    assert rep.violations == 1 and rep.failures()[0].params == {"a": 3}


def test_parallel_map_keeps_order():
    assert parallel_map(lambda x: x * x, range(50), threads=8) == [x * x for x in range(50)]


def test_random_models_commute():
    g = build_graph("chain", 1, 8)
    for seed in range(5):
        psi = random_commuting_pauli_model(g, np.random.default_rng(seed))
        assert psi.terms and check_commuting(psi) <= 1e-12


def test_sharpness_rejects_overlap():
    g = build_graph("chain", 1, 6)
    with pytest.raises(ValueError):
        run_sharpness(g, "zz_sets", {"X": [0, 1], "Y": [1, 2]}, [0.1])
    with pytest.raises(ValueError):
        run_sharpness(g, "zz_sets", {"X": [0], "Y": [3]}, [])


def test_sharpness_cnot_ratio():
    g = build_graph("chain", 1, 6)
    rep = run_sharpness(g, "cnot_pair", {"x": 0, "y": 3, "alpha": 2}, [0.01, 0.5, 1.0])
    assert rep.violations == 0
    assert rep.meta["equality_violations"] == []
    # measured ~ 2t F(3) against the Cor. 3.7 value 4t F(3)
    assert rep.meta["sharpness_ratio"] == pytest.approx(0.5, abs=1e-3)


def test_correlations_trivial_cases():
    g = build_graph("chain", 1, 6)
    psi = zz_field(g, 1, 1, alpha=2)
    rep = run_decay_correlations(psi, pauli_op("Z0"), [pauli_op("Z4"), identity([5])], power_law(2))
    assert rep.violations == 0
    assert all(r.lhs <= 1e-12 for r in rep.rows)


def test_lppl_zero_perturbation():
    g = build_graph("chain", 1, 5)
    psi = zz_field(g, 1, 1, alpha=2)
    V = pauli_op("X0", 0.0)
    rep = run_lppl(psi, V, pauli_op("Z4"), power_law(2), lam_grid=[0.0, 0.5, 1.0], t_grid=[0.5])
    lppl = [r for r in rep.rows if r.params["check"] == "lppl_4_2_long"]
    assert lppl[0].lhs == pytest.approx(0, abs=1e-12) and rep.violations == 0


def test_lppl_refuses_gapless():
    g = build_graph("chain", 1, 3)
    with pytest.raises(NotGappedError):
        run_lppl(Interaction(g, ()), pauli_op("X0", 0.5), pauli_op("Z2"), power_law(1), lam_grid=[0.0, 1.0])


def test_small_sweeps_hold():
    g = build_graph("chain", 1, 6)
    for F in (power_law(1), stretched_exp(1, 0.5)):
        psi = zz_long_range(g, 1, F)
        assert run_lrb_sweep(psi, F, [0.5, 2.0]).violations == 0
        assert run_localization_sweep(psi, F, [0.5, 2.0]).violations == 0
