import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lrb_lab.algebra import PAULI, local_op, pauli_op, spectral_norm
from lrb_lab.decay import eval_decay, power_law, stretched_exp
from lrb_lab.lattice import build_graph
from lrb_lab.model import (
    Interaction,
    Term,
    build_model,
    check_commuting,
    cnot_pair,
    custom,
    interaction_norm,
    terms_intersecting,
    toric_code_long_range,
    xxz,
    zz_field,
    zz_long_range,
)


def test_zz_field_term_count():
    g = build_graph("chain", 1, 3)
    assert len(zz_field(g, 1, 1).terms) == 5


def test_zz_field_long_range_couplings():
    g = build_graph("chain", 1, 5)
    psi = zz_field(g, 1, 0, alpha=2)
    assert len(psi.terms) == 10
    term = next(t for t in psi.terms if t.op.support == (0, 3))
    assert spectral_norm(term.op) == pytest.approx(1 / 16)


def test_cnot_norm():
    g = build_graph("chain", 1, 6)
    psi = cnot_pair(g, 1, 4, 2)
    assert len(psi.terms) == 1
    assert spectral_norm(psi.terms[0].op) == pytest.approx(1 / 16)


def test_toric_code_zero_couplings_commute():
    psi = toric_code_long_range(2, 1.0, C_f=0, C_g=0)
    assert len(psi.terms) == 8
    assert check_commuting(psi) <= 1e-12


def test_toric_code_long_range_commutes():
    psi = toric_code_long_range(2, 1.0, C_f=0.25, C_g=0.25)
    assert check_commuting(psi) <= 1e-12


def test_toric_coefficients_validated():
    with pytest.raises(ValueError):
        toric_code_long_range(2, 1.0, f=lambda a, b, d: 5.0)


def test_interaction_norm_single_term():
    g = build_graph("chain", 1, 6)
    F = power_law(2)
    C = 0.7
    psi = Interaction(g, (Term(pauli_op("Z1 Z4", C * eval_decay(F, 3))),))
    assert interaction_norm(psi, F, distinct_only=True) == pytest.approx(C)
    assert interaction_norm(Interaction(g, ()), F) == 0


@pytest.mark.parametrize("F", [power_law(0.5), power_law(2), stretched_exp(1, 0.5)])
def test_zz_long_range_distinct_norm_equals_coupling(F):
    g = build_graph("chain", 1, 8)
    psi = zz_long_range(g, 1.3, F)
    assert interaction_norm(psi, F, distinct_only=True) == pytest.approx(1.3)
    # the diagonal pairs x = y sum every term touching x, so they dominate
    assert interaction_norm(psi, F) >= 1.3


def test_commuting_residuals():
    g = build_graph("chain", 1, 6)
    assert check_commuting(zz_long_range(g, 1, power_law(1))) == 0
    assert check_commuting(xxz(build_graph("chain", 1, 3), 2.0)) > 0.1


def test_terms_intersecting():
    g = build_graph("chain", 1, 4)
    psi = zz_field(g, 1, 1)
    sub = terms_intersecting(psi, [0])
    assert sorted(t.op.support for t in sub.terms) == [(0,), (0, 1)]
    assert len(terms_intersecting(psi, range(4)).terms) == len(psi.terms)


def test_partition_reassembles_hamiltonian():
    g = build_graph("chain", 1, 5)
    psi = zz_field(g, 1, 0.5, alpha=1.5)
    X = [1, 2]
    inside = terms_intersecting(psi, X)
    outside = Interaction(g, tuple(t for t in psi.terms if t not in inside.terms))
    region = tuple(range(5))
    assert len(inside.terms) + len(outside.terms) == len(psi.terms)
    total = inside.dense(region).mat + outside.dense(region).mat
    assert np.abs(total - psi.dense(region).mat).max() <= 1e-12


def test_term_validation():
    with pytest.raises(ValueError):
        Term(local_op(np.array([[0, 1], [0, 0]]), [0]))


def test_custom_model_formats(tmp_path):
    g = build_graph("chain", 1, 3)
    specs = [
        {"support": [0, 1], "pauli": "Z0 Z1", "coefficient": 0.5},
        {"support": [2], "matrix": [[1, 0], [0, -1]]},
    ]
    psi = custom(g, specs)
    assert len(psi.terms) == 2
    path = tmp_path / "terms.json"
    path.write_text(json.dumps({"terms": specs}))
    psi2 = build_model(g, {"kind": "custom", "path": str(path)})
    assert np.allclose(psi2.dense(range(3)).mat, psi.dense(range(3)).mat)


def test_unknown_model_kind():
    with pytest.raises(ValueError):
        build_model(build_graph("chain", 1, 3), {"kind": "hubbard"})


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 4), st.floats(0.1, 3), st.integers(3, 7))
def test_two_body_norm_bound(alpha, C, L):
    g = build_graph("chain", 1, L)
    F = power_law(alpha)
    assert interaction_norm(zz_long_range(g, C, F), F, distinct_only=True) <= C * (1 + 1e-12)
