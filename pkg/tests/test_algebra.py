import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lrb_lab.algebra import (
    PAULI,
    DimensionCapError,
    PauliString,
    check_dense,
    commutator,
    conditional_expectation,
    dense_site_cap,
    embed,
    exp_hermitian,
    identity,
    local_op,
    pauli_commute,
    pauli_op,
    spectral_norm,
    trim,
)

Z = PAULI["Z"]


def random_op(rng, k):
    m = rng.normal(size=(2**k, 2**k)) + 1j * rng.normal(size=(2**k, 2**k))
    return local_op(m, range(k))


def test_embed_examples():
    z3 = local_op(Z, [3])
    assert np.array_equal(embed(z3, [3]).mat, z3.mat)
    assert np.allclose(embed(local_op(Z, [0]), [0, 1]).mat, np.diag([1, 1, -1, -1]))
    assert np.allclose(embed(local_op(Z, [1]), [0, 1]).mat, np.diag([1, -1, 1, -1]))


def test_embed_rejects_missing_sites():
    with pytest.raises(ValueError):
        embed(local_op(Z, [2]), [0, 1])


def test_trim_round_trip():
    op = local_op(np.kron(PAULI["X"], PAULI["Y"]), [1, 4])
    big = embed(op, [0, 1, 2, 4, 6])
    back = trim(big)
    assert back.support == (1, 4) and np.allclose(back.mat, op.mat)


def test_spectral_norm_examples():
    assert spectral_norm(local_op(Z, [0])) == pytest.approx(1)
    assert spectral_norm(local_op(np.zeros((2, 2)), [0])) == 0
    assert spectral_norm(local_op(np.array([[0, 2], [0, 0]]), [0])) == pytest.approx(2)


def test_conditional_expectation_examples():
    one = identity([0, 1])
    assert np.allclose(conditional_expectation(one, [0]).mat, np.eye(2))
    z0 = embed(local_op(Z, [0]), [0, 1])
    assert spectral_norm(conditional_expectation(z0, [1])) == pytest.approx(0)
    a = local_op(np.kron(PAULI["X"], Z), [0, 1])
    assert np.allclose(conditional_expectation(a, [0, 1]).mat, a.mat)


def test_exp_hermitian_examples():
    z = local_op(Z, [0])
    assert np.allclose(exp_hermitian(z, 0).mat, np.eye(2))
    t = 0.7
    assert np.allclose(exp_hermitian(z, t).mat, np.diag([np.exp(1j * t), np.exp(-1j * t)]))
    zz = pauli_op("Z0 Z1")
    u = exp_hermitian(zz, t).mat
    assert np.allclose(u, np.diag(np.exp(1j * t * np.array([1, -1, -1, 1]))))


def test_exp_rejects_non_hermitian():
    with pytest.raises(ValueError):
        exp_hermitian(local_op(np.array([[0, 1], [0, 0]]), [0]), 1.0)


def test_pauli_commute_examples():
    P = PauliString.from_label
    assert pauli_commute(P("X0"), P("Z1"))
    assert not pauli_commute(P("X0"), P("Z0"))
    assert pauli_commute(P("X0 X1"), P("Z0 Z1"))
    with pytest.raises(ValueError):
        pauli_commute(P("X0"), P("Z0"), q=3)


def test_pauli_product_matches_matrices():
    a, b = PauliString.from_label("X0 Y2"), PauliString.from_label("Z0 Y1 X2")
    prod = a * b
    sup = [0, 1, 2]
    lhs = prod.to_local_op(sup).mat
    rhs = a.to_local_op(sup).mat @ b.to_local_op(sup).mat
    assert np.allclose(lhs, rhs)


def test_dimension_cap(monkeypatch):
    monkeypatch.setenv("LRB_LAB_DIM_CAP", "4")
    assert dense_site_cap() == 4
    with pytest.raises(DimensionCapError) as info:
        check_dense(5)
    assert info.value.required_sites == 5 and info.value.allowed_sites == 4
    assert "5" in str(info.value) and "4" in str(info.value)
    monkeypatch.delenv("LRB_LAB_DIM_CAP")
    assert dense_site_cap() == 14


def test_operator_arithmetic_aligns_supports():
    a, b = pauli_op("X0"), pauli_op("Z2")
    s = a + b
    assert s.support == (0, 2)
    assert np.allclose(s.mat, np.kron(PAULI["X"], np.eye(2)) + np.kron(np.eye(2), Z))
    assert spectral_norm(commutator(a, b)) == 0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 2))
def test_embed_preserves_norm(seed, k):
    rng = np.random.default_rng(seed)
    op = random_op(rng, k)
    target = list(range(k + 2))
    assert spectral_norm(embed(op, target)) == pytest.approx(spectral_norm(op), rel=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_conditional_expectation_is_contractive_projection(seed):
    rng = np.random.default_rng(seed)
    op = random_op(rng, 3)
    e = conditional_expectation(op, [0, 2])
    assert spectral_norm(e) <= spectral_norm(op) * (1 + 1e-10)
    ee = conditional_expectation(embed(e, [0, 1, 2]), [0, 2])
    assert np.allclose(ee.mat, e.mat)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from("IXYZ"), min_size=3, max_size=3),
       st.lists(st.sampled_from("IXYZ"), min_size=3, max_size=3))
def test_symbolic_commutation_matches_dense(la, lb):
    a = PauliString.from_label({i: c for i, c in enumerate(la) if c != "I"})
    b = PauliString.from_label({i: c for i, c in enumerate(lb) if c != "I"})
    sup = [0, 1, 2]
    ma, mb = a.to_local_op(sup).mat, b.to_local_op(sup).mat
    assert pauli_commute(a, b) == np.allclose(ma @ mb, mb @ ma)
