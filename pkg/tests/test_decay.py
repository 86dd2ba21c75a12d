import math

import pytest
from hypothesis import given, settings, strategies as st

from lrb_lab.decay import (
    decay_from_dict,
    double_sum,
    eval_decay,
    finite_range,
    fit_tail_constant,
    power_law,
    stretched_exp,
    tail_sum_at,
    tail_sum_sup,
)
from lrb_lab.lattice import build_graph


def test_eval_examples():
    assert eval_decay(power_law(2), 3) == pytest.approx(1 / 16)
    assert eval_decay(stretched_exp(1, 1), 0) == pytest.approx(1.0)
    assert eval_decay(power_law(1, shift=2), 1) == pytest.approx(0.25)
    F = finite_range(2)
    assert eval_decay(F, 2) == 1 and eval_decay(F, 3) == 0


def test_double_sum_examples():
    g = build_graph("chain", 1, 8)
    assert double_sum(g, power_law(1), [0], [4]) == pytest.approx(0.2)
    assert double_sum(g, power_law(1), [0, 1], [5, 6]) == pytest.approx(1 / 6 + 1 / 7 + 1 / 5 + 1 / 6)
    assert double_sum(g, finite_range(1), [0], [3, 4]) == 0


def test_tail_sum_examples():
    g = build_graph("chain", 1, 16)
    val = tail_sum_sup(g, power_law(2), 2)
    assert 0 < val < 2 * (math.pi**2 / 6 - 5 / 4)
    assert tail_sum_sup(g, power_law(2), g.diam + 1) == 0
    assert tail_sum_sup(g, finite_range(1), 2) == 0


def test_tail_sum_sup_is_max_over_centres():
    g = build_graph("box", 2, 4)
    F = power_law(1.5)
    for R in range(4):
        assert tail_sum_sup(g, F, R) == pytest.approx(max(tail_sum_at(g, F, x, R) for x in g.sites))


def test_fit_constant_dominates():
    g = build_graph("chain", 1, 10)
    F, ref = power_law(3), power_law(2)
    C = fit_tail_constant(g, F, ref, range(g.diam + 1))
    for R in range(g.diam + 1):
        assert tail_sum_sup(g, F, R) <= C * eval_decay(ref, R) * (1 + 1e-12)


def test_invalid_parameters():
    with pytest.raises(ValueError):
        power_law(0)
    with pytest.raises(ValueError):
        stretched_exp(1, 1.5)
    with pytest.raises(ValueError):
        eval_decay(power_law(1), -1)
    with pytest.raises(ValueError):
        decay_from_dict({"kind": "gaussian"})


def test_dict_round_trip():
    for F in (power_law(2, shift=1), stretched_exp(0.5, 0.3), finite_range(3)):
        assert decay_from_dict(F.to_dict()) == F


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 5), st.floats(0, 20), st.floats(0, 20))
def test_power_law_monotone_and_bounded(alpha, r1, r2):
    F = power_law(alpha)
    lo, hi = sorted((r1, r2))
    assert 0 < eval_decay(F, hi) <= eval_decay(F, lo) <= 1


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 3), st.floats(0.05, 1), st.floats(0, 30))
def test_stretched_exp_positive(b, p, r):
    assert 0 < eval_decay(stretched_exp(b, p), r) <= 1
