import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seqaudit.errors import UsageError
from seqaudit.learners import (
    OgaState,
    Ons1d,
    log_wealth_at_beta,
    maximize_log_wealth,
    maximize_log_wealth_lanes,
    ons_init,
    regret_penalty,
)
from oracles import ExplicitOga, grid_max_log_wealth, ons_scalar


# ------------------------------------------------------------------ ONS


def test_ons_init_examples():
    tau = 0.3
    L = 4 + 2 * tau
    s = ons_init(0.0, 1 / L, L)
    assert float(s.beta) == pytest.approx(1 / 8)
    assert float(s.A0) == pytest.approx(64 * L**2)
    assert float(s.lam) == 0.0
    s = ons_init(-1.0, 1.0, 1.0)
    assert float(s.beta) == 1 / 16 and float(s.A0) == 64.0


def test_ons_scripted_step():
    s = ons_init(0.0, 0.25, 4.0)
    assert float(s.beta) == 1 / 8 and float(s.A0) == 1024.0
    s.step(-4.0)
    assert float(s.lam) == pytest.approx(8 * 4 / 1040, abs=1e-15)
    assert float(s.lam) == pytest.approx(0.0307692, abs=5e-8)


def test_ons_zero_gradient_and_clipping():
    s = ons_init(-1.0, 1.0, 1.0)
    s.step(-1.0)
    lam, A = float(s.lam), float(s.A)
    s.step(0.0)
    assert float(s.lam) == lam and float(s.A) == A
    prev = lam
    for _ in range(50):
        s.step(1.0)
        assert -1.0 <= float(s.lam) <= prev
        prev = float(s.lam)
    assert prev == -1.0


def test_ons_rejects_invalid():
    with pytest.raises(UsageError):
        ons_init(1.0, 0.0, 1.0)
    with pytest.raises(UsageError):
        ons_init(0.1, 1.0, 1.0)  # lambda_1 = 0 infeasible
    with pytest.raises(UsageError):
        ons_init(0.0, 1.0, 0.0)
    with pytest.raises(UsageError):
        ons_init(0.0, 1.0, 1.0).step(math.nan)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=60), st.floats(0.01, 3), st.floats(0.5, 10))
def test_ons_matches_scalar_oracle(grads, width, L):
    s = ons_init(-width / 3, width, L)
    seq = [0.0]
    for g in grads:
        s.step(g)
        seq.append(float(s.lam))
    assert seq == pytest.approx(ons_scalar(-width / 3, width, L, grads), abs=1e-14)


def test_ons_lanes_are_independent():
    b = np.array([0.25, 0.2, 0.1])
    s = Ons1d(0.0, b, 1 / b)
    rng = np.random.default_rng(1)
    G = rng.normal(size=(40, 3))
    for g in G:
        s.step(g)
    for j in range(3):
        assert float(s.lam[j]) == pytest.approx(ons_scalar(0.0, b[j], 1 / b[j], G[:, j])[-1], abs=1e-14)


# ------------------------------------------------------------------ OGA


def _run_pair(h, X, Y):
    oga, ref = OgaState(h, X.shape[1]), ExplicitOga(h)
    got, want = [], []
    for x, y in zip(X, Y):
        v = oga.predict(x, y)
        got.append(v)
        want.append(ref.step(x, y))
        assert oga.predict_unrolled(x, y) == pytest.approx(v, abs=1e-12)
        oga.update(x, y, v)
        assert float(oga.norm_sq[0]) <= 1.0 + 1e-12
        assert float(oga.norm_sq[0]) == pytest.approx(ref.norm_sq(), abs=1e-9)
    return got, want


def test_oga_empty_and_identical_pairs():
    oga = OgaState(1.0, 1)
    assert oga.predict([0.3], [2.0]) == 0.0
    oga.update([0.0], [1.0])
    assert oga.predict([0.7], [0.7]) == 0.0
    M, coef = oga.M.copy(), oga.coefficients.copy()
    oga.update([0.7], [0.7])
    assert np.array_equal(oga.M, M)
    assert float(oga.gamma_hist[-1][0]) == 1.0 and float(oga.coefficients[0, -1]) == 0.0
    assert np.array_equal(oga.coefficients[:, :-1], coef)


def test_oga_first_step_projection():
    oga = OgaState(1.0, 1)
    oga.update([0.0], [1.0])
    M1 = 2 * (1 - math.exp(-0.5))
    assert float(oga.M[0]) == pytest.approx(M1, rel=1e-15)
    assert float(oga.pre_norm_sq_hist[0][0]) == pytest.approx(4.0, rel=1e-14)
    assert float(oga.gamma_hist[0][0]) == pytest.approx(0.5, rel=1e-14)
    assert float(oga.norm_sq[0]) == pytest.approx(1.0, rel=1e-14)


@pytest.mark.parametrize("seed", range(5))
def test_oga_matches_explicit_oracle(seed):
    rng = np.random.default_rng(seed)
    d = 1 + seed % 3
    X, Y = rng.normal(size=(12, d)), rng.normal(0.5, 1.2, size=(12, d))
    Y[4] = X[4]  # a degenerate step in the middle
    got, want = _run_pair(0.3 + seed * 0.4, X, Y)
    assert got == pytest.approx(want, abs=1e-9)


def test_oga_capacity_growth_and_lanes():
    rng = np.random.default_rng(3)
    h = np.array([0.5, 1.0, 2.0])
    oga = OgaState(h, 2, lanes=3, capacity=4)
    refs = [ExplicitOga(v) for v in h]
    mask_pattern = rng.random((20, 3)) < 0.8
    for t in range(20):
        x, y = rng.normal(size=(3, 2)), rng.normal(size=(3, 2))
        v = oga.predict(x, y)
        for j in range(3):
            assert v[j] == pytest.approx(refs[j].value(x[j], y[j]), abs=1e-10)
            if mask_pattern[t, j]:
                refs[j].step(x[j], y[j])
        oga.update(x, y, v, active=mask_pattern[t])
    assert oga.coefficients.shape == (3, 20)


# ------------------------------------------------------- e-process wealth


def test_log_wealth_examples():
    assert log_wealth_at_beta([2.0, 0.5, 3.0], 0.0) == 0.0
    assert log_wealth_at_beta([1.0, 1.0, 1.0], 0.73) == 0.0
    assert log_wealth_at_beta([2.0, 0.5], 0.5) == pytest.approx(math.log(1.5) + math.log(0.75), abs=1e-15)
    assert log_wealth_at_beta([2.0, 0.5], 0.5) == pytest.approx(0.117783, abs=5e-7)
    assert log_wealth_at_beta([0.0, 3.0], 1.0) == -math.inf
    with pytest.raises(UsageError):
        log_wealth_at_beta([1.0], 1.5)


def test_maximize_examples():
    beta, val = maximize_log_wealth([1.0, 1.0, 1.0])
    assert val == 0.0
    beta, val = maximize_log_wealth([0.5, 0.9, 0.1])
    assert beta == 0.0 and val == 0.0
    beta, val = maximize_log_wealth([2.0, 3.0])
    assert beta == 1.0 and val == pytest.approx(math.log(6.0))
    gb, gv = grid_max_log_wealth([2.0, 2.0, 0.5])
    beta, val = maximize_log_wealth([2.0, 2.0, 0.5])
    assert abs(beta - gb) < 1e-4 and abs(val - gv) < 1e-8
    with pytest.raises(UsageError):
        maximize_log_wealth([])
    with pytest.raises(UsageError):
        maximize_log_wealth([1.0, -0.1])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.0, 3.0), min_size=1, max_size=30))
def test_maximize_matches_grid(E):
    beta, val = maximize_log_wealth(E)
    gb, gv = grid_max_log_wealth(E)
    assert val >= gv - 1e-12
    assert val == pytest.approx(gv, abs=1e-8)
    assert abs(beta - gb) < 1e-4 or abs(val - log_wealth_at_beta(E, gb)) < 1e-8


def test_maximize_lanes_warm_start_agrees():
    rng = np.random.default_rng(5)
    E = rng.uniform(0.2, 2.2, size=(6, 40))
    b0, v0 = maximize_log_wealth_lanes(E)
    b1, v1 = maximize_log_wealth_lanes(E, beta0=rng.random(6))
    assert np.allclose(b0, b1, atol=1e-10) and np.allclose(v0, v1, atol=1e-12)


def test_regret_penalty():
    assert regret_penalty(1) == pytest.approx(1.5 * math.log(2))
    assert math.exp(-regret_penalty(1)) == pytest.approx(1 / (2 * math.sqrt(2)))
