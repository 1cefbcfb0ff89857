import numpy as np
import pytest
from hypothesis import given, strategies as st

from sylvnls import SchemeParams, TimeGrid, build_grid, validate_step_ratio


def test_unit_interval():
    g = build_grid(0, 1, 9)
    assert g.h == pytest.approx(0.1, abs=1e-15)
    assert g.node(0) == 0.0
    assert g.node(9) == pytest.approx(0.9, abs=1e-15)
    assert g.size == 10


def test_wide_domain_unit_step():
    g = build_grid(-80, 100, 179)
    assert g.h == 1.0
    assert g.node(0) == -80.0
    assert g.nodes[-1] == 99.0


@pytest.mark.parametrize("args", [(0, 1, 1), (1, 1, 5), (2, 1, 5)])
def test_rejects_bad_grids(args):
    with pytest.raises(ValueError):
        build_grid(*args)


@pytest.mark.parametrize("h_J, l, sigma, warn", [
    ((0, 1, 9), 0.001, 0.1, False),
    ((0, 1, 9), 0.02, 2.0, True),
    ((-80, 100, 179), 0.5, 0.5, False),
])
def test_step_ratio(h_J, l, sigma, warn):
    r = validate_step_ratio(build_grid(*h_J), TimeGrid(0.0, l, 10))
    assert r.sigma == pytest.approx(sigma, rel=1e-12)
    assert r.warning is warn


def test_time_levels():
    tg = TimeGrid(1.0, 0.25, 8)
    assert [tg.t(n) for n in (0, 4, 8)] == [1.0, 2.0, 3.0]
    with pytest.raises(ValueError):
        TimeGrid(0.0, -1.0, 3)


@given(L0=st.floats(-100, 100), width=st.floats(0.5, 200), J=st.integers(2, 300))
def test_uniform_spacing(L0, width, J):
    L1 = L0 + width
    g = build_grid(L0, L1, J)
    x = g.nodes
    assert g.h == (L1 - L0) / (J + 1)
    assert np.all(x >= L0) and np.all(x < L1)
    assert np.max(np.abs(np.diff(x) - g.h)) <= 8 * np.finfo(float).eps * max(1.0, abs(L0) + width)


@given(st.floats(1e-11, 1e-2))
def test_mu_sum_rejected(eps):
    with pytest.raises(ValueError):
        SchemeParams(mu1=0.25 + eps, mu2=0.5, mu3=0.25)


def test_mu_sum_tolerance_accepts_rounding():
    SchemeParams(mu1=0.1, mu2=0.2, mu3=0.7)  # 0.1+0.2+0.7 != 1 bitwise


@pytest.mark.parametrize("kw", [dict(mu1=1.0, mu2=0.0, mu3=0.0), dict(lam=0.0), dict(p=1.0),
                                dict(kappa=3), dict(sigma1=0.0)])
def test_params_validation(kw):
    with pytest.raises(ValueError):
        SchemeParams(**kw)
