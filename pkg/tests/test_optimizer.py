import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relaysec.errors import ArgumentError, InfeasibleParamsError
from relaysec.gaussian import GaussianOrthogonalChannel, deaf_relay_capacity, genie_outer_rate, nf_inner_rate, pdf_inner_rate
from relaysec.optimizer import (
    CovarianceParams,
    covariance_box,
    optimize_bound,
    params_to_covariances,
    to_covariance,
)
from relaysec.search import SearchConfig, grid_points, maximize

FAST = SearchConfig(grid=5, restarts=6)


def chan(h_sr=0.0, h_sd=0.0, h_rd=0.0, h_se1=0.0, h_se2=0.0, h_re=0.0, case="case3", **kw):
    return GaussianOrthogonalChannel(h_sr, h_sd, h_rd, h_se1, h_se2, h_re, **kw).with_case(case)


# ---------------------------------------------------------------- parameters


def test_to_covariance_examples():
    K = to_covariance(CovarianceParams(1.0, 0.5, 0.25)).K
    np.testing.assert_allclose(K, np.diag([1.0, 0.5, 0.25]), atol=1e-15)
    K = to_covariance(CovarianceParams(0.7, 0.7, 0.7, 1, 1, 1)).K
    np.testing.assert_allclose(K, np.full((3, 3), 0.7), atol=1e-15)
    with pytest.raises(InfeasibleParamsError) as err:
        to_covariance(CovarianceParams(1, 1, 1, 0.9, 0.9, -0.9))
    # hand oracle for the correlation matrix's smallest eigenvalue
    R = np.array([[1, 0.9, 0.9], [0.9, 1, -0.9], [0.9, -0.9, 1]])
    assert err.value.min_eigenvalue == pytest.approx(np.linalg.eigvalsh(R)[0], abs=1e-12)
    assert err.value.min_eigenvalue < 0


def test_params_validation():
    with pytest.raises(ArgumentError):
        CovarianceParams(-0.1, 1, 1)
    with pytest.raises(ArgumentError):
        CovarianceParams(1, 1, 1, rho_d2=1.5)
    with pytest.raises(ArgumentError):
        to_covariance(CovarianceParams(2, 1, 1), chan())
    p = CovarianceParams(0.1, 0.2, 0.3, 0.4, -0.5, 0.6)
    assert CovarianceParams.from_array(p.as_array()) == p


@given(st.lists(st.floats(0, 2), min_size=3, max_size=3), st.lists(st.floats(-1, 1), min_size=3, max_size=3))
def test_psd_check_matches_eigenvalues(var, rho):
    p = CovarianceParams(*var, *rho)
    K, lam = params_to_covariances(p.as_array())
    if lam[0] >= -1e-9:
        assert np.linalg.eigvalsh(to_covariance(p).K)[0] >= -1e-9
    else:
        with pytest.raises(InfeasibleParamsError):
            to_covariance(p)


# ---------------------------------------------------------------- maximize


def test_maximize_examples():
    lo, hi = np.zeros(3), np.ones(3)
    res = maximize(lambda X: np.full(len(X), 0.25), lo, hi, FAST)
    assert res.value == 0.25
    np.testing.assert_array_equal(res.x, lo)  # lexicographic tie-break
    res = maximize(lambda X: X[:, 1], lo, hi, FAST)
    assert res.value == 1.0 and res.x[1] == 1.0


def test_maximize_finds_interior_peak():
    f = lambda X: -np.sum((X - [0.3137, 0.7071]) ** 2, axis=1)
    res = maximize(f, [0, 0], [1, 1], SearchConfig(grid=5, restarts=3, step_floor=1e-9))
    np.testing.assert_allclose(res.x, [0.3137, 0.7071], atol=1e-6)
    assert res.value >= res.grid_value


def test_maximize_errors():
    with pytest.raises(ArgumentError):
        maximize(lambda X: X[:, 0], [0, 0], [1], FAST)
    with pytest.raises(ArgumentError):
        maximize(lambda X: X[:, 0], [1], [0], FAST)
    with pytest.raises(ArgumentError):
        maximize(lambda X: np.full(len(X), -np.inf), [0], [1], FAST)
    with pytest.raises(ArgumentError):
        SearchConfig(grid=0)
    with pytest.raises(ArgumentError):
        SearchConfig(seed=-1)


def test_grid_points_nested():
    a = grid_points([0, -1], [1, 1], 5)
    b = grid_points([0, -1], [1, 1], 9)
    assert {tuple(r) for r in a} <= {tuple(r) for r in b}


def test_genie_case1_coherent_combining():
    ch = chan(h_sd=1, h_rd=1, h_se1=0.8, h_se2=0.6, h_re=0.5, case="case1")
    e = optimize_bound(ch, "genie_outer", FAST)
    assert e.value == pytest.approx(0.5 * np.log2(5), abs=1e-4)
    assert e.argmax["rho_d2"] == pytest.approx(1.0, abs=1e-3)


# ---------------------------------------------------------------- invariants


def _channels():
    rng = np.random.default_rng(7)
    out = []
    for case in ("case1", "case2", "case3"):
        g = rng.uniform(0.3, 2.0, 6)
        out.append(GaussianOrthogonalChannel(*g).with_case(case))
    return out


@pytest.mark.parametrize("which", ["pdf_inner", "genie_outer", "nf_inner", "no_secrecy"])
def test_returned_params_feasible_and_achieve_value(which):
    for ch in _channels():
        e = optimize_bound(ch, which, FAST)
        if which == "nf_inner":
            assert nf_inner_rate(ch, e.argmax["p_D"], e.argmax["p_2"]) == pytest.approx(e.value, abs=1e-12)
            continue
        K = to_covariance(CovarianceParams(**e.argmax), ch)
        if which == "pdf_inner":
            assert pdf_inner_rate(ch, K) == pytest.approx(e.value, abs=1e-12)
        elif which == "genie_outer":
            assert genie_outer_rate(ch, K) == pytest.approx(e.value, abs=1e-12)
        assert e.value >= e.search["grid_value"] - 1e-15


def test_determinism():
    ch = _channels()[2]
    a = optimize_bound(ch, "pdf_inner", SearchConfig(grid=5, restarts=6, seed=11))
    b = optimize_bound(ch, "pdf_inner", SearchConfig(grid=5, restarts=6, seed=11))
    assert a.value == b.value and a.argmax == b.argmax


def test_grid_doubling():
    for ch in _channels():
        for which in ("pdf_inner", "genie_outer"):
            lo = optimize_bound(ch, which, SearchConfig(grid=5, restarts=6))
            hi = optimize_bound(ch, which, SearchConfig(grid=9, restarts=6))
            assert hi.search["grid_value"] >= lo.search["grid_value"]  # nested grids
            assert hi.value >= lo.value - 1e-9


def test_nf_on_deaf_instance():
    ch = chan(h_sd=1, h_rd=1, h_se2=0.5, h_re=1, case="case2")
    e = optimize_bound(ch, "nf_inner", FAST)
    assert e.value >= 0.20752 - 1e-5
    assert e.value == pytest.approx(deaf_relay_capacity(ch)[0], abs=1e-6)


def test_case2_case3_outer_equal():
    for ch in _channels():
        a = optimize_bound(ch.with_case("case2"), "genie_outer", FAST).value
        b = optimize_bound(ch.with_case("case3"), "genie_outer", FAST).value
        assert a == pytest.approx(b, abs=1e-6)


def test_pdf_without_eavesdropper_approaches_capacity():
    ch = GaussianOrthogonalChannel(50.0, 1.0, 0.8, 0.0, 0.0, 0.0, e1=True, e2=True)
    pdf = optimize_bound(ch, "pdf_inner", FAST).value
    cap = optimize_bound(ch, "no_secrecy", FAST).value
    assert pdf == pytest.approx(cap, abs=1e-6)
    # with a strong relay link the destination cut binds: C((h_sd + h_rd)^2) at rho_D2 = 1
    assert cap == pytest.approx(0.5 * np.log2(1 + 1.8**2), abs=1e-5)


def test_optimize_bound_errors():
    off = GaussianOrthogonalChannel(1, 1, 1, 1, 1, 1, e1=False, e2=False)
    with pytest.raises(ArgumentError):
        optimize_bound(off, "pdf_inner", FAST)
    assert optimize_bound(off, "no_secrecy", FAST).value > 0
    with pytest.raises(ArgumentError):
        optimize_bound(_channels()[0], "best_bound", FAST)


def test_covariance_box_uses_powers():
    lo, hi = covariance_box(chan(P_R=2.0, P_D=0.5, P_2=3.0))
    np.testing.assert_array_equal(hi, [2.0, 0.5, 3.0, 1, 1, 1])
    np.testing.assert_array_equal(lo, [0, 0, 0, -1, -1, -1])


@settings(max_examples=10)
@given(st.integers(0, 2**31 - 1))
def test_polish_never_lowers_value(seed):
    rng = np.random.default_rng(seed)
    ch = GaussianOrthogonalChannel(*rng.uniform(0.3, 2.0, 6)).with_case("case2")
    base = optimize_bound(ch, "nf_inner", SearchConfig(grid=5, restarts=4))
    pol = optimize_bound(ch, "nf_inner", SearchConfig(grid=5, restarts=4, polish=True))
    assert pol.value >= base.value - 1e-12


def test_psd_tolerance_cannot_be_exploited():
    # a slightly indefinite point within PSD_TOL is evaluated at its PSD projection
    ch = _channels()[2]
    x = np.array([1.9e-6, 0.541006, 1.0, -1.0, 1.0, -0.998955])
    K, lam = params_to_covariances(x)
    assert -1e-9 < lam[0] < 0
    assert np.linalg.eigvalsh(K[0]).min() >= -1e-15
    x0 = x.copy()
    x0[0] = 0.0
    assert genie_outer_rate(ch, K[0]) <= genie_outer_rate(ch, params_to_covariances(x0)[0][0]) + 1e-9
