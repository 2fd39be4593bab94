import itertools
import math
import warnings

import numpy as np
import pytest

from rcbench.core import SeedSpec, SplitSpec, uniform_series
from rcbench.errors import (
    CombinatorialBudgetExceeded,
    DegenerateOutput,
    DimensionMismatch,
    EmptyMatrix,
    InvalidParameter,
    InvalidTail,
    LengthMismatch,
    ZeroMatrix,
)
from rcbench.esn import EsnConfig, esn_new
from rcbench.measures import (
    Runner,
    SharedConfig,
    basis_key,
    count_multi_indices,
    delay_line,
    effective_rank,
    gen_rank_vidamour,
    ipc,
    kernel_rank_vidamour,
    kr_gr_dale,
    matrix_rank,
    memory_capacity,
    multi_indices,
    normalized_legendre,
    rank_convergence,
    rank_report,
    shared_measure_run,
    singular_values,
)

SMALL = (100, 1000, 500)


def small_esn(seed=0, n=30):
    return esn_new(EsnConfig(n_nodes=n, seed=SeedSpec(seed)))


# -- memory capacity ------------------------------------------------------


def mc_oracle(esn, k_max, lengths, seed):
    """Plain lstsq readout per delay and np.corrcoef, no shared code."""
    w, tr, te = lengths
    u = seed.generator().uniform(-1.0, 1.0, w + tr + te)
    e = esn.copy()
    x = np.empty((u.size, esn.n_nodes))
    for t, v in enumerate(u):
        e.step(v)
        x[t] = e.state
    a = np.hstack([x, np.ones((u.size, 1))])
    out = []
    for k in range(1, k_max + 1):
        y = np.roll(u, k)
        coef = np.linalg.lstsq(a[w: w + tr], y[w: w + tr], rcond=None)[0]
        pred = a[w + tr:] @ coef
        out.append(np.corrcoef(y[w + tr:], pred)[0, 1] ** 2)
    return np.array(out)


def test_mc_matches_independent_oracle():
    esn = small_esn(1)
    rep = memory_capacity(esn, k_max=40, lengths=SMALL, seed=SeedSpec(3), ridge_lambda=1e-12)
    want = mc_oracle(esn, 40, SMALL, SeedSpec(3))
    np.testing.assert_allclose(rep.mc_k, want, atol=1e-6)
    assert rep.total == pytest.approx(sum(rep.mc_k))


def test_mc_delay_line_exact():
    rep = memory_capacity(delay_line(10), k_max=15, lengths=(20, 500, 300), seed=SeedSpec(0))
    assert all(m > 0.999 for m in rep.mc_k[:10])
    assert all(m < 0.05 for m in rep.mc_k[10:])


def test_mc_bounds_and_epsilon():
    rep = memory_capacity(small_esn(2), k_max=60, lengths=SMALL, epsilon=0.05)
    assert all(0.0 <= m <= 1.0 for m in rep.raw_mc_k)
    assert all(m == 0.0 or m >= 0.05 for m in rep.mc_k)
    assert rep.total <= 30 + 1e-9


def test_mc_washout_must_cover_delays():
    with pytest.raises(InvalidParameter):
        memory_capacity(small_esn(), k_max=200, lengths=SMALL)


def test_mc_degenerate_output_warns():
    flat = Runner(lambda u: np.zeros((u.size, 3)), 3, "dead")
    with pytest.warns(DegenerateOutput):
        rep = memory_capacity(flat, k_max=5, lengths=(10, 100, 50))
    assert rep.total == 0.0 and rep.degenerate_delays == [1, 2, 3, 4, 5]


def test_runner_shape_check():
    bad = Runner(lambda u: np.zeros((u.size, 2)), 3)
    with pytest.raises(DimensionMismatch):
        bad(np.zeros(5))


def test_mc_esn_untouched():
    esn = small_esn()
    before = esn.state.copy()
    memory_capacity(esn, k_max=10, lengths=SMALL)
    assert np.array_equal(esn.state, before)


# -- IPC ------------------------------------------------------------------


def test_legendre_orthonormal_under_uniform():
    x, wts = np.polynomial.legendre.leggauss(20)
    for i in range(6):
        for j in range(6):
            inner = 0.5 * np.sum(wts * normalized_legendre(i, x) * normalized_legendre(j, x))
            assert inner == pytest.approx(1.0 if i == j else 0.0, abs=1e-12)


@pytest.mark.parametrize("deg,delay", [(1, 5), (2, 4), (3, 3), (4, 6)])
def test_basis_count_brute_force(deg, delay):
    # count exponent vectors over delays 1..delay with total degree 1..deg
    brute = sum(1 for e in itertools.product(range(deg + 1), repeat=delay) if 1 <= sum(e) <= deg)
    assert count_multi_indices(deg, delay) == brute == math.comb(delay + deg, deg) - 1
    assert len(multi_indices(deg, delay)) == brute


def test_basis_key_format():
    assert basis_key(((1, 2), (3, 1))) == "1:2,3:1"


def test_ipc_degree_one_equals_mc():
    esn = small_esn(4)
    lengths = (50, 1000, 500)
    mc = memory_capacity(esn, k_max=20, lengths=lengths, seed=SeedSpec(7))
    cap = ipc(esn, max_degree=2, max_delay=20, threshold=0.0, lengths=lengths, seed=SeedSpec(7))
    for k in range(1, 21):
        assert cap.raw_per_basis[f"{k}:1"] == pytest.approx(mc.raw_mc_k[k - 1], abs=1e-9)


def test_ipc_delay_line_has_no_nonlinear_capacity():
    cap = ipc(delay_line(5), max_degree=3, max_delay=5, threshold=0.01, lengths=(10, 2000, 1000))
    assert cap.per_degree_totals[1] == pytest.approx(5.0, abs=0.01)
    assert cap.per_degree_totals[2] + cap.per_degree_totals[3] < 0.05


def test_ipc_detects_product_reservoir():
    # a reservoir that exposes u(t-1)*u(t-2) carries that degree-2 basis
    def run(u):
        p = np.concatenate([[0.0, 0.0], u])
        return np.column_stack([p[1:-1], p[:-2], p[1:-1] * p[:-2]])

    cap = ipc(Runner(run, 3), max_degree=2, max_delay=3, lengths=(10, 2000, 1000))
    assert cap.per_basis["1:1,2:1"] > 0.99
    assert cap.per_basis["1:2"] == 0.0


def test_ipc_budget_and_surrogates():
    with pytest.raises(CombinatorialBudgetExceeded):
        ipc(delay_line(3), max_degree=5, max_delay=30)
    cap = ipc(small_esn(), max_degree=1, max_delay=5, lengths=(10, 600, 300), surrogates=5)
    assert cap.surrogate["count"] == 5
    assert all(v <= cap.raw_per_basis[k] for k, v in cap.per_basis.items())


# -- rank -----------------------------------------------------------------


def test_rank_basics():
    assert matrix_rank(np.eye(5)) == 5
    assert matrix_rank(np.outer(np.arange(1, 6), np.arange(1, 4))) == 1
    assert matrix_rank(np.zeros((3, 3))) == 0
    assert effective_rank(np.diag([1.0, 1.0, 0.0])) == pytest.approx(2.0, abs=1e-12)
    assert effective_rank(np.eye(4)) == pytest.approx(4.0, abs=1e-12)
    with pytest.raises(ZeroMatrix):
        effective_rank(np.zeros((2, 2)))
    with pytest.raises(EmptyMatrix):
        singular_values(np.zeros((0, 3)))
    rep = rank_report(np.zeros((3, 2)))
    assert rep.rank == 0 and rep.effective_rank == 0.0


def test_rank_threshold_fraction():
    m = np.diag([1.0, 1e-3, 1e-6])
    assert matrix_rank(m, 1e-4) == 2
    assert matrix_rank(m, 1e-7) == 3
    sv = np.linalg.svd(m, compute_uv=False)
    assert singular_values(m).tolist() == sv.tolist()


def test_vidamour_t1_equals_dale_bit_exact():
    esn = small_esn(5)
    a = kernel_rank_vidamour(esn, s=40, t=1, seed=SeedSpec(11), washout=50)
    b = kr_gr_dale(esn, s=40, mode="KR", seed=SeedSpec(11), washout=50)
    assert a.rank == b.rank and a.singular_values == b.singular_values


def test_gen_rank_shared_tail_collapses():
    esn = small_esn(6)
    kr = kernel_rank_vidamour(esn, s=60, t=30, washout=50)
    gr = gen_rank_vidamour(esn, s=60, t=30, tail_len=29, washout=50)
    assert gr.rank < kr.rank
    with pytest.raises(InvalidTail):
        gen_rank_vidamour(esn, s=40, t=5, tail_len=5)
    # identical explicit streams long enough to forget the previous one
    # end in one common state
    stream = np.random.default_rng(0).uniform(-1, 1, 400)
    u = np.concatenate([np.zeros(10), np.tile(stream, 8)])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = kernel_rank_vidamour(esn, s=8, t=400, washout=10, inputs=u)
    assert rep.rank == 1


def test_dale_gr_uses_narrow_range():
    esn = small_esn(7)
    gr = kr_gr_dale(esn, s=60, mode="GR", washout=50)
    assert gr.params["input_range"] == 0.1
    with pytest.raises(LengthMismatch):
        kr_gr_dale(esn, s=40, washout=5, inputs=np.zeros(3))


@pytest.mark.parametrize("seed", range(5))
def test_rank_bounded_by_min_s_n(seed):
    esn = small_esn(seed, n=25)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for s in (10, 25, 50):
            for rep in (
                kr_gr_dale(esn, s=s, washout=30),
                kr_gr_dale(esn, s=s, mode="GR", washout=30),
                kernel_rank_vidamour(esn, s=s, t=5, washout=30),
                gen_rank_vidamour(esn, s=s, t=5, tail_len=2, washout=30),
            ):
                assert 0 <= rep.rank <= min(s, 25)
                assert rep.effective_rank <= min(s, 25) + 1e-9


def test_small_s_warns():
    with pytest.warns(UserWarning, match="below the reservoir size"):
        kr_gr_dale(small_esn(), s=10, washout=10)


def test_rank_convergence_doubles():
    esn = small_esn(8)
    rep, hist = rank_convergence(kr_gr_dale, 8, 128, reservoir=esn, washout=20)
    sizes = [h[0] for h in hist]
    assert sizes[0] == 8 and all(b == 2 * a for a, b in zip(sizes, sizes[1:]))
    assert rep.rank == hist[-1][1]


def test_shared_run_equals_standalone():
    esn = small_esn(9)
    cfg = SharedConfig(lengths=SplitSpec(100, 600, 300), k_max=40, s=60, seed=SeedSpec(2))
    mc, kr = shared_measure_run(esn, cfg)
    mc2 = memory_capacity(esn, k_max=40, lengths=(100, 600, 300), seed=SeedSpec(2))
    kr2 = kr_gr_dale(esn, s=60, seed=SeedSpec(2), washout=100)
    assert mc.mc_k == mc2.mc_k
    assert kr.singular_values == kr2.singular_values


def test_measures_reject_unknown_reservoir():
    with pytest.raises(InvalidParameter):
        memory_capacity(object(), k_max=2)


def test_uniform_draws_prefix_for_shared_layout():
    a = uniform_series(SeedSpec(2), -1, 1, 160).scalar()
    b = SeedSpec(2).generator().uniform(-1, 1, 1000)
    assert np.array_equal(a, b[:160])
