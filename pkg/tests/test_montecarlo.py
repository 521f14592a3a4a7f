import hashlib

import numpy as np
import pytest

from bsppcc import kernels, montecarlo
from bsppcc.errors import CapacityError, IntegrityError, TableFormatError
from bsppcc.montecarlo import (
    PAPER_LEVELS,
    CriticalValueTable,
    SimConfig,
    accuracy_bound,
    alpha_sensitivity,
    build_table,
    critical_values,
    empirical_quantile,
    paper_table,
    simulate_null_r,
)


@pytest.fixture(scope="module")
def null_46():
    return simulate_null_r(SimConfig(46, 10**6, 20240501))


# ---- configuration ----

@pytest.mark.parametrize("kwargs", [
    dict(n=2, iterations=1000, seed=1),
    dict(n=10, iterations=0, seed=1),
    dict(n=10, iterations=1000, seed=1, alpha_gen=0.0),
    dict(n=10, iterations=1000, seed=1, levels=(0.1, 0.05)),
    dict(n=10, iterations=1000, seed=1, levels=(0.0, 0.5)),
    dict(n=10, iterations=1000, seed=1, levels=(0.5, 1.0)),
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        SimConfig(**kwargs)


# ---- simulation ----

def test_small_run_bounded_and_reproducible():
    cfg = SimConfig(3, 1000, 99)
    a, b = simulate_null_r(cfg), simulate_null_r(cfg)
    assert a.size == 1000
    assert np.all((a >= -1) & (a <= 1))
    assert np.all(np.diff(a) >= 0)
    np.testing.assert_array_equal(a, b)


def test_seed_changes_output():
    a = simulate_null_r(SimConfig(10, 2000, 1))
    b = simulate_null_r(SimConfig(10, 2000, 2))
    assert not np.array_equal(a, b)


def test_worker_count_does_not_change_output(null_46):
    eight = simulate_null_r(SimConfig(46, 10**6, 20240501), workers=8)
    np.testing.assert_array_equal(null_46, eight)


def test_prefix_property_of_chunking():
    # the first chunk of a longer run is the same stream as a one-chunk run
    short = montecarlo._simulate_chunk(SimConfig(12, 5000, 4), kernels.null_statistics, 0)
    longer = montecarlo._simulate_chunk(SimConfig(12, 200_000, 4), kernels.null_statistics, 0)
    np.testing.assert_array_equal(short, longer[:5000])


@pytest.mark.skipif("compiled" not in kernels.BACKENDS, reason="extension not built")
@pytest.mark.parametrize("n", [3, 11, 46, 300])
def test_backends_agree(n):
    cfg = SimConfig(n, 3000, 8, alpha_gen=0.7)
    a = simulate_null_r(cfg, backend="compiled")
    b = simulate_null_r(cfg, backend="python")
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)


def test_unknown_backend():
    with pytest.raises(ValueError):
        simulate_null_r(SimConfig(5, 10, 0), backend="gpu")


def test_kernel_matches_plot_statistic():
    from bsppcc.distribution import BsParams, bs_sample, make_rng
    from bsppcc.plotting import bs_plot_statistic

    rng = make_rng(17)
    z = rng.standard_normal((50, 25))
    r = kernels.null_statistics(z.copy(), 1.3, montecarlo._plot_quantiles(25))
    # same normals pushed through the public sampler path
    rng = make_rng(17)
    for k in range(50):
        s = bs_sample(25, BsParams(1.3, 1.0), rng)
        assert r[k] == pytest.approx(bs_plot_statistic(s).r, abs=1e-12)


def test_null_median_n46(null_46):
    # published 50% critical value for n=46 is 0.9920
    assert empirical_quantile(null_46, 0.5) == pytest.approx(0.9920, abs=0.003)


def test_null_quartile_n46(null_46):
    assert empirical_quantile(null_46, 0.25) == pytest.approx(0.9880, abs=0.002)


def test_capacity_limit():
    with pytest.raises(CapacityError):
        simulate_null_r(SimConfig(5, 5000, 0), max_in_memory=4999)
    assert issubclass(CapacityError, MemoryError)


@pytest.mark.parametrize("n", [3, 46])
def test_chunked_selection_matches_in_memory(n):
    cfg = SimConfig(n, 150_000, 31)
    in_memory = critical_values(cfg)
    chunked = critical_values(cfg, max_in_memory=10_000)
    assert chunked == in_memory


# ---- empirical quantile ----

def test_empirical_quantile_definition():
    values = np.arange(1.0, 11.0)
    assert empirical_quantile(values, 0.25) == 3.0
    assert empirical_quantile(values, 0.1) == 1.0
    assert empirical_quantile(values, 0.11) == 2.0
    assert empirical_quantile(np.arange(1.0, 100.0), 0.07) == 7.0


@pytest.mark.parametrize("size", [1, 7, 999])
def test_empirical_quantile_odd_median(size):
    values = np.arange(size, dtype=float)
    assert empirical_quantile(values, 0.5) == values[size // 2]


def test_empirical_quantile_errors():
    with pytest.raises(ValueError):
        empirical_quantile([], 0.5)
    with pytest.raises(ValueError):
        empirical_quantile([1.0], 1.0)


# ---- tables ----

def test_build_table_n46_matches_published():
    table = build_table([46], SimConfig(46, 10**6, 7))
    ref = paper_table().rows[46]
    assert max(abs(a - b) for a, b in zip(table.rows[46], ref)) <= 0.002
    assert table.meta["I"] == 10**6 and table.meta["seed"] == 7
    assert table.meta["alpha_gen"] == 1.0


def test_build_table_n3_median():
    table = build_table([3], SimConfig(3, 10**5, 3))
    assert table.value(3, 0.5) == pytest.approx(0.9787, abs=0.003)


@pytest.mark.slow
def test_build_table_n1000():
    table = build_table([1000], SimConfig(1000, 10**5, 1000))
    assert table.value(1000, 0.01) == pytest.approx(0.9953, abs=0.005)


def test_build_table_validation():
    with pytest.raises(ValueError):
        build_table([], SimConfig(5, 1000, 0))
    with pytest.raises(ValueError):
        build_table([2, 5], SimConfig(5, 1000, 0))
    with pytest.raises(ValueError):
        build_table([5], SimConfig(5, 999, 0))


def test_build_table_flushes_partial_rows(tmp_path):
    out = tmp_path / "partial.txt"

    def progress(n, row):
        if n == 6:
            raise RuntimeError("boom")

    with pytest.raises(RuntimeError):
        build_table([5, 6, 7], SimConfig(5, 2000, 1), partial_path=out, progress=progress)
    partial = CriticalValueTable.read(out)
    assert partial.partial and partial.ns == (5, 6)
    assert out.read_text().rstrip("\n").endswith("# partial")


def test_generated_rows_monotone_and_convergent():
    tpl_small = SimConfig(20, 10**5, 77)
    small = build_table([20], tpl_small)
    large = build_table([20], SimConfig(20, 10**6, 78))
    tol = 3 * (accuracy_bound(10**5) + accuracy_bound(10**6))
    for a, b in zip(small.rows[20], large.rows[20]):
        assert abs(a - b) < tol
    for row in (small.rows[20], large.rows[20]):
        assert all(y >= x for x, y in zip(row, row[1:]))


def test_accuracy_bound():
    assert accuracy_bound(10**8) == 0.00005
    assert accuracy_bound(10**6) == pytest.approx(0.0005, rel=1e-15)
    assert accuracy_bound(4) == 0.25
    with pytest.raises(ValueError):
        accuracy_bound(0)


# ---- published table ----

def test_paper_table_layout():
    t = paper_table()
    assert t.levels == PAPER_LEVELS
    expected = (list(range(3, 51)) + list(range(55, 101, 5)) + list(range(110, 501, 10))
                + list(range(550, 1001, 50)))
    assert list(t.ns) == expected
    assert t.meta["source"] == "paper, I=10^8" and t.meta["I"] == 10**8
    assert t.seed is None and t.alpha_gen is None


@pytest.mark.parametrize("n,gamma,value", [
    (46, 0.005, 0.9639), (46, 0.5, 0.9920), (110, 0.25, 0.9935), (3, 0.005, 0.7208),
    (1000, 0.5, 0.9992), (4, 0.005, 0.6998), (500, 0.1, 0.9968), (75, 0.125, 0.9886),
])
def test_paper_table_values(n, gamma, value):
    assert paper_table().value(n, gamma) == value


def test_paper_table_checksum(monkeypatch):
    monkeypatch.setattr(montecarlo, "PAPER_TABLE_SHA256", hashlib.sha256(b"x").hexdigest())
    montecarlo.paper_table.cache_clear()
    try:
        with pytest.raises(IntegrityError):
            montecarlo.paper_table()
    finally:
        monkeypatch.undo()
        montecarlo.paper_table.cache_clear()
    assert montecarlo.paper_table().rows[3][0] == 0.7208


# ---- file format ----

def test_text_round_trip_is_byte_identical(tmp_path):
    table = build_table([5, 9], SimConfig(5, 1000, 12, alpha_gen=0.5, levels=(0.05, 0.5)))
    path = tmp_path / "t.txt"
    table.write(path)
    text = path.read_text()
    assert text.splitlines()[0] == (
        "bsppcc-table v1 I=1000 seed=12 alpha_gen=0.5 levels=0.05,0.5")
    again = CriticalValueTable.read(path)
    assert again.to_text() == text
    assert again.rows[5] == tuple(round(v, 6) for v in table.rows[5])


def test_paper_table_reprint():
    raw = (montecarlo.resources.files("bsppcc") / montecarlo.PAPER_TABLE_RESOURCE).read_text()
    assert paper_table().to_text() == raw


HEADER = "bsppcc-table v1 I=1000 seed=1 alpha_gen=1.0 levels=0.05,0.5\n"


@pytest.mark.parametrize("text", [
    "",
    "bsppcc-table v2 I=1000 seed=1 alpha_gen=1.0 levels=0.05,0.5\n",
    "bsppcc-table v1 I=1000 seed=1 levels=0.05,0.5\n",
    "bsppcc-table v1 I=1000 seed=1 alpha_gen=1.0 levels=0.5,0.05\n5 0.9 0.95\n",
    "bsppcc-table v1 I=1000 seed=1 alpha_gen=1.0 levels=0.05,0.05\n",
    HEADER + "5 0.9\n",
    HEADER + "5 0.9 0.95 0.97\n",
    HEADER + "5 0.9 abc\n",
    HEADER + "5 0.95 0.90\n",
    HEADER + "5 0.9 1.5\n",
    HEADER + "5 0.9 0.95\n5 0.9 0.95\n",
])
def test_strict_parsing(text):
    with pytest.raises(TableFormatError):
        CriticalValueTable.from_text(text)


def test_comments_and_blank_lines_ignored():
    t = CriticalValueTable.from_text(HEADER + "# hello\n\n5 0.900000 0.950000\n")
    assert t.rows[5] == (0.9, 0.95) and t.source == "file"


# ---- shape sensitivity ----

def test_alpha_sensitivity_single_alpha():
    rep = alpha_sensitivity(10, 2000, [1.0], seed=3)
    assert rep.max_deviation == (0.0,) * len(PAPER_LEVELS)


def test_alpha_sensitivity_same_alpha_twice():
    rep = alpha_sensitivity(10, 2000, [1.0, 1.0], seed=3)
    assert rep.values[0] == rep.values[1]


def test_alpha_sensitivity_report():
    rep = alpha_sensitivity(20, 10**5, [0.5, 1.0, 2.0], seed=11)
    assert len(rep.values) == 3 and len(rep.max_deviation) == len(PAPER_LEVELS)
    assert all(d >= 0 for d in rep.max_deviation)
    text = rep.to_text()
    assert text.startswith("# n=20 I=100000") and "maxdev" in text


def test_alpha_sensitivity_rejects_bad_alpha():
    with pytest.raises(ValueError):
        alpha_sensitivity(10, 1000, [1.0, -1.0])
