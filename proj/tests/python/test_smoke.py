import math

import pytest

import mlmfit


def test_version():
    assert isinstance(mlmfit.__version__, str)
    assert mlmfit.__version__.count(".") >= 1


def test_distribution_functions():
    p = mlmfit.MlmParams(alpha=2.0, beta=0.0, sigma=1.0)
    # beta = 0 is Lomax: F(x) = 1 - (1+x)^-2
    assert mlmfit.mlm_cdf(p, 1.0) == pytest.approx(0.75, abs=1e-12)
    assert mlmfit.mlm_pdf(p, 1.0) == pytest.approx(0.25, abs=1e-12)
    x = mlmfit.mlm_quantile(p, 0.5)
    assert mlmfit.mlm_cdf(p, x) == pytest.approx(0.5, abs=1e-10)
    with pytest.raises(ValueError):
        mlmfit.MlmParams(alpha=-1.0, beta=0.0, sigma=1.0)


def test_sampling_deterministic():
    p = mlmfit.MlmParams(2.0, -0.3, 10.0)
    a = mlmfit.mlm_sample(p, 100, seed=7)
    b = mlmfit.mlm_sample(p, 100, seed=7)
    assert a == b
    assert all(v > 0 for v in a)


def _histogram_from(p, n, seed):
    xs = mlmfit.mlm_sample(p, n, seed=seed)
    freq = {}
    for v in xs:
        k = max(1, round(v))
        freq[k] = freq.get(k, 0) + 1
    return mlmfit.DegreeHistogram(sorted(freq.items()))


def test_fit_and_gof():
    truth = mlmfit.MlmParams(2.0, 0.5, 50.0)
    h = _histogram_from(truth, 5000, seed=11)
    s = mlmfit.Sample.from_histogram(h)
    assert mlmfit.cv(s) > 1

    fit = mlmfit.fit_mlm(s)
    assert fit.converged
    assert fit.model == "mlm"
    assert len(fit.estimates) == 3
    assert len(fit.intervals) == 3
    a_lo, a_hi = fit.intervals[0]
    assert a_lo < fit.estimates[0] < a_hi

    rep = mlmfit.bootstrap_pvalue(h, fit, B=99, seed=3)
    assert 1.0 / 100 <= rep.p_value <= 1.0
    rep2 = mlmfit.bootstrap_pvalue(h, fit, B=99, seed=3, threads=2)
    assert rep2.p_value == rep.p_value


def test_compare_models():
    h = _histogram_from(mlmfit.MlmParams(2.0, 0.5, 50.0), 5000, seed=13)
    rows = mlmfit.compare_models(h, ["mlm", "lomax", "exponential"])
    assert len(rows) == 3
    klds = [r.kld for r in rows if r.ok]
    assert klds == sorted(klds)
    assert all(math.isfinite(k) for k in klds)


def test_tail_checks():
    p = mlmfit.MlmParams(2.0, 0.0, 1.0)
    checks = mlmfit.run_all_tail_checks(p, seed=1, subexp_n=100000)
    assert len(checks) == 7
    names = {c.name for c in checks}
    assert "class_D" in names
    d = next(c for c in checks if c.name == "class_D")
    assert d.converged
    assert d.theoretical == pytest.approx(4.0)


def test_graph_io(tmp_path):
    edges = tmp_path / "edges.txt"
    edges.write_text("# comment\n1 2\n2 3\n2 4\n")
    h = mlmfit.degrees_from_edge_list(str(edges), mode="total")
    assert h.n == 4
    assert dict(h.rows) == {1: 3, 3: 1}

    out = tmp_path / "hist.csv"
    mlmfit.save_histogram(h, str(out))
    back = mlmfit.load_histogram(str(out))
    assert back.rows == h.rows

    bad = tmp_path / "bad.txt"
    bad.write_text("1 2\nonly_one\n")
    with pytest.raises(ValueError):
        mlmfit.degrees_from_edge_list(str(bad))
