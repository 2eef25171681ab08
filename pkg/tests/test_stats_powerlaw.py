import math

import numpy as np
import pytest
from scipy import special

from cascata.errors import DataError, DegenerateDataError
from cascata.stats import (ccdf, fit_lognormal, fit_power_law, fit_report, hill_alpha, lognormal_logpmf,
                           lrt_vs_lognormal, power_law_ccdf_line, powerlaw_logpmf, powerlaw_sf, vuong)
from cascata.synth import sample_discrete_lognormal, sample_discrete_power_law
from oracles import grid_search_alpha, sort_count_ccdf


def test_ccdf_counts():
    x, p = ccdf([1, 1, 2, 3])
    assert x.tolist() == [1, 2, 3]
    assert p.tolist() == [0.5, 0.25, 0.0]


def test_ccdf_single_value():
    x, p = ccdf([5])
    assert x.tolist() == [5] and p.tolist() == [0.0]


def test_ccdf_matches_sort_and_count():
    values = np.random.default_rng(0).integers(1, 40, size=500).tolist()
    x, p = ccdf(values)
    ox, op = sort_count_ccdf(values)
    assert x.tolist() == ox
    np.testing.assert_allclose(p, op, rtol=0, atol=1e-15)


def test_ccdf_monotone_on_large_sample():
    _, p = ccdf(sample_discrete_power_law(2.2, 1, 10_000, seed=1))
    assert np.all(np.diff(p) < 0) and p[-1] == 0


def test_ccdf_empty():
    with pytest.raises(DataError):
        ccdf([])


def test_ccdf_of_sampler_matches_analytic_tail():
    alpha = 2.5
    draws = sample_discrete_power_law(alpha, 1, 1_000_000, seed=5)
    x, p = ccdf(draws)
    n = draws.size
    for xi, pi in zip(x, p):
        if xi > 50:
            break
        expected = special.zeta(alpha, xi + 1) / special.zeta(alpha, 1)
        se = math.sqrt(expected * (1 - expected) / n)
        assert abs(pi - expected) <= 3 * se


def test_fit_recovers_alpha_and_matches_grid_oracle():
    values = sample_discrete_power_law(2.5, 2, 100_000, seed=3)
    fit = fit_power_law(values)
    assert 2.45 <= fit.alpha <= 2.55
    assert fit.x_min <= 3
    fixed = fit_power_law(values, x_min=2)
    oracle = grid_search_alpha(values, 2, fixed.alpha - 0.01, fixed.alpha + 0.01, step=1e-4)
    assert abs(fixed.alpha - oracle) <= 1e-4
    assert fixed.sigma_alpha == pytest.approx((fixed.alpha - 1) / math.sqrt(fixed.n_tail))
    assert fixed.n_tail == int((values >= 2).sum())


def test_fit_is_the_likelihood_maximum():
    values = sample_discrete_power_law(1.9, 3, 5_000, seed=8)
    fit = fit_power_law(values, x_min=3)
    tail = values[values >= 3]

    def ll(a):
        return powerlaw_logpmf(tail, a, 3).sum()

    assert ll(fit.alpha) >= ll(fit.alpha + 1e-4) and ll(fit.alpha) >= ll(fit.alpha - 1e-4)


def test_fit_invariant_under_permutation_and_duplication():
    values = sample_discrete_power_law(2.2, 1, 20_000, seed=9)
    fit = fit_power_law(values)
    perm = fit_power_law(np.random.default_rng(0).permutation(values))
    dup = fit_power_law(np.concatenate([values, values]))
    assert perm.alpha == pytest.approx(fit.alpha, abs=1e-9)
    assert dup.alpha == pytest.approx(fit.alpha, abs=1e-9)
    assert dup.x_min == fit.x_min
    assert dup.sigma_alpha < fit.sigma_alpha


def test_constant_sample_is_degenerate():
    with pytest.raises(DegenerateDataError, match="degenerate tail"):
        fit_power_law([3] * 100)


def test_too_few_tail_points():
    with pytest.raises(DataError):
        fit_power_law([1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12], x_min=8)
    with pytest.raises(DataError):
        fit_power_law([1, 2, 3])


def test_rejects_non_positive_integers():
    with pytest.raises(DataError):
        fit_power_law([0, 1, 2] * 10)
    with pytest.raises(DataError):
        fit_power_law([1.5, 2, 3] * 10)


def test_xmin_search_respects_quantile_cap():
    values = sample_discrete_power_law(2.0, 1, 5_000, seed=2)
    fit = fit_power_law(values)
    uniq = np.unique(values)
    assert fit.x_min <= uniq[int(np.floor(0.9 * (uniq.size - 1)))]
    assert fit.n_tail >= 10


def test_report_format():
    values = sample_discrete_power_law(2.44, 1, 2_000, seed=4)
    text = fit_power_law(values, x_min=1).report()
    assert text.startswith("α=") and "±" in text and len(text.split("±")[1]) == 4


def test_hill_estimate_is_close():
    values = sample_discrete_power_law(2.5, 5, 50_000, seed=6)
    assert hill_alpha(values, 5) == pytest.approx(fit_power_law(values, x_min=5).alpha, abs=0.05)


def test_powerlaw_sf_and_ccdf_line():
    assert powerlaw_sf(2, 2.5, 2) == pytest.approx(1.0)
    values = sample_discrete_power_law(2.5, 1, 5_000, seed=7)
    fit = fit_power_law(values, x_min=1)
    xs, ps = power_law_ccdf_line(fit, int(values.max()))
    assert xs[0] == 1 and np.all(np.diff(ps) < 0)


def test_lognormal_fit_recovers_parameters():
    values = sample_discrete_lognormal(1.0, 1.0, 100_000, seed=2)
    ln = fit_lognormal(values, 1)
    assert ln.mu == pytest.approx(1.0, abs=0.05)
    assert ln.sigma == pytest.approx(1.0, abs=0.05)


def test_lognormal_pmf_normalised():
    x = np.arange(3, 200_000)
    total = np.exp(lognormal_logpmf(x, 1.5, 0.8, 3)).sum()
    assert total == pytest.approx(1.0, abs=1e-9)


def test_positive_mean_constraint():
    values = sample_discrete_power_law(2.5, 1, 20_000, seed=1)
    assert fit_lognormal(values, 1, positive_mean=True).mu >= 0
    assert fit_lognormal(values, 1, positive_mean=False).loglik >= fit_lognormal(values, 1).loglik - 1e-6


def test_lrt_sign_convention():
    pl = sample_discrete_power_law(2.5, 2, 100_000, seed=11)
    res = lrt_vs_lognormal(pl, fit_power_law(pl, x_min=2))
    assert res.R > 0 and 0 <= res.p <= 1
    ln = sample_discrete_lognormal(1.0, 1.0, 100_000, seed=12)
    res = lrt_vs_lognormal(ln, fit_power_law(ln, x_min=1))
    assert res.R < 0 and res.p < 0.05
    assert res.evidence() == "lognormal"


def test_evidence_moderated_wording():
    from cascata.stats import LRTResult
    res = LRTResult(R=3.0, p=0.3, lognormal=None)
    assert res.evidence() == "power law (moderated)"
    assert res.favors_power_law


def test_vuong_edge_cases():
    R, p = vuong([1.0, 1.0], [1.0, 1.0])
    assert (R, p) == (0.0, 1.0)
    R, p = vuong([1.0, 2.0, 3.0], [0.0, 0.0, 0.0])
    assert R == 6.0 and 0 <= p <= 1


def test_fit_report_keys():
    values = sample_discrete_power_law(2.3, 1, 5_000, seed=13)
    rep = fit_report(values)
    assert set(rep) == {"alpha", "xmin", "sigma", "ntail", "D", "R", "p_R"}
