"""Fitting heavy tails and comparing distributions.

Cascade sizes tend to follow power laws. The fitter picks the lower cutoff
x_min that makes the tail look most like a power law, estimates the exponent
by maximum likelihood, and a likelihood-ratio test asks whether a lognormal
would explain the tail better. A permutation KS test compares two samples.
"""
from cascata.stats import fit_power_law, ks_two_sample, lrt_vs_lognormal
from cascata.synth import sample_discrete_lognormal, sample_discrete_power_law

sizes = sample_discrete_power_law(2.3, 3, 50_000, seed=1)
fit = fit_power_law(sizes)
lrt = lrt_vs_lognormal(sizes, fit)
print(f"power-law draws: {fit.report(3)}, x_min={fit.x_min}, tail={fit.n_tail}, KS distance {fit.D:.4f}")
print(f"  vs lognormal: R={lrt.R:.1f}, p={lrt.p:.3g} -> {lrt.evidence()}")

other = sample_discrete_lognormal(1.0, 1.0, 50_000, seed=2)
fit_ln = fit_power_law(other, x_min=1)
lrt_ln = lrt_vs_lognormal(other, fit_ln)
print(f"lognormal draws: R={lrt_ln.R:.1f}, p={lrt_ln.p:.3g} -> {lrt_ln.evidence()}")

# Two groups of cascades with slightly different exponents.
a = sample_discrete_power_law(2.0, 1, 3000, seed=3)
b = sample_discrete_power_law(2.2, 1, 3000, seed=4)
for weighted in (False, True):
    res = ks_two_sample(a, b, weighted=weighted, n_perm=1000, seed=0)
    print(f"KS {'weighted' if weighted else 'plain   '}: D={res.D:.4f}, permutation p={res.p:.4f}")
print("same sample twice:", ks_two_sample(a, a, n_perm=200))
