#!/usr/bin/env python3
"""Solve the incubation hyper-distribution constants.

The incubation-delay lognormal has random (mu, sigma): mu follows a
location-scale Student-t and sigma^2 a scaled chi-square. Only the implied
95% intervals are documented ([1.48, 1.76] for mu, [0.320, 0.515] for
sigma), so the degrees of freedom and scales are solved here and frozen
into src/epimodel.rs as constants.

A single df is shared by both distributions: the sigma interval pins it
uniquely through the chi-square quantile ratio, and reusing it for mu
keeps the model at two solved scales.
"""

import numpy as np
from scipy import optimize, stats

MU_LO, MU_HI = 1.48, 1.76
SIG_LO, SIG_HI = 0.320, 0.515


def sigma_ratio(df):
    # sigma = s * sqrt(chi2_df / df); the 2.5/97.5 quantile ratio depends
    # only on df.
    return np.sqrt(stats.chi2.ppf(0.975, df) / stats.chi2.ppf(0.025, df))


def main():
    target = SIG_HI / SIG_LO
    df = optimize.brentq(lambda v: sigma_ratio(v) - target, 2.0, 500.0)

    sigma_scale = SIG_LO / np.sqrt(stats.chi2.ppf(0.025, df) / df)
    # cross-check the upper endpoint
    hi = sigma_scale * np.sqrt(stats.chi2.ppf(0.975, df) / df)
    assert abs(hi - SIG_HI) < 1e-9, hi

    mu_center = 0.5 * (MU_LO + MU_HI)
    mu_scale = (MU_HI - mu_center) / stats.t.ppf(0.975, df)

    print(f"df          = {df:.12f}")
    print(f"mu_center   = {mu_center:.12f}")
    print(f"mu_scale    = {mu_scale:.12f}")
    print(f"sigma_scale = {sigma_scale:.12f}")

    # empirical verification of the implied intervals
    rng = np.random.default_rng(0)
    n = 2_000_000
    mu = mu_center + mu_scale * rng.standard_t(df, size=n)
    sig = sigma_scale * np.sqrt(rng.chisquare(df, size=n) / df)
    print("mu  2.5/97.5:", np.percentile(mu, [2.5, 97.5]))
    print("sig 2.5/97.5:", np.percentile(sig, [2.5, 97.5]))


if __name__ == "__main__":
    main()
