//! Forward epidemiological model: a Gamma-shaped infection rate convolved
//! with a stochastic lognormal incubation delay yields predicted daily
//! symptomatic counts per region.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StudentT};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared as ChiSquaredDist, ContinuousCDF, StudentsT};
use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Per-areal-unit epidemiological parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionParams {
    /// Outbreak start, in days relative to the calibration origin.
    pub t0: f64,
    /// Gamma shape of the infection-rate pdf.
    pub k: f64,
    /// Gamma scale of the infection-rate pdf, days.
    pub theta: f64,
    /// Total eventual counted infections for the wave, persons.
    pub n_total: f64,
}

impl RegionParams {
    pub fn is_valid(&self) -> bool {
        self.t0.is_finite() && self.k > 0.0 && self.theta > 0.0 && self.n_total > 0.0
    }
}

/// One realization of the incubation-delay lognormal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncubationDraw {
    /// Log-days.
    pub mu: f64,
    /// Log-days, > 0.
    pub sigma: f64,
}

/// Hyper-distribution of the incubation lognormal's (mu, sigma).
///
/// mu follows a location-scale Student-t and sigma^2 a scaled chi-square;
/// only the implied 95% intervals ([1.48, 1.76] for mu, [0.320, 0.515] for
/// sigma) are documented upstream, so the degrees of freedom and scales
/// below were solved numerically to reproduce those intervals
/// (`scripts/calibrate_incubation.py`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncubationHyper {
    pub mu_center: f64,
    pub mu_scale: f64,
    pub mu_df: f64,
    pub sigma_df: f64,
    pub sigma_scale: f64,
}

impl Default for IncubationHyper {
    fn default() -> Self {
        IncubationHyper {
            mu_center: 1.62,
            mu_scale: 0.068954913995,
            mu_df: 34.901789610453,
            sigma_df: 34.901789610453,
            sigma_scale: 0.417597140723,
        }
    }
}

impl IncubationHyper {
    /// Draw at the hyper-distribution centers; used when the stochastic
    /// incubation model is pinned for deterministic evaluation.
    pub fn center_draw(&self) -> IncubationDraw {
        IncubationDraw {
            mu: self.mu_center,
            sigma: self.sigma_scale,
        }
    }

    /// Upper 95% endpoints of the implied (mu, sigma) intervals.
    pub fn upper_endpoints(&self) -> (f64, f64) {
        let t = StudentsT::new(0.0, 1.0, self.mu_df).expect("valid Student-t");
        let chi = ChiSquaredDist::new(self.sigma_df).expect("valid chi-square");
        let mu_hi = self.mu_center + self.mu_scale * t.inverse_cdf(0.975);
        let sigma_hi = self.sigma_scale * (chi.inverse_cdf(0.975) / self.sigma_df).sqrt();
        (mu_hi, sigma_hi)
    }
}

/// Gamma infection-rate density `theta^-k t^(k-1) exp(-t/theta) / Gamma(k)`.
pub fn infection_rate_pdf(t: f64, k: f64, theta: f64) -> Result<f64> {
    if k <= 0.0 || theta <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "gamma shape/scale must be positive, got k={k}, theta={theta}"
        )));
    }
    if t < 0.0 {
        return Err(Error::InvalidInput(format!(
            "infection-rate density is defined on t >= 0, got t={t}"
        )));
    }
    if t == 0.0 {
        return Ok(match k {
            k if k > 1.0 => 0.0,
            k if k == 1.0 => 1.0 / theta,
            _ => f64::INFINITY,
        });
    }
    let ln_pdf = (k - 1.0) * t.ln() - t / theta - k * theta.ln() - ln_gamma(k);
    Ok(ln_pdf.exp())
}

/// Draw (mu, sigma) for the incubation lognormal from the hyper-distribution.
pub fn sample_incubation<R: Rng + ?Sized>(hyper: &IncubationHyper, rng: &mut R) -> IncubationDraw {
    let t = StudentT::new(hyper.mu_df).expect("valid Student-t df");
    let chi = ChiSquared::new(hyper.sigma_df).expect("valid chi-square df");
    let mu = hyper.mu_center + hyper.mu_scale * t.sample(rng);
    let sigma = hyper.sigma_scale * (chi.sample(rng) / hyper.sigma_df).sqrt();
    IncubationDraw { mu, sigma }
}

/// Lognormal incubation CDF `erfc(-(ln t - mu)/(sigma sqrt 2)) / 2`.
///
/// Returns the limit value 0 for `t <= 0`.
pub fn incubation_cdf(t: f64, draw: &IncubationDraw) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    0.5 * erfc(-(t.ln() - draw.mu) / (draw.sigma * std::f64::consts::SQRT_2))
}

/// Lognormal incubation pdf, the analytic derivative of [`incubation_cdf`].
pub fn incubation_pdf(t: f64, draw: &IncubationDraw) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let z = (t.ln() - draw.mu) / draw.sigma;
    (-0.5 * z * z).exp() / (t * draw.sigma * (2.0 * std::f64::consts::PI).sqrt())
}

/// Predicted daily symptomatic counts on a daily grid.
///
/// For each grid day `t_i`,
/// `n_i = N * dt * int_{t0}^{t_i} f_inf(tau - t0) f_inc(t_i - tau) dtau`
/// with `dt = 1` day. The integral uses a midpoint rule with a 1-day step,
/// consistent with treating the incubation pdf as a daily histogram; the
/// data is daily, so a finer step adds cost without information (a fine-step
/// oracle lives in the tests).
pub fn predict_daily(
    params: &RegionParams,
    draw: &IncubationDraw,
    grid: &[f64],
) -> Result<Vec<f64>> {
    if !params.is_valid() {
        return Err(Error::InvalidInput(format!("invalid region params {params:?}")));
    }
    if grid.windows(2).any(|w| (w[1] - w[0] - 1.0).abs() > 1e-9) {
        return Err(Error::InvalidInput("grid must have daily spacing".into()));
    }
    if grid.is_empty() {
        return Ok(Vec::new());
    }

    // Spans s_i = t_i - t0 advance by exactly 1 day, so both integrand
    // factors live on a lattice and can be tabulated once per call.
    let max_span = grid[grid.len() - 1] - params.t0;
    if max_span <= 0.0 {
        return Ok(vec![0.0; grid.len()]);
    }
    let n_steps = max_span.floor() as usize;
    let frac = max_span - max_span.floor();

    // f_inf at full-step midpoints j + 0.5 past t0.
    let finf_mid: Vec<f64> = (0..n_steps)
        .map(|j| infection_rate_pdf(j as f64 + 0.5, params.k, params.theta))
        .collect::<Result<_>>()?;
    // f_inc at the lattice of delays frac + d - 0.5, d = 1..=n_steps.
    let finc_lat: Vec<f64> = (1..=n_steps)
        .map(|d| incubation_pdf(frac + d as f64 - 0.5, draw))
        .collect();
    let finc_rem = incubation_pdf(frac / 2.0, draw);

    let mut out = Vec::with_capacity(grid.len());
    for &t_i in grid {
        let span = t_i - params.t0;
        if span <= 0.0 {
            out.push(0.0);
            continue;
        }
        let m = span.floor() as usize;
        let mut acc = 0.0;
        for j in 0..m {
            // delay = span - (j + 0.5) = frac + (m - j) - 0.5
            acc += finf_mid[j] * finc_lat[m - j - 1];
        }
        if frac > 0.0 {
            acc += frac * infection_rate_pdf(m as f64 + frac / 2.0, params.k, params.theta)?
                * finc_rem;
        }
        out.push(params.n_total * acc);
    }
    Ok(out)
}

/// Information horizon `exp(mu_hi + 2 sigma_hi)` from the upper 95%
/// endpoints of the incubation hyper-distribution: observations at time t
/// only inform infections up to roughly this many days in the past, which
/// justifies the 14-day forecast cap.
pub fn forecast_cutoff(hyper: &IncubationHyper) -> f64 {
    let (mu_hi, sigma_hi) = hyper.upper_endpoints();
    (mu_hi + 2.0 * sigma_hi).exp()
}
