//! Posterior-predictive simulation, quantile bands, and CRPS scoring.

use chrono::NaiveDate;
use nalgebra::{Cholesky, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::StudyWindow;
use crate::epimodel::sample_incubation;
use crate::error::{Error, Result};
use crate::inference::{Chain, ParamVector, Posterior};
use crate::spatial::{observation_covariance, precision_matrix};

/// Pointwise quantile bands plus the raw predictive draws, in counts/day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastBand {
    pub region_id: String,
    pub dates: Vec<NaiveDate>,
    pub median: Vec<f64>,
    pub q05: Vec<f64>,
    pub q25: Vec<f64>,
    pub q75: Vec<f64>,
    pub q95: Vec<f64>,
    /// Retained for scoring and outlier boundaries, `n_draws x len`.
    pub samples: Vec<Vec<f64>>,
    /// Number of leading entries that belong to the calibration window.
    pub n_calibration: usize,
}

/// Linear-interpolation empirical quantile (R type 7) of unsorted data.
pub fn quantile(values: &[f64], p: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let h = (v.len() as f64 - 1.0) * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

/// Simulate the posterior predictive over calibration + forecast days.
///
/// Each draw samples a parameter vector from the chain, a fresh incubation
/// realization, runs the forward model, and (with `include_noise`) adds the
/// day-block Gaussian observation noise. Negative noisy counts are clipped
/// at 0 — counts are non-negative and clipping is the minimal repair of the
/// Gaussian error model. The draw-to-seed mapping is fixed, so the
/// reduction is deterministic.
pub fn posterior_predictive(
    chain: &Chain,
    posterior: &Posterior,
    start_date: NaiveDate,
    n_draws: usize,
    horizon: u32,
    include_noise: bool,
    seed: u64,
) -> Result<Vec<ForecastBand>> {
    if horizon > StudyWindow::MAX_HORIZON {
        return Err(Error::InvalidInput(format!(
            "forecast horizon {horizon} refused: observations carry incubation-delayed \
             information only ~16 days back, so forecasts beyond {} days are not predictive",
            StudyWindow::MAX_HORIZON
        )));
    }
    if chain.n_kept() == 0 {
        return Err(Error::InvalidInput("empty chain".into()));
    }
    let nr = posterior.n_regions();
    let n_cal = posterior.grid.len();
    let total = n_cal + horizon as usize;
    let grid: Vec<f64> = (0..total).map(|i| i as f64).collect();
    let dates: Vec<NaiveDate> = (0..total as i64)
        .map(|i| start_date + chrono::Duration::days(i))
        .collect();

    // kernel depends on the sampled spatial parameters, rebuilt per draw
    let mut samples: Vec<Vec<Vec<f64>>> = vec![Vec::with_capacity(n_draws); nr];
    for d in 0..n_draws {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(d as u64).wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(d as u64));
        let row = rng.gen_range(0..chain.n_kept());
        let p = ParamVector::unpack(&chain.samples[row], nr, posterior.spatial_block())?;
        let draw = sample_incubation(&posterior.hyper, &mut rng);
        let mut preds: Vec<Vec<f64>> = p
            .regions
            .iter()
            .zip(&posterior.populations)
            .map(|(r, &pop)| {
                crate::epimodel::predict_daily(r, &draw, &grid).map(|mut y| {
                    for v in &mut y {
                        *v /= pop as f64;
                    }
                    y
                })
            })
            .collect::<Result<_>>()?;

        if include_noise {
            if nr == 1 {
                let extra = match posterior.single_region_spatial {
                    crate::inference::SingleRegionSpatial::Drop => 0.0,
                    crate::inference::SingleRegionSpatial::VarianceOnly => p.global.tau2,
                };
                for day in 0..total {
                    let s = p.global.sigma_a + p.global.sigma_m * preds[0][day];
                    let sd = (extra + s * s).sqrt();
                    let z: f64 = StandardNormal.sample(&mut rng);
                    preds[0][day] += sd * z;
                }
            } else {
                let adj = posterior.adjacency.as_ref().expect("multi-region adjacency");
                let kernel = precision_matrix(p.global.tau2, p.global.lambda, adj)
                    .map_err(|e| Error::Numerical(format!("predictive kernel: {e}")))?;
                for day in 0..total {
                    let y_pred: Vec<f64> = (0..nr).map(|r| preds[r][day]).collect();
                    let sigma =
                        observation_covariance(&kernel, p.global.sigma_a, p.global.sigma_m, &y_pred)?;
                    let chol = Cholesky::new(sigma).ok_or_else(|| {
                        Error::Numerical("non-SPD predictive covariance".into())
                    })?;
                    let z = DVector::from_iterator(
                        nr,
                        (0..nr).map(|_| <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)),
                    );
                    let eps = chol.l() * z;
                    for r in 0..nr {
                        preds[r][day] += eps[r];
                    }
                }
            }
        }

        for r in 0..nr {
            let pop = posterior.populations[r] as f64;
            let counts: Vec<f64> = preds[r].iter().map(|v| (v * pop).max(0.0)).collect();
            samples[r].push(counts);
        }
    }

    let mut bands = Vec::with_capacity(nr);
    for (r, region_samples) in samples.into_iter().enumerate() {
        let mut band = ForecastBand {
            region_id: posterior.region_ids[r].clone(),
            dates: dates.clone(),
            median: Vec::with_capacity(total),
            q05: Vec::with_capacity(total),
            q25: Vec::with_capacity(total),
            q75: Vec::with_capacity(total),
            q95: Vec::with_capacity(total),
            samples: region_samples,
            n_calibration: n_cal,
        };
        for day in 0..total {
            let v: Vec<f64> = band.samples.iter().map(|s| s[day]).collect();
            band.q05.push(quantile(&v, 0.05));
            band.q25.push(quantile(&v, 0.25));
            band.median.push(quantile(&v, 0.50));
            band.q75.push(quantile(&v, 0.75));
            band.q95.push(quantile(&v, 0.95));
        }
        bands.push(band);
    }
    Ok(bands)
}

/// Empirical-distribution CRPS `mean|X_i - y| - mean|X_i - X_j| / 2`.
///
/// The exact pairwise form is O(n^2) but n is ~100 here and the sum is
/// easy to audit.
pub fn crps(samples: &[f64], y: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("CRPS needs at least one sample".into()));
    }
    let n = samples.len() as f64;
    let term1: f64 = samples.iter().map(|x| (x - y).abs()).sum::<f64>() / n;
    let mut term2 = 0.0;
    for xi in samples {
        for xj in samples {
            term2 += (xi - xj).abs();
        }
    }
    term2 /= 2.0 * n * n;
    Ok(term1 - term2)
}

/// Per-day CRPS averaged over the calibration window.
pub fn average_crps(band: &ForecastBand, observed: &[f64]) -> Result<f64> {
    let n = band.n_calibration.min(observed.len());
    if n == 0 {
        return Err(Error::InvalidInput("no days to score".into()));
    }
    let mut total = 0.0;
    for day in 0..n {
        let col: Vec<f64> = band.samples.iter().map(|s| s[day]).collect();
        total += crps(&col, observed[day])?;
    }
    Ok(total / n as f64)
}
