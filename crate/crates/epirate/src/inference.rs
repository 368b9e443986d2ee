//! Posterior construction (likelihood x priors) and adaptive-Metropolis
//! pseudo-marginal sampling with ESS diagnostics.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::data::{normalize, smooth_7day, Adjacency, CaseSeries};
use crate::epimodel::{predict_daily, sample_incubation, IncubationDraw, IncubationHyper, RegionParams};
use crate::error::{Error, Result};
use crate::spatial::{observation_covariance, precision_matrix, GlobalParams};

/// How the spatial block behaves when only one region is fitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SingleRegionSpatial {
    /// Drop (tau2, lambda) entirely; dimension 4 + 2.
    #[default]
    Drop,
    /// Keep tau2 as a pure variance term added to the diagonal noise.
    VarianceOnly,
}

/// Full parameter state: per-region epidemiological parameters plus the
/// shared error-model / spatial-coefficient block.
///
/// The sampled coordinates store log(sigma_a), log(sigma_m) and log(tau2);
/// [`ParamVector::pack`] / [`ParamVector::unpack`] convert.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamVector {
    pub regions: Vec<RegionParams>,
    pub global: GlobalParams,
    /// Whether (tau2, lambda) are part of the sampled state.
    pub spatial_block: bool,
}

impl ParamVector {
    pub fn dim(&self) -> usize {
        4 * self.regions.len() + if self.spatial_block { 4 } else { 2 }
    }

    /// Flatten into the sampled coordinate vector.
    pub fn pack(&self) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.dim());
        for r in &self.regions {
            x.extend_from_slice(&[r.t0, r.k, r.theta, r.n_total]);
        }
        x.push(self.global.sigma_a.ln());
        x.push(self.global.sigma_m.ln());
        if self.spatial_block {
            x.push(self.global.tau2.ln());
            x.push(self.global.lambda);
        }
        x
    }

    /// Rebuild from sampled coordinates.
    pub fn unpack(x: &[f64], n_regions: usize, spatial_block: bool) -> Result<ParamVector> {
        let want = 4 * n_regions + if spatial_block { 4 } else { 2 };
        if x.len() != want {
            return Err(Error::InvalidInput(format!(
                "coordinate vector has {} entries, expected {want}",
                x.len()
            )));
        }
        let regions = (0..n_regions)
            .map(|r| RegionParams {
                t0: x[4 * r],
                k: x[4 * r + 1],
                theta: x[4 * r + 2],
                n_total: x[4 * r + 3],
            })
            .collect();
        let base = 4 * n_regions;
        let global = GlobalParams {
            sigma_a: x[base].exp(),
            sigma_m: x[base + 1].exp(),
            tau2: if spatial_block { x[base + 2].exp() } else { 1.0 },
            lambda: if spatial_block { x[base + 3] } else { 0.0 },
        };
        Ok(ParamVector { regions, global, spatial_block })
    }

    /// Coordinate names for chain metadata, one per sampled dimension.
    pub fn names(region_ids: &[String], spatial_block: bool) -> Vec<String> {
        let mut names = Vec::new();
        for r in region_ids {
            for p in ["t0", "k", "theta", "N"] {
                names.push(format!("{r}.{p}"));
            }
        }
        names.push("log_sigma_a".into());
        names.push("log_sigma_m".into());
        if spatial_block {
            names.push("log_tau2".into());
            names.push("lambda".into());
        }
        names
    }
}

/// Prior hyper-parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    /// Gaussian prior mean on each t0 (days from the calibration origin).
    pub t0_mean: f64,
    /// Gaussian prior sd on t0; wide so the data can overcome it.
    pub t0_sd: f64,
    /// Uniform support for log(sigma_a) and log(sigma_m).
    pub logsigma_bounds: (f64, f64),
    /// Gamma prior on tau_phi (not tau_phi^2): shape and scale.
    pub tau_shape: f64,
    pub tau_scale: f64,
    pub lambda_range: (f64, f64),
    pub k_range: (f64, f64),
    pub theta_range: (f64, f64),
    /// Upper bound on N per region (2x population by default).
    pub n_max: Vec<f64>,
}

impl PriorSpec {
    /// Defaults per region population; t0 prior mean at the window origin.
    pub fn for_regions(populations: &[u64]) -> PriorSpec {
        PriorSpec {
            t0_mean: 0.0,
            t0_sd: 10.0,
            logsigma_bounds: (-30.0, 10.0),
            tau_shape: 10.0,
            tau_scale: 2.0,
            lambda_range: (0.0, 0.9),
            k_range: (0.0, 50.0),
            theta_range: (0.0, 100.0),
            n_max: populations.iter().map(|&p| 2.0 * p as f64).collect(),
        }
    }
}

/// Log prior density at `p`; `-inf` signals out-of-support.
pub fn log_prior(p: &ParamVector, spec: &PriorSpec) -> f64 {
    let mut lp = 0.0;
    for (i, r) in p.regions.iter().enumerate() {
        if r.k <= spec.k_range.0 || r.k > spec.k_range.1 {
            return f64::NEG_INFINITY;
        }
        if r.theta <= spec.theta_range.0 || r.theta > spec.theta_range.1 {
            return f64::NEG_INFINITY;
        }
        if r.n_total <= 0.0 || r.n_total > spec.n_max[i] {
            return f64::NEG_INFINITY;
        }
        let z = (r.t0 - spec.t0_mean) / spec.t0_sd;
        lp += -0.5 * z * z - spec.t0_sd.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln();
    }
    let (lo, hi) = spec.logsigma_bounds;
    for s in [p.global.sigma_a, p.global.sigma_m] {
        let ls = s.ln();
        if ls < lo || ls > hi {
            return f64::NEG_INFINITY;
        }
    }
    if p.spatial_block {
        let (llo, lhi) = spec.lambda_range;
        if p.global.lambda < llo || p.global.lambda > lhi {
            return f64::NEG_INFINITY;
        }
        // Gamma(shape, scale) on tau = sqrt(tau2), with the Jacobian
        // d tau / d log(tau2) = tau / 2 for the sampled coordinate.
        let tau = p.global.tau2.sqrt();
        if tau <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let (a, s) = (spec.tau_shape, spec.tau_scale);
        lp += (a - 1.0) * tau.ln() - tau / s - a * s.ln() - ln_gamma(a);
        lp += (tau / 2.0).ln();
        lp -= (lhi - llo).ln();
    }
    lp
}

/// Likelihood/posterior evaluation context for one calibration window.
///
/// Holds the (optionally smoothed) population-normalized observations on a
/// common daily grid, the adjacency, and the priors.
pub struct Posterior {
    pub region_ids: Vec<String>,
    pub populations: Vec<u64>,
    /// Normalized observations, `y_obs[day][region]`.
    pub y_obs: Vec<Vec<f64>>,
    /// Day grid in days since the calibration origin (0, 1, ...).
    pub grid: Vec<f64>,
    pub adjacency: Option<Adjacency>,
    pub prior: PriorSpec,
    pub hyper: IncubationHyper,
    pub single_region_spatial: SingleRegionSpatial,
}

impl Posterior {
    /// Build from calibration series sharing a common date grid.
    ///
    /// With `smooth` set, the likelihood consumes 7-day-smoothed counts
    /// (the display convention upstream; raw counts are a config switch).
    pub fn new(
        series: &[CaseSeries],
        adjacency: Option<Adjacency>,
        hyper: IncubationHyper,
        smooth: bool,
        single_region_spatial: SingleRegionSpatial,
    ) -> Result<Posterior> {
        if series.is_empty() {
            return Err(Error::InvalidInput("no calibration series".into()));
        }
        let n_days = series[0].len();
        for s in series {
            if s.len() != n_days || s.start() != series[0].start() {
                return Err(Error::Alignment(
                    "all series must share a common date grid".into(),
                ));
            }
        }
        if series.len() > 1 && adjacency.is_none() {
            return Err(Error::InvalidInput(
                "multi-region fits require an adjacency".into(),
            ));
        }
        let normalized: Vec<Vec<f64>> = series
            .iter()
            .map(|s| {
                if smooth {
                    Ok(normalize(&smooth_7day(s)?))
                } else {
                    Ok(normalize(s))
                }
            })
            .collect::<Result<_>>()?;
        let y_obs: Vec<Vec<f64>> = (0..n_days)
            .map(|d| normalized.iter().map(|r| r[d]).collect())
            .collect();
        let populations: Vec<u64> = series.iter().map(|s| s.population).collect();
        let prior = PriorSpec::for_regions(&populations);
        Ok(Posterior {
            region_ids: series.iter().map(|s| s.region_id.clone()).collect(),
            populations,
            y_obs,
            grid: (0..n_days).map(|i| i as f64).collect(),
            adjacency,
            prior,
            hyper,
            single_region_spatial,
        })
    }

    pub fn n_regions(&self) -> usize {
        self.region_ids.len()
    }

    pub fn spatial_block(&self) -> bool {
        self.n_regions() > 1 || self.single_region_spatial == SingleRegionSpatial::VarianceOnly
    }

    pub fn dim(&self) -> usize {
        4 * self.n_regions() + if self.spatial_block() { 4 } else { 2 }
    }

    /// Normalized model predictions for each region on the grid.
    pub fn predict_normalized(
        &self,
        p: &ParamVector,
        draw: &IncubationDraw,
    ) -> Result<Vec<Vec<f64>>> {
        p.regions
            .iter()
            .zip(&self.populations)
            .map(|(r, &pop)| {
                let mut y = predict_daily(r, draw, &self.grid)?;
                for v in &mut y {
                    *v /= pop as f64;
                }
                Ok(y)
            })
            .collect()
    }

    /// Block-Gaussian log likelihood: independent over days, correlated in
    /// space through the pCAR covariance. Non-SPD covariance evaluates to
    /// `-inf` (rejected proposal).
    pub fn log_likelihood(&self, p: &ParamVector, draw: &IncubationDraw) -> f64 {
        let preds = match self.predict_normalized(p, draw) {
            Ok(v) => v,
            Err(_) => return f64::NEG_INFINITY,
        };
        let nr = self.n_regions();
        let ln2pi = (2.0 * std::f64::consts::PI).ln();

        if nr == 1 {
            // degenerate spatial block: scalar Gaussian per day
            let extra_var = match self.single_region_spatial {
                SingleRegionSpatial::Drop => 0.0,
                SingleRegionSpatial::VarianceOnly => p.global.tau2,
            };
            let mut ll = 0.0;
            for (day, y) in self.y_obs.iter().enumerate() {
                let pred = preds[0][day];
                let s = p.global.sigma_a + p.global.sigma_m * pred;
                let var = extra_var + s * s;
                if var <= 0.0 || !var.is_finite() {
                    return f64::NEG_INFINITY;
                }
                let r = y[0] - pred;
                ll += -0.5 * (ln2pi + var.ln() + r * r / var);
            }
            return ll;
        }

        let adj = self.adjacency.as_ref().expect("multi-region posterior has adjacency");
        let kernel = match precision_matrix(p.global.tau2, p.global.lambda, adj) {
            Ok(k) => k,
            Err(_) => return f64::NEG_INFINITY,
        };
        let mut ll = 0.0;
        let mut y_pred_day = vec![0.0; nr];
        for (day, y) in self.y_obs.iter().enumerate() {
            for r in 0..nr {
                y_pred_day[r] = preds[r][day];
            }
            let sigma = match observation_covariance(&kernel, p.global.sigma_a, p.global.sigma_m, &y_pred_day) {
                Ok(s) => s,
                Err(_) => return f64::NEG_INFINITY,
            };
            let chol = match Cholesky::new(sigma) {
                Some(c) => c,
                None => return f64::NEG_INFINITY,
            };
            let resid = DVector::from_iterator(nr, (0..nr).map(|r| y[r] - y_pred_day[r]));
            let ln_det: f64 = chol.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
            let solved = chol.solve(&resid);
            let quad = resid.dot(&solved);
            ll += -0.5 * (nr as f64 * ln2pi + ln_det + quad);
        }
        ll
    }

    pub fn log_prior(&self, p: &ParamVector) -> f64 {
        log_prior(p, &self.prior)
    }

    /// Stochastic log-posterior estimate: fresh incubation draw per call
    /// (the pseudo-marginal estimator), prior added exactly.
    pub fn log_post_estimate<R: Rng + ?Sized>(&self, x: &[f64], rng: &mut R) -> f64 {
        let p = match ParamVector::unpack(x, self.n_regions(), self.spatial_block()) {
            Ok(p) => p,
            Err(_) => return f64::NEG_INFINITY,
        };
        let lp = self.log_prior(&p);
        if lp == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        let draw = sample_incubation(&self.hyper, rng);
        lp + self.log_likelihood(&p, &draw)
    }

    /// Deterministic log posterior with the incubation draw pinned.
    pub fn log_post_pinned(&self, x: &[f64], draw: &IncubationDraw) -> f64 {
        let p = match ParamVector::unpack(x, self.n_regions(), self.spatial_block()) {
            Ok(p) => p,
            Err(_) => return f64::NEG_INFINITY,
        };
        let lp = self.log_prior(&p);
        if lp == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        lp + self.log_likelihood(&p, draw)
    }

    /// Coarse random-search starting point: per-region least squares on the
    /// normalized counts with the incubation draw pinned at its center, then
    /// moment-based noise scales.
    pub fn initial_guess(&self, seed: u64) -> Result<ParamVector> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x696e6974);
        let draw = self.hyper.center_draw();
        let n_days = self.grid.len();
        let mut regions = Vec::with_capacity(self.n_regions());
        let mut resid_scale = 0.0f64;
        for r in 0..self.n_regions() {
            let obs: Vec<f64> = (0..n_days).map(|d| self.y_obs[d][r]).collect();
            let total: f64 = obs.iter().sum();
            let pop = self.populations[r] as f64;
            let mut best = RegionParams {
                t0: 0.0,
                k: 2.0,
                theta: 10.0,
                n_total: (total * pop).max(1.0),
            };
            let mut best_sse = f64::INFINITY;
            for _ in 0..2000 {
                let cand = RegionParams {
                    t0: rng.gen_range(-25.0..n_days as f64 * 0.5),
                    k: rng.gen_range(0.5..15.0),
                    theta: rng.gen_range(1.0..40.0),
                    n_total: total * pop * rng.gen_range(0.5..4.0),
                };
                let pred = match predict_daily(&cand, &draw, &self.grid) {
                    Ok(p) => p,
                    Err(_) => continue,
                };
                let sse: f64 = pred
                    .iter()
                    .zip(&obs)
                    .map(|(p, o)| {
                        let d = p / pop - o;
                        d * d
                    })
                    .sum();
                if sse < best_sse {
                    best_sse = sse;
                    best = cand;
                }
            }
            resid_scale = resid_scale.max((best_sse / n_days as f64).sqrt());
            regions.push(best);
        }
        let sigma_a = resid_scale.max(1e-12);
        let global = GlobalParams {
            sigma_a,
            sigma_m: 0.1,
            tau2: (sigma_a * sigma_a).max(1e-12),
            lambda: 0.45,
        };
        Ok(ParamVector { regions, global, spatial_block: self.spatial_block() })
    }

    /// Default per-coordinate proposal scales for the pre-adaptation phase.
    pub fn initial_proposal_sd(&self, init: &ParamVector) -> Vec<f64> {
        let mut sd = Vec::with_capacity(init.dim());
        for r in &init.regions {
            sd.extend_from_slice(&[0.5, 0.05, 0.2, 0.01 * r.n_total]);
        }
        sd.extend_from_slice(&[0.05, 0.05]);
        if init.spatial_block {
            sd.extend_from_slice(&[0.1, 0.02]);
        }
        sd
    }
}

/// Sampler configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmcmcConfig {
    pub n_steps: usize,
    pub adapt_start: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    /// Pre-adaptation diagonal proposal standard deviations, one per dim.
    pub proposal_sd: Vec<f64>,
    /// Covariance regularizer added to the adapted proposal.
    pub epsilon: f64,
}

impl AmcmcConfig {
    /// Desk-scale defaults; the full-scale preset multiplies these by 10.
    pub fn desk_scale(dim: usize, seed: u64) -> AmcmcConfig {
        AmcmcConfig {
            n_steps: 200_000,
            adapt_start: 1000,
            burn_in: 50_000,
            thin: 20,
            seed,
            proposal_sd: vec![0.1; dim],
            epsilon: 1e-6,
        }
    }

    pub fn paper_scale(dim: usize, seed: u64) -> AmcmcConfig {
        AmcmcConfig {
            n_steps: 2_000_000,
            burn_in: 500_000,
            ..AmcmcConfig::desk_scale(dim, seed)
        }
    }
}

/// MCMC sample store.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub names: Vec<String>,
    /// Kept samples, row-major `n_kept x dim`.
    pub samples: Vec<Vec<f64>>,
    pub log_post: Vec<f64>,
    pub acceptance_rate: f64,
    pub seed: u64,
    pub n_steps: usize,
    pub burn_in: usize,
    pub thin: usize,
    /// Trace of the adapted proposal covariance (diagonal), for diagnostics.
    pub proposal_cov_diag: Vec<f64>,
}

impl Chain {
    pub fn n_kept(&self) -> usize {
        self.samples.len()
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.samples.iter().map(|row| row[j]).collect()
    }

    pub fn column_by_name(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.names.iter().position(|n| n == name)?;
        Some(self.column(j))
    }

    /// Persist as a little-endian binary sample block plus a JSON sidecar.
    pub fn save(&self, base: impl AsRef<Path>) -> Result<()> {
        let base = base.as_ref();
        let bin_path = base.with_extension("chain.bin");
        let meta_path = base.with_extension("chain.json");
        let mut f = std::fs::File::create(&bin_path)?;
        f.write_all(b"EPCH")?;
        f.write_all(&1u32.to_le_bytes())?;
        f.write_all(&(self.n_kept() as u64).to_le_bytes())?;
        f.write_all(&(self.dim() as u64).to_le_bytes())?;
        for row in &self.samples {
            for v in row {
                f.write_all(&v.to_le_bytes())?;
            }
        }
        for v in &self.log_post {
            f.write_all(&v.to_le_bytes())?;
        }
        let meta = serde_json::json!({
            "names": self.names,
            "acceptance_rate": self.acceptance_rate,
            "seed": self.seed,
            "n_steps": self.n_steps,
            "burn_in": self.burn_in,
            "thin": self.thin,
            "proposal_cov_diag": self.proposal_cov_diag,
            "samples_file": bin_path.file_name().map(|s| s.to_string_lossy().into_owned()),
        });
        std::fs::write(&meta_path, serde_json::to_string_pretty(&meta)?)?;
        Ok(())
    }

    pub fn load(base: impl AsRef<Path>) -> Result<Chain> {
        let base = base.as_ref();
        let bin_path = base.with_extension("chain.bin");
        let meta_path = base.with_extension("chain.json");
        let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&meta_path)?)?;
        let names: Vec<String> = serde_json::from_value(meta["names"].clone())?;

        let mut f = std::fs::File::open(&bin_path)?;
        let mut head = [0u8; 24];
        f.read_exact(&mut head)?;
        if &head[0..4] != b"EPCH" {
            return Err(Error::InvalidInput(format!("{bin_path:?} is not a chain file")));
        }
        let rows = u64::from_le_bytes(head[8..16].try_into().unwrap()) as usize;
        let cols = u64::from_le_bytes(head[16..24].try_into().unwrap()) as usize;
        if cols != names.len() {
            return Err(Error::InvalidInput("chain metadata/dimension mismatch".into()));
        }
        let mut buf = Vec::new();
        f.read_to_end(&mut buf)?;
        if buf.len() != 8 * rows * (cols + 1) {
            return Err(Error::InvalidInput("chain file truncated".into()));
        }
        let read_f64 =
            |i: usize| f64::from_le_bytes(buf[8 * i..8 * i + 8].try_into().unwrap());
        let samples: Vec<Vec<f64>> = (0..rows)
            .map(|r| (0..cols).map(|c| read_f64(r * cols + c)).collect())
            .collect();
        let log_post: Vec<f64> = (0..rows).map(|r| read_f64(rows * cols + r)).collect();
        Ok(Chain {
            names,
            samples,
            log_post,
            acceptance_rate: meta["acceptance_rate"].as_f64().unwrap_or(f64::NAN),
            seed: meta["seed"].as_u64().unwrap_or(0),
            n_steps: meta["n_steps"].as_u64().unwrap_or(0) as usize,
            burn_in: meta["burn_in"].as_u64().unwrap_or(0) as usize,
            thin: meta["thin"].as_u64().unwrap_or(1) as usize,
            proposal_cov_diag: serde_json::from_value(meta["proposal_cov_diag"].clone())
                .unwrap_or_default(),
        })
    }
}

/// Adaptive-Metropolis run over a (possibly stochastic) log-posterior.
///
/// The target is re-estimated with fresh internal randomness at every call;
/// the acceptance test compares the proposal's estimate against the
/// *stored* estimate for the current state, which is never refreshed. With
/// an unbiased likelihood estimator this is the pseudo-marginal scheme and
/// targets the exact posterior. After `adapt_start` steps the proposal
/// covariance is `s_d * Cov(history) + s_d * eps * I` with `s_d = 2.4^2/d`.
pub fn amcmc_run<F>(mut target: F, init: &[f64], names: Vec<String>, config: &AmcmcConfig) -> Result<Chain>
where
    F: FnMut(&[f64], &mut ChaCha8Rng) -> f64,
{
    let dim = init.len();
    if config.proposal_sd.len() != dim {
        return Err(Error::Config(format!(
            "proposal_sd has {} entries, expected {dim}",
            config.proposal_sd.len()
        )));
    }
    if names.len() != dim {
        return Err(Error::Config("names/dimension mismatch".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut current = init.to_vec();
    let mut current_lp = target(&current, &mut rng);
    if !current_lp.is_finite() {
        return Err(Error::FitFailed(format!(
            "log posterior is {current_lp} at the initial point"
        )));
    }

    let s_d = 2.4 * 2.4 / dim as f64;
    // running moments of the full history for the adapted proposal
    let mut mean = DVector::from_column_slice(&current);
    let mut cov = DMatrix::<f64>::zeros(dim, dim);
    let mut n_hist = 1usize;

    let mut chol: Option<Cholesky<f64, nalgebra::Dyn>> = None;
    let mut accepted = 0usize;
    let mut samples = Vec::new();
    let mut log_post = Vec::new();

    let mut proposal = vec![0.0; dim];
    for step in 0..config.n_steps {
        // draw proposal
        if step >= config.adapt_start {
            if step == config.adapt_start || step % 50 == 0 {
                let mut prop_cov = cov.scale(s_d);
                for i in 0..dim {
                    prop_cov[(i, i)] += s_d * config.epsilon;
                }
                chol = Cholesky::new(prop_cov);
            }
        }
        match &chol {
            Some(c) => {
                let z = DVector::from_iterator(
                    dim,
                    (0..dim).map(|_| <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)),
                );
                let step_vec = c.l() * z;
                for i in 0..dim {
                    proposal[i] = current[i] + step_vec[i];
                }
            }
            None => {
                for i in 0..dim {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    proposal[i] = current[i] + config.proposal_sd[i] * z;
                }
            }
        }

        let prop_lp = target(&proposal, &mut rng);
        let log_alpha = prop_lp - current_lp;
        if log_alpha >= 0.0 || rng.gen::<f64>().ln() < log_alpha {
            current.copy_from_slice(&proposal);
            current_lp = prop_lp;
            accepted += 1;
        }

        // recursive history-moment update
        n_hist += 1;
        let x = DVector::from_column_slice(&current);
        let delta = &x - &mean;
        mean += &delta / n_hist as f64;
        let delta2 = &x - &mean;
        // cov holds the unbiased sample covariance of the history (Welford)
        let nf = n_hist as f64;
        cov = cov.scale((nf - 2.0) / (nf - 1.0)) + (&delta * delta2.transpose()).scale(1.0 / (nf - 1.0));

        if step >= config.burn_in && (step - config.burn_in) % config.thin == 0 {
            samples.push(current.clone());
            log_post.push(current_lp);
        }
    }

    Ok(Chain {
        names,
        samples,
        log_post,
        acceptance_rate: accepted as f64 / config.n_steps as f64,
        seed: config.seed,
        n_steps: config.n_steps,
        burn_in: config.burn_in,
        thin: config.thin,
        proposal_cov_diag: (0..dim).map(|i| cov[(i, i)]).collect(),
    })
}

/// Effective sample size `N / (1 + 2 sum rho_k)` with the autocorrelation
/// sum truncated by the initial-monotone-sequence rule. A constant column
/// degenerates to 1.
pub fn ess(column: &[f64]) -> Result<f64> {
    let n = column.len();
    if n < 100 {
        return Err(Error::InvalidInput(format!(
            "need at least 100 samples for ESS, got {n}"
        )));
    }
    let nf = n as f64;
    let mean = column.iter().sum::<f64>() / nf;
    let c0: f64 = column.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / nf;
    if c0 == 0.0 {
        // degenerate chain
        return Ok(1.0);
    }
    let rho = |k: usize| -> f64 {
        let mut s = 0.0;
        for i in 0..n - k {
            s += (column[i] - mean) * (column[i + k] - mean);
        }
        s / nf / c0
    };
    // Geyer initial monotone sequence over pair sums
    let mut tau = -1.0;
    let mut prev_pair = f64::INFINITY;
    let mut k = 0usize;
    while k + 1 < n {
        let pair = rho(k) + rho(k + 1);
        if pair <= 0.0 {
            break;
        }
        let pair = pair.min(prev_pair);
        tau += 2.0 * pair;
        prev_pair = pair;
        k += 2;
    }
    Ok((nf / tau.max(1.0 / nf)).clamp(1.0, nf))
}
