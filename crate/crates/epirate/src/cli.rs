//! Batch command-line frontend: ingest -> fit -> forecast -> detect ->
//! diagnose, with a reproducibility manifest in every output directory.
//!
//! Commands are composable through persisted artifacts only: `forecast`,
//! `detect`, and `diagnose` consume the chain files written by `fit`, never
//! in-process state.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{dcor_table, DcorGrouping, DcorMatrix};
use crate::data::{load_adjacency, load_cases, load_populations, smooth_7day, CaseSeries};
use crate::detect::{
    detect_alarms, glr_detect, glr_fit, outlier_boundary, DetectionReport, GLR_C_GAMMA,
};
use crate::error::{Error, Result};
use crate::forecast::{average_crps, posterior_predictive, quantile};
use crate::inference::{
    amcmc_run, ess, AmcmcConfig, Chain, ParamVector, Posterior, SingleRegionSpatial,
};
use crate::spatial::{morans_i, MoranWeighting};

/// Fully resolved run configuration. Parsed from a flat, line-oriented
/// `key = value` file with `[section]` headers (TOML syntax; dates are
/// quoted `"YYYY-MM-DD"` strings); relative paths are resolved against the
/// config file's directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub regions: Vec<String>,
    pub data: DataSection,
    pub window: WindowSection,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub mcmc: McmcSection,
    #[serde(default)]
    pub forecast: ForecastSection,
    #[serde(default)]
    pub detect: Option<DetectSection>,
    #[serde(default)]
    pub diagnose: Option<DiagnoseSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DataSection {
    pub cases: PathBuf,
    pub populations: PathBuf,
    #[serde(default)]
    pub adjacency: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WindowSection {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelSection {
    /// Calibrate against 7-day-trailing-smoothed counts.
    pub smooth: bool,
    /// Handling of (tau2, lambda) when fitting a single region:
    /// "drop" removes the spatial block, "variance_only" keeps tau2 as a
    /// pure variance term.
    pub single_region_spatial: String,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection { smooth: true, single_region_spatial: "drop".into() }
    }
}

impl ModelSection {
    fn srs(&self) -> Result<SingleRegionSpatial> {
        match self.single_region_spatial.as_str() {
            "drop" => Ok(SingleRegionSpatial::Drop),
            "variance_only" => Ok(SingleRegionSpatial::VarianceOnly),
            other => Err(Error::Config(format!(
                "model.single_region_spatial must be \"drop\" or \"variance_only\", got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct McmcSection {
    pub n_steps: usize,
    pub adapt_start: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
}

impl Default for McmcSection {
    fn default() -> Self {
        McmcSection { n_steps: 200_000, adapt_start: 1000, burn_in: 50_000, thin: 20, seed: 42 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ForecastSection {
    pub horizon: u32,
    pub n_draws: usize,
    pub include_noise: bool,
}

impl Default for ForecastSection {
    fn default() -> Self {
        ForecastSection { horizon: 14, n_draws: 200, include_noise: true }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectSection {
    pub start: NaiveDate,
    pub end: NaiveDate,
    #[serde(default = "default_percentile")]
    pub percentile: f64,
    #[serde(default = "default_run_length")]
    pub run_length: usize,
    #[serde(default = "default_c_gamma")]
    pub c_gamma: f64,
}

fn default_percentile() -> f64 {
    99.0
}
fn default_run_length() -> usize {
    3
}
fn default_c_gamma() -> f64 {
    GLR_C_GAMMA
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagnoseSection {
    /// `region,value` residual vector for Moran's I.
    #[serde(default)]
    pub residuals: Option<PathBuf>,
    /// Adjacency for the residual regions (may differ from data.adjacency).
    #[serde(default)]
    pub adjacency: Option<PathBuf>,
    /// `region_a,region_b,distance` seat distances; enables binary_modified.
    #[serde(default)]
    pub seat_distances: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: PathBuf::from("out") }
    }
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<RunConfig> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if cfg.regions.is_empty() {
            return Err(Error::Config("regions list must be non-empty".into()));
        }
        if cfg.window.end <= cfg.window.start {
            return Err(Error::Config("window.end must be after window.start".into()));
        }
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&p);
            }
        };
        resolve(&mut cfg.data.cases);
        resolve(&mut cfg.data.populations);
        resolve(&mut cfg.output.dir);
        if let Some(a) = cfg.data.adjacency.as_mut() {
            resolve(a);
        }
        if let Some(d) = cfg.diagnose.as_mut() {
            if let Some(p) = d.residuals.as_mut() {
                resolve(p);
            }
            if let Some(p) = d.adjacency.as_mut() {
                resolve(p);
            }
            if let Some(p) = d.seat_distances.as_mut() {
                resolve(p);
            }
        }
        for p in [&cfg.data.cases, &cfg.data.populations] {
            if !p.exists() {
                return Err(Error::Config(format!("referenced file missing: {}", p.display())));
            }
        }
        Ok(cfg)
    }

    fn model_inputs(&self) -> Vec<PathBuf> {
        let mut v = vec![self.data.cases.clone(), self.data.populations.clone()];
        if let Some(a) = &self.data.adjacency {
            v.push(a.clone());
        }
        v
    }
}

#[derive(Debug, Parser)]
#[command(name = "epirate", version, about = "Spatiotemporal infection-rate estimation")]
pub struct Cli {
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Comma-separated region subset overriding the config's list.
    #[arg(long, global = true, value_delimiter = ',')]
    pub regions: Vec<String>,
    /// Override the config's RNG seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Use the long-run MCMC preset (2e6 steps) instead of the desk-scale
    /// default.
    #[arg(long, global = true)]
    pub paper_scale: bool,
    /// Override the config's output directory.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the posterior and persist the chain plus a summary.
    Fit,
    /// Posterior-predictive bands and CRPS over the calibration window.
    Forecast,
    /// Run a wave-arrival detector over the monitoring window.
    Detect {
        #[arg(long, value_enum, default_value = "infection-rate")]
        detector: DetectorChoice,
    },
    /// Moran's I and distance-correlation tables.
    Diagnose,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DetectorChoice {
    InfectionRate,
    GlrPoisson,
}

/// Entry point returning the process exit code:
/// 0 success, 1 usage error, 2 numerical failure, 3 data error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // help/version requests are not errors
            use clap::error::ErrorKind::*;
            let code = if matches!(e.kind(), DisplayHelp | DisplayVersion) { 0 } else { 1 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::InvalidInput(_) => 1,
        Error::Numerical(_) | Error::FitFailed(_) | Error::UndefinedStatistic(_) => 2,
        Error::Parse { .. }
        | Error::RegionNotFound(_)
        | Error::Alignment(_)
        | Error::Io(_)
        | Error::Csv(_)
        | Error::Json(_) => 3,
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let config_path = cli
        .config
        .ok_or_else(|| Error::Config("--config is required".into()))?;
    let mut cfg = RunConfig::load(&config_path)?;
    if !cli.regions.is_empty() {
        cfg.regions = cli.regions.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.mcmc.seed = seed;
    }
    if let Some(out) = cli.output {
        cfg.output.dir = out;
    }
    fs::create_dir_all(&cfg.output.dir)?;
    write_manifest(&cfg, &config_path, cli.paper_scale)?;
    match cli.command {
        Command::Fit => cmd_fit(&cfg, cli.paper_scale),
        Command::Forecast => cmd_forecast(&cfg),
        Command::Detect { detector } => cmd_detect(&cfg, detector),
        Command::Diagnose => cmd_diagnose(&cfg),
    }
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path)?;
    Ok(format!("{:x}", Sha256::digest(&bytes)))
}

#[derive(Serialize)]
struct Manifest {
    package: &'static str,
    version: &'static str,
    config_path: PathBuf,
    config_sha256: String,
    seed: u64,
    paper_scale: bool,
    regions: Vec<String>,
    input_sha256: Vec<(PathBuf, String)>,
}

fn write_manifest(cfg: &RunConfig, config_path: &Path, paper_scale: bool) -> Result<()> {
    let mut inputs = Vec::new();
    for p in cfg.model_inputs() {
        if p.exists() {
            let h = sha256_file(&p)?;
            inputs.push((p, h));
        }
    }
    if let Some(d) = &cfg.diagnose {
        for p in [&d.residuals, &d.adjacency, &d.seat_distances].into_iter().flatten() {
            if p.exists() {
                inputs.push((p.clone(), sha256_file(p)?));
            }
        }
    }
    let manifest = Manifest {
        package: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config_path: config_path.to_path_buf(),
        config_sha256: sha256_file(config_path)?,
        seed: cfg.mcmc.seed,
        paper_scale,
        regions: cfg.regions.clone(),
        input_sha256: inputs,
    };
    let text = serde_json::to_string_pretty(&manifest)?;
    fs::write(cfg.output.dir.join("manifest.json"), text)?;
    Ok(())
}

/// Load, window, and order the calibration series per the config.
fn calibration_series(cfg: &RunConfig) -> Result<Vec<CaseSeries>> {
    let populations = load_populations(&cfg.data.populations)?;
    let filter: BTreeSet<String> = cfg.regions.iter().cloned().collect();
    let report = load_cases(&cfg.data.cases, &populations, Some(&filter))?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let mut out = Vec::with_capacity(cfg.regions.len());
    for r in &cfg.regions {
        let s = report
            .series
            .iter()
            .find(|s| &s.region_id == r)
            .ok_or_else(|| Error::RegionNotFound(r.clone()))?;
        out.push(s.slice(cfg.window.start, cfg.window.end)?);
    }
    Ok(out)
}

fn build_posterior(cfg: &RunConfig, series: &[CaseSeries]) -> Result<Posterior> {
    let adjacency = if series.len() > 1 {
        let path = cfg.data.adjacency.as_ref().ok_or_else(|| {
            Error::Config("multi-region fits require data.adjacency".into())
        })?;
        Some(load_adjacency(path, cfg.regions.clone())?)
    } else {
        None
    };
    Posterior::new(series, adjacency, Default::default(), cfg.model.smooth, cfg.model.srs()?)
}

fn chain_base(cfg: &RunConfig) -> PathBuf {
    cfg.output.dir.join("chain")
}

#[derive(Serialize)]
struct ParamSummary {
    name: String,
    median: f64,
    ci90: (f64, f64),
    /// None when the kept chain is too short for an autocorrelation fit.
    ess: Option<f64>,
}

#[derive(Serialize)]
struct FitSummary {
    parameters: Vec<ParamSummary>,
    acceptance_rate: f64,
    n_kept: usize,
    seed: u64,
}

pub fn cmd_fit(cfg: &RunConfig, paper_scale: bool) -> Result<()> {
    let series = calibration_series(cfg)?;
    let posterior = build_posterior(cfg, &series)?;
    let init = posterior.initial_guess(cfg.mcmc.seed)?;
    let mut mcmc = if paper_scale {
        AmcmcConfig::paper_scale(posterior.dim(), cfg.mcmc.seed)
    } else {
        AmcmcConfig {
            n_steps: cfg.mcmc.n_steps,
            adapt_start: cfg.mcmc.adapt_start,
            burn_in: cfg.mcmc.burn_in,
            thin: cfg.mcmc.thin,
            ..AmcmcConfig::desk_scale(posterior.dim(), cfg.mcmc.seed)
        }
    };
    mcmc.proposal_sd = posterior.initial_proposal_sd(&init);
    let names = ParamVector::names(&posterior.region_ids, posterior.spatial_block());
    let chain = amcmc_run(
        |x, rng| posterior.log_post_estimate(x, rng),
        &init.pack(),
        names,
        &mcmc,
    )?;
    chain.save(chain_base(cfg))?;

    let mut parameters = Vec::with_capacity(chain.dim());
    for (j, name) in chain.names.iter().enumerate() {
        let col = chain.column(j);
        parameters.push(ParamSummary {
            name: name.clone(),
            median: quantile(&col, 0.5),
            ci90: (quantile(&col, 0.05), quantile(&col, 0.95)),
            ess: ess(&col).ok(),
        });
    }
    let summary = FitSummary {
        parameters,
        acceptance_rate: chain.acceptance_rate,
        n_kept: chain.n_kept(),
        seed: cfg.mcmc.seed,
    };
    fs::write(
        cfg.output.dir.join("summary.json"),
        serde_json::to_string_pretty(&summary)?,
    )?;
    println!(
        "fit: {} parameters, {} kept samples, acceptance {:.3}",
        chain.dim(),
        chain.n_kept(),
        chain.acceptance_rate
    );
    Ok(())
}

fn scored_counts(cfg: &RunConfig, s: &CaseSeries) -> Result<Vec<f64>> {
    Ok(if cfg.model.smooth { smooth_7day(s)?.counts } else { s.counts.clone() })
}

pub fn cmd_forecast(cfg: &RunConfig) -> Result<()> {
    let series = calibration_series(cfg)?;
    let posterior = build_posterior(cfg, &series)?;
    let chain = Chain::load(chain_base(cfg))?;
    let bands = posterior_predictive(
        &chain,
        &posterior,
        cfg.window.start,
        cfg.forecast.n_draws,
        cfg.forecast.horizon,
        cfg.forecast.include_noise,
        cfg.mcmc.seed,
    )?;

    let mut wtr = csv::Writer::from_path(cfg.output.dir.join("bands.csv"))?;
    wtr.write_record(["date", "region", "median", "q05", "q25", "q75", "q95"])?;
    for band in &bands {
        for i in 0..band.dates.len() {
            wtr.write_record([
                band.dates[i].to_string(),
                band.region_id.clone(),
                band.median[i].to_string(),
                band.q05[i].to_string(),
                band.q25[i].to_string(),
                band.q75[i].to_string(),
                band.q95[i].to_string(),
            ])?;
        }
    }
    wtr.flush()?;

    let mut wtr = csv::Writer::from_path(cfg.output.dir.join("crps.csv"))?;
    wtr.write_record(["region", "avg_crps"])?;
    for (band, s) in bands.iter().zip(&series) {
        let observed = scored_counts(cfg, s)?;
        let score = average_crps(band, &observed)?;
        wtr.write_record([band.region_id.clone(), format!("{score:.6}")])?;
        println!("forecast: {} avg CRPS {score:.3}", band.region_id);
    }
    wtr.flush()?;
    Ok(())
}

fn detect_section(cfg: &RunConfig) -> Result<&DetectSection> {
    cfg.detect
        .as_ref()
        .ok_or_else(|| Error::Config("detect command requires a [detect] section".into()))
}

pub fn cmd_detect(cfg: &RunConfig, detector: DetectorChoice) -> Result<()> {
    let det = detect_section(cfg)?;
    let populations = load_populations(&cfg.data.populations)?;
    let filter: BTreeSet<String> = cfg.regions.iter().cloned().collect();
    let report = load_cases(&cfg.data.cases, &populations, Some(&filter))?;

    let reports: Vec<DetectionReport> = match detector {
        DetectorChoice::InfectionRate => {
            let series = calibration_series(cfg)?;
            let posterior = build_posterior(cfg, &series)?;
            let chain = Chain::load(chain_base(cfg))?;
            let mut horizon = (det.end - cfg.window.end).num_days();
            if horizon < 1 {
                return Err(Error::Config(
                    "detect window must extend past the calibration window".into(),
                ));
            }
            let max = i64::from(crate::data::StudyWindow::MAX_HORIZON);
            if horizon > max {
                eprintln!(
                    "warning: monitoring window truncated to {max} days past the calibration \
                     end; later days carry no incubation-delayed information"
                );
                horizon = max;
            }
            let det_end = cfg.window.end + chrono::Duration::days(horizon);
            let bands = posterior_predictive(
                &chain,
                &posterior,
                cfg.window.start,
                cfg.forecast.n_draws,
                horizon as u32,
                true,
                cfg.mcmc.seed,
            )?;
            let mut out = Vec::with_capacity(bands.len());
            for band in &bands {
                let (dates, boundary, poor) = outlier_boundary(band, det.percentile);
                if poor {
                    eprintln!(
                        "warning: {} draws resolve the {}th percentile poorly",
                        band.samples.len(),
                        det.percentile
                    );
                }
                // restrict to the monitoring window
                let keep: Vec<usize> = dates
                    .iter()
                    .enumerate()
                    .filter(|(_, d)| **d >= det.start && **d <= det_end)
                    .map(|(i, _)| i)
                    .collect();
                let b_dates: Vec<NaiveDate> = keep.iter().map(|&i| dates[i]).collect();
                let b_vals: Vec<f64> = keep.iter().map(|&i| boundary[i]).collect();
                let full = report
                    .series
                    .iter()
                    .find(|s| s.region_id == band.region_id)
                    .ok_or_else(|| Error::RegionNotFound(band.region_id.clone()))?;
                // compare on the same scale the model was calibrated on:
                // trailing smoothing uses only past days, so smoothing the
                // full series before slicing is well-defined
                let monitored = if cfg.model.smooth { smooth_7day(full)? } else { full.clone() };
                let observed = monitored.slice(det.start, det_end)?;
                out.push(detect_alarms(&observed, &b_dates, &b_vals, det.run_length)?);
            }
            out
        }
        DetectorChoice::GlrPoisson => {
            let mut out = Vec::with_capacity(cfg.regions.len());
            for r in &cfg.regions {
                let full = report
                    .series
                    .iter()
                    .find(|s| &s.region_id == r)
                    .ok_or_else(|| Error::RegionNotFound(r.clone()))?;
                let train = full.slice(cfg.window.start, cfg.window.end)?;
                let test = full.slice(det.start, det.end)?;
                let base = glr_fit(&train)?;
                out.push(glr_detect(&test, &base, det.c_gamma)?);
            }
            out
        }
    };

    for rep in &reports {
        let tag = match detector {
            DetectorChoice::InfectionRate => "infection_rate",
            DetectorChoice::GlrPoisson => "glr_poisson",
        };
        let json_path = cfg.output.dir.join(format!("detect_{tag}_{}.json", rep.region_id));
        fs::write(&json_path, serde_json::to_string_pretty(rep)?)?;
        let mut wtr =
            csv::Writer::from_path(cfg.output.dir.join(format!("boundary_{tag}_{}.csv", rep.region_id)))?;
        wtr.write_record(["date", "boundary"])?;
        for (d, b) in &rep.boundary {
            wtr.write_record([d.to_string(), b.to_string()])?;
        }
        wtr.flush()?;
        println!(
            "detect[{tag}]: {} outliers {} alarms {}",
            rep.region_id,
            rep.outlier_days.len(),
            rep.alarm_days.len()
        );
    }
    Ok(())
}

fn load_residuals(path: &Path) -> Result<(Vec<String>, Vec<f64>)> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut regions = Vec::new();
    let mut values = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let v: f64 = rec[1].trim().parse().map_err(|e| Error::Parse {
            line: i + 2,
            msg: format!("bad residual value: {e}"),
        })?;
        regions.push(rec[0].trim().to_string());
        values.push(v);
    }
    Ok((regions, values))
}

fn load_seat_distances(path: &Path, regions: &[String]) -> Result<DMatrix<f64>> {
    let index = |name: &str| -> Result<usize> {
        regions
            .iter()
            .position(|r| r == name)
            .ok_or_else(|| Error::RegionNotFound(name.to_string()))
    };
    let mut d = DMatrix::zeros(regions.len(), regions.len());
    let mut rdr = csv::Reader::from_path(path)?;
    for rec in rdr.records() {
        let rec = rec?;
        let (i, j) = (index(rec[0].trim())?, index(rec[1].trim())?);
        let dist: f64 = rec[2]
            .trim()
            .parse()
            .map_err(|e| Error::Parse { line: 0, msg: format!("bad distance: {e}") })?;
        d[(i, j)] = dist;
        d[(j, i)] = dist;
    }
    Ok(d)
}

fn write_dcor(path: &Path, m: &DcorMatrix) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path)?;
    let mut header = vec![String::new()];
    header.extend(m.labels.iter().cloned());
    wtr.write_record(&header)?;
    for (i, label) in m.labels.iter().enumerate() {
        let mut row = vec![label.clone()];
        row.extend(m.values[i].iter().map(|v| format!("{v:.1}")));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn cmd_diagnose(cfg: &RunConfig) -> Result<()> {
    let chain = Chain::load(chain_base(cfg))?;
    write_dcor(&cfg.output.dir.join("dcor_individual.csv"), &dcor_table(&chain, DcorGrouping::Individual)?)?;
    write_dcor(&cfg.output.dir.join("dcor_components.csv"), &dcor_table(&chain, DcorGrouping::ByComponent)?)?;

    let diag = cfg.diagnose.as_ref();
    if let Some((res_path, adj_path)) =
        diag.and_then(|d| d.residuals.as_ref().zip(d.adjacency.as_ref()))
    {
        let (regions, values) = load_residuals(res_path)?;
        let adjacency = load_adjacency(adj_path, regions.clone())?;
        let distances = diag
            .and_then(|d| d.seat_distances.as_ref())
            .map(|p| load_seat_distances(p, &regions))
            .transpose()?;
        let mut wtr = csv::Writer::from_path(cfg.output.dir.join("moran.csv"))?;
        wtr.write_record(["weighting", "statistic", "z"])?;
        let mut cases = vec![
            (MoranWeighting::Binary, "binary"),
            (MoranWeighting::RowStandardised, "row_standardised"),
        ];
        if distances.is_some() {
            cases.insert(1, (MoranWeighting::BinaryModified, "binary_modified"));
        }
        for (weighting, name) in cases {
            let r = morans_i(&values, &adjacency, weighting, distances.as_ref())?;
            wtr.write_record([name.to_string(), format!("{:.6}", r.statistic), format!("{:.6}", r.z)])?;
            println!("moran[{name}]: I = {:.4}, z = {:.2}", r.statistic, r.z);
        }
        wtr.flush()?;
    }
    Ok(())
}
