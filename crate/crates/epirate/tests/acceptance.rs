//! Acceptance gate: one test per criterion, each printing a PASS/FAIL line
//! with the measured values before asserting.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use epirate::analysis::{dcor, dcor_table, DcorGrouping};
use epirate::data::{
    load_adjacency, load_cases, load_populations, smooth_7day, Adjacency, CaseSeries,
};
use epirate::detect::{detect_alarms, glr_detect, glr_fit, outlier_boundary, GlrModel, GLR_C_GAMMA, GLR_OMEGA};
use epirate::epimodel::{
    forecast_cutoff, infection_rate_pdf, predict_daily, sample_incubation, IncubationDraw,
    IncubationHyper, RegionParams,
};
use epirate::forecast::{average_crps, crps, posterior_predictive, quantile};
use epirate::inference::{
    amcmc_run, ess, AmcmcConfig, Chain, ParamVector, Posterior, SingleRegionSpatial,
};
use epirate::spatial::{morans_i, precision_matrix, MoranWeighting};

fn report(id: u32, ok: bool, detail: &str) {
    println!("criterion {id}: {} — {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} failed: {detail}");
}

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data")
}

fn date(s: &str) -> NaiveDate {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
}

fn nm_series(regions: &[&str], from: &str, to: &str) -> Vec<CaseSeries> {
    let pops = load_populations(data_dir().join("nm_population.csv")).unwrap();
    let filter = regions.iter().map(|r| r.to_string()).collect();
    let report = load_cases(data_dir().join("nm_cases.csv"), &pops, Some(&filter)).unwrap();
    regions
        .iter()
        .map(|r| {
            report
                .series
                .iter()
                .find(|s| &s.region_id == r)
                .unwrap()
                .slice(date(from), date(to))
                .unwrap()
        })
        .collect()
}

fn nm_adjacency(regions: &[&str]) -> Adjacency {
    load_adjacency(
        data_dir().join("nm_adjacency.csv"),
        regions.iter().map(|r| r.to_string()).collect(),
    )
    .unwrap()
}

fn fit(series: &[CaseSeries], adjacency: Option<Adjacency>, smooth: bool, seed: u64) -> (Chain, Posterior) {
    let post = Posterior::new(
        series,
        adjacency,
        IncubationHyper::default(),
        smooth,
        SingleRegionSpatial::Drop,
    )
    .unwrap();
    let init = post.initial_guess(seed).unwrap();
    let mut cfg = AmcmcConfig::desk_scale(post.dim(), seed);
    cfg.proposal_sd = post.initial_proposal_sd(&init);
    let names = ParamVector::names(&post.region_ids, post.spatial_block());
    let chain = amcmc_run(|x, rng| post.log_post_estimate(x, rng), &init.pack(), names, &cfg)
        .unwrap();
    (chain, post)
}

fn smoothed_counts(s: &CaseSeries) -> Vec<f64> {
    smooth_7day(s).unwrap().counts
}

fn calibration_crps(chain: &Chain, post: &Posterior, series: &[CaseSeries], seed: u64) -> Vec<f64> {
    let bands = posterior_predictive(chain, post, series[0].start(), 200, 14, true, seed).unwrap();
    bands
        .iter()
        .zip(series)
        .map(|(b, s)| average_crps(b, &smoothed_counts(s)).unwrap())
        .collect()
}

// ---------------------------------------------------------------------------

#[test]
fn criterion_1_gmrf_closed_form_oracle() {
    let two = Adjacency::from_edges(
        vec!["a".into(), "b".into()],
        &[("a".into(), "b".into())],
    )
    .unwrap();
    let hub = Adjacency::from_edges(
        vec!["a".into(), "b".into(), "c".into()],
        &[("a".into(), "b".into()), ("a".into(), "c".into())],
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let tau2: f64 = rng.gen_range(0.05..5.0);
        let lambda: f64 = rng.gen_range(0.0..0.9);

        // two regions with one shared border:
        // Sigma = tau^2 / (1 - lambda^2) * [[1, lambda], [lambda, 1]]
        let kernel = precision_matrix(tau2, lambda, &two).unwrap();
        let c = tau2 / (1.0 - lambda * lambda);
        let closed = DMatrix::from_row_slice(2, 2, &[c, c * lambda, c * lambda, c]);
        worst = worst.max((&kernel.covariance - &closed).abs().max());

        // hub with two leaves: Sigma = tau^2 / (2 - 2 lambda^2) *
        // [[1, l, l], [l, 2 - l^2, l^2], [l, l^2, 2 - l^2]]
        let kernel = precision_matrix(tau2, lambda, &hub).unwrap();
        let d = tau2 / (2.0 - 2.0 * lambda * lambda);
        let l = lambda;
        let closed = DMatrix::from_row_slice(
            3,
            3,
            &[
                1.0, l, l, //
                l, 2.0 - l * l, l * l, //
                l, l * l, 2.0 - l * l,
            ],
        ) * d;
        worst = worst.max((&kernel.covariance - &closed).abs().max());
    }
    report(1, worst < 1e-10, &format!("max closed-form discrepancy {worst:.2e}"));
}

#[test]
fn criterion_2_forward_model_normalization() {
    // Gamma pdf integrates to 1; substitution t = u^(1/k) removes the
    // origin singularity for k < 1 (the u-powers cancel exactly).
    let mut worst_pdf: f64 = 0.0;
    for &k in &[0.5f64, 1.0, 2.0, 5.0, 10.0] {
        for &theta in &[1.0, 5.0, 20.0] {
            let upper = (k * theta + 30.0 * k.sqrt() * theta).max(300.0);
            let n = 200_000usize;
            let integral = if k < 1.0 {
                let u_max = upper.powf(k);
                let h = u_max / n as f64;
                let g = |u: f64| {
                    if u == 0.0 {
                        return 1.0 / (k * statrs::function::gamma::gamma(k) * theta.powf(k));
                    }
                    let t = u.powf(1.0 / k);
                    infection_rate_pdf(t, k, theta).unwrap() * t / (k * u)
                };
                let mut s = g(0.0) + g(u_max);
                for i in 1..n {
                    s += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * h);
                }
                s * h / 3.0
            } else {
                let h = upper / n as f64;
                let f = |t: f64| infection_rate_pdf(t, k, theta).unwrap();
                let mut s = f(0.0) + f(upper);
                for i in 1..n {
                    s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
                }
                s * h / 3.0
            };
            worst_pdf = worst_pdf.max((integral - 1.0).abs());
        }
    }

    // daily prediction total converges to N on a long grid
    let p = RegionParams { t0: 0.0, k: 2.0, theta: 10.0, n_total: 1000.0 };
    let draw = IncubationDraw { mu: 1.62, sigma: 0.418 };
    let grid: Vec<f64> = (0..200).map(|i| i as f64).collect();
    let total: f64 = predict_daily(&p, &draw, &grid).unwrap().iter().sum();
    let n_err = (total - 1000.0).abs() / 1000.0;

    report(
        2,
        worst_pdf < 1e-6 && n_err < 0.01,
        &format!("pdf integral error {worst_pdf:.2e}, mass recovery error {:.3}%", n_err * 100.0),
    );
}

#[test]
fn criterion_3_incubation_ci_reproduction() {
    let hyper = IncubationHyper::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 100_000;
    let mut mus = Vec::with_capacity(n);
    let mut sigmas = Vec::with_capacity(n);
    for _ in 0..n {
        let d = sample_incubation(&hyper, &mut rng);
        mus.push(d.mu);
        sigmas.push(d.sigma);
    }
    let q = |v: &[f64], p: f64| quantile(v, p);
    let (mu_lo, mu_hi) = (q(&mus, 0.025), q(&mus, 0.975));
    let (s_lo, s_hi) = (q(&sigmas, 0.025), q(&sigmas, 0.975));
    let ok = (mu_lo - 1.48).abs() < 0.02
        && (mu_hi - 1.76).abs() < 0.02
        && (s_lo - 0.320).abs() < 0.01
        && (s_hi - 0.515).abs() < 0.01;
    report(
        3,
        ok,
        &format!("mu 95% CI [{mu_lo:.3}, {mu_hi:.3}] vs [1.48, 1.76]; sigma [{s_lo:.3}, {s_hi:.3}] vs [0.320, 0.515]"),
    );
    // and the derived forecast cutoff
    let cutoff = forecast_cutoff(&hyper);
    assert!((cutoff - 16.3).abs() < 0.1, "cutoff {cutoff}");
}

#[test]
fn criterion_4_sampler_correctness() {
    // 5-D analytic Gaussian target
    let mean = [1.0, -2.0, 0.5, 3.0, -1.0];
    let sd = [1.0, 0.5, 2.0, 1.5, 0.8];
    let target = |x: &[f64], _rng: &mut ChaCha8Rng| -> f64 {
        -0.5 * x
            .iter()
            .zip(&mean)
            .zip(&sd)
            .map(|((xi, m), s)| ((xi - m) / s).powi(2))
            .sum::<f64>()
    };
    let cfg = AmcmcConfig {
        n_steps: 400_000,
        adapt_start: 1000,
        burn_in: 50_000,
        thin: 1,
        ..AmcmcConfig::desk_scale(5, 4)
    };
    let names: Vec<String> = (0..5).map(|i| format!("x{i}")).collect();
    let chain = amcmc_run(target, &[0.0; 5], names, &cfg).unwrap();
    let mut mean_err: f64 = 0.0;
    let mut var_err: f64 = 0.0;
    for j in 0..5 {
        let col = chain.column(j);
        let m = col.iter().sum::<f64>() / col.len() as f64;
        let v = col.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (col.len() - 1) as f64;
        mean_err = mean_err.max((m - mean[j]).abs());
        var_err = var_err.max((v / (sd[j] * sd[j]) - 1.0).abs());
    }

    // ESS oracles
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 50_000;
    let iid: Vec<f64> = (0..n).map(|_| <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)).collect();
    let ess_iid = ess(&iid).unwrap();
    let rho = 0.9;
    let mut ar = Vec::with_capacity(n);
    let mut x = 0.0;
    for _ in 0..n {
        let z: f64 = StandardNormal.sample(&mut rng);
        x = rho * x + (1.0f64 - rho * rho).sqrt() * z;
        ar.push(x);
    }
    let ess_ar = ess(&ar).unwrap();
    let ar_expect = n as f64 * (1.0 - rho) / (1.0 + rho);

    let ok = mean_err < 0.05
        && var_err < 0.10
        && (ess_iid / n as f64 - 1.0).abs() < 0.20
        && (ess_ar / ar_expect - 1.0).abs() < 0.20;
    report(
        4,
        ok,
        &format!(
            "mean err {mean_err:.3}, var rel err {var_err:.3}, ESS(iid)/N {:.2}, ESS(ar1)/analytic {:.2}",
            ess_iid / n as f64,
            ess_ar / ar_expect
        ),
    );
}

#[test]
fn criterion_5_synthetic_parameter_recovery() {
    let pop = 200_000u64;
    let n_days = 107usize;
    let reps = 20;
    let mut covered = 0usize;
    let mut checks = 0usize;
    for rep in 0..reps {
        let mut rng = ChaCha8Rng::seed_from_u64(500 + rep);
        let truth = RegionParams {
            t0: rng.gen_range(-15.0..-5.0),
            k: rng.gen_range(1.6..3.0),
            theta: rng.gen_range(15.0..30.0),
            n_total: rng.gen_range(2000.0..10_000.0),
        };
        let sigma_a = rng.gen_range(2e-5..5e-5);
        let sigma_m = rng.gen_range(0.05..0.15);
        let draw = IncubationHyper::default().center_draw();
        let grid: Vec<f64> = (0..n_days).map(|i| i as f64).collect();
        let pred = predict_daily(&truth, &draw, &grid).unwrap();
        let counts: Vec<f64> = pred
            .iter()
            .map(|&c| {
                let y = c / pop as f64;
                let z: f64 = StandardNormal.sample(&mut rng);
                let noisy = y + (sigma_a + sigma_m * y) * z;
                (noisy * pop as f64).max(0.0)
            })
            .collect();
        let s = CaseSeries::new("synth", pop, date("2020-06-01"), counts).unwrap();
        // raw (unsmoothed) likelihood: generation matches the model exactly
        let (chain, _post) = fit(&[s], None, false, 900 + rep);
        let truths = [
            ("synth.t0", truth.t0),
            ("synth.k", truth.k),
            ("synth.theta", truth.theta),
            ("synth.N", truth.n_total),
            ("log_sigma_a", sigma_a.ln()),
            ("log_sigma_m", sigma_m.ln()),
        ];
        for (name, t) in truths {
            let col = chain.column_by_name(name).unwrap();
            let lo = quantile(&col, 0.05);
            let hi = quantile(&col, 0.95);
            checks += 1;
            if t >= lo && t <= hi {
                covered += 1;
            }
        }
    }
    let frac = covered as f64 / checks as f64;
    report(
        5,
        frac >= 0.80,
        &format!("90% CI coverage {covered}/{checks} = {:.1}%", frac * 100.0),
    );
}

#[test]
fn criterion_6_nm_desk_scale_crps() {
    let regions = ["bernalillo", "santa_fe", "valencia"];
    let joint_targets = [11.30, 2.65, 1.76];
    let single_targets = [10.20, 2.48, 1.61];
    let series = nm_series(&regions, "2020-06-01", "2020-09-15");
    let seeds = [1u64, 2, 3, 4, 5];

    let mut joint_all = vec![Vec::new(); 3];
    let mut single_all = vec![Vec::new(); 3];
    let mut ordering_hits = 0;
    for &seed in &seeds {
        let (chain, post) = fit(&series, Some(nm_adjacency(&regions)), true, seed);
        let joint = calibration_crps(&chain, &post, &series, seed);
        let mut single = Vec::new();
        for (i, r) in regions.iter().enumerate() {
            let one = vec![series[i].clone()];
            let (c1, p1) = fit(&one, None, true, seed);
            single.push(calibration_crps(&c1, &p1, &one, seed)[0]);
            let _ = r;
        }
        if single.iter().sum::<f64>() < joint.iter().sum::<f64>() {
            ordering_hits += 1;
        }
        for i in 0..3 {
            joint_all[i].push(joint[i]);
            single_all[i].push(single[i]);
        }
    }
    let med = |v: &[f64]| quantile(v, 0.5);
    let mut ok = ordering_hits >= 3;
    let mut detail = String::new();
    for i in 0..3 {
        let jm = med(&joint_all[i]);
        let sm = med(&single_all[i]);
        let j_ok = (jm / joint_targets[i] - 1.0).abs() <= 0.25;
        let s_ok = (sm / single_targets[i] - 1.0).abs() <= 0.25;
        ok = ok && j_ok && s_ok;
        detail.push_str(&format!(
            "{}: joint {jm:.2} (ref {:.2}), single {sm:.2} (ref {:.2}); ",
            regions[i], joint_targets[i], single_targets[i]
        ));
    }
    detail.push_str(&format!("independent-fit ordering in {ordering_hits}/5 seeds"));
    report(6, ok, &detail);
}

#[test]
fn criterion_7_detectors() {
    let regions = ["bernalillo", "santa_fe", "valencia"];
    let full = nm_series(&regions, "2020-06-01", "2020-09-30");
    let seeds = [11u64, 12, 13, 14, 15];

    let run_detector = |cal_end: &str, mon_start: &str, seed: u64| -> Vec<usize> {
        let cal: Vec<CaseSeries> = full
            .iter()
            .map(|s| s.slice(date("2020-06-01"), date(cal_end)).unwrap())
            .collect();
        let (chain, post) = fit(&cal, Some(nm_adjacency(&regions)), true, seed);
        let bands =
            posterior_predictive(&chain, &post, cal[0].start(), 200, 14, true, seed).unwrap();
        let mon_end = date(cal_end) + chrono::Duration::days(14);
        bands
            .iter()
            .zip(&full)
            .map(|(band, s)| {
                let (dates, boundary, _) = outlier_boundary(band, 99.0);
                let keep: Vec<usize> = dates
                    .iter()
                    .enumerate()
                    .filter(|(_, d)| **d >= date(mon_start) && **d <= mon_end)
                    .map(|(i, _)| i)
                    .collect();
                let b_dates: Vec<NaiveDate> = keep.iter().map(|&i| dates[i]).collect();
                let b_vals: Vec<f64> = keep.iter().map(|&i| boundary[i]).collect();
                let observed = smooth_7day(s).unwrap().slice(date(mon_start), mon_end).unwrap();
                detect_alarms(&observed, &b_dates, &b_vals, 3).unwrap().alarm_days.len()
            })
            .collect()
    };

    let mut wave_ok_seeds = 0;
    let mut calm_ok_seeds = 0;
    for &seed in &seeds {
        let wave = run_detector("2020-09-15", "2020-09-16", seed);
        if wave.iter().all(|&a| a >= 1) {
            wave_ok_seeds += 1;
        }
        let calm = run_detector("2020-08-15", "2020-08-16", seed);
        if calm.iter().all(|&a| a == 0) {
            calm_ok_seeds += 1;
        }
    }

    // GLR baseline: 100 replications against a known seasonal truth
    let origin = date("2018-01-01");
    let truth = GlrModel {
        beta: [3.0, 0.001, 0.2, 0.1],
        omega: GLR_OMEGA,
        harmonics: 1,
        c_gamma: GLR_C_GAMMA,
        origin,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(777);
    let pois = |mu: f64, rng: &mut ChaCha8Rng| -> f64 {
        rand_distr::Poisson::new(mu).unwrap().sample(rng)
    };
    let mut null_alarm_days = 0usize;
    let mut null_days = 0usize;
    let mut shift_hits = 0usize;
    let reps = 100;
    for _ in 0..reps {
        let train: Vec<f64> = (0..730)
            .map(|i| pois(truth.mean_at(origin + chrono::Duration::days(i)), &mut rng))
            .collect();
        let train = CaseSeries::new("g", 1, origin, train).unwrap();
        let base = glr_fit(&train).unwrap();
        let t0 = origin + chrono::Duration::days(730);

        let null: Vec<f64> = (0..15)
            .map(|i| pois(truth.mean_at(t0 + chrono::Duration::days(i)), &mut rng))
            .collect();
        let null = CaseSeries::new("g", 1, t0, null).unwrap();
        null_alarm_days += glr_detect(&null, &base, GLR_C_GAMMA).unwrap().alarm_days.len();
        null_days += 15;

        let onset = 4i64;
        let shifted: Vec<f64> = (0..15)
            .map(|i| {
                let mu = truth.mean_at(t0 + chrono::Duration::days(i));
                pois(if i >= onset { 5.0 * mu } else { mu }, &mut rng)
            })
            .collect();
        let shifted = CaseSeries::new("g", 1, t0, shifted).unwrap();
        let rep = glr_detect(&shifted, &base, GLR_C_GAMMA).unwrap();
        let onset_date = t0 + chrono::Duration::days(onset);
        if rep
            .alarm_days
            .iter()
            .any(|d| *d >= onset_date && *d <= onset_date + chrono::Duration::days(7))
        {
            shift_hits += 1;
        }
    }
    let null_rate = null_alarm_days as f64 / null_days as f64;

    let ok = wave_ok_seeds >= 3 && calm_ok_seeds >= 3 && null_rate <= 0.10 && shift_hits >= 95;
    report(
        7,
        ok,
        &format!(
            "wave alarms in all counties {wave_ok_seeds}/5 seeds, calm windows clean {calm_ok_seeds}/5, \
             GLR null per-day alarm rate {:.1}%, shift detected within 7 days {shift_hits}/{reps}",
            null_rate * 100.0
        ),
    );
}

#[test]
fn criterion_8_morans_i() {
    // bundled residual fixture
    let mut residuals = Vec::new();
    let mut regions = Vec::new();
    let mut rdr = csv::Reader::from_path(data_dir().join("nm_residuals.csv")).unwrap();
    for rec in rdr.records() {
        let rec = rec.unwrap();
        regions.push(rec[0].to_string());
        residuals.push(rec[1].parse::<f64>().unwrap());
    }
    let adj = load_adjacency(data_dir().join("nm_adjacency33.csv"), regions.clone()).unwrap();
    let n = regions.len();
    let mut dist = DMatrix::zeros(n, n);
    let idx: BTreeMap<&str, usize> =
        regions.iter().enumerate().map(|(i, r)| (r.as_str(), i)).collect();
    let mut rdr = csv::Reader::from_path(data_dir().join("nm_seat_distances.csv")).unwrap();
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let (i, j) = (idx[&rec[0]], idx[&rec[1]]);
        let d: f64 = rec[2].parse().unwrap();
        dist[(i, j)] = d;
        dist[(j, i)] = d;
    }
    let z_bin = morans_i(&residuals, &adj, MoranWeighting::Binary, None).unwrap().z;
    let z_mod = morans_i(&residuals, &adj, MoranWeighting::BinaryModified, Some(&dist))
        .unwrap()
        .z;
    let z_row = morans_i(&residuals, &adj, MoranWeighting::RowStandardised, None).unwrap().z;

    // IID null calibration on the same adjacency
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let trials = 200;
    let mut within = 0;
    for _ in 0..trials {
        let v: Vec<f64> = (0..n).map(|_| <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)).collect();
        if morans_i(&v, &adj, MoranWeighting::Binary, None).unwrap().z.abs() < 2.0 {
            within += 1;
        }
    }

    let ok = (z_bin - 3.44).abs() < 0.05
        && (z_mod - 2.76).abs() < 0.05
        && (z_row - 3.57).abs() < 0.05
        && within * 10 >= trials * 9;
    report(
        8,
        ok,
        &format!(
            "z = {z_bin:.3}/{z_mod:.3}/{z_row:.3} vs 3.44/2.76/3.57; null |z|<2 in {within}/{trials}"
        ),
    );
}

#[test]
fn criterion_9_distance_correlation() {
    // invariance properties
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let x: Vec<Vec<f64>> = (0..400).map(|_| vec![rng.gen_range(-3.0..3.0)]).collect();
    let self_d = dcor(&x, &x).unwrap();
    let y_aff: Vec<Vec<f64>> = x.iter().map(|v| vec![-2.5 * v[0] + 7.0]).collect();
    let affine_d = dcor(&x, &y_aff).unwrap();
    let indep: Vec<Vec<f64>> = (0..2000).map(|_| vec![rng.gen_range(-1.0..1.0)]).collect();
    let indep2: Vec<Vec<f64>> = (0..2000).map(|_| vec![rng.gen_range(-1.0..1.0)]).collect();
    let null_d = dcor(&indep, &indep2).unwrap();

    // Bernalillo single-county chain reproduces the reference dependence
    let series = nm_series(&["bernalillo"], "2020-06-01", "2020-09-15");
    let (chain, _post) = fit(&series, None, true, 21);
    let t = dcor_table(&chain, DcorGrouping::Individual).unwrap();
    let at = |a: &str, b: &str| {
        let i = t.labels.iter().position(|l| l == a).unwrap();
        let j = t.labels.iter().position(|l| l == b).unwrap();
        t.values[i][j]
    };
    let k_theta = at("bernalillo.k", "bernalillo.theta");
    let t0_k = at("bernalillo.t0", "bernalillo.k");

    let ok = (self_d - 1.0).abs() < 1e-10
        && (affine_d - 1.0).abs() < 1e-10
        && null_d < 0.05
        && (k_theta - 0.9).abs() <= 0.1
        && (t0_k - 0.9).abs() <= 0.1;
    report(
        9,
        ok,
        &format!(
            "self {self_d:.4}, affine {affine_d:.4}, null {null_d:.3}, dcor(k,theta) {k_theta:.2}, dcor(t0,k) {t0_k:.2}"
        ),
    );
}

#[test]
fn criterion_10_crps_unit_oracle() {
    let degenerate_zero = crps(&[3.0, 3.0, 3.0], 3.0).unwrap();
    let degenerate_dist = crps(&[5.0, 5.0], 2.0).unwrap();
    let hand = crps(&[0.0, 2.0], 1.0).unwrap();
    let ok = degenerate_zero == 0.0 && degenerate_dist == 3.0 && (hand - 0.5).abs() < 1e-15;
    report(
        10,
        ok,
        &format!("degenerate {degenerate_zero} / {degenerate_dist}, hand case {hand}"),
    );
}
