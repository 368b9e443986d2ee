//! Posterior-dependence diagnostics via distance correlation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::Chain;

/// Maximum number of chain rows used per dcor evaluation; the statistic is
/// O(n^2) in memory and time, so longer chains are deterministically
/// subsampled with an even stride.
pub const DCOR_MAX_ROWS: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DcorGrouping {
    /// Every scalar parameter against every other.
    Individual,
    /// Multivariate blocks: one 4-column block per region plus the spatial
    /// pair (log_tau2, lambda) and the error-model pair (log sigmas).
    ByComponent,
}

/// Symmetric matrix of pairwise distance correlations between labelled
/// variable groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DcorMatrix {
    pub labels: Vec<String>,
    /// `values[i][j]` = dcor between group i and group j; NaN where either
    /// group is constant (dependence undefined), mirrored in `degenerate`.
    pub values: Vec<Vec<f64>>,
    pub degenerate: Vec<bool>,
    pub n_rows_used: usize,
}

impl DcorMatrix {
    /// One-decimal rounding used for reporting; the estimator's sampling
    /// noise at these chain lengths swamps finer digits.
    pub fn rounded(&self) -> Vec<Vec<f64>> {
        self.values
            .iter()
            .map(|row| row.iter().map(|v| (v * 10.0).round() / 10.0).collect())
            .collect()
    }
}

fn pairwise_distances(x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let dist: f64 = x[i]
                .iter()
                .zip(&x[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            d[i][j] = dist;
            d[j][i] = dist;
        }
    }
    d
}

fn double_center(d: &mut [Vec<f64>]) {
    let n = d.len();
    let row_means: Vec<f64> = d.iter().map(|r| r.iter().sum::<f64>() / n as f64).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    for i in 0..n {
        for j in 0..n {
            d[i][j] = d[i][j] - row_means[i] - row_means[j] + grand;
        }
    }
}

/// Sample distance correlation between two (possibly multivariate)
/// observations matrices with matching row counts.
///
/// Returns `Err(UndefinedStatistic)` when either input has zero distance
/// variance (a constant sample), for which dependence is undefined.
pub fn dcor(x: &[Vec<f64>], y: &[Vec<f64>]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Alignment(format!(
            "dcor row counts differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::InvalidInput("dcor needs at least 2 rows".into()));
    }
    let mut a = pairwise_distances(x);
    let mut b = pairwise_distances(y);
    double_center(&mut a);
    double_center(&mut b);
    let n2 = (x.len() * x.len()) as f64;
    let mut vxy = 0.0;
    let mut vxx = 0.0;
    let mut vyy = 0.0;
    for i in 0..x.len() {
        for j in 0..x.len() {
            vxy += a[i][j] * b[i][j];
            vxx += a[i][j] * a[i][j];
            vyy += b[i][j] * b[i][j];
        }
    }
    vxy /= n2;
    vxx /= n2;
    vyy /= n2;
    if vxx <= 0.0 || vyy <= 0.0 {
        return Err(Error::UndefinedStatistic(
            "distance variance is zero (constant sample)".into(),
        ));
    }
    // tiny negative products can arise from cancellation
    Ok((vxy.max(0.0) / (vxx * vyy).sqrt()).sqrt().clamp(0.0, 1.0))
}

fn subsample_rows(chain: &Chain) -> Vec<usize> {
    let n = chain.n_kept();
    if n <= DCOR_MAX_ROWS {
        (0..n).collect()
    } else {
        // even deterministic stride over the kept samples
        (0..DCOR_MAX_ROWS)
            .map(|i| i * n / DCOR_MAX_ROWS)
            .collect()
    }
}

fn group_columns(chain: &Chain, grouping: DcorGrouping) -> Vec<(String, Vec<usize>)> {
    match grouping {
        DcorGrouping::Individual => chain
            .names
            .iter()
            .enumerate()
            .map(|(j, n)| (n.clone(), vec![j]))
            .collect(),
        DcorGrouping::ByComponent => {
            let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
            for (j, name) in chain.names.iter().enumerate() {
                if let Some((region, _)) = name.rsplit_once('.') {
                    match groups.iter_mut().find(|(g, _)| g == region) {
                        Some((_, cols)) => cols.push(j),
                        None => groups.push((region.to_string(), vec![j])),
                    }
                }
            }
            let err: Vec<usize> = chain
                .names
                .iter()
                .enumerate()
                .filter(|(_, n)| n.starts_with("log_sigma"))
                .map(|(j, _)| j)
                .collect();
            if !err.is_empty() {
                groups.push(("ErrM".into(), err));
            }
            let spc: Vec<usize> = chain
                .names
                .iter()
                .enumerate()
                .filter(|(_, n)| *n == "log_tau2" || *n == "lambda")
                .map(|(j, _)| j)
                .collect();
            if !spc.is_empty() {
                groups.push(("SpC".into(), spc));
            }
            groups
        }
    }
}

/// Pairwise distance-correlation table over chain parameters.
pub fn dcor_table(chain: &Chain, grouping: DcorGrouping) -> Result<DcorMatrix> {
    let rows = subsample_rows(chain);
    let groups = group_columns(chain, grouping);
    if groups.is_empty() {
        return Err(Error::InvalidInput("chain has no parameters".into()));
    }
    let data: Vec<Vec<Vec<f64>>> = groups
        .iter()
        .map(|(_, cols)| {
            rows.iter()
                .map(|&i| cols.iter().map(|&j| chain.samples[i][j]).collect())
                .collect()
        })
        .collect();
    let k = groups.len();
    let mut values = vec![vec![0.0; k]; k];
    let mut degenerate = vec![false; k];
    for i in 0..k {
        match dcor(&data[i], &data[i]) {
            Ok(_) => values[i][i] = 1.0,
            Err(Error::UndefinedStatistic(_)) => {
                degenerate[i] = true;
                values[i][i] = f64::NAN;
            }
            Err(e) => return Err(e),
        }
    }
    for i in 0..k {
        for j in (i + 1)..k {
            let v = if degenerate[i] || degenerate[j] {
                f64::NAN
            } else {
                dcor(&data[i], &data[j])?
            };
            values[i][j] = v;
            values[j][i] = v;
        }
    }
    Ok(DcorMatrix {
        labels: groups.into_iter().map(|(l, _)| l).collect(),
        values,
        degenerate,
        n_rows_used: rows.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn col(v: &[f64]) -> Vec<Vec<f64>> {
        v.iter().map(|&x| vec![x]).collect()
    }

    #[test]
    fn self_dependence_is_one() {
        let x: Vec<f64> = (0..200).map(|i| (i as f64).sin() * 3.0 + i as f64).collect();
        let v = dcor(&col(&x), &col(&x)).unwrap();
        assert!((v - 1.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn affine_images_have_dcor_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<f64> = (0..300).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let y: Vec<f64> = x.iter().map(|v| -2.5 * v + 7.0).collect();
        let v = dcor(&col(&x), &col(&y)).unwrap();
        assert!((v - 1.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn independence_null_is_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 2000;
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v = dcor(&col(&x), &col(&y)).unwrap();
        assert!(v < 0.05, "{v}");
    }

    #[test]
    fn nonlinear_dependence_detected() {
        // Pearson correlation of x and x^2 on symmetric support is 0, but
        // dcor must see the dependence
        let x: Vec<f64> = (0..1001).map(|i| -1.0 + 0.002 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| v * v).collect();
        let v = dcor(&col(&x), &col(&y)).unwrap();
        assert!(v > 0.3, "{v}");
    }

    #[test]
    fn symmetry_and_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x: Vec<f64> = (0..150).map(|_| rng.gen_range(0.0..1.0)).collect();
        let y: Vec<f64> = x.iter().map(|v| v.powi(3) + rng.gen_range(-0.1..0.1)).collect();
        let a = dcor(&col(&x), &col(&y)).unwrap();
        let b = dcor(&col(&y), &col(&x)).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn orthogonal_invariance_multivariate() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x: Vec<Vec<f64>> = (0..200)
            .map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
            .collect();
        let y: Vec<Vec<f64>> = x.iter().map(|p| vec![p[0] + p[1], rng.gen_range(-0.2..0.2)]).collect();
        let base = dcor(&x, &y).unwrap();
        // rotate x by 30 degrees: Euclidean distances unchanged
        let (c, s) = (30f64.to_radians().cos(), 30f64.to_radians().sin());
        let xr: Vec<Vec<f64>> = x
            .iter()
            .map(|p| vec![c * p[0] - s * p[1], s * p[0] + c * p[1]])
            .collect();
        let rot = dcor(&xr, &y).unwrap();
        assert!((base - rot).abs() < 1e-10, "{base} vs {rot}");
    }

    #[test]
    fn constant_sample_flagged() {
        let x = col(&[1.0; 50]);
        let y: Vec<Vec<f64>> = (0..50).map(|i| vec![i as f64]).collect();
        assert!(matches!(dcor(&x, &y), Err(Error::UndefinedStatistic(_))));
    }

    fn toy_chain(names: Vec<&str>, samples: Vec<Vec<f64>>) -> Chain {
        Chain {
            names: names.into_iter().map(String::from).collect(),
            log_post: vec![0.0; samples.len()],
            samples,
            acceptance_rate: 0.25,
            seed: 0,
            n_steps: 0,
            burn_in: 0,
            thin: 1,
            proposal_cov_diag: vec![],
        }
    }

    #[test]
    fn table_grouping_and_degenerate_flag() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let samples: Vec<Vec<f64>> = (0..300)
            .map(|_| {
                let k: f64 = rng.gen_range(1.0..3.0);
                // a.theta strongly tied to a.k; a.N constant
                vec![rng.gen_range(-1.0..1.0), k, 10.0 / k, 5.0, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]
            })
            .collect();
        let chain = toy_chain(
            vec!["a.t0", "a.k", "a.theta", "a.N", "log_sigma_a", "log_sigma_m"],
            samples,
        );
        let t = dcor_table(&chain, DcorGrouping::Individual).unwrap();
        assert_eq!(t.labels.len(), 6);
        let ik = t.labels.iter().position(|l| l == "a.k").unwrap();
        let ith = t.labels.iter().position(|l| l == "a.theta").unwrap();
        let in_ = t.labels.iter().position(|l| l == "a.N").unwrap();
        assert!(t.values[ik][ith] > 0.9, "{}", t.values[ik][ith]);
        assert!(t.degenerate[in_] && t.values[in_][ik].is_nan());
        // symmetry
        assert_eq!(t.values[ik][ith], t.values[ith][ik]);

        let g = dcor_table(&chain, DcorGrouping::ByComponent).unwrap();
        assert_eq!(g.labels, vec!["a".to_string(), "ErrM".to_string()]);
        assert!((g.values[0][0] - 1.0).abs() < 1e-12);
        // the region block vs independent error block should be weak
        assert!(g.values[0][1] < 0.2, "{}", g.values[0][1]);
    }

    #[test]
    fn rounding_is_one_decimal() {
        let chain = toy_chain(
            vec!["x", "y"],
            (0..100).map(|i| vec![i as f64, (i as f64).sqrt()]).collect(),
        );
        let t = dcor_table(&chain, DcorGrouping::Individual).unwrap();
        for row in t.rounded() {
            for v in row {
                assert!((v * 10.0 - (v * 10.0).round()).abs() < 1e-12);
            }
        }
    }
}
