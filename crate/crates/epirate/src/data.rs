//! Case-count ingestion, smoothing, normalization and study windows.
//!
//! File formats:
//! - case CSV: header `date,region,count`, ISO-8601 dates, UTF-8;
//! - adjacency CSV: header `region_a,region_b`, each undirected edge once;
//! - population CSV: header `region,population`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Daily case counts for one areal unit, dense over its date range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseSeries {
    pub region_id: String,
    pub population: u64,
    /// Strictly increasing, step of exactly one day.
    pub dates: Vec<NaiveDate>,
    /// Non-negative, same length as `dates`.
    pub counts: Vec<f64>,
}

impl CaseSeries {
    pub fn new(
        region_id: impl Into<String>,
        population: u64,
        start: NaiveDate,
        counts: Vec<f64>,
    ) -> Result<Self> {
        if population == 0 {
            return Err(Error::InvalidInput("population must be positive".into()));
        }
        if counts.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::InvalidInput("counts must be finite and >= 0".into()));
        }
        let dates = (0..counts.len() as i64)
            .map(|i| start + chrono::Duration::days(i))
            .collect();
        Ok(CaseSeries {
            region_id: region_id.into(),
            population,
            dates,
            counts,
        })
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn start(&self) -> NaiveDate {
        self.dates[0]
    }

    /// Restrict to the closed date interval `[from, to]`.
    pub fn slice(&self, from: NaiveDate, to: NaiveDate) -> Result<CaseSeries> {
        let lo = self
            .dates
            .iter()
            .position(|d| *d >= from)
            .ok_or_else(|| Error::Alignment(format!("{from} not covered by series")))?;
        let hi = self
            .dates
            .iter()
            .rposition(|d| *d <= to)
            .ok_or_else(|| Error::Alignment(format!("{to} not covered by series")))?;
        if lo > hi {
            return Err(Error::Alignment(format!("empty window {from}..{to}")));
        }
        Ok(CaseSeries {
            region_id: self.region_id.clone(),
            population: self.population,
            dates: self.dates[lo..=hi].to_vec(),
            counts: self.counts[lo..=hi].to_vec(),
        })
    }
}

/// Region topology: binary neighbor matrix and neighbor counts.
#[derive(Debug, Clone, PartialEq)]
pub struct Adjacency {
    pub region_ids: Vec<String>,
    /// Symmetric 0/1 matrix with zero diagonal, stored row-major.
    pub w: Vec<Vec<u8>>,
    /// Row sums of `w`; every entry >= 1.
    pub g: Vec<usize>,
}

impl Adjacency {
    /// Build from an undirected edge list over the given region universe.
    pub fn from_edges(region_ids: Vec<String>, edges: &[(String, String)]) -> Result<Self> {
        let index: BTreeMap<&str, usize> = region_ids
            .iter()
            .enumerate()
            .map(|(i, r)| (r.as_str(), i))
            .collect();
        let n = region_ids.len();
        let mut w = vec![vec![0u8; n]; n];
        for (a, b) in edges {
            let ia = *index
                .get(a.as_str())
                .ok_or_else(|| Error::RegionNotFound(a.clone()))?;
            let ib = *index
                .get(b.as_str())
                .ok_or_else(|| Error::RegionNotFound(b.clone()))?;
            if ia == ib {
                return Err(Error::InvalidInput(format!("self-edge on region {a}")));
            }
            w[ia][ib] = 1;
            w[ib][ia] = 1;
        }
        let g: Vec<usize> = w.iter().map(|row| row.iter().map(|&x| x as usize).sum()).collect();
        if let Some(i) = g.iter().position(|&gi| gi == 0) {
            return Err(Error::InvalidInput(format!(
                "region {} is isolated (no neighbors)",
                region_ids[i]
            )));
        }
        Ok(Adjacency { region_ids, w, g })
    }

    pub fn n_regions(&self) -> usize {
        self.region_ids.len()
    }
}

/// Calibration window plus forecast horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyWindow {
    pub calibration_start: NaiveDate,
    pub calibration_end: NaiveDate,
    pub forecast_horizon: u32,
}

impl StudyWindow {
    /// Forecasts beyond 14 days carry no incubation information and are refused.
    pub const MAX_HORIZON: u32 = 14;

    pub fn new(start: NaiveDate, end: NaiveDate, horizon: u32) -> Result<Self> {
        if end <= start {
            return Err(Error::InvalidInput(
                "calibration_end must be after calibration_start".into(),
            ));
        }
        if horizon > Self::MAX_HORIZON {
            return Err(Error::InvalidInput(format!(
                "forecast horizon {horizon} exceeds the {}-day cap: observations only carry \
                 information about infections up to roughly one incubation period \
                 (~16 days) in the past",
                Self::MAX_HORIZON
            )));
        }
        Ok(StudyWindow {
            calibration_start: start,
            calibration_end: end,
            forecast_horizon: horizon,
        })
    }

    pub fn n_calibration_days(&self) -> usize {
        (self.calibration_end - self.calibration_start).num_days() as usize + 1
    }
}

/// Ingestion output: one dense series per region plus densification warnings.
#[derive(Debug, Clone)]
pub struct IngestReport {
    pub series: Vec<CaseSeries>,
    /// One warning per day that was absent in the source and filled with 0.
    pub warnings: Vec<String>,
}

/// Load `date,region,count` rows into dense per-region series.
///
/// Missing days inside a region's covered range are genuine zeros more often
/// than dropouts in this kind of reporting data, so they are filled with 0
/// and flagged rather than interpolated.
pub fn load_cases(
    path: impl AsRef<Path>,
    populations: &BTreeMap<String, u64>,
    region_filter: Option<&BTreeSet<String>>,
) -> Result<IngestReport> {
    let mut rdr = csv::Reader::from_path(path.as_ref())?;
    let mut raw: BTreeMap<String, BTreeMap<NaiveDate, f64>> = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2; // header is line 1
        let rec = rec?;
        let parse = |msg: &str| Error::Parse {
            line,
            msg: msg.to_string(),
        };
        if rec.len() < 3 {
            return Err(parse("expected 3 fields: date,region,count"));
        }
        let date = NaiveDate::parse_from_str(&rec[0], "%Y-%m-%d")
            .map_err(|e| parse(&format!("bad date {:?}: {e}", &rec[0])))?;
        let region = rec[1].trim().to_string();
        let count: f64 = rec[2]
            .trim()
            .parse()
            .map_err(|e| parse(&format!("bad count {:?}: {e}", &rec[2])))?;
        if !count.is_finite() || count < 0.0 {
            return Err(parse(&format!("count {count} is negative or non-finite")));
        }
        if let Some(filter) = region_filter {
            if !filter.contains(&region) {
                continue;
            }
        }
        raw.entry(region).or_default().insert(date, count);
    }

    if let Some(filter) = region_filter {
        for r in filter {
            if !raw.contains_key(r) {
                return Err(Error::RegionNotFound(r.clone()));
            }
        }
    }

    let mut series = Vec::new();
    let mut warnings = Vec::new();
    for (region, days) in raw {
        let population = *populations
            .get(&region)
            .ok_or_else(|| Error::RegionNotFound(format!("{region} (no population entry)")))?;
        let start = *days.keys().next().unwrap();
        let end = *days.keys().next_back().unwrap();
        let n = (end - start).num_days() as usize + 1;
        let mut counts = vec![0.0; n];
        for i in 0..n {
            let d = start + chrono::Duration::days(i as i64);
            match days.get(&d) {
                Some(c) => counts[i] = *c,
                None => warnings.push(format!("{region}: missing day {d} filled with 0")),
            }
        }
        series.push(CaseSeries::new(region, population, start, counts)?);
    }
    Ok(IngestReport { series, warnings })
}

/// Write series back out in the same `date,region,count` format.
pub fn write_cases(path: impl AsRef<Path>, series: &[CaseSeries]) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path.as_ref())?;
    wtr.write_record(["date", "region", "count"])?;
    for s in series {
        for (d, c) in s.dates.iter().zip(&s.counts) {
            wtr.write_record([d.to_string(), s.region_id.clone(), c.to_string()])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Load `region,population`.
pub fn load_populations(path: impl AsRef<Path>) -> Result<BTreeMap<String, u64>> {
    let mut rdr = csv::Reader::from_path(path.as_ref())?;
    let mut out = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec?;
        let pop: u64 = rec[1].trim().parse().map_err(|e| Error::Parse {
            line,
            msg: format!("bad population {:?}: {e}", &rec[1]),
        })?;
        out.insert(rec[0].trim().to_string(), pop);
    }
    Ok(out)
}

/// Load `region_a,region_b` edges; the region universe comes from the caller.
pub fn load_adjacency(path: impl AsRef<Path>, region_ids: Vec<String>) -> Result<Adjacency> {
    let mut rdr = csv::Reader::from_path(path.as_ref())?;
    let universe: BTreeSet<&str> = region_ids.iter().map(|s| s.as_str()).collect();
    let mut edges = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let a = rec[0].trim().to_string();
        let b = rec[1].trim().to_string();
        // edges outside the requested universe are irrelevant to this run
        if universe.contains(a.as_str()) && universe.contains(b.as_str()) {
            edges.push((a, b));
        }
    }
    Adjacency::from_edges(region_ids, &edges)
}

/// Trailing 7-day running average; the first 6 entries average over the
/// available prefix. Trailing (not centered) so no future data is used,
/// matching an online detector.
pub fn smooth_7day(series: &CaseSeries) -> Result<CaseSeries> {
    if series.len() < 7 {
        return Err(Error::InvalidInput(format!(
            "series {} has {} days, need >= 7 for smoothing",
            series.region_id,
            series.len()
        )));
    }
    let counts: Vec<f64> = (0..series.len())
        .map(|i| {
            let lo = i.saturating_sub(6);
            let window = &series.counts[lo..=i];
            window.iter().sum::<f64>() / window.len() as f64
        })
        .collect();
    Ok(CaseSeries {
        region_id: series.region_id.clone(),
        population: series.population,
        dates: series.dates.clone(),
        counts,
    })
}

/// Counts divided by population. Used for likelihood evaluation only; the
/// model parameter N stays in raw-count units.
pub fn normalize(series: &CaseSeries) -> Vec<f64> {
    let p = series.population as f64;
    series.counts.iter().map(|c| c / p).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn date(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    fn series(counts: Vec<f64>) -> CaseSeries {
        CaseSeries::new("a", 100_000, date("2020-06-01"), counts).unwrap()
    }

    #[test]
    fn smooth_constant_is_identity() {
        let s = series(vec![3.0; 20]);
        let sm = smooth_7day(&s).unwrap();
        assert_eq!(sm.counts, vec![3.0; 20]);
    }

    #[test]
    fn smooth_trailing_window() {
        let s = series(vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 7.0]);
        let sm = smooth_7day(&s).unwrap();
        assert!((sm.counts[6] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn smooth_impulse_prefix_means() {
        let s = series(vec![7.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let sm = smooth_7day(&s).unwrap();
        let expect = [7.0, 3.5, 7.0 / 3.0, 1.75, 1.4, 7.0 / 6.0, 1.0, 0.0];
        for (got, want) in sm.counts.iter().zip(expect) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn smooth_rejects_short_series() {
        let s = series(vec![1.0; 6]);
        assert!(smooth_7day(&s).is_err());
    }

    #[test]
    fn normalize_divides_by_population() {
        let s = series(vec![10.0]);
        assert_eq!(normalize(&s), vec![1e-4]);
        let z = series(vec![0.0, 0.0]);
        assert_eq!(normalize(&z), vec![0.0, 0.0]);
    }

    #[test]
    fn normalize_bernalillo_counts() {
        let s = CaseSeries::new("bernalillo", 679_121, date("2020-06-01"), vec![6.0, 12.0]).unwrap();
        let v = normalize(&s);
        assert!((v[0] - 8.835e-6).abs() < 1e-8);
        assert!((v[1] - 1.767e-5).abs() < 1e-8);
    }

    #[test]
    fn load_dense_and_filtered() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cases.csv");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "date,region,count").unwrap();
        for i in 0..5 {
            let d = date("2020-06-01") + chrono::Duration::days(i);
            writeln!(f, "{d},a,{i}").unwrap();
            writeln!(f, "{d},b,{}", 2 * i).unwrap();
        }
        let pops = BTreeMap::from([("a".to_string(), 1000u64), ("b".to_string(), 2000u64)]);
        let rep = load_cases(&path, &pops, None).unwrap();
        assert_eq!(rep.series.len(), 2);
        assert_eq!(rep.series[0].len(), 5);
        assert!(rep.warnings.is_empty());

        let filter = BTreeSet::from(["b".to_string()]);
        let rep = load_cases(&path, &pops, Some(&filter)).unwrap();
        assert_eq!(rep.series.len(), 1);
        assert_eq!(rep.series[0].region_id, "b");

        let missing = BTreeSet::from(["nowhere".to_string()]);
        assert!(matches!(
            load_cases(&path, &pops, Some(&missing)),
            Err(Error::RegionNotFound(_))
        ));
    }

    #[test]
    fn missing_day_densified_with_warning() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cases.csv");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "date,region,count").unwrap();
        writeln!(f, "2020-06-01,a,1").unwrap();
        writeln!(f, "2020-06-03,a,3").unwrap();
        let pops = BTreeMap::from([("a".to_string(), 1000u64)]);
        let rep = load_cases(&path, &pops, None).unwrap();
        assert_eq!(rep.series[0].len(), 3);
        assert_eq!(rep.series[0].counts, vec![1.0, 0.0, 3.0]);
        assert_eq!(rep.warnings.len(), 1);
    }

    #[test]
    fn malformed_row_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cases.csv");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "date,region,count").unwrap();
        writeln!(f, "2020-06-01,a,1").unwrap();
        writeln!(f, "not-a-date,a,2").unwrap();
        let pops = BTreeMap::from([("a".to_string(), 1000u64)]);
        match load_cases(&path, &pops, None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn ingestion_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cases.csv");
        let s = series(vec![1.0, 2.5, 0.0, 4.0, 5.0, 6.0, 7.0]);
        write_cases(&path, std::slice::from_ref(&s)).unwrap();
        let pops = BTreeMap::from([("a".to_string(), 100_000u64)]);
        let rep = load_cases(&path, &pops, None).unwrap();
        assert_eq!(rep.series[0], s);
    }

    #[test]
    fn adjacency_invariants() {
        let ids = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let edges = vec![
            ("a".to_string(), "b".to_string()),
            ("a".to_string(), "c".to_string()),
        ];
        let adj = Adjacency::from_edges(ids, &edges).unwrap();
        assert_eq!(adj.g, vec![2, 1, 1]);
        for i in 0..3 {
            assert_eq!(adj.w[i][i], 0);
            for j in 0..3 {
                assert_eq!(adj.w[i][j], adj.w[j][i]);
            }
        }
        // isolated region rejected
        let ids = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let edges = vec![("a".to_string(), "b".to_string())];
        assert!(Adjacency::from_edges(ids, &edges).is_err());
    }

    #[test]
    fn window_caps_horizon() {
        assert!(StudyWindow::new(date("2020-06-01"), date("2020-09-15"), 14).is_ok());
        assert!(StudyWindow::new(date("2020-06-01"), date("2020-09-15"), 15).is_err());
        assert!(StudyWindow::new(date("2020-06-01"), date("2020-06-01"), 7).is_err());
        let w = StudyWindow::new(date("2020-06-01"), date("2020-09-15"), 14).unwrap();
        assert_eq!(w.n_calibration_days(), 107);
    }

    #[test]
    fn smooth_commutes_with_scaling_and_normalize() {
        let s = series(vec![1.0, 4.0, 2.0, 8.0, 0.0, 3.0, 5.0, 9.0, 2.0]);
        let mut scaled = s.clone();
        for c in &mut scaled.counts {
            *c *= 3.0;
        }
        let a = smooth_7day(&scaled).unwrap();
        let b = smooth_7day(&s).unwrap();
        for (x, y) in a.counts.iter().zip(&b.counts) {
            assert!((x - 3.0 * y).abs() < 1e-12);
        }
        // normalize(smooth(x)) == smooth(normalize(x))
        let lhs = normalize(&b);
        let mut pre = s.clone();
        let p = pre.population as f64;
        for c in &mut pre.counts {
            *c /= p;
        }
        let rhs = smooth_7day(&pre).unwrap().counts;
        for (x, y) in lhs.iter().zip(&rhs) {
            assert!((x - y).abs() < 1e-15);
        }
    }
}
