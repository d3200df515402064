//! Seeded Monte Carlo over grids of `n`.
//!
//! Every trial derives its seed from `(base_seed, n, trial)`, runs the full
//! pipeline on an unconditioned sample, checks the row-level identities and
//! produces one CSV row. Failures (disconnected samples, no large cusp) are
//! recorded with a status instead of being resampled.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use belyi_core::cheeger_cut::{
    area_defect, cheeger_upper_bound, sum_degrees_i1_bound_check, CutError, Division,
};
use belyi_core::cusp_geometry::partition_cusps;
use belyi_core::farey_tiling::{classify_segments, Fraction};
use belyi_core::ribbon_graph::{sample, FaceDecomposition};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::Error;

pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: &str = "schema_version,n,seed,trial,status,lht,genus,connected,min_d,max_d,sum_d,num_i1,boundary_len,area_a,area_b,h_upper,s2_size,wall_time_ms";

/// Relative tolerance for `area_a + area_b = 2πn` in the row checks.
pub const AREA_TOLERANCE: f64 = 1e-9;

/// splitmix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial seed. Stable across platforms and releases.
pub fn trial_seed(base_seed: u64, n: usize, trial: usize) -> u64 {
    mix(mix(mix(base_seed) ^ n as u64) ^ trial as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialStatus {
    Ok,
    Disconnected,
    EmptyI1,
    Degenerate,
    InvariantFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub schema_version: u32,
    pub n: usize,
    pub seed: u64,
    pub trial: usize,
    pub status: TrialStatus,
    pub lht: usize,
    pub genus: Option<u64>,
    pub connected: bool,
    pub min_d: usize,
    pub max_d: usize,
    pub sum_d: usize,
    pub num_i1: Option<usize>,
    pub boundary_len: Option<f64>,
    pub area_a: Option<f64>,
    pub area_b: Option<f64>,
    pub h_upper: Option<f64>,
    pub s2_size: Option<usize>,
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub base_seed: u64,
    pub y_factor: f64,
    /// Horoball length for the segment classification; `None` skips it.
    pub l: Option<Fraction>,
    /// Constant `c` of the `LHT <= c ln n` hypothesis in the row checks.
    pub c: f64,
    /// Record wall-clock time per trial; off gives byte-identical reruns.
    pub timing: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            n_values: vec![100],
            trials: 10,
            base_seed: 0,
            y_factor: 1.0,
            l: Some(Fraction::integer(4)),
            c: 10.0,
            timing: true,
        }
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.n_values.is_empty() {
            return Err(Error::Config("n grid is empty".into()));
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| n < 3) {
            return Err(Error::Config(format!("n = {n} is below 3")));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if !(self.y_factor > 0.0 && self.y_factor.is_finite()) {
            return Err(Error::Config(format!(
                "y-factor {} must be positive",
                self.y_factor
            )));
        }
        if !(self.c > 0.0) {
            return Err(Error::Config(format!("c = {} must be positive", self.c)));
        }
        Ok(())
    }
}

/// Identities every row must satisfy. Returns a description of the first
/// violation.
pub fn check_trial(
    fd: &FaceDecomposition,
    division: Option<&Division>,
    c: f64,
) -> Result<(), String> {
    let n = fd.n();
    if fd.sum_degrees() != 6 * n {
        return Err(format!(
            "sum of degrees {} != 6n = {}",
            fd.sum_degrees(),
            6 * n
        ));
    }
    if let Some(genus) = fd.genus() {
        if 2 - 2 * genus as i64 != fd.lht() as i64 - n as i64 {
            return Err(format!(
                "Euler identity fails: genus {genus}, lht {}",
                fd.lht()
            ));
        }
    }
    if let Some(div) = division {
        if div.boundary_segments.len() > 2 * n {
            return Err(format!(
                "{} boundary segments > 2n",
                div.boundary_segments.len()
            ));
        }
        let mut per_triangle = vec![0u8; 2 * n];
        for d in &div.boundary_segments {
            per_triangle[d.vertex()] += 1;
            if per_triangle[d.vertex()] > 1 {
                return Err(format!("triangle {} has two boundary segments", d.vertex()));
            }
        }
        let defect = area_defect(div);
        if defect > AREA_TOLERANCE * (2.0 * std::f64::consts::PI * n as f64).max(1.0) {
            return Err(format!("area defect {defect:e}"));
        }
    }
    if n >= 3 {
        let partition = partition_cusps(fd, n).map_err(|e| e.to_string())?;
        match sum_degrees_i1_bound_check(fd, &partition, c, n) {
            Ok(true) | Err(CutError::HypothesisNotMet { .. }) => {}
            Ok(false) => return Err("large-cusp mass below (6 - c/ln n) n".into()),
            Err(e) => return Err(e.to_string()),
        }
    }
    Ok(())
}

/// Runs one trial of the pipeline on `sample(n, seed)`.
pub fn run_trial(n: usize, trial: usize, config: &GridConfig) -> TrialRecord {
    let start = Instant::now();
    let seed = trial_seed(config.base_seed, n, trial);
    let g = sample(n, seed).expect("grid n is validated");
    let fd = g.faces();
    let mut record = TrialRecord {
        schema_version: SCHEMA_VERSION,
        n,
        seed,
        trial,
        status: TrialStatus::Ok,
        lht: fd.lht(),
        genus: fd.genus(),
        connected: fd.is_connected(),
        min_d: fd.min_degree(),
        max_d: fd.max_degree(),
        sum_d: fd.sum_degrees(),
        num_i1: None,
        boundary_len: None,
        area_a: None,
        area_b: None,
        h_upper: None,
        s2_size: None,
        wall_time_ms: 0,
    };
    let partition = partition_cusps(&fd, n).expect("grid n is validated");
    record.num_i1 = Some(partition.i1.len());
    if let Some(l) = config.l {
        record.s2_size = classify_segments(&g, &fd, &partition, l)
            .ok()
            .map(|c| c.s2.len());
    }
    let division = match cheeger_upper_bound(&g, &fd, config.y_factor) {
        Ok(div) => Some(div),
        Err(CutError::DisconnectedSurface) => {
            record.status = TrialStatus::Disconnected;
            None
        }
        Err(CutError::EmptyI1) => {
            record.status = TrialStatus::EmptyI1;
            None
        }
        Err(_) => {
            record.status = TrialStatus::Degenerate;
            None
        }
    };
    if let Some(div) = &division {
        record.boundary_len = Some(div.boundary_length);
        record.area_a = Some(div.area_a);
        record.area_b = Some(div.area_b);
        record.h_upper = Some(div.h_upper);
    }
    if check_trial(&fd, division.as_ref(), config.c).is_err() {
        record.status = TrialStatus::InvariantFailed;
    }
    if config.timing {
        record.wall_time_ms = start.elapsed().as_millis() as u64;
    }
    record
}

/// Runs every `(n, trial)` pair and streams rows to `out_dir/trials.csv`
/// in `(n, trial)` order, one grid point at a time. Also writes
/// `out_dir/summary.json`.
pub fn run_grid(config: &GridConfig, out_dir: &Path) -> Result<Vec<TrialRecord>, Error> {
    config.validate()?;
    fs::create_dir_all(out_dir)?;
    let mut writer =
        csv::Writer::from_writer(BufWriter::new(File::create(out_dir.join("trials.csv"))?));
    let mut records = Vec::with_capacity(config.n_values.len() * config.trials);
    for &n in &config.n_values {
        let rows: Vec<TrialRecord> = (0..config.trials)
            .into_par_iter()
            .map(|trial| run_trial(n, trial, config))
            .collect();
        for row in &rows {
            writer.serialize(row)?;
        }
        writer.flush()?;
        records.extend(rows);
    }
    drop(writer);
    let summary = GridSummary::new(&records, &SummaryParams::default());
    let mut out = BufWriter::new(File::create(out_dir.join("summary.json"))?);
    serde_json::to_writer_pretty(&mut out, &summary)?;
    writeln!(out)?;
    Ok(records)
}

pub fn read_records(path: &Path) -> Result<Vec<TrialRecord>, Error> {
    let mut reader = csv::Reader::from_path(path)?;
    Ok(reader.deserialize().collect::<Result<Vec<_>, _>>()?)
}

/// Least-squares fit of mean LHT against `ln n`: `(intercept, slope)`.
pub fn lht_growth_fit(records: &[TrialRecord]) -> Result<(f64, f64), Error> {
    let mut groups: Vec<(usize, Vec<f64>)> = Vec::new();
    for r in records {
        match groups.iter_mut().find(|(n, _)| *n == r.n) {
            Some((_, v)) => v.push(r.lht as f64),
            None => groups.push((r.n, vec![r.lht as f64])),
        }
    }
    if groups.len() < 3 || groups.iter().any(|(_, v)| v.len() < 30) {
        return Err(Error::InsufficientData(
            "need at least 3 values of n with 30 trials each".into(),
        ));
    }
    let points: Vec<(f64, f64)> = groups
        .iter()
        .map(|(n, v)| ((*n as f64).ln(), v.iter().sum::<f64>() / v.len() as f64))
        .collect();
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Ok((my - slope * mx, slope))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HFraction {
    pub fraction: f64,
    pub usable: usize,
    pub excluded: usize,
}

/// Fraction of usable rows (those with a cut) with `h_upper < threshold`.
pub fn h_fraction_below(records: &[TrialRecord], threshold: f64) -> Result<HFraction, Error> {
    if let Some(first) = records.first() {
        if records.iter().any(|r| r.n != first.n) {
            return Err(Error::InsufficientData("records span several n".into()));
        }
    }
    let usable: Vec<f64> = records.iter().filter_map(|r| r.h_upper).collect();
    if usable.is_empty() {
        return Err(Error::NoUsableRows);
    }
    let below = usable.iter().filter(|&&h| h < threshold).count();
    Ok(HFraction {
        fraction: below as f64 / usable.len() as f64,
        usable: usable.len(),
        excluded: records.len() - usable.len(),
    })
}

/// Fraction of rows with `min_d > l` and `lht <= c ln n`.
pub fn membership_fraction(records: &[TrialRecord], l: f64, c: f64) -> Option<f64> {
    if records.is_empty() {
        return None;
    }
    let inside = records
        .iter()
        .filter(|r| r.min_d as f64 > l && r.lht as f64 <= c * (r.n as f64).ln())
        .count();
    Some(inside as f64 / records.len() as f64)
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryParams {
    pub threshold: f64,
    pub membership_l: f64,
    pub membership_c: f64,
}

impl Default for SummaryParams {
    fn default() -> Self {
        Self {
            threshold: 2.0 / 3.0 + 0.05,
            membership_l: 2.0,
            membership_c: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryStats {
    pub n: usize,
    pub trials: usize,
    pub mean_lht: f64,
    pub var_lht: f64,
    pub threshold: f64,
    pub fraction_h_below: Option<f64>,
    pub usable: usize,
    pub median_h_upper: Option<f64>,
    pub membership_l: f64,
    pub membership_c: f64,
    pub membership_fraction: Option<f64>,
}

impl SummaryStats {
    pub fn new(n: usize, records: &[TrialRecord], params: &SummaryParams) -> Self {
        let lht: Vec<f64> = records.iter().map(|r| r.lht as f64).collect();
        let k = lht.len() as f64;
        let mean = lht.iter().sum::<f64>() / k;
        let var = if lht.len() > 1 {
            lht.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0)
        } else {
            0.0
        };
        let h = h_fraction_below(records, params.threshold).ok();
        let mut hs: Vec<f64> = records.iter().filter_map(|r| r.h_upper).collect();
        Self {
            n,
            trials: records.len(),
            mean_lht: mean,
            var_lht: var,
            threshold: params.threshold,
            fraction_h_below: h.map(|h| h.fraction),
            usable: hs.len(),
            median_h_upper: median(&mut hs),
            membership_l: params.membership_l,
            membership_c: params.membership_c,
            membership_fraction: membership_fraction(
                records,
                params.membership_l,
                params.membership_c,
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LhtFit {
    pub intercept: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSummary {
    pub schema_version: u32,
    pub lht_fit: Option<LhtFit>,
    pub points: Vec<SummaryStats>,
}

impl GridSummary {
    pub fn new(records: &[TrialRecord], params: &SummaryParams) -> Self {
        let mut ns: Vec<usize> = records.iter().map(|r| r.n).collect();
        ns.dedup();
        let points = ns
            .iter()
            .map(|&n| {
                let rows: Vec<TrialRecord> = records.iter().filter(|r| r.n == n).cloned().collect();
                SummaryStats::new(n, &rows, params)
            })
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            lht_fit: lht_growth_fit(records)
                .ok()
                .map(|(intercept, slope)| LhtFit { intercept, slope }),
            points,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(n: usize, trials: usize, lht: usize) -> Vec<TrialRecord> {
        (0..trials)
            .map(|trial| TrialRecord {
                schema_version: SCHEMA_VERSION,
                n,
                seed: 0,
                trial,
                status: TrialStatus::Ok,
                lht,
                genus: None,
                connected: true,
                min_d: 1,
                max_d: 6 * n,
                sum_d: 6 * n,
                num_i1: Some(1),
                boundary_len: Some(1.0),
                area_a: Some(1.0),
                area_b: Some(1.0),
                h_upper: Some(0.5),
                s2_size: None,
                wall_time_ms: 0,
            })
            .collect()
    }

    #[test]
    fn seeds_are_distinct_and_stable() {
        assert_eq!(trial_seed(1, 10, 0), trial_seed(1, 10, 0));
        assert_ne!(trial_seed(1, 10, 0), trial_seed(1, 10, 1));
        assert_ne!(trial_seed(1, 10, 0), trial_seed(1, 11, 0));
        assert_ne!(trial_seed(1, 10, 0), trial_seed(2, 10, 0));
        assert_eq!(mix(0), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn fit_on_constant_records_is_flat() {
        let mut records = synthetic(100, 30, 7);
        records.extend(synthetic(1000, 30, 7));
        assert!(matches!(
            lht_growth_fit(&records),
            Err(Error::InsufficientData(_))
        ));
        records.extend(synthetic(10_000, 30, 7));
        let (intercept, slope) = lht_growth_fit(&records).unwrap();
        assert!(slope.abs() < 1e-12);
        assert!((intercept - 7.0).abs() < 1e-9);
        let mut few = synthetic(100, 29, 7);
        few.extend(synthetic(1000, 30, 7));
        few.extend(synthetic(10_000, 30, 7));
        assert!(lht_growth_fit(&few).is_err());
    }

    #[test]
    fn fraction_below() {
        let mut records = synthetic(100, 10, 3);
        assert_eq!(
            h_fraction_below(&records, f64::INFINITY).unwrap().fraction,
            1.0
        );
        assert_eq!(h_fraction_below(&records, 0.5).unwrap().fraction, 0.0);
        records[0].h_upper = None;
        let h = h_fraction_below(&records, 1.0).unwrap();
        assert_eq!((h.usable, h.excluded), (9, 1));
        for r in &mut records {
            r.h_upper = None;
        }
        assert!(matches!(
            h_fraction_below(&records, 1.0),
            Err(Error::NoUsableRows)
        ));
        let mut mixed = synthetic(100, 2, 3);
        mixed.extend(synthetic(200, 2, 3));
        assert!(h_fraction_below(&mixed, 1.0).is_err());
    }

    #[test]
    fn medians() {
        assert_eq!(median(&mut []), None);
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), Some(2.5));
    }

    #[test]
    fn trial_rows_satisfy_identities() {
        let config = GridConfig::default();
        for trial in 0..20 {
            let r = run_trial(50, trial, &config);
            assert_eq!(r.sum_d, 300);
            assert_ne!(r.status, TrialStatus::InvariantFailed);
            if r.status == TrialStatus::Ok {
                assert!(r.h_upper.unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn config_validation() {
        let bad = GridConfig {
            n_values: vec![2],
            ..GridConfig::default()
        };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let bad = GridConfig {
            trials: 0,
            ..GridConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = GridConfig {
            y_factor: 0.0,
            ..GridConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
