//! Invariant suites behind `belyi verify`. Each suite stops at the first
//! counterexample.

use std::fmt;

use belyi_core::cheeger_cut::{cheeger_upper_bound, CutError};
use belyi_core::cusp_geometry::{partition_cusps, small_triangle_area, surface_area};
use belyi_core::farey_tiling::{
    classify_segments, count_intersecting, enumerate_level, m_bound, n_bound, vertices_after,
    Fraction,
};
use belyi_core::ribbon_graph::{sample, RibbonGraph};

use crate::experiments::{check_trial, trial_seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Farey,
    Division,
    All,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub checks: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub suite: &'static str,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub message: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.suite)?;
        if let Some(n) = self.n {
            write!(f, " n={n}")?;
        }
        if let Some(seed) = self.seed {
            write!(f, " seed={seed}")?;
        }
        write!(f, ": {}", self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub n_values: Vec<usize>,
    pub seeds: usize,
    pub base_seed: u64,
    pub y_factor: f64,
    pub c: f64,
    pub l: Fraction,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            n_values: vec![10, 100, 1000],
            seeds: 100,
            base_seed: 0,
            y_factor: 1.0,
            c: 10.0,
            l: Fraction::integer(4),
        }
    }
}

pub fn run(suite: Suite, config: &VerifyConfig) -> Result<Vec<SuiteReport>, Counterexample> {
    match suite {
        Suite::Identities => Ok(vec![identities(config)?]),
        Suite::Farey => Ok(vec![farey()?]),
        Suite::Division => Ok(vec![division(config)?]),
        Suite::All => Ok(vec![identities(config)?, farey()?, division(config)?]),
    }
}

fn golden() -> Result<(), String> {
    let torus =
        RibbonGraph::from_matching(1, &[(0, 3), (1, 4), (2, 5)]).map_err(|e| e.to_string())?;
    let sphere =
        RibbonGraph::from_matching(1, &[(0, 3), (1, 5), (2, 4)]).map_err(|e| e.to_string())?;
    let (t, s) = (torus.faces(), sphere.faces());
    if (t.lht(), t.genus()) != (1, Some(1)) {
        return Err(format!(
            "parallel theta graph: lht {}, genus {:?}",
            t.lht(),
            t.genus()
        ));
    }
    if (s.lht(), s.genus()) != (3, Some(0)) {
        return Err(format!(
            "opposite theta graph: lht {}, genus {:?}",
            s.lht(),
            s.genus()
        ));
    }
    Ok(())
}

/// Degree sum, Euler identity, area conservation, boundary counts, and the
/// large-cusp mass inequality on sampled surfaces.
pub fn identities(config: &VerifyConfig) -> Result<SuiteReport, Counterexample> {
    const SUITE: &str = "identities";
    let fail = |n, seed, message| Counterexample {
        suite: SUITE,
        n,
        seed,
        message,
    };
    golden().map_err(|m| fail(None, None, m))?;
    let mut checks = 1;
    for &n in &config.n_values {
        for trial in 0..config.seeds {
            let seed = trial_seed(config.base_seed, n, trial);
            let g = sample(n, seed).map_err(|e| fail(Some(n), Some(seed), e.to_string()))?;
            let fd = g.faces();
            let cusp_area: f64 = fd.degrees().map(|d| d as f64).sum();
            let total = 2.0 * n as f64 * small_triangle_area() + cusp_area;
            if (total - surface_area(n)).abs() > 1e-9 * surface_area(n).max(1.0) {
                return Err(fail(
                    Some(n),
                    Some(seed),
                    format!("area decomposition off by {}", total - surface_area(n)),
                ));
            }
            let division = if n >= 3 {
                match cheeger_upper_bound(&g, &fd, config.y_factor) {
                    Ok(d) => Some(d),
                    Err(CutError::EmptyI1 | CutError::DisconnectedSurface) => None,
                    Err(e) => return Err(fail(Some(n), Some(seed), e.to_string())),
                }
            } else {
                None
            };
            check_trial(&fd, division.as_ref(), config.c)
                .map_err(|m| fail(Some(n), Some(seed), m))?;
            checks += 1;
        }
    }
    Ok(SuiteReport {
        suite: SUITE,
        checks,
    })
}

/// Level sizes, gap bound and denominators for levels up to 12; intersection
/// counts against `N(l)` for `l = 1..30`; `N(4)` and `M(4)`.
pub fn farey() -> Result<SuiteReport, Counterexample> {
    const SUITE: &str = "farey";
    let fail = |message: String| Counterexample {
        suite: SUITE,
        n: None,
        seed: None,
        message,
    };
    let mut checks = 0;
    for m in 1..=12u32 {
        let level = enumerate_level(m).map_err(|e| fail(e.to_string()))?;
        if level.len() != 1 << (m - 1) {
            return Err(fail(format!("level {m} has {} triangles", level.len())));
        }
        if let Some(t) = level
            .iter()
            .find(|t| t.apex.denominator() < u64::from(m) + 1)
        {
            return Err(fail(format!(
                "level {m}: apex {} has a small denominator",
                t.apex
            )));
        }
        let vertices = vertices_after(m).map_err(|e| fail(e.to_string()))?;
        for w in vertices.windows(2) {
            let (a, b) = (u128::from(w[0].numerator()), u128::from(w[0].denominator()));
            let (c, d) = (u128::from(w[1].numerator()), u128::from(w[1].denominator()));
            if (c * b - a * d) * (u128::from(m) + 1) > b * d {
                return Err(fail(format!("gap {}..{} exceeds 1/{}", w[0], w[1], m + 1)));
            }
        }
        checks += 1;
    }
    for l in 1..=30u64 {
        let l = Fraction::integer(l);
        let count = count_intersecting(l).map_err(|e| fail(e.to_string()))?;
        let bound = n_bound(l).map_err(|e| fail(e.to_string()))?;
        if count > bound {
            return Err(fail(format!("l = {l}: {count} triangles > N(l) = {bound}")));
        }
        checks += 1;
    }
    let four = Fraction::integer(4);
    if n_bound(four) != Ok(7) || m_bound(four) != Ok(84) {
        return Err(fail(format!(
            "N(4) = {:?}, M(4) = {:?}",
            n_bound(four),
            m_bound(four)
        )));
    }
    Ok(SuiteReport {
        suite: SUITE,
        checks: checks + 1,
    })
}

/// Division structure and the segment-classification bound.
pub fn division(config: &VerifyConfig) -> Result<SuiteReport, Counterexample> {
    const SUITE: &str = "division";
    let fail = |n, seed, message| Counterexample {
        suite: SUITE,
        n: Some(n),
        seed: Some(seed),
        message,
    };
    let big_m = m_bound(config.l).map_err(|e| Counterexample {
        suite: SUITE,
        n: None,
        seed: None,
        message: e.to_string(),
    })?;
    let mut checks = 0;
    for &n in config.n_values.iter().filter(|&&n| n >= 3) {
        for trial in 0..config.seeds {
            let seed = trial_seed(config.base_seed, n, trial);
            let g = sample(n, seed).map_err(|e| fail(n, seed, e.to_string()))?;
            let fd = g.faces();
            let partition = partition_cusps(&fd, n).map_err(|e| fail(n, seed, e.to_string()))?;
            let classes = classify_segments(&g, &fd, &partition, config.l)
                .map_err(|e| fail(n, seed, e.to_string()))?;
            if classes.s2.len() as u64 > big_m * fd.lht() as u64 {
                return Err(fail(
                    n,
                    seed,
                    format!("|S2| = {} > M(l) LHT", classes.s2.len()),
                ));
            }
            let div = match cheeger_upper_bound(&g, &fd, config.y_factor) {
                Ok(d) => d,
                Err(CutError::EmptyI1 | CutError::DisconnectedSurface) => continue,
                Err(e) => return Err(fail(n, seed, e.to_string())),
            };
            for cut in &div.cuts {
                if (cut.side1_area() + cut.side2_area() - cut.degree as f64).abs() > 1e-9 {
                    return Err(fail(
                        n,
                        seed,
                        format!("cusp {} areas do not add up", cut.face_id),
                    ));
                }
            }
            for d in &div.boundary_segments {
                if div.dart_sides[d.index()] == div.triangle_labels[d.vertex()] {
                    return Err(fail(
                        n,
                        seed,
                        format!("segment {d} is not on a label change"),
                    ));
                }
            }
            let quotient = div.h_upper * div.area_a.min(div.area_b);
            if (quotient - div.boundary_length).abs() > 1e-9 * div.boundary_length.max(1.0) {
                return Err(fail(
                    n,
                    seed,
                    "quotient does not reproduce boundary length".into(),
                ));
            }
            if div.boundary_length > 2.0 * n as f64 + div.eta_total() {
                return Err(fail(n, seed, "boundary longer than 2n + eta".into()));
            }
            checks += 1;
        }
    }
    Ok(SuiteReport {
        suite: SUITE,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_on_small_config() {
        let config = VerifyConfig {
            n_values: vec![10, 60],
            seeds: 10,
            ..VerifyConfig::default()
        };
        let reports = run(Suite::All, &config).unwrap();
        assert_eq!(reports.len(), 3);
        assert!(reports.iter().all(|r| r.checks > 0));
    }

    #[test]
    fn counterexample_display() {
        let c = Counterexample {
            suite: "x",
            n: Some(3),
            seed: Some(9),
            message: "bad".into(),
        };
        assert_eq!(c.to_string(), "[x] n=3 seed=9: bad");
    }
}
