//! Closed-form lengths and areas in the cusped metric built from `2n`
//! ideal triangles glued with zero shear, plus cusp bookkeeping.
//!
//! Heights are Euclidean `y` coordinates in the upper half-plane with the
//! cusp at infinity and the canonical horocycle at height 1.

use alloc::vec::Vec;
use core::f64::consts::PI;

use thiserror::Error;

use crate::ribbon_graph::{Dart, FaceDecomposition};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("height must be positive, got {0}")]
    NonpositiveHeight(f64),
    #[error("invalid height interval ({0}, {1})")]
    InvalidInterval(f64, f64),
    #[error("cusp degree {degree} does not exceed l = {l}")]
    DegreeNotExceedingL { degree: usize, l: f64 },
    #[error("n = {0} is too small; the cusp threshold needs n >= 3")]
    NTooSmall(usize),
    #[error("r must be positive, got {0}")]
    NonpositiveR(f64),
}

/// Hyperbolic length of a horizontal segment of Euclidean width `span` at height `a`.
pub fn horocycle_length(a: f64, span: f64) -> Result<f64, GeometryError> {
    if !(a > 0.0) {
        return Err(GeometryError::NonpositiveHeight(a));
    }
    Ok(span / a)
}

/// Hyperbolic length of the vertical segment from height `a` up to `b`.
pub fn vertical_length(a: f64, b: f64) -> Result<f64, GeometryError> {
    if !(a > 0.0 && a <= b) {
        return Err(GeometryError::InvalidInterval(a, b));
    }
    Ok(libm::log(b / a))
}

/// Area of a unit-width strip between heights `a` and `b`; `b` may be infinite.
pub fn strip_area(a: f64, b: f64) -> Result<f64, GeometryError> {
    if !(a > 0.0 && a < b) {
        return Err(GeometryError::InvalidInterval(a, b));
    }
    Ok(1.0 / a - 1.0 / b)
}

/// Area of the region between a unit segment of a canonical loop of length
/// `degree` and the horocycle of length `l` around the same cusp.
pub fn trapezium_area(degree: usize, l: f64) -> Result<f64, GeometryError> {
    let d = degree as f64;
    if !(l > 0.0 && d > l) {
        return Err(GeometryError::DegreeNotExceedingL { degree, l });
    }
    Ok(1.0 - l / d)
}

/// Area of the punctured surface with `2n` ideal triangles.
pub fn surface_area(n: usize) -> f64 {
    2.0 * PI * n as f64
}

/// Area of the central part of an ideal triangle cut off by its three unit
/// horocycle segments: the triangle has area π and each corner above a
/// unit segment has area 1.
pub fn small_triangle_area() -> f64 {
    PI - 3.0
}

/// Length parameter of the horocycle matching a radius `r` under the
/// `l`–`r` relation for cusp neighbourhoods.
pub fn l_of_r(r: f64) -> Result<f64, GeometryError> {
    if !(r > 0.0) {
        return Err(GeometryError::NonpositiveR(r));
    }
    // ln((e^r + 1) / e^(r-1)) = 1 + ln(1 + e^-r)
    Ok(2.0 * PI / (1.0 + libm::log1p(libm::exp(-r))))
}

/// User-supplied horocycle length and radius parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuspConstants {
    pub l: f64,
    pub r: f64,
}

impl CuspConstants {
    pub fn from_r(r: f64) -> Result<Self, GeometryError> {
        Ok(Self { l: l_of_r(r)?, r })
    }
}

/// One cusp of the surface: a face of the ribbon graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuspData<'a> {
    pub face_id: usize,
    pub degree: usize,
    /// The unit segments of the canonical loop, in walk order.
    pub darts: &'a [Dart],
}

pub fn cusps(fd: &FaceDecomposition) -> impl ExactSizeIterator<Item = CuspData<'_>> {
    fd.faces()
        .iter()
        .enumerate()
        .map(|(face_id, darts)| CuspData {
            face_id,
            degree: darts.len(),
            darts,
        })
}

/// Split of the cusps into large (`i1`) and small (`i2`) by the
/// threshold `n / (ln n)^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CuspPartition {
    pub i1: Vec<usize>,
    pub i2: Vec<usize>,
    pub threshold: f64,
    in_i1: Vec<bool>,
}

impl CuspPartition {
    /// Builds a partition from explicit face sets.
    pub fn from_parts(i1: Vec<usize>, i2: Vec<usize>, threshold: f64) -> Self {
        let faces = i1.iter().chain(&i2).map(|&i| i + 1).max().unwrap_or(0);
        let mut in_i1 = alloc::vec![false; faces];
        for &i in &i1 {
            in_i1[i] = true;
        }
        Self {
            i1,
            i2,
            threshold,
            in_i1,
        }
    }

    pub fn contains_i1(&self, face_id: usize) -> bool {
        self.in_i1.get(face_id).copied().unwrap_or(false)
    }
}

pub fn cusp_threshold(n: usize) -> Result<f64, GeometryError> {
    if n < 3 {
        return Err(GeometryError::NTooSmall(n));
    }
    let log_n = libm::log(n as f64);
    Ok(n as f64 / (log_n * log_n))
}

pub fn partition_cusps(fd: &FaceDecomposition, n: usize) -> Result<CuspPartition, GeometryError> {
    let threshold = cusp_threshold(n)?;
    let mut i1 = Vec::new();
    let mut i2 = Vec::new();
    let mut in_i1 = Vec::with_capacity(fd.lht());
    for (id, d) in fd.degrees().enumerate() {
        let large = d as f64 > threshold;
        in_i1.push(large);
        if large {
            i1.push(id);
        } else {
            i2.push(id);
        }
    }
    Ok(CuspPartition {
        i1,
        i2,
        threshold,
        in_i1,
    })
}

/// Sufficient condition for every cusp to carry an embedded horocycle of
/// length `l`: each canonical loop is already longer than `l`.
pub fn has_large_cusps_proxy(fd: &FaceDecomposition, l: f64) -> bool {
    fd.degrees().all(|d| d as f64 > l)
}
