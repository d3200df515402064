//! Explicit separating sets and the resulting Cheeger-constant upper bound.
//!
//! Each large cusp is cut by a curve made of two vertical geodesic arcs and
//! one horocyclic arc at height `Y_i`, leaving the first `k = floor(d_i/2)`
//! canonical segments on side `A`. Small triangles then take the majority
//! label of their three corner segments; a segment whose side differs from
//! its triangle's label is part of the boundary.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::cusp_geometry::{
    partition_cusps, small_triangle_area, surface_area, CuspData, CuspPartition, GeometryError,
};
use crate::farey_tiling::{m_bound, FareyError, Fraction};
use crate::ribbon_graph::{Dart, FaceDecomposition, RibbonGraph};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CutError {
    #[error("cusp {0} is not above the large-cusp threshold")]
    CuspNotInI1(usize),
    #[error("no cut supplied for large cusp {0}")]
    MissingCut(usize),
    #[error("cut supplied for cusp {0}, which is not a large cusp")]
    UnexpectedCut(usize),
    #[error("no cusp exceeds the large-cusp threshold; no cut is built")]
    EmptyI1,
    #[error("surface is disconnected")]
    DisconnectedSurface,
    #[error("cut height must exceed 1, got {0}")]
    InvalidCutHeight(f64),
    #[error("one side of the division has no area (A = {area_a}, B = {area_b})")]
    DegenerateDivision { area_a: f64, area_b: f64 },
    #[error("parameter {name} out of range: {value}")]
    ParameterOutOfRange { name: &'static str, value: f64 },
    #[error("hypothesis LHT <= c log n not met ({lht} > {limit})")]
    HypothesisNotMet { lht: usize, limit: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Farey(#[from] FareyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::A => "A",
            Side::B => "B",
        }
    }
}

/// The curve splitting one large cusp region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuspCut {
    pub face_id: usize,
    pub degree: usize,
    /// Canonical segments on side `A`.
    pub k: usize,
    /// Height of the horocyclic arc.
    pub y: f64,
    pub eta_length: f64,
}

impl CuspCut {
    pub fn side1_area(&self) -> f64 {
        self.k as f64 * (1.0 - 1.0 / self.y)
    }

    pub fn side2_area(&self) -> f64 {
        (self.degree - self.k) as f64 * (1.0 - 1.0 / self.y) + self.degree as f64 / self.y
    }
}

/// Cuts cusp `cusp` at height `y_factor * n * d_i`.
pub fn build_cusp_cut(
    cusp: &CuspData<'_>,
    partition: &CuspPartition,
    n: usize,
    y_factor: f64,
) -> Result<CuspCut, CutError> {
    if !partition.contains_i1(cusp.face_id) {
        return Err(CutError::CuspNotInI1(cusp.face_id));
    }
    if !(y_factor > 0.0 && y_factor.is_finite()) {
        return Err(CutError::ParameterOutOfRange {
            name: "y_factor",
            value: y_factor,
        });
    }
    let y = y_factor * n as f64 * cusp.degree as f64;
    if !(y > 1.0 && y.is_finite()) {
        return Err(CutError::InvalidCutHeight(y));
    }
    let k = cusp.degree / 2;
    Ok(CuspCut {
        face_id: cusp.face_id,
        degree: cusp.degree,
        k,
        y,
        eta_length: 2.0 * libm::log(y) + k as f64 / y,
    })
}

/// A two-sided division of the surface and its isoperimetric quotient.
#[derive(Debug, Clone, PartialEq)]
pub struct Division {
    pub n: usize,
    pub cuts: Vec<CuspCut>,
    /// Side of the cusp piece adjacent to each canonical segment.
    pub dart_sides: Vec<Side>,
    /// Label of each small triangle, indexed by graph vertex.
    pub triangle_labels: Vec<Side>,
    /// Segments separating a triangle from a cusp piece of the other side.
    pub boundary_segments: Vec<Dart>,
    pub boundary_length: f64,
    pub area_a: f64,
    pub area_b: f64,
    pub h_upper: f64,
}

impl Division {
    pub fn num_i1(&self) -> usize {
        self.cuts.len()
    }

    pub fn eta_total(&self) -> f64 {
        self.cuts.iter().map(|c| c.eta_length).sum()
    }

    pub fn triangles_labelled(&self, side: Side) -> usize {
        self.triangle_labels.iter().filter(|&&s| s == side).count()
    }
}

/// Labels cusp pieces and triangles, collects the boundary and measures it.
///
/// Cusp pieces of large cusp `i` are `A` for the first `k_i` segments of
/// the face cycle and `B` otherwise; small cusps are entirely `B`.
pub fn assign_labels(
    g: &RibbonGraph,
    fd: &FaceDecomposition,
    partition: &CuspPartition,
    cuts: &[CuspCut],
) -> Result<Division, CutError> {
    if partition.i1.is_empty() {
        return Err(CutError::EmptyI1);
    }
    let mut cut_of: Vec<Option<&CuspCut>> = vec![None; fd.lht()];
    for cut in cuts {
        if cut.face_id >= fd.lht() || !partition.contains_i1(cut.face_id) {
            return Err(CutError::UnexpectedCut(cut.face_id));
        }
        cut_of[cut.face_id] = Some(cut);
    }
    let mut ordered = Vec::with_capacity(partition.i1.len());
    let mut dart_sides = vec![Side::B; g.num_darts()];
    for &i in &partition.i1 {
        let cut = cut_of[i].ok_or(CutError::MissingCut(i))?;
        for &d in &fd.face(i)[..cut.k] {
            dart_sides[d.index()] = Side::A;
        }
        ordered.push(*cut);
    }

    let mut triangle_labels = Vec::with_capacity(g.num_vertices());
    let mut boundary_segments = Vec::new();
    for v in 0..g.num_vertices() {
        let darts = [Dart(3 * v), Dart(3 * v + 1), Dart(3 * v + 2)];
        let a_count = darts
            .iter()
            .filter(|d| dart_sides[d.index()] == Side::A)
            .count();
        let label = if a_count >= 2 { Side::A } else { Side::B };
        triangle_labels.push(label);
        // a 2-1 majority leaves exactly one dissenting segment
        if let Some(&d) = darts.iter().find(|d| dart_sides[d.index()] != label) {
            boundary_segments.push(d);
        }
    }

    let n = g.n();
    let tri = small_triangle_area();
    let tri_a = triangle_labels.iter().filter(|&&s| s == Side::A).count();
    let tri_b = triangle_labels.len() - tri_a;
    let cusp_a: f64 = ordered.iter().map(CuspCut::side1_area).sum();
    let cusp_b: f64 = ordered.iter().map(CuspCut::side2_area).sum();
    let small_mass: usize = partition.i2.iter().map(|&i| fd.degree(i)).sum();
    let area_a = cusp_a + tri * tri_a as f64;
    let area_b = cusp_b + small_mass as f64 + tri * tri_b as f64;

    let eta_total: f64 = ordered.iter().map(|c| c.eta_length).sum();
    let boundary_length = boundary_segments.len() as f64 + eta_total;
    let smaller = area_a.min(area_b);
    if !(smaller > 0.0) {
        return Err(CutError::DegenerateDivision { area_a, area_b });
    }
    Ok(Division {
        n,
        cuts: ordered,
        dart_sides,
        triangle_labels,
        boundary_segments,
        boundary_length,
        area_a,
        area_b,
        h_upper: boundary_length / smaller,
    })
}

/// Full pipeline: partition the cusps, cut every large cusp, label, measure.
pub fn cheeger_upper_bound(
    g: &RibbonGraph,
    fd: &FaceDecomposition,
    y_factor: f64,
) -> Result<Division, CutError> {
    if !fd.is_connected() {
        return Err(CutError::DisconnectedSurface);
    }
    let n = g.n();
    let partition = partition_cusps(fd, n)?;
    if partition.i1.is_empty() {
        return Err(CutError::EmptyI1);
    }
    let cuts = partition
        .i1
        .iter()
        .map(|&i| {
            let cusp = CuspData {
                face_id: i,
                degree: fd.degree(i),
                darts: fd.face(i),
            };
            build_cusp_cut(&cusp, &partition, n, y_factor)
        })
        .collect::<Result<Vec<_>, _>>()?;
    assign_labels(g, fd, &partition, &cuts)
}

/// Sanity check of the area bookkeeping: `area_a + area_b` against `2πn`.
pub fn area_defect(division: &Division) -> f64 {
    (division.area_a + division.area_b - surface_area(division.n)).abs()
}

/// Closed-form bounds from the asymptotic argument, for given parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub epsilon: f64,
    pub c: f64,
    pub l: Fraction,
    pub n: usize,
    pub lambda: f64,
    pub length_bound: f64,
    pub area_bound: f64,
    pub quotient_bound: f64,
    /// Lower bound on the probability of the admissible set for large `n`.
    pub probability_floor: f64,
}

impl Certificate {
    /// The bounds are only meaningful once `n` is large enough for both
    /// correction factors in `lambda` and the large-cusp mass to be positive.
    pub fn is_admissible(&self) -> bool {
        self.lambda > 0.0 && self.area_bound > 0.0
    }

    /// `length_bound / area_bound` at this `n`.
    pub fn finite_n_quotient(&self) -> f64 {
        self.length_bound / self.area_bound
    }
}

pub fn certificate(epsilon: f64, c: f64, l: Fraction, n: usize) -> Result<Certificate, CutError> {
    let out_of_range = |name, value| Err(CutError::ParameterOutOfRange { name, value });
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return out_of_range("epsilon", epsilon);
    }
    if !(c > 0.0 && c.is_finite()) {
        return out_of_range("c", c);
    }
    if l.is_zero() {
        return out_of_range("l", 0.0);
    }
    if n < 3 {
        return out_of_range("n", n as f64);
    }
    let nf = n as f64;
    let log_n = libm::log(nf);
    let big_m = m_bound(l)? as f64;
    let scale = 1.0 / (2.0 * (1.0 + epsilon) * (1.0 + epsilon));
    let lambda = scale
        * (1.0 - 2.0 * c * big_m * log_n * log_n * log_n / nf)
        * (1.0 - log_n * log_n / nf * l.to_f64());
    let length_bound = 2.0 * nf + 3.0 * c * log_n * log_n;
    let large_mass = 6.0 - c / log_n;
    let area_bound = lambda * large_mass * nf;
    Ok(Certificate {
        epsilon,
        c,
        l,
        n,
        lambda,
        length_bound,
        area_bound,
        quotient_bound: 2.0 / 3.0 * (1.0 + epsilon) * (1.0 + epsilon),
        probability_floor: 1.0 - 2.0 / c,
    })
}

/// Membership in the admissible set, with the large-cusp condition replaced
/// by the sufficient test `min d_i > l`.
pub fn in_f_star(fd: &FaceDecomposition, l: f64, c: f64, n: usize) -> bool {
    crate::cusp_geometry::has_large_cusps_proxy(fd, l) && fd.lht() as f64 <= c * libm::log(n as f64)
}

/// `Σ_{i ∈ I₁} d_i >= (6 - c / ln n) n`, which must hold whenever
/// `LHT <= c ln n`.
pub fn sum_degrees_i1_bound_check(
    fd: &FaceDecomposition,
    partition: &CuspPartition,
    c: f64,
    n: usize,
) -> Result<bool, CutError> {
    let log_n = libm::log(n as f64);
    let limit = c * log_n;
    if fd.lht() as f64 > limit {
        return Err(CutError::HypothesisNotMet {
            lht: fd.lht(),
            limit,
        });
    }
    let large: usize = partition.i1.iter().map(|&i| fd.degree(i)).sum();
    Ok(large as f64 >= (6.0 - c / log_n) * n as f64)
}
