//! Exact-rational Farey subdivision of the strip `0 <= x <= 1`, strip
//! intersection counts, and horoball footprints via a developing map.
//!
//! Level `m` holds the `2^(m-1)` triangles created at the `m`-th mediant
//! step, starting from `Δ(0, 1/2, 1)` at level 1. The triangle `Δ(0, 1, ∞)`
//! is not part of any level.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use num_integer::Integer;
use thiserror::Error;

use crate::cusp_geometry::CuspPartition;
use crate::ribbon_graph::{Dart, FaceDecomposition, RibbonGraph};

/// Deepest level [`enumerate_level`] and the counting routines will visit.
pub const LEVEL_CAP: u32 = 30;

/// Depth cap for the developing map below a cusp strip.
pub const DEPTH_CAP: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FareyError {
    #[error("denominator must be positive")]
    ZeroDenominator,
    #[error("cannot parse {0:?} as a non-negative rational")]
    Parse(alloc::string::String),
    #[error("mediant needs p < q, got {0} and {1}")]
    OutOfOrder(Fraction, Fraction),
    #[error("level {level} exceeds the cap {cap}")]
    LevelCapExceeded { level: u64, cap: u32 },
    #[error("l must be positive")]
    NonpositiveL,
    #[error("developing map passed depth {0}")]
    DepthCapExceeded(u32),
    #[error("face {0} does not exist")]
    UnknownFace(usize),
    #[error("arithmetic overflow")]
    Overflow,
}

/// A non-negative rational in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fraction {
    num: u64,
    den: u64,
}

impl Fraction {
    pub const ZERO: Fraction = Fraction { num: 0, den: 1 };
    pub const ONE: Fraction = Fraction { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Self, FareyError> {
        if den == 0 {
            return Err(FareyError::ZeroDenominator);
        }
        let g = num.gcd(&den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub const fn integer(n: u64) -> Self {
        Self { num: n, den: 1 }
    }

    pub fn numerator(self) -> u64 {
        self.num
    }

    pub fn denominator(self) -> u64 {
        self.den
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn floor(self) -> u64 {
        self.num / self.den
    }

    pub fn ceil(self) -> u64 {
        self.num.div_ceil(self.den)
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> Ordering {
        (u128::from(self.num) * u128::from(other.den))
            .cmp(&(u128::from(other.num) * u128::from(self.den)))
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Accepts `"a/b"`, integers and finite decimals such as `"2.5"`.
impl FromStr for Fraction {
    type Err = FareyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FareyError::Parse(s.into());
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let a = a.trim().parse().map_err(|_| bad())?;
            let b = b.trim().parse().map_err(|_| bad())?;
            return Fraction::new(a, b);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if (int.is_empty() && frac.is_empty())
            || !int.bytes().chain(frac.bytes()).all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let den = 10u64.checked_pow(frac.len() as u32).ok_or_else(bad)?;
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let frac: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(bad)?;
        Fraction::new(num, den)
    }
}

/// `(a + c) / (b + d)` for `a/b < c/d`, reduced.
pub fn mediant(p: Fraction, q: Fraction) -> Result<Fraction, FareyError> {
    if p >= q {
        return Err(FareyError::OutOfOrder(p, q));
    }
    let num = p.num.checked_add(q.num).ok_or(FareyError::Overflow)?;
    let den = p.den.checked_add(q.den).ok_or(FareyError::Overflow)?;
    Fraction::new(num, den)
}

/// An ideal triangle `Δ(left, apex, right)` lying below the geodesic
/// `(left, right)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FareyTriangle {
    pub left: Fraction,
    pub apex: Fraction,
    pub right: Fraction,
    pub level: u32,
}

impl FareyTriangle {
    fn below(left: Fraction, right: Fraction, level: u32) -> Result<Self, FareyError> {
        Ok(Self {
            left,
            apex: mediant(left, right)?,
            right,
            level,
        })
    }

    fn children(&self) -> Result<[FareyTriangle; 2], FareyError> {
        Ok([
            FareyTriangle::below(self.left, self.apex, self.level + 1)?,
            FareyTriangle::below(self.apex, self.right, self.level + 1)?,
        ])
    }
}

fn check_level(level: u64) -> Result<u32, FareyError> {
    if level > u64::from(LEVEL_CAP) {
        return Err(FareyError::LevelCapExceeded {
            level,
            cap: LEVEL_CAP,
        });
    }
    Ok(level as u32)
}

/// The triangles created at mediant step `m`, ordered left to right.
pub fn enumerate_level(m: u32) -> Result<Vec<FareyTriangle>, FareyError> {
    check_level(u64::from(m))?;
    if m == 0 {
        return Ok(Vec::new());
    }
    let mut level = vec![FareyTriangle::below(Fraction::ZERO, Fraction::ONE, 1)?];
    for _ in 1..m {
        let mut next = Vec::with_capacity(level.len() * 2);
        for t in &level {
            next.extend(t.children()?);
        }
        level = next;
    }
    Ok(level)
}

/// Sorted vertex set after `m` mediant steps: `0 = q_0 < ... < q_{2^m} = 1`.
pub fn vertices_after(m: u32) -> Result<Vec<Fraction>, FareyError> {
    check_level(u64::from(m))?;
    let mut vertices = vec![Fraction::ZERO, Fraction::ONE];
    for _ in 0..m {
        let mut next = Vec::with_capacity(vertices.len() * 2 - 1);
        for w in vertices.windows(2) {
            next.push(w[0]);
            next.push(mediant(w[0], w[1])?);
        }
        next.push(Fraction::ONE);
        vertices = next;
    }
    Ok(vertices)
}

/// True iff `(right - left) * l > 2 * height`, i.e. the outer geodesic of
/// an interval rises above `height / l`.
fn interval_above(left: Fraction, right: Fraction, l: Fraction, height: u64) -> bool {
    // (rn*ld - ln*rd) * l.num > 2 * height * rd * ld * l.den
    let (ln, ld) = (u128::from(left.num), u128::from(left.den));
    let (rn, rd) = (u128::from(right.num), u128::from(right.den));
    let width_num = rn * ld - ln * rd;
    let lhs = width_num.checked_mul(u128::from(l.num));
    let rhs = (rd * ld)
        .checked_mul(2 * u128::from(height))
        .and_then(|v| v.checked_mul(u128::from(l.den)));
    match (lhs, rhs) {
        (Some(lhs), Some(rhs)) => lhs > rhs,
        // only reachable for l near u64::MAX; an f64 comparison is plenty there
        _ => {
            let width = width_num as f64 / (rd * ld) as f64;
            width * l.to_f64() > 2.0 * height as f64
        }
    }
}

/// Whether the triangle meets the strip `{ y > 1/l }`. The highest point
/// of the triangle is the top of its outer semicircle, at height
/// `(right - left) / 2`.
pub fn intersects_strip(t: &FareyTriangle, l: Fraction) -> bool {
    interval_above(t.left, t.right, l, 1)
}

fn positive(l: Fraction) -> Result<Fraction, FareyError> {
    if l.is_zero() {
        Err(FareyError::NonpositiveL)
    } else {
        Ok(l)
    }
}

/// Number of levels summed in the bound `N(l)`: `floor(l/2) + 1`.
pub fn bound_depth(l: Fraction) -> Result<u64, FareyError> {
    let l = positive(l)?;
    Ok(l.num / (2 * l.den) + 1)
}

/// Number of Farey triangles meeting `{ y > 1/l }`, counted over levels
/// `1..=floor(l/2)+1`. Subtrees are pruned as soon as a triangle misses
/// the strip, since children are narrower than their parent.
pub fn count_intersecting(l: Fraction) -> Result<u64, FareyError> {
    let depth = check_level(bound_depth(l)?)?;
    let mut count = 0;
    let mut stack = vec![FareyTriangle::below(Fraction::ZERO, Fraction::ONE, 1)?];
    while let Some(t) = stack.pop() {
        if t.level > depth || !intersects_strip(&t, l) {
            continue;
        }
        count += 1;
        stack.extend(t.children()?);
    }
    Ok(count)
}

/// `N(l) = 2^(floor(l/2)+1) - 1`.
pub fn n_bound(l: Fraction) -> Result<u64, FareyError> {
    let depth = bound_depth(l)?;
    if depth >= 64 {
        return Err(FareyError::Overflow);
    }
    Ok((1u64 << depth) - 1)
}

/// `M(l) = 3 l N(l)`, rounded up for non-integral `l`.
pub fn m_bound(l: Fraction) -> Result<u64, FareyError> {
    let n = u128::from(n_bound(l)?);
    let num = 3 * u128::from(l.num) * n;
    let m = num.div_ceil(u128::from(l.den));
    u64::try_from(m).map_err(|_| FareyError::Overflow)
}

/// One copy of a surface triangle in the development of a cusp strip.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DevelopedTriangle {
    /// Vertex of the graph, i.e. which of the `2n` ideal triangles.
    pub surface_triangle: usize,
    /// Side through which the development entered this copy. For the
    /// top-row triangles this is the right vertical side.
    pub entry_edge: Dart,
    /// Vertices; `None` is the point at infinity.
    pub vertices: [Option<Fraction>; 3],
    /// 0 for the top row, otherwise the Farey level of the copy.
    pub depth: u32,
}

/// Develops the strip of cusp `j`: top-row triangles `Δ(t, t+1, ∞)` for
/// `t < d_j`, then everything below whose outer geodesic rises above
/// `min_height = d_j / l`. Returns every copy meeting `{ y > d_j / l }`.
///
/// Side conventions: in the copy of the triangle at dart `d` with the cusp
/// at infinity, the right side is `d`, the left side `rotate_inv(d)` and the
/// bottom `rotate(d)`. A copy entered through side `e` from above, spanning
/// `(a, b)` with apex `m`, has side `(a, m)` equal to `rotate_inv(e)` and
/// side `(m, b)` equal to `rotate(e)`.
pub fn develop_cusp(
    g: &RibbonGraph,
    fd: &FaceDecomposition,
    j: usize,
    l: Fraction,
) -> Result<Vec<DevelopedTriangle>, FareyError> {
    let l = positive(l)?;
    let face = fd.faces().get(j).ok_or(FareyError::UnknownFace(j))?;
    let d_j = face.len() as u64;
    let mut out = Vec::new();
    // Horoball top-row copies reach every height, so they meet { y > d_j/l }
    // below the canonical loop iff d_j / l < 1.
    let below_loop = u128::from(d_j) * u128::from(l.den) < u128::from(l.num);
    let mut stack: Vec<(Dart, Fraction, Fraction, u32)> = Vec::new();
    for (t, &d) in face.iter().enumerate() {
        let t = t as u64;
        let (left, right) = (Fraction::integer(t), Fraction::integer(t + 1));
        if below_loop {
            out.push(DevelopedTriangle {
                surface_triangle: d.vertex(),
                entry_edge: d,
                vertices: [Some(left), Some(right), None],
                depth: 0,
            });
        }
        stack.push((g.matched(d.rotate()), left, right, 1));
    }
    while let Some((entry, left, right, depth)) = stack.pop() {
        if !interval_above(left, right, l, d_j) {
            continue;
        }
        if depth > DEPTH_CAP {
            return Err(FareyError::DepthCapExceeded(DEPTH_CAP));
        }
        let apex = mediant(left, right)?;
        out.push(DevelopedTriangle {
            surface_triangle: entry.vertex(),
            entry_edge: entry,
            vertices: [Some(left), Some(apex), Some(right)],
            depth,
        });
        stack.push((g.matched(entry.rotate_inv()), left, apex, depth + 1));
        stack.push((g.matched(entry.rotate()), apex, right, depth + 1));
    }
    Ok(out)
}

/// Surface triangles meeting the horoball `C_j(l)` below the canonical
/// loop of cusp `j`. Empty when `d_j > l`, since the horoball then stays
/// inside the cusp region.
pub fn horoball_footprint(
    g: &RibbonGraph,
    fd: &FaceDecomposition,
    j: usize,
    l: Fraction,
) -> Result<BTreeSet<usize>, FareyError> {
    let l = positive(l)?;
    let d_j = fd.faces().get(j).ok_or(FareyError::UnknownFace(j))?.len() as u128;
    if d_j * u128::from(l.den) > u128::from(l.num) {
        return Ok(BTreeSet::new());
    }
    Ok(develop_cusp(g, fd, j, l)?
        .into_iter()
        .map(|t| t.surface_triangle)
        .collect())
}

/// Segments of large cusps split by whether their triangle meets some
/// small cusp's horoball of length `l`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SegmentClasses {
    pub s1: Vec<Dart>,
    pub s2: Vec<Dart>,
}

pub fn classify_segments(
    g: &RibbonGraph,
    fd: &FaceDecomposition,
    partition: &CuspPartition,
    l: Fraction,
) -> Result<SegmentClasses, FareyError> {
    let l = positive(l)?;
    let mut touched = vec![false; g.num_vertices()];
    for (j, face) in fd.faces().iter().enumerate() {
        if (face.len() as u128) * u128::from(l.den) > u128::from(l.num) {
            continue;
        }
        for v in horoball_footprint(g, fd, j, l)? {
            touched[v] = true;
        }
    }
    let mut classes = SegmentClasses::default();
    for &i in &partition.i1 {
        for &d in fd.face(i) {
            if touched[d.vertex()] {
                classes.s2.push(d);
            } else {
                classes.s1.push(d);
            }
        }
    }
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cusp_geometry::partition_cusps;
    use crate::ribbon_graph::sample;

    fn fr(a: u64, b: u64) -> Fraction {
        Fraction::new(a, b).unwrap()
    }

    #[test]
    fn fraction_basics() {
        assert_eq!(fr(2, 4), fr(1, 2));
        assert_eq!(Fraction::new(1, 0), Err(FareyError::ZeroDenominator));
        assert!(fr(1, 3) < fr(1, 2));
        assert_eq!(alloc::format!("{}", fr(6, 4)), "3/2");
        assert_eq!(fr(7, 2).floor(), 3);
        assert_eq!(fr(7, 2).ceil(), 4);
        assert_eq!(fr(8, 2).ceil(), 4);
    }

    #[test]
    fn fraction_parsing() {
        assert_eq!("4".parse::<Fraction>(), Ok(fr(4, 1)));
        assert_eq!("3/2".parse::<Fraction>(), Ok(fr(3, 2)));
        assert_eq!("2.5".parse::<Fraction>(), Ok(fr(5, 2)));
        assert_eq!(".25".parse::<Fraction>(), Ok(fr(1, 4)));
        assert!("-1".parse::<Fraction>().is_err());
        assert!("x".parse::<Fraction>().is_err());
        assert!(".".parse::<Fraction>().is_err());
        assert_eq!("1/0".parse::<Fraction>(), Err(FareyError::ZeroDenominator));
    }

    #[test]
    fn mediants() {
        assert_eq!(mediant(fr(0, 1), fr(1, 1)), Ok(fr(1, 2)));
        assert_eq!(mediant(fr(0, 1), fr(1, 2)), Ok(fr(1, 3)));
        assert_eq!(mediant(fr(1, 2), fr(1, 1)), Ok(fr(2, 3)));
        assert!(matches!(
            mediant(fr(1, 1), fr(0, 1)),
            Err(FareyError::OutOfOrder(..))
        ));
        // non-neighbours are reduced: (1/3, 2/3) -> 3/6 = 1/2
        assert_eq!(mediant(fr(1, 3), fr(2, 3)), Ok(fr(1, 2)));
    }

    #[test]
    fn first_levels() {
        let l1 = enumerate_level(1).unwrap();
        assert_eq!(l1.len(), 1);
        assert_eq!(
            (l1[0].left, l1[0].apex, l1[0].right),
            (fr(0, 1), fr(1, 2), fr(1, 1))
        );
        let l2 = enumerate_level(2).unwrap();
        let got: Vec<_> = l2.iter().map(|t| (t.left, t.apex, t.right)).collect();
        assert_eq!(
            got,
            vec![
                (fr(0, 1), fr(1, 3), fr(1, 2)),
                (fr(1, 2), fr(2, 3), fr(1, 1))
            ]
        );
        assert!(enumerate_level(0).unwrap().is_empty());
        assert!(matches!(
            enumerate_level(31),
            Err(FareyError::LevelCapExceeded { level: 31, .. })
        ));
    }

    #[test]
    fn strip_test_uses_apex_height() {
        let t = enumerate_level(1).unwrap()[0];
        assert!(intersects_strip(&t, fr(4, 1)));
        assert!(!intersects_strip(&t, fr(3, 2)));
        // (1/2 > 1/2) is false: boundary excluded
        assert!(!intersects_strip(&t, fr(2, 1)));
        assert!(intersects_strip(&t, Fraction::integer(u64::MAX)));
        let deep = enumerate_level(12).unwrap()[7];
        assert!(intersects_strip(&deep, Fraction::integer(u64::MAX)));
    }

    #[test]
    fn bounds() {
        assert_eq!(n_bound(fr(4, 1)), Ok(7));
        assert_eq!(n_bound(fr(10, 1)), Ok(63));
        assert_eq!(m_bound(fr(4, 1)), Ok(84));
        assert_eq!(m_bound(fr(2, 1)), Ok(18));
        // l = 5/2: N = 2^2 - 1 = 3, M = ceil(3 * 5/2 * 3) = ceil(22.5) = 23
        assert_eq!(m_bound(fr(5, 2)), Ok(23));
        assert_eq!(n_bound(Fraction::ZERO), Err(FareyError::NonpositiveL));
        let mut prev = 0;
        for l in 1..=40 {
            let m = m_bound(Fraction::integer(l)).unwrap();
            assert!(m >= prev);
            prev = m;
        }
    }

    #[test]
    fn count_for_l_4() {
        // only Δ(0,1/2,1) rises above 1/4
        assert_eq!(count_intersecting(fr(4, 1)), Ok(1));
        assert!(count_intersecting(fr(200, 1)).is_err());
    }

    #[test]
    fn footprint_empty_for_long_loops() {
        let torus = RibbonGraph::from_matching(1, &[(0, 3), (1, 4), (2, 5)]).unwrap();
        let fd = torus.faces();
        assert!(horoball_footprint(&torus, &fd, 0, fr(4, 1))
            .unwrap()
            .is_empty());
        assert_eq!(
            horoball_footprint(&torus, &fd, 3, fr(4, 1)),
            Err(FareyError::UnknownFace(3))
        );
    }

    #[test]
    fn footprint_of_sphere_cusp() {
        // three cusps of degree 2; l = 4 gives height 1/2, so only the top row
        // and level-1 copies with apex 1/2 > 1/2 (none) are collected
        let g = RibbonGraph::from_matching(1, &[(0, 3), (1, 5), (2, 4)]).unwrap();
        let fd = g.faces();
        let fp = horoball_footprint(&g, &fd, 0, fr(4, 1)).unwrap();
        assert_eq!(fp.into_iter().collect::<Vec<_>>(), vec![0, 1]);
        // d = l: the horoball is exactly the cusp region
        assert!(horoball_footprint(&g, &fd, 0, fr(2, 1)).unwrap().is_empty());
    }

    /// Vertex `a` of a copy entered through `e` lies on cusp `face_of(e)`,
    /// the apex on `face_of(rotate_inv(e))`, vertex `b` on `face_of(rotate(e))`.
    fn vertex_faces(fd: &FaceDecomposition, t: &DevelopedTriangle) -> [usize; 3] {
        let e = t.entry_edge;
        if t.depth == 0 {
            [
                fd.face_of(e.rotate_inv()),
                fd.face_of(e.rotate()),
                fd.face_of(e),
            ]
        } else {
            [
                fd.face_of(e),
                fd.face_of(e.rotate_inv()),
                fd.face_of(e.rotate()),
            ]
        }
    }

    #[test]
    fn development_is_consistent_with_faces() {
        use alloc::collections::BTreeMap;
        for seed in 0..20 {
            let g = sample(60, seed).unwrap();
            let fd = g.faces();
            for j in 0..fd.lht() {
                let l = Fraction::integer(12 * fd.degree(j) as u64);
                let copies = develop_cusp(&g, &fd, j, l).unwrap();
                let mut cusp_at: BTreeMap<Fraction, usize> = BTreeMap::new();
                for t in &copies {
                    let faces = vertex_faces(&fd, t);
                    if t.depth == 0 {
                        assert_eq!(faces[2], j);
                    }
                    for (v, f) in t.vertices.iter().zip(faces) {
                        if let Some(x) = v {
                            // x and x + d_j are the same point of the cusp strip
                            let key = Fraction::new(
                                x.numerator() % (x.denominator() * fd.degree(j) as u64),
                                x.denominator(),
                            )
                            .unwrap();
                            let prev = *cusp_at.entry(key).or_insert(f);
                            assert_eq!(prev, f, "seed {seed} cusp {j} at {x}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn segment_classes_cover_large_cusps() {
        let g = sample(100, 3).unwrap();
        let fd = g.faces();
        let p = partition_cusps(&fd, 100).unwrap();
        let c = classify_segments(&g, &fd, &p, fr(4, 1)).unwrap();
        let total: usize = p.i1.iter().map(|&i| fd.degree(i)).sum();
        assert_eq!(c.s1.len() + c.s2.len(), total);
        assert!(c.s2.len() as u64 <= 84 * fd.lht() as u64);
    }
}
