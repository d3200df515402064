//! Oriented cubic graphs as dart permutation systems.
//!
//! A graph with `2n` trivalent vertices has `6n` darts. Dart `d` sits at
//! vertex `d / 3`, and the cyclic order at every vertex is fixed to
//! `(3v, 3v + 1, 3v + 2)`. All randomness lives in the edge pairing, which
//! is a fixed-point-free involution on the darts.
//!
//! Faces (left-hand-turn paths) are the orbits of `rotate ∘ matched`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Default cap on the number of rejected samples in [`sample_connected`].
pub const DEFAULT_MAX_REJECTIONS: u32 = 10_000;

/// Increment applied to the seed between rejected attempts.
const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("n must be at least 1")]
    EmptyGraph,
    #[error("expected {expected} darts, matching covers {found}")]
    WrongDartCount { expected: usize, found: usize },
    #[error("dart {0} is out of range")]
    DartOutOfRange(usize),
    #[error("dart {0} is paired with itself")]
    SelfPairedDart(usize),
    #[error("dart {0} appears in more than one pair")]
    DuplicateDart(usize),
    #[error("no connected sample after {0} rejections")]
    MaxRejectionsExceeded(u32),
}

/// A half-edge. Also labels the short horocycle segment at the corner of
/// its ideal triangle that lies between sides `rotate_inv(d)` and `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dart(pub usize);

impl Dart {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }

    /// The trivalent vertex (equivalently, the ideal triangle) owning this dart.
    #[inline]
    pub fn vertex(self) -> usize {
        self.0 / 3
    }

    /// Next dart in the cyclic order at the vertex.
    #[inline]
    pub fn rotate(self) -> Dart {
        let base = self.0 - self.0 % 3;
        Dart(base + (self.0 + 1) % 3)
    }

    #[inline]
    pub fn rotate_inv(self) -> Dart {
        let base = self.0 - self.0 % 3;
        Dart(base + (self.0 + 2) % 3)
    }
}

impl fmt::Display for Dart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An oriented cubic graph `(Γ, O)` with `2n` vertices and `3n` edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RibbonGraph {
    n: usize,
    matching: Vec<usize>,
}

impl RibbonGraph {
    /// Validates an explicit edge pairing.
    pub fn from_matching(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::EmptyGraph);
        }
        let darts = 6 * n;
        if pairs.len() * 2 != darts {
            return Err(GraphError::WrongDartCount {
                expected: darts,
                found: pairs.len() * 2,
            });
        }
        let mut matching = vec![usize::MAX; darts];
        for &(a, b) in pairs {
            for d in [a, b] {
                if d >= darts {
                    return Err(GraphError::DartOutOfRange(d));
                }
            }
            if a == b {
                return Err(GraphError::SelfPairedDart(a));
            }
            for d in [a, b] {
                if matching[d] != usize::MAX {
                    return Err(GraphError::DuplicateDart(d));
                }
            }
            matching[a] = b;
            matching[b] = a;
        }
        Ok(Self { n, matching })
    }

    /// Half the number of vertices.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_darts(&self) -> usize {
        self.matching.len()
    }

    pub fn num_vertices(&self) -> usize {
        2 * self.n
    }

    pub fn num_edges(&self) -> usize {
        3 * self.n
    }

    #[inline]
    pub fn matched(&self, d: Dart) -> Dart {
        Dart(self.matching[d.0])
    }

    /// One step of the face permutation: cross the edge, then turn.
    #[inline]
    pub fn face_step(&self, d: Dart) -> Dart {
        self.matched(d).rotate()
    }

    pub fn darts(&self) -> impl ExactSizeIterator<Item = Dart> {
        (0..self.matching.len()).map(Dart)
    }

    /// Edges as `(a, b)` with `a < b`, sorted by `a`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.matching
            .iter()
            .enumerate()
            .filter(|&(a, &b)| a < b)
            .map(|(a, &b)| (a, b))
            .collect()
    }

    /// True iff the group generated by rotation and matching acts
    /// transitively on darts, i.e. the underlying graph is connected.
    pub fn is_connected(&self) -> bool {
        let vertices = self.num_vertices();
        let mut seen = vec![false; vertices];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut reached = 1;
        while let Some(v) = stack.pop() {
            for d in 3 * v..3 * v + 3 {
                let w = self.matching[d] / 3;
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        reached == vertices
    }

    /// Traces all left-hand-turn paths.
    pub fn faces(&self) -> FaceDecomposition {
        let darts = self.num_darts();
        let mut face_of = vec![usize::MAX; darts];
        let mut faces: Vec<Vec<Dart>> = Vec::new();
        // Scanning in increasing order makes every cycle start at its minimal dart.
        for start in 0..darts {
            if face_of[start] != usize::MAX {
                continue;
            }
            let id = faces.len();
            let mut cycle = Vec::new();
            let mut d = Dart(start);
            loop {
                face_of[d.0] = id;
                cycle.push(d);
                d = self.face_step(d);
                if d.0 == start {
                    break;
                }
            }
            faces.push(cycle);
        }
        let connected = self.is_connected();
        let lht = faces.len();
        let genus = if connected {
            let excess = self.n as i64 - lht as i64;
            debug_assert!(excess % 2 == 0 && excess >= -2);
            Some((1 + excess / 2) as u64)
        } else {
            None
        };
        FaceDecomposition {
            n: self.n,
            faces,
            face_of,
            lht,
            genus,
            connected,
        }
    }
}

/// The faces of a ribbon graph, i.e. the cusps of the associated surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceDecomposition {
    n: usize,
    faces: Vec<Vec<Dart>>,
    face_of: Vec<usize>,
    lht: usize,
    genus: Option<u64>,
    connected: bool,
}

impl FaceDecomposition {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Face cycles in walk order, each starting at its minimal dart.
    pub fn faces(&self) -> &[Vec<Dart>] {
        &self.faces
    }

    pub fn face(&self, id: usize) -> &[Dart] {
        &self.faces[id]
    }

    pub fn face_of(&self, d: Dart) -> usize {
        self.face_of[d.0]
    }

    pub fn degree(&self, id: usize) -> usize {
        self.faces[id].len()
    }

    pub fn degrees(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.faces.iter().map(Vec::len)
    }

    /// Number of left-hand-turn paths.
    pub fn lht(&self) -> usize {
        self.lht
    }

    /// `None` for disconnected graphs, where a single genus is not defined.
    pub fn genus(&self) -> Option<u64> {
        self.genus
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn min_degree(&self) -> usize {
        self.degrees().min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().max().unwrap_or(0)
    }

    pub fn sum_degrees(&self) -> usize {
        self.degrees().sum()
    }
}

/// Uniform configuration-model sample: a uniform perfect matching on `6n`
/// labelled darts with the canonical rotation.
pub fn sample(n: usize, seed: u64) -> Result<RibbonGraph, GraphError> {
    if n == 0 {
        return Err(GraphError::EmptyGraph);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..6 * n).collect();
    order.shuffle(&mut rng);
    let mut matching = vec![0; 6 * n];
    for pair in order.chunks_exact(2) {
        matching[pair[0]] = pair[1];
        matching[pair[1]] = pair[0];
    }
    Ok(RibbonGraph { n, matching })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectedSample {
    pub graph: RibbonGraph,
    pub rejections: u32,
    /// Seed of the accepted attempt.
    pub seed: u64,
}

/// Rejection sampler conditioned on connectivity. Attempt `i` uses
/// `seed + i * SEED_STRIDE`, so attempt 0 coincides with [`sample`].
pub fn sample_connected(n: usize, seed: u64) -> Result<ConnectedSample, GraphError> {
    sample_connected_with_cap(n, seed, DEFAULT_MAX_REJECTIONS)
}

pub fn sample_connected_with_cap(
    n: usize,
    seed: u64,
    max_rejections: u32,
) -> Result<ConnectedSample, GraphError> {
    let mut rejections = 0;
    loop {
        let attempt_seed = seed.wrapping_add(u64::from(rejections).wrapping_mul(SEED_STRIDE));
        let graph = sample(n, attempt_seed)?;
        if graph.is_connected() {
            return Ok(ConnectedSample {
                graph,
                rejections,
                seed: attempt_seed,
            });
        }
        if rejections >= max_rejections {
            return Err(GraphError::MaxRejectionsExceeded(rejections));
        }
        rejections += 1;
    }
}
