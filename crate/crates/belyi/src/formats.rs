//! On-disk formats: the graph interchange file and the division summary.

use std::io::{Read, Write};

use belyi_core::{Division, FaceDecomposition, GraphError, RibbonGraph};
use serde::{Deserialize, Serialize};

use crate::Error;

/// `{"n": <int>, "matching": [[d1, d2], ...]}` with darts `0..6n` and the
/// canonical rotation `(3v, 3v+1, 3v+2)` at every vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub matching: Vec<[usize; 2]>,
}

impl GraphFile {
    pub fn from_graph(g: &RibbonGraph) -> Self {
        Self {
            n: g.n(),
            matching: g.pairs().into_iter().map(|(a, b)| [a, b]).collect(),
        }
    }

    pub fn to_graph(&self) -> Result<RibbonGraph, GraphError> {
        let pairs: Vec<(usize, usize)> = self.matching.iter().map(|p| (p[0], p[1])).collect();
        RibbonGraph::from_matching(self.n, &pairs)
    }
}

pub fn read_graph(reader: impl Read) -> Result<RibbonGraph, Error> {
    let file: GraphFile = serde_json::from_reader(reader)?;
    Ok(file.to_graph()?)
}

pub fn write_graph(mut writer: impl Write, g: &RibbonGraph) -> Result<(), Error> {
    serde_json::to_writer(&mut writer, &GraphFile::from_graph(g))?;
    writeln!(writer)?;
    Ok(())
}

/// Face statistics printed next to a sampled graph.
#[derive(Debug, Clone, Serialize)]
pub struct FaceSummary {
    pub n: usize,
    pub lht: usize,
    pub genus: Option<u64>,
    pub connected: bool,
    /// `[degree, multiplicity]`, ascending by degree.
    pub degrees: Vec<[usize; 2]>,
}

impl FaceSummary {
    pub fn new(fd: &FaceDecomposition) -> Self {
        let mut sorted: Vec<usize> = fd.degrees().collect();
        sorted.sort_unstable();
        let mut degrees: Vec<[usize; 2]> = Vec::new();
        for d in sorted {
            match degrees.last_mut() {
                Some(last) if last[0] == d => last[1] += 1,
                _ => degrees.push([d, 1]),
            }
        }
        Self {
            n: fd.n(),
            lht: fd.lht(),
            genus: fd.genus(),
            connected: fd.is_connected(),
            degrees,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivisionSummary {
    pub n: usize,
    pub seed: Option<u64>,
    pub lht: usize,
    pub genus: Option<u64>,
    pub num_i1: usize,
    pub boundary_segments: usize,
    pub boundary_length: f64,
    pub area_a: f64,
    pub area_b: f64,
    pub h_upper: f64,
    pub y_factor: f64,
}

impl DivisionSummary {
    pub fn new(div: &Division, fd: &FaceDecomposition, seed: Option<u64>, y_factor: f64) -> Self {
        Self {
            n: div.n,
            seed,
            lht: fd.lht(),
            genus: fd.genus(),
            num_i1: div.num_i1(),
            boundary_segments: div.boundary_segments.len(),
            boundary_length: div.boundary_length,
            area_a: div.area_a,
            area_b: div.area_b,
            h_upper: div.h_upper,
            y_factor,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_file_layout() {
        let g = RibbonGraph::from_matching(1, &[(0, 3), (1, 4), (2, 5)]).unwrap();
        let mut buf = Vec::new();
        write_graph(&mut buf, &g).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "{\"n\":1,\"matching\":[[0,3],[1,4],[2,5]]}\n"
        );
        assert_eq!(read_graph(buf.as_slice()).unwrap(), g);
    }

    #[test]
    fn invalid_graph_file_is_rejected() {
        let text = r#"{"n": 1, "matching": [[0, 0], [1, 4], [2, 5]]}"#;
        assert!(matches!(
            read_graph(text.as_bytes()),
            Err(Error::Graph(GraphError::SelfPairedDart(0)))
        ));
        assert!(matches!(read_graph("{".as_bytes()), Err(Error::Json(_))));
    }

    #[test]
    fn degree_multiset() {
        let g = RibbonGraph::from_matching(1, &[(0, 3), (1, 5), (2, 4)]).unwrap();
        let s = FaceSummary::new(&g.faces());
        assert_eq!(s.degrees, vec![[2, 3]]);
        assert_eq!(s.genus, Some(0));
    }
}
