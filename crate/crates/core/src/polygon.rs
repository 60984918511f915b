//! The n-gon with its return-path-swapping braiding and forward orientation.
//!
//! Vertices are labelled `"1"..="n"`; index `k` holds label `k+1`, and all
//! modular arithmetic on vertices lives here.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::braid::SigmaSpec;
use crate::complex::JSpec;
use crate::graph::BidiGraph;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolygonError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    NTooSmall(usize),
}

#[derive(Debug, Clone)]
pub struct PolygonModel {
    pub n: usize,
    pub graph: BidiGraph,
    pub sigma_spec: SigmaSpec,
    pub j_spec: JSpec,
}

impl PolygonModel {
    pub fn next(&self, mu: usize) -> usize {
        (mu + 1) % self.n
    }

    pub fn prev(&self, mu: usize) -> usize {
        (mu + self.n - 1) % self.n
    }
}

pub fn make_polygon(n: usize) -> Result<PolygonModel, PolygonError> {
    if n < 3 {
        return Err(PolygonError::NTooSmall(n));
    }
    let labels: Vec<String> = (1..=n).map(|k| k.to_string()).collect();
    let mut edges = Vec::with_capacity(2 * n);
    for mu in 0..n {
        let nu = (mu + 1) % n;
        edges.push((labels[mu].clone(), labels[nu].clone()));
        edges.push((labels[nu].clone(), labels[mu].clone()));
    }
    let graph = BidiGraph::validate_bidirected(labels, edges).expect("polygon is bidirected");

    // swap the two return paths at each vertex, fix every chain
    let mut sigma_spec = SigmaSpec::identity(&graph);
    for mu in 0..n {
        let (prev, next) = ((mu + n - 1) % n, (mu + 1) % n);
        let block = sigma_spec.blocks.get_mut(&(mu, mu)).expect("return paths exist");
        block.insert(next, prev);
        block.insert(prev, next);
    }

    let holomorphic = (0..n).map(|mu| (mu, (mu + 1) % n)).collect();
    Ok(PolygonModel { n, graph, sigma_spec, j_spec: JSpec { holomorphic } })
}

/// Values every n-gon must reproduce.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoldenReport {
    pub dim_omega1: usize,
    pub dim_omega2: usize,
    pub dim_omega3: usize,
    pub dim_omega20: usize,
    pub dim_omega02: usize,
    pub dim_h10: usize,
    pub dim_h11: usize,
    pub dim_h00: usize,
    pub dim_sections_omega1: usize,
    pub dim_sections_omega2: usize,
    pub ring_dims: Vec<usize>,
    pub gram_psd: bool,
}

pub fn golden_report(n: usize) -> Result<GoldenReport, PolygonError> {
    if n < 3 {
        return Err(PolygonError::NTooSmall(n));
    }
    Ok(GoldenReport {
        dim_omega1: 2 * n,
        dim_omega2: n,
        dim_omega3: 0,
        dim_omega20: 0,
        dim_omega02: 0,
        dim_h10: 1,
        dim_h11: 1,
        dim_h00: 1,
        dim_sections_omega1: 2,
        dim_sections_omega2: 1,
        ring_dims: vec![1, 2, 1],
        gram_psd: true,
    })
}

impl GoldenReport {
    /// Field-by-field comparison, keyed by field name.
    pub fn compare(&self, computed: &GoldenReport) -> BTreeMap<&'static str, (String, String)> {
        let mut diff = BTreeMap::new();
        let mut check = |name: &'static str, a: String, b: String| {
            if a != b {
                diff.insert(name, (a, b));
            }
        };
        check("dim_omega1", self.dim_omega1.to_string(), computed.dim_omega1.to_string());
        check("dim_omega2", self.dim_omega2.to_string(), computed.dim_omega2.to_string());
        check("dim_omega3", self.dim_omega3.to_string(), computed.dim_omega3.to_string());
        check("dim_omega20", self.dim_omega20.to_string(), computed.dim_omega20.to_string());
        check("dim_omega02", self.dim_omega02.to_string(), computed.dim_omega02.to_string());
        check("dim_h10", self.dim_h10.to_string(), computed.dim_h10.to_string());
        check("dim_h11", self.dim_h11.to_string(), computed.dim_h11.to_string());
        check("dim_h00", self.dim_h00.to_string(), computed.dim_h00.to_string());
        check(
            "dim_sections_omega1",
            self.dim_sections_omega1.to_string(),
            computed.dim_sections_omega1.to_string(),
        );
        check(
            "dim_sections_omega2",
            self.dim_sections_omega2.to_string(),
            computed.dim_sections_omega2.to_string(),
        );
        check("ring_dims", format!("{:?}", self.ring_dims), format!("{:?}", computed.ring_dims));
        check("gram_psd", self.gram_psd.to_string(), computed.gram_psd.to_string());
        diff
    }
}
