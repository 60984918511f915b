//! The function algebra `A = C(V)` and the first-order calculus on edges.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::graph::BidiGraph;
use crate::scalar::GaussianRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraInputError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A function on vertices, one value per vertex in graph order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraElement {
    pub values: Vec<GaussianRational>,
}

/// A 1-form in the edge basis `ξ_{x→y}`, one coefficient per directed edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneForm {
    pub coeffs: Vec<GaussianRational>,
}

impl AlgebraElement {
    pub fn constant(g: &BidiGraph, c: GaussianRational) -> Self {
        AlgebraElement { values: vec![c; g.vertex_count()] }
    }

    pub fn delta(g: &BidiGraph, x: usize) -> Self {
        let mut values = vec![GaussianRational::zero(); g.vertex_count()];
        values[x] = GaussianRational::one();
        AlgebraElement { values }
    }

    /// Reads a `label → scalar` map; unlisted vertices are zero.
    pub fn from_labels(g: &BidiGraph, map: &BTreeMap<String, GaussianRational>) -> Result<Self, AlgebraInputError> {
        let mut values = vec![GaussianRational::zero(); g.vertex_count()];
        for (label, value) in map {
            let v = g.vertex(label).ok_or_else(|| AlgebraInputError::UnknownVertex(label.clone()))?;
            values[v] = value.clone();
        }
        Ok(AlgebraElement { values })
    }

    pub fn mul(&self, other: &AlgebraElement) -> Self {
        AlgebraElement { values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect() }
    }

    pub fn conj(&self) -> Self {
        AlgebraElement { values: self.values.iter().map(GaussianRational::conj).collect() }
    }
}

impl OneForm {
    pub fn zero(g: &BidiGraph) -> Self {
        OneForm { coeffs: vec![GaussianRational::zero(); g.edges().len()] }
    }

    pub fn basis(g: &BidiGraph, x: usize, y: usize) -> Self {
        let mut w = Self::zero(g);
        w.coeffs[g.edge_index(x, y).expect("edge exists")] = GaussianRational::one();
        w
    }

    pub fn add(&self, other: &OneForm) -> Self {
        OneForm { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &OneForm) -> Self {
        OneForm { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect() }
    }
}

/// `d f = Σ (f(y) − f(x)) ξ_{x→y}`.
pub fn differential0(g: &BidiGraph, f: &AlgebraElement) -> OneForm {
    OneForm { coeffs: g.edges().iter().map(|&(x, y)| &f.values[y] - &f.values[x]).collect() }
}

/// Left action scales `ξ_{x→y}` by `f(x)`, right action by `f(y)`.
pub fn act(g: &BidiGraph, f: &AlgebraElement, w: &OneForm, side: Side) -> OneForm {
    OneForm {
        coeffs: g
            .edges()
            .iter()
            .zip(&w.coeffs)
            .map(|(&(x, y), c)| match side {
                Side::Left => &f.values[x] * c,
                Side::Right => c * &f.values[y],
            })
            .collect(),
    }
}

/// Antilinear involution `ξ_{x→y} ↦ −ξ_{y→x}`.
pub fn star1(g: &BidiGraph, w: &OneForm) -> OneForm {
    let mut out = OneForm::zero(g);
    for (k, &(x, y)) in g.edges().iter().enumerate() {
        let r = g.edge_index(y, x).expect("bidirected");
        out.coeffs[r] = -w.coeffs[k].conj();
    }
    out
}

/// The inner element `θ = Σ ξ_{x→y}`.
pub fn theta(g: &BidiGraph) -> OneForm {
    OneForm { coeffs: vec![GaussianRational::one(); g.edges().len()] }
}
