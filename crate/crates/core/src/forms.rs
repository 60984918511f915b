//! Quotient form spaces `Ω^n = PathSpace(n) / ker A_n`, wedge, `d` and `∗`.

use num_traits::{One, Zero};

use crate::braid::{star_path_matrix, BraidError, Budget, SigmaOperator};
use crate::first_order::Side;
use crate::graph::{BidiGraph, PathSpace};
use crate::matrix::{ExactMatrix, Vector};
use crate::scalar::GaussianRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormError {
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error("degree {requested} is beyond the computed range (max {max})")]
    DegreeOutOfRange { requested: usize, max: usize },
}

/// `Ω^n` presented by a chosen set of path representatives.
#[derive(Debug, Clone)]
pub struct FormSpace {
    paths: PathSpace,
    antisymmetrizer: ExactMatrix,
    /// Path indices of the quotient basis representatives.
    representatives: Vec<usize>,
    projection: ExactMatrix,
    lift: ExactMatrix,
}

impl FormSpace {
    pub fn build(sigma: &SigmaOperator, paths: PathSpace, budget: Budget) -> Result<Self, BraidError> {
        let a = sigma.antisymmetrizer(&paths, budget)?;
        let n = paths.dim();
        let kernel = a.kernel_basis();
        let (representatives, projection) = if kernel.is_empty() {
            ((0..n).collect(), ExactMatrix::identity(n))
        } else {
            let rref = ExactMatrix::from_rows(kernel).expect("equal lengths").rref();
            let free = rref.free_columns();
            let mut p = ExactMatrix::zeros(free.len(), n);
            for (q, &j) in free.iter().enumerate() {
                p.set(q, j, GaussianRational::one());
                for (r, &piv) in rref.pivots.iter().enumerate() {
                    let x = rref.reduced.get(r, j);
                    if !x.is_zero() {
                        p.set(q, piv, -x);
                    }
                }
            }
            (free, p)
        };
        let mut lift = ExactMatrix::zeros(n, representatives.len());
        for (q, &j) in representatives.iter().enumerate() {
            lift.set(j, q, GaussianRational::one());
        }
        Ok(FormSpace { paths, antisymmetrizer: a, representatives, projection, lift })
    }

    pub fn degree(&self) -> usize {
        self.paths.degree()
    }

    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    pub fn paths(&self) -> &PathSpace {
        &self.paths
    }

    pub fn antisymmetrizer(&self) -> &ExactMatrix {
        &self.antisymmetrizer
    }

    pub fn representatives(&self) -> &[usize] {
        &self.representatives
    }

    pub fn projection(&self) -> &ExactMatrix {
        &self.projection
    }

    pub fn lift_matrix(&self) -> &ExactMatrix {
        &self.lift
    }

    pub fn project(&self, v: &[GaussianRational]) -> Vector {
        self.projection.mul_vec(v)
    }

    pub fn lift(&self, w: &[GaussianRational]) -> Vector {
        let mut v = vec![GaussianRational::zero(); self.paths.dim()];
        for (q, &j) in self.representatives.iter().enumerate() {
            v[j] = w[q].clone();
        }
        v
    }

    /// Source vertex of the `q`-th basis form.
    pub fn source(&self, q: usize) -> usize {
        self.paths.source(self.representatives[q])
    }

    pub fn target(&self, q: usize) -> usize {
        self.paths.target(self.representatives[q])
    }

    pub fn unit(&self, q: usize) -> Vector {
        crate::matrix::unit_vector(self.dim(), q)
    }
}

/// The graded calculus up to a maximum degree.
#[derive(Debug, Clone)]
pub struct Calculus {
    graph: BidiGraph,
    sigma: SigmaOperator,
    forms: Vec<FormSpace>,
}

/// Outcome of the dimension search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum CalculusDimension {
    Exactly(usize),
    Unknown(usize),
}

impl Calculus {
    pub fn new(graph: BidiGraph, sigma: SigmaOperator, max_degree: usize, budget: Budget) -> Result<Self, FormError> {
        let mut forms = Vec::with_capacity(max_degree + 1);
        for n in 0..=max_degree {
            let paths = PathSpace::new(&graph, n);
            forms.push(FormSpace::build(&sigma, paths, budget)?);
        }
        Ok(Calculus { graph, sigma, forms })
    }

    pub fn graph(&self) -> &BidiGraph {
        &self.graph
    }

    pub fn sigma(&self) -> &SigmaOperator {
        &self.sigma
    }

    pub fn max_degree(&self) -> usize {
        self.forms.len() - 1
    }

    pub fn form(&self, n: usize) -> Result<&FormSpace, FormError> {
        self.forms.get(n).ok_or(FormError::DegreeOutOfRange { requested: n, max: self.max_degree() })
    }

    pub fn space(&self, n: usize) -> &FormSpace {
        &self.forms[n]
    }

    pub fn dim(&self, n: usize) -> usize {
        self.forms[n].dim()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.forms.iter().map(FormSpace::dim).collect()
    }

    /// Smallest `n` with `Ω^n = 0`, minus one, searched among built degrees below `cutoff`.
    pub fn calculus_dimension(&self, cutoff: usize) -> CalculusDimension {
        (0..cutoff.min(self.forms.len()))
            .find(|&n| self.forms[n].dim() == 0)
            .map_or(CalculusDimension::Unknown(cutoff), |n| {
                CalculusDimension::Exactly(n.saturating_sub(1))
            })
    }

    pub fn theta(&self) -> Vector {
        vec![GaussianRational::one(); self.dim(1)]
    }

    /// Module action of the function `f` (vertex values) on a degree-`n` form.
    pub fn act(&self, n: usize, f: &[GaussianRational], w: &[GaussianRational], side: Side) -> Vector {
        let space = &self.forms[n];
        (0..space.dim())
            .map(|q| {
                let v = match side {
                    Side::Left => space.source(q),
                    Side::Right => space.target(q),
                };
                &f[v] * &w[q]
            })
            .collect()
    }

    /// Tensor product over `A` of path vectors of degrees `a` and `b`.
    pub fn tensor_paths(&self, a: usize, u: &[GaussianRational], b: usize, v: &[GaussianRational]) -> Vector {
        let (pa, pb, pc) = (self.forms[a].paths(), self.forms[b].paths(), self.forms[a + b].paths());
        let mut out = vec![GaussianRational::zero(); pc.dim()];
        let nz_v: Vec<(usize, &GaussianRational)> = v.iter().enumerate().filter(|(_, x)| !x.is_zero()).collect();
        for (i, x) in u.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let p = pa.path(i);
            for &(j, y) in &nz_v {
                let q = pb.path(j);
                if p.last() != q.first() {
                    continue;
                }
                let mut r = p.clone();
                r.extend_from_slice(&q[1..]);
                let k = pc.index_of(&r).expect("concatenation is a path");
                out[k] += &(x * y);
            }
        }
        out
    }

    /// `ω ∧ η` for `ω ∈ Ω^a`, `η ∈ Ω^b`.
    pub fn wedge(&self, a: usize, w: &[GaussianRational], b: usize, eta: &[GaussianRational]) -> Result<Vector, FormError> {
        self.form(a + b)?;
        let t = self.tensor_paths(a, &self.forms[a].lift(w), b, &self.forms[b].lift(eta));
        Ok(self.forms[a + b].project(&t))
    }

    /// Wedge with arbitrary path representatives instead of the canonical lifts.
    pub fn wedge_lifted(&self, a: usize, u: &[GaussianRational], b: usize, v: &[GaussianRational]) -> Result<Vector, FormError> {
        self.form(a + b)?;
        Ok(self.forms[a + b].project(&self.tensor_paths(a, u, b, v)))
    }

    /// `dω = θ∧ω − (−1)^n ω∧θ`.
    pub fn differential(&self, n: usize, w: &[GaussianRational]) -> Result<Vector, FormError> {
        let th = self.theta();
        let left = self.wedge(1, &th, n, w)?;
        let right = self.wedge(n, w, 1, &th)?;
        Ok(if n % 2 == 0 {
            crate::matrix::vec_sub(&left, &right)
        } else {
            crate::matrix::vec_add(&left, &right)
        })
    }

    /// Matrix of `d: Ω^n → Ω^{n+1}`.
    pub fn differential_matrix(&self, n: usize) -> Result<ExactMatrix, FormError> {
        self.form(n + 1)?;
        let cols: Vec<Vector> =
            (0..self.dim(n)).map(|q| self.differential(n, &self.forms[n].unit(q))).collect::<Result<_, _>>()?;
        Ok(ExactMatrix::from_columns(self.dim(n + 1), &cols))
    }

    /// Graded antilinear involution on `Ω^n`.
    pub fn star(&self, n: usize, w: &[GaussianRational]) -> Vector {
        let space = &self.forms[n];
        let s = star_path_matrix(space.paths());
        let conj: Vector = space.lift(w).iter().map(GaussianRational::conj).collect();
        space.project(&s.mul_vec(&conj))
    }

    /// Checks `A_n(η^∗) = (A_n η)^∗` on the path basis; returns the first failing path index.
    pub fn antisymmetrizer_star_defect(&self, n: usize) -> Option<usize> {
        let space = &self.forms[n];
        let s = star_path_matrix(space.paths());
        let a = space.antisymmetrizer();
        a.mul(&s).first_difference(&s.mul(&a.conj())).map(|(_, col)| col)
    }
}
