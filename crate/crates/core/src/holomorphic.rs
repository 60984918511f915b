//! Bimodule connections on `Ω¹`, the induced `∂̄`-operators, holomorphic
//! sections and the section ring.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::complex::ComplexStructure;
use crate::first_order::Side;
use crate::forms::Calculus;
use crate::graph::PathSpace;
use crate::matrix::{in_span, is_zero_vector, span_rank, unit_vector, vec_add, vec_sub, ExactMatrix, Vector};
use crate::scalar::GaussianRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HolomorphicError {
    #[error("Leibniz rule `{rule}` fails for δ_{vertex} and basis element {element}")]
    LeibnizFailure { rule: &'static str, vertex: String, element: String },
    #[error("α is not a bimodule map Ω¹ → Ω¹⊗Ω¹")]
    AlphaNotBimodule,
    #[error("σ restriction identity `{identity}` fails on 2-path {path}")]
    IdentityFailure { identity: &'static str, path: String },
    #[error("∇̄⊗² does not descend: {0}")]
    DescentFailure(String),
    #[error("holomorphic structures need Ω² (max degree ≥ 3)")]
    DegreeTooSmall,
}

/// Basis of `Ω^a ⊗_A Ω^b`: pairs of basis elements whose endpoints meet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorSpace {
    basis: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
}

impl TensorSpace {
    /// `left` and `right` list `(source, target)` of each basis element.
    pub fn new(left: &[(usize, usize)], right: &[(usize, usize)]) -> Self {
        let mut basis = Vec::new();
        for (i, l) in left.iter().enumerate() {
            for (j, r) in right.iter().enumerate() {
                if l.1 == r.0 {
                    basis.push((i, j));
                }
            }
        }
        let index = basis.iter().enumerate().map(|(k, &p)| (p, k)).collect();
        TensorSpace { basis, index }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[(usize, usize)] {
        &self.basis
    }

    pub fn index_of(&self, i: usize, j: usize) -> Option<usize> {
        self.index.get(&(i, j)).copied()
    }
}

fn endpoints(calc: &Calculus, n: usize) -> Vec<(usize, usize)> {
    let s = calc.space(n);
    (0..s.dim()).map(|q| (s.source(q), s.target(q))).collect()
}

/// `ω ⊗ η` in a [`TensorSpace`] for `ω ∈ Ω^a`, `η ∈ Ω^b`.
pub fn tensor_forms(t: &TensorSpace, w: &[GaussianRational], eta: &[GaussianRational]) -> Vector {
    let mut out = vec![GaussianRational::zero(); t.dim()];
    for (k, &(i, j)) in t.basis().iter().enumerate() {
        if !w[i].is_zero() && !eta[j].is_zero() {
            out[k] = &w[i] * &eta[j];
        }
    }
    out
}

/// Diagonal `π^{0,1}` on the first step of every path in `space`.
fn first_leg_antiholomorphic(space: &PathSpace, cs: &ComplexStructure) -> ExactMatrix {
    let diag: Vec<GaussianRational> = space
        .paths()
        .iter()
        .map(|p| GaussianRational::from((!cs.spec().is_holomorphic(p[0], p[1])) as i64))
        .collect();
    ExactMatrix::diagonal(&diag)
}

/// Left action on a path vector: scale by `f` at the first (or last) vertex.
fn act_paths(space: &PathSpace, f: &[GaussianRational], v: &[GaussianRational], side: Side) -> Vector {
    (0..space.dim())
        .map(|k| {
            let x = match side {
                Side::Left => space.source(k),
                Side::Right => space.target(k),
            };
            &f[x] * &v[k]
        })
        .collect()
}

/// `∇ω = θ⊗ω − σ(ω⊗θ) + α(ω)` as a matrix `Ω¹ → Ω¹⊗Ω¹` (2-path basis).
#[derive(Debug, Clone)]
pub struct Connection {
    pub matrix: ExactMatrix,
}

pub fn connection_from_sigma(calc: &Calculus, alpha: Option<&ExactMatrix>) -> Result<Connection, HolomorphicError> {
    let s1 = calc.space(1).paths();
    let s2 = calc.space(2).paths();
    let th = calc.theta();
    let sigma = calc.sigma().matrix();
    if let Some(a) = alpha {
        if a.rows() != s2.dim() || a.cols() != s1.dim() || !crate::braid::preserves_endpoints(a, s1, s2) {
            return Err(HolomorphicError::AlphaNotBimodule);
        }
    }
    let mut cols = Vec::with_capacity(s1.dim());
    for k in 0..s1.dim() {
        let e = unit_vector(s1.dim(), k);
        let left = calc.tensor_paths(1, &th, 1, &e);
        let right = sigma.mul_vec(&calc.tensor_paths(1, &e, 1, &th));
        let mut col = vec_sub(&left, &right);
        if let Some(a) = alpha {
            col = vec_add(&col, &a.column(k));
        }
        cols.push(col);
    }
    let conn = Connection { matrix: ExactMatrix::from_columns(s2.dim(), &cols) };
    check_connection_leibniz(calc, &conn)?;
    Ok(conn)
}

/// Left Leibniz and σ-twisted right Leibniz on every `(δ_x, ξ_e)` pair.
pub fn check_connection_leibniz(calc: &Calculus, conn: &Connection) -> Result<(), HolomorphicError> {
    let g = calc.graph();
    let s1 = calc.space(1).paths();
    let s2 = calc.space(2).paths();
    let sigma = calc.sigma().matrix();
    let nv = g.vertex_count();
    for x in 0..nv {
        let f = unit_vector(nv, x);
        let df = calc.differential(0, &f).expect("degree 1 exists");
        for k in 0..s1.dim() {
            let e = unit_vector(s1.dim(), k);
            let fail = |rule| HolomorphicError::LeibnizFailure {
                rule,
                vertex: g.label(x).to_string(),
                element: g.render_path(s1.path(k)),
            };
            let lhs = conn.matrix.mul_vec(&calc.act(1, &f, &e, Side::Left));
            let rhs = vec_add(&calc.tensor_paths(1, &df, 1, &e), &act_paths(s2, &f, &conn.matrix.mul_vec(&e), Side::Left));
            if lhs != rhs {
                return Err(fail("∇(fω) = df⊗ω + f∇ω"));
            }
            let lhs = conn.matrix.mul_vec(&calc.act(1, &f, &e, Side::Right));
            let rhs = vec_add(
                &act_paths(s2, &f, &conn.matrix.mul_vec(&e), Side::Right),
                &sigma.mul_vec(&calc.tensor_paths(1, &e, 1, &df)),
            );
            if lhs != rhs {
                return Err(fail("∇(ωf) = ∇(ω)f + σ(ω⊗df)"));
            }
        }
    }
    Ok(())
}

/// Maps a 3-path vector to `Ω² ⊗ Ω¹` by projecting the first two steps.
fn project_first_two(calc: &Calculus, t: &TensorSpace, v: &[GaussianRational]) -> Vector {
    let s3 = calc.space(3).paths();
    let f2 = calc.space(2);
    let g = calc.graph();
    let mut out = vec![GaussianRational::zero(); t.dim()];
    for (k, c) in v.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let p = s3.path(k);
        let two = f2.paths().index_of(&p[..3]).expect("prefix is a path");
        let e = g.edge_index(p[2], p[3]).expect("last step is an edge");
        for j in 0..f2.dim() {
            let x = f2.projection().get(j, two);
            if !x.is_zero() {
                let idx = t.index_of(j, e).expect("endpoints agree");
                out[idx] += &(x * c);
            }
        }
    }
    out
}

/// Maps a 3-path vector to `Ω¹ ⊗ Ω²` by projecting the last two steps.
fn project_last_two(calc: &Calculus, t: &TensorSpace, v: &[GaussianRational]) -> Vector {
    let s3 = calc.space(3).paths();
    let f2 = calc.space(2);
    let g = calc.graph();
    let mut out = vec![GaussianRational::zero(); t.dim()];
    for (k, c) in v.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let p = s3.path(k);
        let e = g.edge_index(p[0], p[1]).expect("first step is an edge");
        let two = f2.paths().index_of(&p[1..]).expect("suffix is a path");
        for j in 0..f2.dim() {
            let x = f2.projection().get(j, two);
            if !x.is_zero() {
                let idx = t.index_of(e, j).expect("endpoints agree");
                out[idx] += &(x * c);
            }
        }
    }
    out
}

/// The two halves of the curvature: `Σ c_ab dξ_a⊗ξ_b` and `Σ c_ab ξ_a∧Nξ_b`,
/// summed over the terms `c_ab ξ_a⊗ξ_b` of `M e`, for each edge `e`.
fn curvature_parts(calc: &Calculus, t: &TensorSpace, m: &ExactMatrix, n: &ExactMatrix) -> (ExactMatrix, ExactMatrix) {
    let s1 = calc.space(1).paths();
    let s2 = calc.space(2).paths();
    let s3 = calc.space(3).paths();
    let g = calc.graph();
    let lift2 = calc.space(2);
    let dlifted: Vec<Vector> = (0..s1.dim())
        .map(|a| lift2.lift(&calc.differential(1, &unit_vector(s1.dim(), a)).expect("degree 2 exists")))
        .collect();
    let mut dcols = Vec::with_capacity(s1.dim());
    let mut wcols = Vec::with_capacity(s1.dim());
    for e in 0..s1.dim() {
        let mut dacc = vec![GaussianRational::zero(); s3.dim()];
        let mut wacc = vec![GaussianRational::zero(); s3.dim()];
        for r in 0..s2.dim() {
            let c = m.get(r, e);
            if c.is_zero() {
                continue;
            }
            let p = s2.path(r);
            let a = g.edge_index(p[0], p[1]).expect("edge");
            let b = g.edge_index(p[1], p[2]).expect("edge");
            let t1 = calc.tensor_paths(2, &dlifted[a], 1, &unit_vector(s1.dim(), b));
            let t2 = calc.tensor_paths(1, &unit_vector(s1.dim(), a), 2, &n.column(b));
            for (acc, term) in [(&mut dacc, t1), (&mut wacc, t2)] {
                for (k, x) in term.iter().enumerate() {
                    if !x.is_zero() {
                        acc[k] += &(x * c);
                    }
                }
            }
        }
        dcols.push(project_first_two(calc, t, &dacc));
        wcols.push(project_first_two(calc, t, &wacc));
    }
    (ExactMatrix::from_columns(t.dim(), &dcols), ExactMatrix::from_columns(t.dim(), &wcols))
}

/// Basis of `Ω² ⊗ Ω¹`.
pub fn omega2_omega1(calc: &Calculus) -> TensorSpace {
    TensorSpace::new(&endpoints(calc, 2), &endpoints(calc, 1))
}

/// `∇²: Ω¹ → Ω² ⊗ Ω¹` via `∇(ω⊗e) = dω⊗e − ω∧∇e`, in the basis [`omega2_omega1`].
pub fn curvature(calc: &Calculus, conn: &Connection) -> ExactMatrix {
    let (d, w) = curvature_parts(calc, &omega2_omega1(calc), &conn.matrix, &conn.matrix);
    d.sub(&w)
}

/// `(dω⊗e, ω∧∇e)` halves of the curvature, kept apart for diagnostics.
pub fn curvature_split(calc: &Calculus, conn: &Connection) -> (ExactMatrix, ExactMatrix) {
    curvature_parts(calc, &omega2_omega1(calc), &conn.matrix, &conn.matrix)
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct RestrictionReport {
    pub holomorphic_into_antiholomorphic_zero: bool,
    pub antiholomorphic_into_holomorphic_zero: bool,
    pub intertwines_projectors: bool,
    pub restriction_invertible: bool,
}

/// `σ̄: Ω¹⊗Ω^{0,1} → Ω^{0,1}⊗Ω¹`, with the 2-path indices of its domain and codomain.
#[derive(Debug, Clone)]
pub struct SigmaBar {
    pub domain: Vec<usize>,
    pub codomain: Vec<usize>,
    pub matrix: ExactMatrix,
    pub report: RestrictionReport,
}

pub fn restrict_sigma_01(cs: &ComplexStructure) -> Result<SigmaBar, HolomorphicError> {
    let calc = cs.calculus();
    let s2 = calc.space(2).paths();
    let g = calc.graph();
    let sigma = calc.sigma().matrix();
    let hol = |x: usize, y: usize| cs.spec().is_holomorphic(x, y);
    let diag = |f: &dyn Fn(&[usize]) -> bool| {
        ExactMatrix::diagonal(&s2.paths().iter().map(|p| GaussianRational::from(f(p) as i64)).collect::<Vec<_>>())
    };
    let first01 = diag(&|p| !hol(p[0], p[1]));
    let first10 = diag(&|p| hol(p[0], p[1]));
    let second01 = diag(&|p| !hol(p[1], p[2]));
    let second10 = diag(&|p| hol(p[1], p[2]));
    let witness = |m: &ExactMatrix, identity| {
        m.first_difference(&ExactMatrix::zeros(m.rows(), m.cols()))
            .map(|(_, col)| HolomorphicError::IdentityFailure { identity, path: g.render_path(s2.path(col)) })
    };
    let a = first10.mul(sigma).mul(&second01);
    let b = first01.mul(sigma).mul(&second10);
    let c = sigma.mul(&second01).sub(&first01.mul(sigma));
    let report = RestrictionReport {
        holomorphic_into_antiholomorphic_zero: a.is_zero(),
        antiholomorphic_into_holomorphic_zero: b.is_zero(),
        intertwines_projectors: c.is_zero(),
        restriction_invertible: false,
    };
    if let Some(e) = witness(&a, "(π¹⁰⊗id)σ(id⊗π⁰¹) = 0")
        .or_else(|| witness(&b, "(π⁰¹⊗id)σ(id⊗π¹⁰) = 0"))
        .or_else(|| witness(&c, "σ(id⊗π⁰¹) = (π⁰¹⊗id)σ"))
    {
        return Err(e);
    }
    let domain: Vec<usize> = (0..s2.dim()).filter(|&k| !hol(s2.path(k)[1], s2.path(k)[2])).collect();
    let codomain: Vec<usize> = (0..s2.dim()).filter(|&k| !hol(s2.path(k)[0], s2.path(k)[1])).collect();
    let matrix = sigma.select_rows(&codomain).select_columns(&domain);
    let invertible = matrix.is_square() && matrix.rank() == matrix.rows();
    Ok(SigmaBar { domain, codomain, matrix, report: RestrictionReport { restriction_invertible: invertible, ..report } })
}

/// The `∂̄`-operators on `Ω¹` and `Ω²` induced by a connection.
#[derive(Debug, Clone)]
pub struct HolomorphicStructure {
    /// `∇̄ = (π^{0,1}⊗id)∇`, `Ω¹ → Ω¹⊗Ω¹` (2-path basis).
    pub nabla_bar: ExactMatrix,
    /// `∇^{⊗2}` and `∇̄^{⊗2}` on `Ω¹⊗Ω¹`, valued in 3-paths.
    pub nabla_tensor2: ExactMatrix,
    pub nabla_bar_tensor2: ExactMatrix,
    /// `Ω¹ ⊗ Ω²` basis and `∇̄^{(2)}: Ω² → Ω^{0,1}⊗Ω²`.
    pub omega1_omega2: TensorSpace,
    pub nabla_bar2: ExactMatrix,
    pub sigma_bar: SigmaBar,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct HolomorphicChecks {
    pub tensor_square_matches_projection: bool,
    pub descent_sigma23_invariant: bool,
    pub descent_kills_kernel: bool,
}

pub fn build_holomorphic(cs: &ComplexStructure, conn: &Connection) -> Result<(HolomorphicStructure, HolomorphicChecks), HolomorphicError> {
    let calc = cs.calculus();
    if calc.max_degree() < 3 || cs.operator_range() < 2 {
        return Err(HolomorphicError::DegreeTooSmall);
    }
    let g = calc.graph();
    let s1 = calc.space(1).paths();
    let s2 = calc.space(2).paths();
    let s3 = calc.space(3).paths();
    let sigma_bar = restrict_sigma_01(cs)?;
    let p01_2 = first_leg_antiholomorphic(s2, cs);
    let p01_3 = first_leg_antiholomorphic(s3, cs);
    let nabla_bar = p01_2.mul(&conn.matrix);

    let sigma12 = calc.sigma().leg_operator(s3, 1).expect("degree 3");
    let sigma23 = calc.sigma().leg_operator(s3, 2).expect("degree 3");
    let tensor2 = |n: &ExactMatrix| {
        let cols: Vec<Vector> = s2
            .paths()
            .iter()
            .map(|p| {
                let a = unit_vector(s1.dim(), g.edge_index(p[0], p[1]).expect("edge"));
                let b = unit_vector(s1.dim(), g.edge_index(p[1], p[2]).expect("edge"));
                let first = calc.tensor_paths(2, &n.mul_vec(&a), 1, &b);
                let second = sigma12.mul_vec(&calc.tensor_paths(1, &a, 2, &n.mul_vec(&b)));
                vec_add(&first, &second)
            })
            .collect();
        ExactMatrix::from_columns(s3.dim(), &cols)
    };
    let nabla_tensor2 = tensor2(&conn.matrix);
    let nabla_bar_tensor2 = tensor2(&nabla_bar);

    let omega1_omega2 = TensorSpace::new(&endpoints(calc, 1), &endpoints(calc, 2));
    let fixed = calc.space(2).antisymmetrizer().kernel_basis();
    let mut sigma23_ok = true;
    let mut kills_ok = true;
    for v in &fixed {
        let w = nabla_bar_tensor2.mul_vec(v);
        sigma23_ok &= sigma23.mul_vec(&w) == w;
        kills_ok &= is_zero_vector(&project_last_two(calc, &omega1_omega2, &w));
    }
    let lifted = nabla_bar_tensor2.mul(calc.space(2).lift_matrix());
    let cols: Vec<Vector> =
        lifted.columns().iter().map(|c| project_last_two(calc, &omega1_omega2, c)).collect();
    let nabla_bar2 = ExactMatrix::from_columns(omega1_omega2.dim(), &cols);
    let checks = HolomorphicChecks {
        tensor_square_matches_projection: p01_3.mul(&nabla_tensor2) == nabla_bar_tensor2,
        descent_sigma23_invariant: sigma23_ok,
        descent_kills_kernel: kills_ok,
    };
    let hs = HolomorphicStructure { nabla_bar, nabla_tensor2, nabla_bar_tensor2, omega1_omega2, nabla_bar2, sigma_bar };
    Ok((hs, checks))
}

impl HolomorphicStructure {
    /// `∇̄(fω) = ∂̄f⊗ω + f∇̄ω` and `∇̄(ωf) = ∇̄(ω)f + σ̄(ω⊗∂̄f)` on all `(δ_x, ξ_e)`.
    pub fn check_delbar_leibniz(&self, cs: &ComplexStructure) -> Result<(), HolomorphicError> {
        let calc = cs.calculus();
        let g = calc.graph();
        let s1 = calc.space(1).paths();
        let s2 = calc.space(2).paths();
        let sigma = calc.sigma().matrix();
        let nv = g.vertex_count();
        for x in 0..nv {
            let f = unit_vector(nv, x);
            let dbar = cs.delbar(0).mul_vec(&f);
            for k in 0..s1.dim() {
                let e = unit_vector(s1.dim(), k);
                let fail = |rule| HolomorphicError::LeibnizFailure {
                    rule,
                    vertex: g.label(x).to_string(),
                    element: g.render_path(s1.path(k)),
                };
                let lhs = self.nabla_bar.mul_vec(&calc.act(1, &f, &e, Side::Left));
                let rhs =
                    vec_add(&calc.tensor_paths(1, &dbar, 1, &e), &act_paths(s2, &f, &self.nabla_bar.mul_vec(&e), Side::Left));
                if lhs != rhs {
                    return Err(fail("∇̄(fω) = ∂̄f⊗ω + f∇̄ω"));
                }
                let lhs = self.nabla_bar.mul_vec(&calc.act(1, &f, &e, Side::Right));
                let rhs = vec_add(
                    &act_paths(s2, &f, &self.nabla_bar.mul_vec(&e), Side::Right),
                    &sigma.mul_vec(&calc.tensor_paths(1, &e, 1, &dbar)),
                );
                if lhs != rhs {
                    return Err(fail("∇̄(ωf) = ∇̄(ω)f + σ̄(ω⊗∂̄f)"));
                }
            }
        }
        Ok(())
    }

    /// `∇̄^{(2)}(fw) = ∂̄f⊗w + f∇̄^{(2)}w` on all `(δ_x, Ω²-basis)` pairs.
    pub fn check_delbar2_leibniz(&self, cs: &ComplexStructure) -> Result<(), HolomorphicError> {
        let calc = cs.calculus();
        let g = calc.graph();
        let f2 = calc.space(2);
        let t = &self.omega1_omega2;
        let nv = g.vertex_count();
        for x in 0..nv {
            let f = unit_vector(nv, x);
            let dbar = cs.delbar(0).mul_vec(&f);
            for q in 0..f2.dim() {
                let w = f2.unit(q);
                let lhs = self.nabla_bar2.mul_vec(&calc.act(2, &f, &w, Side::Left));
                let image = self.nabla_bar2.mul_vec(&w);
                let scaled: Vector = t
                    .basis()
                    .iter()
                    .zip(&image)
                    .map(|(&(e, _), c)| &f[g.edges()[e].0] * c)
                    .collect();
                let rhs = vec_add(&tensor_forms(t, &dbar, &w), &scaled);
                if lhs != rhs {
                    return Err(HolomorphicError::LeibnizFailure {
                        rule: "∇̄⁽²⁾(fw) = ∂̄f⊗w + f∇̄⁽²⁾w",
                        vertex: g.label(x).to_string(),
                        element: g.render_path(f2.paths().path(f2.representatives()[q])),
                    });
                }
            }
        }
        Ok(())
    }

    /// `∇̄²: Ω¹ → Ω^{0,2} ⊗ Ω¹`; zero means the structure is holomorphic.
    pub fn delbar_curvature(&self, cs: &ComplexStructure) -> ExactMatrix {
        let calc = cs.calculus();
        let t = omega2_omega1(calc);
        let (d, w) = curvature_parts(calc, &t, &self.nabla_bar, &self.nabla_bar);
        let raw = d.sub(&w);
        let p02 = cs.projector(0, 2);
        let mut out = ExactMatrix::zeros(raw.rows(), raw.cols());
        for (k, &(j, e)) in t.basis().iter().enumerate() {
            for (k2, &(j2, e2)) in t.basis().iter().enumerate() {
                if e != e2 {
                    continue;
                }
                let c = p02.get(j, j2);
                if c.is_zero() {
                    continue;
                }
                for col in 0..raw.cols() {
                    let x = raw.get(k2, col);
                    if !x.is_zero() {
                        out.add_at(k, col, &(c * x));
                    }
                }
            }
        }
        out
    }
}

/// Kernel bases of `∂̄` on `A`, `∇̄` on `Ω¹` and `∇̄^{(2)}` on `Ω²`.
#[derive(Debug, Clone)]
pub struct Sections {
    pub functions: Vec<Vector>,
    pub one_forms: Vec<Vector>,
    pub two_forms: Vec<Vector>,
}

pub fn holomorphic_sections(cs: &ComplexStructure, hs: &HolomorphicStructure) -> Sections {
    Sections {
        functions: cs.delbar(0).kernel_basis(),
        one_forms: hs.nabla_bar.kernel_basis(),
        two_forms: hs.nabla_bar2.kernel_basis(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct RingReport {
    pub dims: Vec<usize>,
    /// `s∧t` lies in `H⁰(Ω²)` for all sections `s, t ∈ H⁰(Ω¹)`.
    pub wedge_closed: bool,
    pub squares_vanish: bool,
    pub anticommute: bool,
    /// Wedges of degree-1 sections span `H⁰(Ω²)`.
    pub wedges_span_top: bool,
    /// Dimensions `(1, m, m(m−1)/2)` with `Λ²H⁰(Ω¹) → H⁰(Ω²)` bijective.
    pub exterior_algebra: bool,
    /// Multiplication table `s_i ∧ s_j` in `Ω²` coordinates.
    pub table: Vec<Vec<Vector>>,
}

pub fn section_ring(calc: &Calculus, sections: &Sections) -> RingReport {
    let d2 = calc.dim(2);
    let ones = &sections.one_forms;
    let table: Vec<Vec<Vector>> = ones
        .iter()
        .map(|s| ones.iter().map(|t| calc.wedge(1, s, 1, t).expect("degree 2 exists")).collect())
        .collect();
    let m = ones.len();
    let mut squares = true;
    let mut anti = true;
    let mut closed = true;
    let mut products = Vec::new();
    for i in 0..m {
        squares &= is_zero_vector(&table[i][i]);
        for j in 0..m {
            anti &= is_zero_vector(&vec_add(&table[i][j], &table[j][i]));
            closed &= in_span(d2, &sections.two_forms, &table[i][j]);
            if i < j {
                products.push(table[i][j].clone());
            }
        }
    }
    let rank = span_rank(d2, &products);
    let top = sections.two_forms.len();
    let spans = closed && rank == top;
    let dims = vec![sections.functions.len(), m, top];
    let exterior = sections.functions.len() == 1 && top == m * m.saturating_sub(1) / 2 && rank == products.len() && spans;
    RingReport { dims, wedge_closed: closed, squares_vanish: squares, anticommute: anti, wedges_span_top: spans, exterior_algebra: exterior, table }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct UniquenessReport {
    /// Dimension of the space of bimodule maps `A → Ω^{0,1}`.
    pub solution_dim: usize,
    pub holomorphic_part_connected: bool,
}

/// Solves for all bimodule maps `Φ: A → Ω^{0,1}`.
pub fn unique_bimodule_delbar_check(cs: &ComplexStructure) -> UniquenessReport {
    let g = cs.calculus().graph();
    let anti = cs.spec().antiholomorphic_edges(g);
    let nv = g.vertex_count();
    let m = anti.len();
    let unknowns = nv * m;
    let mut rows = Vec::new();
    for x in 0..nv {
        for y in 0..nv {
            for (k, &(s, t)) in anti.iter().enumerate() {
                // (δ_y·Φ(δ_x) − Φ(δ_y δ_x)) and (Φ(δ_x)·δ_y − Φ(δ_x δ_y)) on edge k
                for end in [s, t] {
                    let mut row = vec![GaussianRational::zero(); unknowns];
                    let coeff = (end == y) as i64 - (x == y) as i64;
                    if coeff != 0 {
                        row[x * m + k] = GaussianRational::from(coeff);
                        rows.push(row);
                    }
                }
            }
        }
    }
    let solution_dim = if unknowns == 0 {
        0
    } else if rows.is_empty() {
        unknowns
    } else {
        ExactMatrix::from_rows(rows).expect("equal lengths").kernel_basis().len()
    };
    let hol: Vec<(usize, usize)> = cs.spec().holomorphic.iter().copied().collect();
    UniquenessReport { solution_dim, holomorphic_part_connected: g.weakly_connected(&hol) }
}

/// The all-ones coefficient vector on the edges selected by `pick`.
pub fn edge_sum(calc: &Calculus, pick: impl Fn(usize, usize) -> bool) -> Vector {
    calc.graph()
        .edges()
        .iter()
        .map(|&(x, y)| if pick(x, y) { GaussianRational::one() } else { GaussianRational::zero() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::{build_sigma, Budget};
    use crate::polygon::make_polygon;
    use crate::scalar::gr;

    fn setup(n: usize) -> ComplexStructure {
        let m = make_polygon(n).unwrap();
        let sigma = build_sigma(&m.graph, m.sigma_spec.clone()).unwrap();
        let calc = Calculus::new(m.graph, sigma, 3, Budget::default()).unwrap();
        ComplexStructure::new(calc, m.j_spec).unwrap()
    }

    fn path(calc: &Calculus, p: &[usize]) -> Vector {
        let s = calc.space(p.len() - 1).paths();
        unit_vector(s.dim(), s.index_of(p).unwrap())
    }

    #[test]
    fn connection_formulas() {
        let n = 5;
        let cs = setup(n);
        let calc = cs.calculus();
        let conn = connection_from_sigma(calc, None).unwrap();
        let e = |x, y| unit_vector(2 * n, calc.graph().edge_index(x, y).unwrap());
        for mu in 0..n {
            let (p, q) = ((mu + n - 1) % n, (mu + 1) % n);
            let (pp, qq) = ((p + n - 1) % n, (q + 1) % n);
            let expected = vec_sub(
                &vec_add(&path(calc, &[p, mu, q]), &path(calc, &[q, mu, q])),
                &vec_add(&path(calc, &[mu, p, mu]), &path(calc, &[mu, q, qq])),
            );
            assert_eq!(conn.matrix.mul_vec(&e(mu, q)), expected);
            let expected = vec_sub(
                &vec_add(&path(calc, &[q, mu, p]), &path(calc, &[p, mu, p])),
                &vec_add(&path(calc, &[mu, p, pp]), &path(calc, &[mu, q, mu])),
            );
            assert_eq!(conn.matrix.mul_vec(&e(mu, p)), expected);
        }
    }

    #[test]
    fn delbar_formulas() {
        let n = 6;
        let cs = setup(n);
        let calc = cs.calculus();
        let conn = connection_from_sigma(calc, None).unwrap();
        let (hs, _) = build_holomorphic(&cs, &conn).unwrap();
        let g = calc.graph();
        let e = |x, y| unit_vector(2 * n, g.edge_index(x, y).unwrap());
        let t = &hs.omega1_omega2;
        for mu in 0..n {
            let (p, q, pp) = ((mu + n - 1) % n, (mu + 1) % n, (mu + n - 2) % n);
            let expected = vec_sub(&path(calc, &[q, mu, q]), &path(calc, &[mu, p, mu]));
            assert_eq!(hs.nabla_bar.mul_vec(&e(mu, q)), expected);
            let expected = vec_sub(&path(calc, &[q, mu, p]), &path(calc, &[mu, p, pp]));
            assert_eq!(hs.nabla_bar.mul_vec(&e(mu, p)), expected);
            let top = |x: usize, y: usize| calc.wedge(1, &e(x, y), 1, &e(y, x)).unwrap();
            let expected = vec_sub(&tensor_forms(t, &e(q, mu), &top(mu, q)), &tensor_forms(t, &e(mu, p), &top(p, mu)));
            assert_eq!(hs.nabla_bar2.mul_vec(&top(mu, q)), expected);
        }
    }

    #[test]
    fn alpha_must_be_bimodule() {
        let cs = setup(3);
        let calc = cs.calculus();
        let zero = ExactMatrix::zeros(12, 6);
        assert!(connection_from_sigma(calc, Some(&zero)).is_ok());
        let mut bad = zero.clone();
        bad.set(0, 5, gr(1, 0));
        assert!(matches!(connection_from_sigma(calc, Some(&bad)), Err(HolomorphicError::AlphaNotBimodule)));
    }

    #[test]
    fn sections_and_ring() {
        let n = 4;
        let cs = setup(n);
        let calc = cs.calculus();
        let conn = connection_from_sigma(calc, None).unwrap();
        let (hs, checks) = build_holomorphic(&cs, &conn).unwrap();
        assert!(checks.tensor_square_matches_projection && checks.descent_sigma23_invariant && checks.descent_kills_kernel);
        hs.check_delbar_leibniz(&cs).unwrap();
        hs.check_delbar2_leibniz(&cs).unwrap();
        assert!(hs.sigma_bar.report.restriction_invertible);
        assert!(hs.delbar_curvature(&cs).is_zero());
        let sec = holomorphic_sections(&cs, &hs);
        let ring = section_ring(calc, &sec);
        assert_eq!(ring.dims, vec![1, 2, 1]);
        assert!(ring.exterior_algebra && ring.squares_vanish && ring.anticommute);
        let x1 = edge_sum(calc, |x, y| y == (x + 1) % n);
        let x2 = edge_sum(calc, |x, y| x == (y + 1) % n);
        assert_eq!(span_rank(2 * n, &[sec.one_forms[0].clone(), sec.one_forms[1].clone(), x1.clone(), x2.clone()]), 2);
        let top = calc.wedge(1, &x1, 1, &x2).unwrap();
        assert!(!is_zero_vector(&top));
        assert!(is_zero_vector(&hs.nabla_bar2.mul_vec(&top)));
        let u = unique_bimodule_delbar_check(&cs);
        assert_eq!(u.solution_dim, 0);
        assert!(u.holomorphic_part_connected);
    }

    fn is_left_linear(calc: &Calculus, r: &ExactMatrix) -> bool {
        let t = omega2_omega1(calc);
        let (nv, ne) = (calc.graph().vertex_count(), calc.dim(1));
        (0..nv).all(|x| {
            let f = unit_vector(nv, x);
            (0..ne).all(|k| {
                let e = unit_vector(ne, k);
                let lhs = r.mul_vec(&calc.act(1, &f, &e, Side::Left));
                let img = r.mul_vec(&e);
                let rhs: Vector =
                    t.basis().iter().zip(&img).map(|(&(j, _), c)| &f[calc.space(2).source(j)] * c).collect();
                lhs == rhs
            })
        })
    }

    #[test]
    fn polygon_curvature_vanishes() {
        for n in [3, 4, 5] {
            let cs = setup(n);
            let calc = cs.calculus();
            let conn = connection_from_sigma(calc, None).unwrap();
            let r = curvature(calc, &conn);
            assert!(r.is_zero(), "n = {n}");
            let (d, w) = curvature_split(calc, &conn);
            assert!(!d.is_zero());
            // the remark-style expression, built in Ω²⊗Ω¹, is −½(dω⊗e + ω∧∇e)
            let t = omega2_omega1(calc);
            let g = calc.graph();
            let xi = |x: usize, y: usize| unit_vector(2 * n, g.edge_index(x, y).unwrap());
            let term = |a: usize, b: usize, c: usize, e: (usize, usize)| {
                let w2 = calc.wedge(1, &xi(a, b), 1, &xi(b, c)).unwrap();
                tensor_forms(&t, &w2, &xi(e.0, e.1))
            };
            let sum = d.add(&w);
            for mu in 0..n {
                let (p, q, qq) = ((mu + n - 1) % n, (mu + 1) % n, (mu + 2) % n);
                let remark = vec_add(&term(p, mu, p, (p, mu)), &term(q, mu, q, (q, qq)));
                let col = sum.column(g.edge_index(mu, q).unwrap());
                assert_eq!(col, remark.iter().map(|c| c * &gr(-2, 0)).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn curvature_is_left_linear_with_alpha() {
        let cs = setup(3);
        let calc = cs.calculus();
        let s1 = calc.space(1).paths();
        let s2 = calc.space(2).paths();
        // α(ξ_{x→y}) = ξ_{x→z→y}, the other way round the triangle
        let mut alpha = ExactMatrix::zeros(s2.dim(), s1.dim());
        for (k, &(x, y)) in calc.graph().edges().iter().enumerate() {
            let z = 3 - x - y;
            alpha.set(s2.index_of(&[x, z, y]).unwrap(), k, gr(1, 0));
        }
        let conn = connection_from_sigma(calc, Some(&alpha)).unwrap();
        let r = curvature(calc, &conn);
        assert!(!r.is_zero());
        assert!(is_left_linear(calc, &r));
    }
}
