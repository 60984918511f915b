//! Orientation, the closed graded trace `∫`, Hochschild coboundary and the
//! 2-cocycles `τ`, `φ` together with the cochain `ψ` relating them.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::complex::ComplexStructure;
use crate::first_order::Side;
use crate::forms::Calculus;
use crate::matrix::{unit_vector, ExactMatrix, PsdReport, Vector};
use crate::scalar::GaussianRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CocycleError {
    #[error("calculus is not orientable with this volume form: {0}")]
    NotOrientable(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrientationChoice {
    Standard,
    Opposite,
}

impl fmt::Display for OrientationChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrientationChoice::Standard => "standard",
            OrientationChoice::Opposite => "opposite",
        })
    }
}

impl FromStr for OrientationChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" => Ok(OrientationChoice::Standard),
            "opposite" => Ok(OrientationChoice::Opposite),
            other => Err(format!("unknown orientation `{other}` (expected standard or opposite)")),
        }
    }
}

/// A bimodule isomorphism `Φ: A → Ω²`, `Φ(f) = Σ_x f(x) w_x`.
#[derive(Debug, Clone)]
pub struct Orientation {
    pub choice: OrientationChoice,
    /// Columns are the volume elements `w_x` in `Ω²` coordinates.
    pub phi: ExactMatrix,
    pub phi_inv: ExactMatrix,
}

/// `w_x = ξ_{x→y}∧ξ_{y→x}` for the first antiholomorphic out-edge `x→y`,
/// negated for the opposite orientation.
pub fn build_orientation(cs: &ComplexStructure, choice: OrientationChoice) -> Result<Orientation, CocycleError> {
    let calc = cs.calculus();
    let g = calc.graph();
    let nv = g.vertex_count();
    let ne = g.edges().len();
    let sign = match choice {
        OrientationChoice::Standard => GaussianRational::one(),
        OrientationChoice::Opposite => -GaussianRational::one(),
    };
    let mut cols = Vec::with_capacity(nv);
    for x in 0..nv {
        let y = g
            .successors(x)
            .iter()
            .copied()
            .find(|&y| !cs.spec().is_holomorphic(x, y))
            .ok_or_else(|| CocycleError::NotOrientable(format!("vertex {} has no antiholomorphic out-edge", g.label(x))))?;
        let a = unit_vector(ne, g.edge_index(x, y).expect("edge"));
        let b = unit_vector(ne, g.edge_index(y, x).expect("reverse edge"));
        let w = calc.wedge(1, &a, 1, &b).expect("degree 2 exists");
        cols.push(w.iter().map(|c| c * &sign).collect::<Vector>());
    }
    let phi = ExactMatrix::from_columns(calc.dim(2), &cols);
    let phi_inv = phi
        .inverse()
        .map_err(|_| CocycleError::NotOrientable(format!("Φ: A → Ω² is not invertible (dim Ω² = {}, {} vertices)", calc.dim(2), nv)))?;
    Ok(Orientation { choice, phi, phi_inv })
}

impl Orientation {
    /// `Φ(δ_y f) = δ_y Φ(f)` and `Φ(f δ_y) = Φ(f) δ_y` on all delta pairs.
    pub fn is_bimodule_map(&self, calc: &Calculus) -> bool {
        let nv = calc.graph().vertex_count();
        (0..nv).all(|x| {
            (0..nv).all(|y| {
                let prod = if x == y { self.phi.column(x) } else { vec![GaussianRational::zero(); calc.dim(2)] };
                let f = unit_vector(nv, y);
                let w = self.phi.column(x);
                calc.act(2, &f, &w, Side::Left) == prod && calc.act(2, &f, &w, Side::Right) == prod
            })
        })
    }
}

/// `f·w = w·f` for all deltas `f` and `Ω²` basis elements `w`.
pub fn actions_coincide_on_top(calc: &Calculus) -> bool {
    let nv = calc.graph().vertex_count();
    (0..nv).all(|x| {
        let f = unit_vector(nv, x);
        (0..calc.dim(2)).all(|q| {
            let w = calc.space(2).unit(q);
            calc.act(2, &f, &w, Side::Left) == calc.act(2, &f, &w, Side::Right)
        })
    })
}

/// `∫ω = τ(Φ⁻¹ω)` with the normalised counting state `τ(f) = (1/n)Σ f(x)`.
#[derive(Debug, Clone)]
pub struct GradedTrace {
    pub row: Vector,
}

impl GradedTrace {
    pub fn new(orientation: &Orientation) -> Self {
        let nv = orientation.phi_inv.rows();
        let scale = GaussianRational::ratio(1, nv as i64);
        let row = (0..orientation.phi_inv.cols())
            .map(|c| (0..nv).map(|r| orientation.phi_inv.get(r, c)).sum::<GaussianRational>() * &scale)
            .collect();
        GradedTrace { row }
    }

    pub fn integrate(&self, w: &[GaussianRational]) -> GaussianRational {
        self.row.iter().zip(w).filter(|(a, _)| !a.is_zero()).map(|(a, b)| a * b).sum()
    }

    /// `∫ dω = 0` for every basis 1-form.
    pub fn is_closed(&self, calc: &Calculus) -> bool {
        let ne = calc.dim(1);
        (0..ne).all(|k| self.integrate(&calc.differential(1, &unit_vector(ne, k)).expect("degree 2")).is_zero())
    }

    /// `∫ ω∧η = −∫ η∧ω` for all basis 1-forms.
    pub fn is_graded_symmetric(&self, calc: &Calculus) -> bool {
        let ne = calc.dim(1);
        (0..ne).all(|a| {
            (0..ne).all(|b| {
                let (u, v) = (unit_vector(ne, a), unit_vector(ne, b));
                let s = self.integrate(&calc.wedge(1, &u, 1, &v).expect("degree 2"))
                    + self.integrate(&calc.wedge(1, &v, 1, &u).expect("degree 2"));
                s.is_zero()
            })
        })
    }
}

/// A multilinear functional on `A^{⊗(arity+1)}`, stored by its values on delta tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cochain {
    arity: usize,
    n: usize,
    values: Vec<GaussianRational>,
}

impl Cochain {
    pub fn zero(arity: usize, n: usize) -> Self {
        Cochain { arity, n, values: vec![GaussianRational::zero(); n.pow(arity as u32 + 1)] }
    }

    pub fn from_fn(arity: usize, n: usize, mut f: impl FnMut(&[usize]) -> GaussianRational) -> Self {
        let mut c = Self::zero(arity, n);
        for k in 0..c.values.len() {
            let t = c.tuple(k);
            c.values[k] = f(&t);
        }
        c
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[GaussianRational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn index(&self, t: &[usize]) -> usize {
        debug_assert_eq!(t.len(), self.arity + 1);
        t.iter().fold(0, |acc, &x| acc * self.n + x)
    }

    pub fn tuple(&self, mut k: usize) -> Vec<usize> {
        let mut t = vec![0; self.arity + 1];
        for slot in t.iter_mut().rev() {
            *slot = k % self.n;
            k /= self.n;
        }
        t
    }

    pub fn get(&self, t: &[usize]) -> &GaussianRational {
        &self.values[self.index(t)]
    }

    pub fn set(&mut self, t: &[usize], v: GaussianRational) {
        let k = self.index(t);
        self.values[k] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    pub fn sub(&self, other: &Cochain) -> Cochain {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Cochain { arity: self.arity, n: self.n, values }
    }

    pub fn scale(&self, s: &GaussianRational) -> Cochain {
        Cochain { arity: self.arity, n: self.n, values: self.values.iter().map(|v| v * s).collect() }
    }

    /// First tuple where the two tables differ.
    pub fn first_difference(&self, other: &Cochain) -> Option<Vec<usize>> {
        self.values.iter().zip(&other.values).position(|(a, b)| a != b).map(|k| self.tuple(k))
    }

    /// `c(f_{k}, f_0, …, f_{k−1}) = c(f_0, …, f_k)` up to the sign `(−1)^k`.
    pub fn is_cyclic(&self) -> bool {
        self.cyclic_defect().is_none()
    }

    pub fn cyclic_defect(&self) -> Option<Vec<usize>> {
        let sign = if self.arity % 2 == 0 { GaussianRational::one() } else { -GaussianRational::one() };
        (0..self.len()).map(|k| self.tuple(k)).find(|t| {
            let mut r = t.clone();
            r.rotate_right(1);
            *self.get(&r) != self.get(t) * &sign
        })
    }
}

/// Hochschild coboundary on the commutative algebra of functions.
pub fn hochschild_b(c: &Cochain) -> Cochain {
    let k = c.arity;
    let n = c.n;
    Cochain::from_fn(k + 1, n, |t| {
        let mut acc = GaussianRational::zero();
        let mut buf = Vec::with_capacity(k + 1);
        for i in 0..=k {
            // δ_a δ_b = [a = b] δ_a
            if t[i] != t[i + 1] {
                continue;
            }
            buf.clear();
            buf.extend_from_slice(&t[..=i]);
            buf.extend_from_slice(&t[i + 2..]);
            let v = c.get(&buf);
            if i % 2 == 0 {
                acc += v;
            } else {
                acc -= v;
            }
        }
        if t[k + 1] == t[0] {
            let v = c.get(&t[..=k]);
            if (k + 1) % 2 == 0 {
                acc += v;
            } else {
                acc -= v;
            }
        }
        acc
    })
}

/// The cochains `τ`, `φ`, `ψ` for a chosen orientation.
#[derive(Debug, Clone)]
pub struct CocycleTables {
    pub tau: Cochain,
    pub phi: Cochain,
    pub psi: Cochain,
}

pub fn build_cochains(cs: &ComplexStructure, trace: &GradedTrace) -> CocycleTables {
    let calc = cs.calculus();
    let nv = calc.graph().vertex_count();
    let half = GaussianRational::ratio(1, 2);
    let deltas: Vec<Vector> = (0..nv).map(|x| unit_vector(nv, x)).collect();
    let d: Vec<Vector> = deltas.iter().map(|f| cs.d(0).mul_vec(f)).collect();
    let del: Vec<Vector> = deltas.iter().map(|f| cs.del(0).mul_vec(f)).collect();
    let delbar: Vec<Vector> = deltas.iter().map(|f| cs.delbar(0).mul_vec(f)).collect();
    let ddbar = cs.del(1).mul(cs.delbar(0));
    // ∫ δ_a w for every a and every w, as a table of rows
    let weighted: Vec<Vector> = deltas
        .iter()
        .map(|f| {
            (0..calc.dim(2))
                .map(|q| trace.integrate(&calc.act(2, f, &calc.space(2).unit(q), Side::Left)))
                .collect()
        })
        .collect();
    let integrate_at = |a: usize, w: &[GaussianRational]| -> GaussianRational {
        weighted[a].iter().zip(w).filter(|(x, _)| !x.is_zero()).map(|(x, y)| x * y).sum()
    };
    let mut dd = vec![vec![Vector::new(); nv]; nv];
    let mut dbd = vec![vec![Vector::new(); nv]; nv];
    for b in 0..nv {
        for c in 0..nv {
            dd[b][c] = calc.wedge(1, &d[b], 1, &d[c]).expect("degree 2");
            dbd[b][c] = calc.wedge(1, &del[b], 1, &delbar[c]).expect("degree 2");
        }
    }
    let tau = Cochain::from_fn(2, nv, |t| integrate_at(t[0], &dd[t[1]][t[2]]) * &half);
    let phi = Cochain::from_fn(2, nv, |t| integrate_at(t[0], &dbd[t[1]][t[2]]));
    let psi = Cochain::from_fn(1, nv, |t| integrate_at(t[0], &ddbar.column(t[1])) * &half);
    CocycleTables { tau, phi, psi }
}

/// `M[j][i] = ⟨e_i, e_j⟩ = φ(δ_c δ_a, δ_b, δ_d)` for `e_i = δ_a⊗δ_b`, `e_j = δ_c⊗δ_d`.
pub fn positivity_gram(phi: &Cochain) -> ExactMatrix {
    let n = phi.vertex_count();
    let mut m = ExactMatrix::zeros(n * n, n * n);
    for a in 0..n {
        for b in 0..n {
            for d in 0..n {
                // δ_c δ_a vanishes unless c = a; all functions are real so conjugation is trivial
                m.set(a * n + d, a * n + b, phi.get(&[a, b, d]).clone());
            }
        }
    }
    m
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrivialityReport {
    pub solution_exists: bool,
    /// `X(x, y)` for `x < y`, labels and canonical scalar strings.
    pub solution: Option<Vec<(String, String, GaussianRational)>>,
    /// `τ′ = 1` on holomorphic edges `x→y`, `−1` on their reverses.
    pub candidate_is_primitive: bool,
    /// `λ` with `bτ′ = λτ`, when the two are proportional.
    pub candidate_ratio: Option<GaussianRational>,
}

fn antisymmetric_unit(n: usize, a: usize, b: usize) -> Cochain {
    let mut x = Cochain::zero(1, n);
    x.set(&[a, b], GaussianRational::one());
    x.set(&[b, a], -GaussianRational::one());
    x
}

/// Solves `bX = τ` over cyclic 1-cochains and evaluates the holomorphic-edge candidate.
pub fn tau_triviality_witness(cs: &ComplexStructure, tau: &Cochain) -> TrivialityReport {
    let g = cs.calculus().graph();
    let n = tau.vertex_count();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let cols: Vec<Vector> = pairs.iter().map(|&(a, b)| hochschild_b(&antisymmetric_unit(n, a, b)).values).collect();
    let solution = if pairs.is_empty() {
        tau.is_zero().then(Vec::new)
    } else {
        ExactMatrix::from_columns(tau.len(), &cols).solve(&tau.values).expect("dimensions agree")
    };
    let solution = solution.map(|x| {
        pairs
            .iter()
            .zip(x)
            .map(|(&(a, b), v)| (g.label(a).to_string(), g.label(b).to_string(), v))
            .collect::<Vec<_>>()
    });
    let mut candidate = Cochain::zero(1, n);
    for &(x, y) in &cs.spec().holomorphic {
        candidate.set(&[x, y], GaussianRational::one());
        candidate.set(&[y, x], -GaussianRational::one());
    }
    let bc = hochschild_b(&candidate);
    TrivialityReport {
        solution_exists: solution.is_some(),
        solution,
        candidate_is_primitive: bc == *tau,
        candidate_ratio: proportionality(&bc, tau),
    }
}

/// `λ` with `a = λ b`, if one exists and `b ≠ 0`.
fn proportionality(a: &Cochain, b: &Cochain) -> Option<GaussianRational> {
    let k = b.values.iter().position(|v| !v.is_zero())?;
    let lambda = &a.values[k] * &b.values[k].inv()?;
    (a.values.iter().zip(&b.values).all(|(x, y)| *x == y * &lambda)).then_some(lambda)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityVerdict {
    pub holds: bool,
    /// Vertex labels of the first failing tuple.
    pub witness: Option<Vec<String>>,
}

impl IdentityVerdict {
    fn from_difference(g: &crate::graph::BidiGraph, diff: Option<Vec<usize>>) -> Self {
        IdentityVerdict {
            holds: diff.is_none(),
            witness: diff.map(|t| t.iter().map(|&x| g.label(x).to_string()).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CocycleReport {
    pub orientation: OrientationChoice,
    pub orientation_is_bimodule_map: bool,
    pub actions_coincide_on_top: bool,
    pub trace_closed: bool,
    pub trace_graded_symmetric: bool,
    pub b_phi_zero: IdentityVerdict,
    pub b_tau_zero: IdentityVerdict,
    pub tau_cyclic: IdentityVerdict,
    pub tau_minus_phi_is_b_psi: IdentityVerdict,
    pub gram: PsdReport,
    pub triviality: TrivialityReport,
}

/// Every cocycle-layer check for one orientation.
pub fn verify_cocycle_identities(cs: &ComplexStructure, choice: OrientationChoice) -> Result<(CocycleReport, CocycleTables), CocycleError> {
    let calc = cs.calculus();
    let g = calc.graph();
    let orientation = build_orientation(cs, choice)?;
    let trace = GradedTrace::new(&orientation);
    let tables = build_cochains(cs, &trace);
    let zero3 = Cochain::zero(3, g.vertex_count());
    let gram = positivity_gram(&tables.phi).hermitian_psd().expect("Gram matrix is square");
    let report = CocycleReport {
        orientation: choice,
        orientation_is_bimodule_map: orientation.is_bimodule_map(calc),
        actions_coincide_on_top: actions_coincide_on_top(calc),
        trace_closed: trace.is_closed(calc),
        trace_graded_symmetric: trace.is_graded_symmetric(calc),
        b_phi_zero: IdentityVerdict::from_difference(g, hochschild_b(&tables.phi).first_difference(&zero3)),
        b_tau_zero: IdentityVerdict::from_difference(g, hochschild_b(&tables.tau).first_difference(&zero3)),
        tau_cyclic: IdentityVerdict::from_difference(g, tables.tau.cyclic_defect()),
        tau_minus_phi_is_b_psi: IdentityVerdict::from_difference(
            g,
            tables.tau.sub(&tables.phi).first_difference(&hochschild_b(&tables.psi)),
        ),
        gram,
        triviality: tau_triviality_witness(cs, &tables.tau),
    };
    Ok((report, tables))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::{build_sigma, Budget};
    use crate::matrix::PsdWitness;
    use crate::polygon::make_polygon;
    use crate::scalar::gr;
    use proptest::prelude::*;

    fn setup(n: usize) -> ComplexStructure {
        let m = make_polygon(n).unwrap();
        let sigma = build_sigma(&m.graph, m.sigma_spec.clone()).unwrap();
        let calc = Calculus::new(m.graph, sigma, 3, Budget::default()).unwrap();
        ComplexStructure::new(calc, m.j_spec).unwrap()
    }

    #[test]
    fn trace_of_volume_elements() {
        let n = 5;
        let cs = setup(n);
        let o = build_orientation(&cs, OrientationChoice::Standard).unwrap();
        let tr = GradedTrace::new(&o);
        let calc = cs.calculus();
        let e = |x, y| unit_vector(2 * n, calc.graph().edge_index(x, y).unwrap());
        for mu in 0..n {
            let p = (mu + n - 1) % n;
            let w = calc.wedge(1, &e(mu, p), 1, &e(p, mu)).unwrap();
            assert_eq!(tr.integrate(&w), gr(1, 0) * GaussianRational::ratio(1, n as i64));
            assert_eq!(o.phi_inv.mul_vec(&w), unit_vector(n, mu));
        }
        assert!(tr.is_closed(calc) && tr.is_graded_symmetric(calc));
        assert!(o.is_bimodule_map(calc) && actions_coincide_on_top(calc));
    }

    #[test]
    fn phi_instance_at_triangle() {
        let cs = setup(3);
        let (report, tables) = verify_cocycle_identities(&cs, OrientationChoice::Standard).unwrap();
        assert_eq!(*tables.phi.get(&[0, 1, 1]), GaussianRational::ratio(1, 3));
        assert!(report.b_phi_zero.holds && report.b_tau_zero.holds);
        assert!(report.tau_cyclic.holds && report.tau_minus_phi_is_b_psi.holds);
        assert!(report.gram.is_psd);
        assert!(report.triviality.solution_exists);
    }

    #[test]
    fn gram_diagonal_pattern() {
        let n = 4;
        let cs = setup(n);
        let (_, tables) = verify_cocycle_identities(&cs, OrientationChoice::Standard).unwrap();
        let m = positivity_gram(&tables.phi);
        for mu in 0..n {
            for nu in 0..n {
                let v = (nu == (mu + 1) % n) as i64 - (nu == mu) as i64;
                let expected = GaussianRational::ratio(v * v, n as i64);
                assert_eq!(*m.get(mu * n + nu, mu * n + nu), expected);
            }
        }
    }

    #[test]
    fn opposite_orientation_breaks_positivity() {
        let cs = setup(4);
        let (report, tables) = verify_cocycle_identities(&cs, OrientationChoice::Opposite).unwrap();
        assert!(report.gram.is_hermitian && !report.gram.is_psd);
        match report.gram.witness {
            Some(PsdWitness::NegativeDirection { vector, value }) => {
                assert_eq!(positivity_gram(&tables.phi).quadratic_form(&vector), value);
                assert_eq!(value.real_sign(), Some(std::cmp::Ordering::Less));
            }
            other => panic!("unexpected witness {other:?}"),
        }
        assert!(report.b_phi_zero.holds && report.tau_minus_phi_is_b_psi.holds);
    }

    #[test]
    fn tau_support_and_trivial_cases() {
        let n = 5;
        let cs = setup(n);
        let (report, tables) = verify_cocycle_identities(&cs, OrientationChoice::Standard).unwrap();
        for mu in 0..n {
            let p = (mu + n - 1) % n;
            assert!(!tables.tau.get(&[mu, p, mu]).is_zero());
        }
        // τ(1, f, g) = ½∫ df∧dg, τ(f, 1, g) = 0
        for f in 0..n {
            for h in 0..n {
                let s: GaussianRational = (0..n).map(|a| tables.tau.get(&[f, a, h]).clone()).sum();
                assert!(s.is_zero());
            }
        }
        let x = report.triviality.solution.as_ref().unwrap();
        let mut xc = Cochain::zero(1, n);
        for (a, b, v) in x {
            let (a, b) = (a.parse::<usize>().unwrap() - 1, b.parse::<usize>().unwrap() - 1);
            xc.set(&[a, b], v.clone());
            xc.set(&[b, a], -v.clone());
        }
        let bx = hochschild_b(&xc);
        assert_eq!(bx, tables.tau);
        assert_eq!(bx.get(&[2, 1, 2]), tables.tau.get(&[2, 1, 2]));
    }

    #[test]
    fn coboundary_of_zero_cochain_vanishes() {
        let t = Cochain::from_fn(0, 4, |t| gr(t[0] as i64 + 1, -(t[0] as i64)));
        assert!(hochschild_b(&t).is_zero());
    }

    fn cochain_strategy(arity: usize, n: usize) -> impl Strategy<Value = Cochain> {
        prop::collection::vec((-5i64..5, -5i64..5), n.pow(arity as u32 + 1)).prop_map(move |v| {
            let mut it = v.into_iter();
            Cochain::from_fn(arity, n, |_| {
                let (a, b) = it.next().unwrap();
                gr(a, b)
            })
        })
    }

    proptest! {
        #[test]
        fn b_squared_is_zero_arity0(c in cochain_strategy(0, 4)) {
            prop_assert!(hochschild_b(&hochschild_b(&c)).is_zero());
        }

        #[test]
        fn b_squared_is_zero_arity1(c in cochain_strategy(1, 4)) {
            prop_assert!(hochschild_b(&hochschild_b(&c)).is_zero());
        }

        #[test]
        fn b_squared_is_zero_arity2(c in cochain_strategy(2, 3)) {
            prop_assert!(hochschild_b(&hochschild_b(&c)).is_zero());
        }
    }
}
