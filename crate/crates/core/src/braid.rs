//! Permutation-type braidings, leg operators, `Π_p` and antisymmetrizers.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_traits::{One, Zero};

use crate::graph::{BidiGraph, Path, PathSpace};
use crate::matrix::ExactMatrix;
use crate::scalar::GaussianRational;

/// JSON form: `{"x|z": {"y": "w", ...}, ...}` mapping each midpoint `y` of
/// the 2-paths from `x` to `z` to its image `w`.
pub type SigmaInput = BTreeMap<String, BTreeMap<String, String>>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SigmaInputError {
    #[error("pair key `{0}` is not of the form `x|z`")]
    MalformedKey(String),
    #[error("unknown vertex `{0}` in σ input")]
    UnknownVertex(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SigmaError {
    #[error("no σ block given for pair ({0}, {1})")]
    MissingPair(String, String),
    #[error("σ block given for ({0}, {1}), which has no 2-paths")]
    UnexpectedPair(String, String),
    #[error("σ block for ({0}, {1}) is not a permutation of the midpoints")]
    NotPermutation(String, String),
    #[error("σ blocks for ({0}, {1}) and ({1}, {0}) differ")]
    NotPathReversalInvariant(String, String),
    #[error("braid relation fails on 3-path {0}")]
    BraidFailure(String),
    #[error("σ does not commute with ∗ on 2-path {0}")]
    StarCommutationFailure(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BraidError {
    #[error("leg position {k} out of range for degree {n}")]
    PositionOutOfRange { k: usize, n: usize },
    #[error("degree {degree} exceeds the budget ({work} units of work, limit {limit})")]
    DegreeTooLarge { degree: usize, work: u128, limit: u128 },
}

/// Limits on the explicit sum over `S_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_degree: usize,
    /// Cap on `n! · dim PathSpace(n)`.
    pub max_work: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_degree: 6, max_work: 5_000_000 }
    }
}

/// For each `(x, z)` with 2-paths, a map from midpoints to midpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaSpec {
    pub blocks: BTreeMap<(usize, usize), BTreeMap<usize, usize>>,
}

impl SigmaSpec {
    pub fn from_input(g: &BidiGraph, input: &SigmaInput) -> Result<Self, SigmaInputError> {
        let lookup = |l: &str| g.vertex(l).ok_or_else(|| SigmaInputError::UnknownVertex(l.to_string()));
        let mut blocks = BTreeMap::new();
        for (key, map) in input {
            let parts: Vec<&str> = key.split('|').collect();
            if parts.len() != 2 {
                return Err(SigmaInputError::MalformedKey(key.clone()));
            }
            let (x, z) = (lookup(parts[0])?, lookup(parts[1])?);
            let mut block = BTreeMap::new();
            for (y, w) in map {
                block.insert(lookup(y)?, lookup(w)?);
            }
            blocks.insert((x, z), block);
        }
        Ok(SigmaSpec { blocks })
    }

    pub fn to_input(&self, g: &BidiGraph) -> SigmaInput {
        self.blocks
            .iter()
            .map(|(&(x, z), block)| {
                let key = format!("{}|{}", g.label(x), g.label(z));
                let map = block.iter().map(|(&y, &w)| (g.label(y).to_string(), g.label(w).to_string())).collect();
                (key, map)
            })
            .collect()
    }

    /// The identity braiding on `g`.
    pub fn identity(g: &BidiGraph) -> Self {
        let mut blocks: BTreeMap<(usize, usize), BTreeMap<usize, usize>> = BTreeMap::new();
        for p in g.enumerate_paths(2) {
            blocks.entry((p[0], p[2])).or_default().insert(p[1], p[1]);
        }
        SigmaSpec { blocks }
    }
}

/// Midpoint sets of the 2-paths, keyed by endpoints.
pub fn midpoints(g: &BidiGraph) -> BTreeMap<(usize, usize), BTreeSet<usize>> {
    let mut out: BTreeMap<(usize, usize), BTreeSet<usize>> = BTreeMap::new();
    for p in g.enumerate_paths(2) {
        out.entry((p[0], p[2])).or_default().insert(p[1]);
    }
    out
}

/// A validated braiding, stored as its matrix on the 2-path basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaOperator {
    spec: SigmaSpec,
    space2: PathSpace,
    matrix: ExactMatrix,
}

impl SigmaOperator {
    pub fn spec(&self) -> &SigmaSpec {
        &self.spec
    }

    pub fn matrix(&self) -> &ExactMatrix {
        &self.matrix
    }

    pub fn space2(&self) -> &PathSpace {
        &self.space2
    }

    /// `σ` acting on steps `k, k+1` (1-based) of every path in `space`.
    pub fn leg_operator(&self, space: &PathSpace, k: usize) -> Result<ExactMatrix, BraidError> {
        let n = space.degree();
        if k == 0 || k >= n {
            return Err(BraidError::PositionOutOfRange { k, n });
        }
        let dim = space.dim();
        let mut m = ExactMatrix::zeros(dim, dim);
        for (col, p) in space.paths().iter().enumerate() {
            let two = self.space2.index_of(&p[k - 1..=k + 1]).expect("sub-path of a path");
            for row2 in 0..self.space2.dim() {
                let c = self.matrix.get(row2, two);
                if c.is_zero() {
                    continue;
                }
                let mut q: Path = p.clone();
                q[k] = self.space2.path(row2)[1];
                let row = space.index_of(&q).expect("σ preserves endpoints");
                m.add_at(row, col, c);
            }
        }
        Ok(m)
    }

    /// Product of leg operators along `word` (0-based swap positions).
    pub fn pi_word(&self, space: &PathSpace, word: &[usize]) -> Result<ExactMatrix, BraidError> {
        let mut acc = ExactMatrix::identity(space.dim());
        for &s in word {
            acc = acc.mul(&self.leg_operator(space, s + 1)?);
        }
        Ok(acc)
    }

    /// `Π_p` for a permutation `p` of `0..n`, with `n` the degree of `space`.
    pub fn pi_p(&self, space: &PathSpace, p: &[usize]) -> Result<ExactMatrix, BraidError> {
        assert_eq!(p.len(), space.degree(), "permutation size must equal path degree");
        self.pi_word(space, &reduced_word(p))
    }

    /// `A_n = Σ_{p ∈ S_n} sgn(p) Π_p` on `space`.
    pub fn antisymmetrizer(&self, space: &PathSpace, budget: Budget) -> Result<ExactMatrix, BraidError> {
        let n = space.degree();
        if n < 2 {
            return Ok(ExactMatrix::identity(space.dim()));
        }
        let work = (1..=n as u128).product::<u128>() * space.dim() as u128;
        if n > budget.max_degree || work > budget.max_work {
            return Err(BraidError::DegreeTooLarge { degree: n, work, limit: budget.max_work });
        }
        let legs: Vec<ExactMatrix> = (1..n).map(|k| self.leg_operator(space, k)).collect::<Result<_, _>>()?;
        let mut total = ExactMatrix::zeros(space.dim(), space.dim());
        for p in (0..n).permutations(n) {
            let word = reduced_word(&p);
            let mut term = ExactMatrix::identity(space.dim());
            for &s in &word {
                term = term.mul(&legs[s]);
            }
            total = if word.len() % 2 == 0 { total.add(&term) } else { total.sub(&term) };
        }
        Ok(total)
    }
}

/// A reduced word for `p` from bubble sort: the swap positions, reversed.
pub fn reduced_word(p: &[usize]) -> Vec<usize> {
    reduced_word_with(p, |descents| descents[0])
}

/// A reduced word built by repeatedly swapping an adjacent descent chosen by
/// `pick` from the current list of descent positions.
pub fn reduced_word_with(p: &[usize], mut pick: impl FnMut(&[usize]) -> usize) -> Vec<usize> {
    let mut a = p.to_vec();
    let mut swaps = Vec::new();
    loop {
        let descents: Vec<usize> = (0..a.len().saturating_sub(1)).filter(|&k| a[k] > a[k + 1]).collect();
        if descents.is_empty() {
            break;
        }
        let k = pick(&descents);
        a.swap(k, k + 1);
        swaps.push(k);
    }
    swaps.reverse();
    swaps
}

pub fn inversions(p: &[usize]) -> usize {
    (0..p.len()).map(|i| (i + 1..p.len()).filter(|&j| p[i] > p[j]).count()).sum()
}

/// The antilinear involution on `space` as `v ↦ S·conj(v)`:
/// `e_p ↦ (−1)^{n(n+1)/2} e_{reverse(p)}`.
pub fn star_path_matrix(space: &PathSpace) -> ExactMatrix {
    let n = space.degree();
    let sign = if (n * (n + 1) / 2) % 2 == 0 { GaussianRational::one() } else { -GaussianRational::one() };
    let mut m = ExactMatrix::zeros(space.dim(), space.dim());
    for (col, p) in space.paths().iter().enumerate() {
        let rev: Path = p.iter().rev().copied().collect();
        m.set(space.index_of(&rev).expect("bidirected"), col, sign.clone());
    }
    m
}

/// Whether `m: space_a → space_b` only connects paths with equal endpoints.
pub fn preserves_endpoints(m: &ExactMatrix, from: &PathSpace, to: &PathSpace) -> bool {
    (0..m.rows()).all(|i| {
        (0..m.cols()).all(|j| {
            m.get(i, j).is_zero() || (to.source(i) == from.source(j) && to.target(i) == from.target(j))
        })
    })
}

/// Validates `spec` and builds the braiding matrix.
pub fn build_sigma(g: &BidiGraph, spec: SigmaSpec) -> Result<SigmaOperator, SigmaError> {
    let mids = midpoints(g);
    let pair = |x: usize, z: usize| (g.label(x).to_string(), g.label(z).to_string());
    for (&(x, z), set) in &mids {
        let Some(block) = spec.blocks.get(&(x, z)) else {
            let (a, b) = pair(x, z);
            return Err(SigmaError::MissingPair(a, b));
        };
        let keys: BTreeSet<usize> = block.keys().copied().collect();
        let images: BTreeSet<usize> = block.values().copied().collect();
        if &keys != set || &images != set {
            let (a, b) = pair(x, z);
            return Err(SigmaError::NotPermutation(a, b));
        }
    }
    if let Some(&(x, z)) = spec.blocks.keys().find(|k| !mids.contains_key(k)) {
        let (a, b) = pair(x, z);
        return Err(SigmaError::UnexpectedPair(a, b));
    }
    for (&(x, z), block) in &spec.blocks {
        if x < z && spec.blocks.get(&(z, x)) != Some(block) {
            let (a, b) = pair(x, z);
            return Err(SigmaError::NotPathReversalInvariant(a, b));
        }
    }
    let space2 = PathSpace::new(g, 2);
    let mut matrix = ExactMatrix::zeros(space2.dim(), space2.dim());
    for (col, p) in space2.paths().iter().enumerate() {
        let w = spec.blocks[&(p[0], p[2])][&p[1]];
        let row = space2.index_of(&[p[0], w, p[2]]).expect("2-path exists");
        matrix.set(row, col, GaussianRational::one());
    }
    let op = SigmaOperator { spec, space2, matrix };

    let star2 = star_path_matrix(&op.space2);
    let lhs = op.matrix.mul(&star2);
    let rhs = star2.mul(&op.matrix.conj());
    if let Some((_, col)) = lhs.first_difference(&rhs) {
        return Err(SigmaError::StarCommutationFailure(g.render_path(op.space2.path(col))));
    }

    let space3 = PathSpace::new(g, 3);
    if space3.dim() > 0 {
        let s12 = op.leg_operator(&space3, 1).expect("degree 3");
        let s23 = op.leg_operator(&space3, 2).expect("degree 3");
        let lhs = s12.mul(&s23).mul(&s12);
        let rhs = s23.mul(&s12).mul(&s23);
        if let Some((_, col)) = lhs.first_difference(&rhs) {
            return Err(SigmaError::BraidFailure(g.render_path(space3.path(col))));
        }
    }
    Ok(op)
}
