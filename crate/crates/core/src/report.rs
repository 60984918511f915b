//! The staged verification pipeline and its serialisable report.
//!
//! Mathematical failures become verdicts; only malformed inputs are errors.

use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::braid::{build_sigma, BraidError, Budget, SigmaError, SigmaInput, SigmaInputError, SigmaSpec};
use crate::cocycles::{positivity_gram, verify_cocycle_identities, CocycleReport, OrientationChoice};
use crate::complex::{ComplexStructure, IntegrabilityReport, JInput, JInputError, JSpec};
use crate::forms::{Calculus, CalculusDimension, FormError};
use crate::graph::{BidiGraph, GraphError, GraphInput};
use crate::holomorphic::{
    build_holomorphic, connection_from_sigma, curvature, holomorphic_sections, section_ring, unique_bimodule_delbar_check,
    HolomorphicChecks, RestrictionReport, RingReport, UniquenessReport,
};
use crate::matrix::ExactMatrix;
use crate::polygon::{golden_report, make_polygon, GoldenReport, PolygonError};
use crate::scalar::GaussianRational;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InputError {
    #[error("graph: {0}")]
    Graph(#[from] GraphError),
    #[error("sigma: {0}")]
    Sigma(#[from] SigmaInputError),
    #[error("j: {0}")]
    J(#[from] JInputError),
}

impl InputError {
    /// Stable machine-readable name of the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            InputError::Graph(e) => match e {
                GraphError::LoopEdge(_) => "LoopEdge",
                GraphError::DuplicateEdge(..) => "DuplicateEdge",
                GraphError::MissingReverse(..) => "MissingReverse",
                GraphError::UnknownVertex(..) => "UnknownVertex",
                GraphError::DuplicateVertex(_) => "DuplicateVertex",
                GraphError::Empty => "EmptyGraph",
            },
            InputError::Sigma(SigmaInputError::MalformedKey(_)) => "MalformedSigmaKey",
            InputError::Sigma(SigmaInputError::UnknownVertex(_)) => "UnknownVertex",
            InputError::J(JInputError::UnknownEdge(..)) => "UnknownEdge",
        }
    }
}

/// The three input documents as parsed from JSON.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawInputs {
    pub graph: GraphInput,
    pub sigma: SigmaInput,
    pub j: Option<JInput>,
}

/// Canonical file text: pretty JSON with a trailing newline.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("input types serialise");
    s.push('\n');
    s
}

fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigests {
    pub graph: String,
    pub sigma: String,
    pub j: Option<String>,
}

/// Validated, index-resolved inputs.
#[derive(Debug, Clone)]
pub struct ResolvedInputs {
    pub graph: BidiGraph,
    pub sigma: SigmaSpec,
    pub j: Option<JSpec>,
}

impl ResolvedInputs {
    pub fn resolve(raw: &RawInputs) -> Result<Self, InputError> {
        let graph = BidiGraph::from_input(raw.graph.clone())?;
        let sigma = SigmaSpec::from_input(&graph, &raw.sigma)?;
        let j = raw.j.as_ref().map(|j| JSpec::from_input(&graph, j)).transpose()?;
        Ok(ResolvedInputs { graph, sigma, j })
    }

    /// Canonical `(graph, sigma, j)` file texts; these are what `--emit-inputs` writes.
    pub fn canonical_files(&self) -> (String, String, Option<String>) {
        (
            canonical_json(&self.graph.to_input()),
            canonical_json(&self.sigma.to_input(&self.graph)),
            self.j.as_ref().map(|j| canonical_json(&j.to_input(&self.graph))),
        )
    }

    pub fn digests(&self) -> InputDigests {
        let (g, s, j) = self.canonical_files();
        InputDigests { graph: digest(&g), sigma: digest(&s), j: j.as_deref().map(digest) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail { witness: String },
    Skipped { reason: String },
}

impl Verdict {
    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail { .. })
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    fn skipped(reason: &str) -> Self {
        Verdict::Skipped { reason: reason.to_string() }
    }

    fn fail(witness: impl ToString) -> Self {
        Verdict::Fail { witness: witness.to_string() }
    }

    fn from_bool(ok: bool, witness: &str) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::fail(witness)
        }
    }
}

/// A report section that is either computed or explains why it is absent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Section<T> {
    Computed(T),
    Failed { witness: String },
    Skipped { reason: String },
}

impl<T> Section<T> {
    pub fn computed(&self) -> Option<&T> {
        match self {
            Section::Computed(t) => Some(t),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Check,
    Prolong,
    Cohomology,
    Holo,
    Cocycle,
    All,
}

impl Command {
    fn wants_dimensions(self) -> bool {
        self != Command::Check
    }

    fn wants(self, stage: Command) -> bool {
        self == Command::All || self == stage
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PipelineOptions {
    pub command: Command,
    pub max_degree: usize,
    pub orientation: OrientationChoice,
    pub emit_matrices: bool,
    pub budget: Budget,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            command: Command::All,
            max_degree: 4,
            orientation: OrientationChoice::Standard,
            emit_matrices: false,
            budget: Budget::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Parameters {
    pub max_degree: usize,
    pub orientation: OrientationChoice,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Checks {
    pub bidirected: Verdict,
    pub sigma_valid: Verdict,
    pub star_commutation: Verdict,
    pub braid: Verdict,
    pub prolongation: Verdict,
    pub j_valid: Verdict,
    pub j_sigma_commute: Verdict,
    pub j_descends: Verdict,
    pub integrability: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PqRow {
    pub degree: usize,
    /// `dim Ω^{p, degree−p}` indexed by `p`.
    pub dims: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimensionTable {
    /// `dim Ω^n` for `n = 0..=max_degree`.
    pub omega: Vec<usize>,
    pub calculus_dimension: CalculusDimension,
    /// Set when the budget stopped the prolongation before `max_degree`.
    pub truncated_at: Option<usize>,
    pub pq: Option<Vec<PqRow>>,
}

/// A form as a map from basis labels to nonzero coefficients.
pub type RenderedForm = BTreeMap<String, GaussianRational>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CohomologyRow {
    pub p: usize,
    pub q: usize,
    pub kernel_dim: usize,
    pub image_rank: usize,
    pub dim: usize,
    pub representatives: Vec<RenderedForm>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CohomologySection {
    pub integrability: IntegrabilityReport,
    pub delbar_chain: bool,
    pub groups: Vec<CohomologyRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SectionDims {
    pub functions: usize,
    pub one_forms: usize,
    pub two_forms: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HolomorphicSection {
    pub connection_leibniz: Verdict,
    pub curvature_zero: bool,
    pub curvature_rank: usize,
    pub sigma_restriction: RestrictionReport,
    pub delbar_leibniz: Verdict,
    pub delbar2_leibniz: Verdict,
    pub tensor_square: HolomorphicChecks,
    pub omega02_dim: usize,
    /// `∇̄² = 0` on `Ω¹`.
    pub holomorphic: bool,
    pub sections: SectionDims,
    pub one_form_sections: Vec<RenderedForm>,
    pub two_form_sections: Vec<RenderedForm>,
    pub ring: RingSummary,
    pub uniqueness: UniquenessReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RingSummary {
    pub dims: Vec<usize>,
    pub wedge_closed: bool,
    pub squares_vanish: bool,
    pub anticommute: bool,
    pub wedges_span_top: bool,
    pub exterior_algebra: bool,
    /// `s_i ∧ s_j` for the section basis above.
    pub table: Vec<Vec<RenderedForm>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoldenSection {
    pub n: usize,
    pub expected: GoldenReport,
    pub computed: GoldenReport,
    /// Field name → `(expected, computed)` for every mismatch.
    pub differences: BTreeMap<&'static str, (String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub inputs: InputDigests,
    pub parameters: Parameters,
    pub checks: Checks,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dimensions: Option<Section<DimensionTable>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cohomology: Option<Section<CohomologySection>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holomorphic: Option<Section<HolomorphicSection>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cocycles: Option<Section<CocycleReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub golden: Option<GoldenSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrices: Option<BTreeMap<String, ExactMatrix>>,
    /// Dotted paths of every failed check, in report order.
    pub failures: Vec<String>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> String {
        canonical_json(self)
    }

    fn collect_failures(&mut self) {
        let mut f = Vec::new();
        let c = &self.checks;
        for (name, v) in [
            ("bidirected", &c.bidirected),
            ("sigma_valid", &c.sigma_valid),
            ("star_commutation", &c.star_commutation),
            ("braid", &c.braid),
            ("prolongation", &c.prolongation),
            ("j_valid", &c.j_valid),
            ("j_sigma_commute", &c.j_sigma_commute),
            ("j_descends", &c.j_descends),
            ("integrability", &c.integrability),
        ] {
            if v.is_fail() {
                f.push(format!("checks.{name}"));
            }
        }
        let mut section = |name: &str, failed: bool, items: Vec<(&str, bool)>| {
            if failed {
                f.push(name.to_string());
            }
            f.extend(items.into_iter().filter(|(_, ok)| !ok).map(|(k, _)| format!("{name}.{k}")));
        };
        if let Some(s) = &self.cohomology {
            let items = s.computed().map_or(vec![], |c| vec![("delbar_chain", c.delbar_chain)]);
            section("cohomology", matches!(s, Section::Failed { .. }), items);
        }
        if let Some(s) = &self.holomorphic {
            let items = s.computed().map_or(vec![], |h| {
                vec![
                    ("connection_leibniz", !h.connection_leibniz.is_fail()),
                    ("sigma_restriction", h.sigma_restriction.restriction_invertible),
                    ("delbar_leibniz", !h.delbar_leibniz.is_fail()),
                    ("delbar2_leibniz", !h.delbar2_leibniz.is_fail()),
                    ("tensor_square.tensor_square_matches_projection", h.tensor_square.tensor_square_matches_projection),
                    ("tensor_square.descent_sigma23_invariant", h.tensor_square.descent_sigma23_invariant),
                    ("tensor_square.descent_kills_kernel", h.tensor_square.descent_kills_kernel),
                    ("ring.wedge_closed", h.ring.wedge_closed),
                    ("ring.squares_vanish", h.ring.squares_vanish),
                    ("ring.anticommute", h.ring.anticommute),
                    ("uniqueness.solution_dim", h.uniqueness.solution_dim == 0),
                ]
            });
            section("holomorphic", matches!(s, Section::Failed { .. }), items);
        }
        if let Some(s) = &self.cocycles {
            let items = s.computed().map_or(vec![], |c| {
                vec![
                    ("orientation_is_bimodule_map", c.orientation_is_bimodule_map),
                    ("actions_coincide_on_top", c.actions_coincide_on_top),
                    ("trace_closed", c.trace_closed),
                    ("trace_graded_symmetric", c.trace_graded_symmetric),
                    ("b_phi_zero", c.b_phi_zero.holds),
                    ("b_tau_zero", c.b_tau_zero.holds),
                    ("tau_cyclic", c.tau_cyclic.holds),
                    ("tau_minus_phi_is_b_psi", c.tau_minus_phi_is_b_psi.holds),
                    ("gram.is_hermitian", c.gram.is_hermitian),
                    ("gram.is_psd", c.gram.is_psd),
                ]
            });
            section("cocycles", matches!(s, Section::Failed { .. }), items);
        }
        if let Some(g) = &self.golden {
            f.extend(g.differences.keys().map(|k| format!("golden.{k}")));
        }
        self.failures = f;
    }
}

fn render_form(calc: &Calculus, n: usize, v: &[GaussianRational]) -> RenderedForm {
    let g = calc.graph();
    let space = calc.space(n);
    v.iter()
        .enumerate()
        .filter(|(_, c)| !num_traits::Zero::is_zero(*c))
        .map(|(q, c)| (g.render_path(space.paths().path(space.representatives()[q])), c.clone()))
        .collect()
}

const NOT_REQUESTED: &str = "not requested by this command";

/// Runs every stage the command asks for.
pub fn run_pipeline(inputs: &ResolvedInputs, opts: &PipelineOptions) -> Report {
    let g = &inputs.graph;
    let cmd = opts.command;
    let mut matrices = BTreeMap::new();
    let mut checks = Checks {
        bidirected: Verdict::Pass,
        sigma_valid: Verdict::Pass,
        star_commutation: Verdict::Pass,
        braid: Verdict::Pass,
        prolongation: Verdict::skipped(NOT_REQUESTED),
        j_valid: Verdict::skipped("no J input"),
        j_sigma_commute: Verdict::skipped("no J input"),
        j_descends: Verdict::skipped(NOT_REQUESTED),
        integrability: Verdict::skipped(NOT_REQUESTED),
    };
    let mut report = Report {
        schema_version: SCHEMA_VERSION,
        inputs: inputs.digests(),
        parameters: Parameters { max_degree: opts.max_degree, orientation: opts.orientation },
        checks: checks.clone(),
        dimensions: None,
        cohomology: None,
        holomorphic: None,
        cocycles: None,
        golden: None,
        matrices: None,
        failures: Vec::new(),
    };

    let sigma = match build_sigma(g, inputs.sigma.clone()) {
        Ok(s) => Some(s),
        Err(e) => {
            let w = e.to_string();
            match e {
                SigmaError::StarCommutationFailure(_) => {
                    checks.star_commutation = Verdict::fail(w);
                    checks.braid = Verdict::skipped("σ failed ∗-commutation");
                }
                SigmaError::BraidFailure(_) => checks.braid = Verdict::fail(w),
                _ => {
                    checks.sigma_valid = Verdict::fail(w);
                    checks.star_commutation = Verdict::skipped("σ invalid");
                    checks.braid = Verdict::skipped("σ invalid");
                }
            }
            None
        }
    };
    if let Some(j) = &inputs.j {
        match j.validate(g) {
            Ok(()) => {
                checks.j_valid = Verdict::Pass;
                checks.j_sigma_commute = match &sigma {
                    Some(s) => crate::complex::check_j_sigma_commute(g, j, s)
                        .map_or(Verdict::Pass, |p| Verdict::fail(format!("J⊗1 + 1⊗J and σ differ on 2-path {p}"))),
                    None => Verdict::skipped("σ invalid"),
                };
            }
            Err(e) => {
                checks.j_valid = Verdict::fail(e);
                checks.j_sigma_commute = Verdict::skipped("J invalid");
            }
        }
    }
    if let (Some(s), true) = (&sigma, opts.emit_matrices) {
        matrices.insert("sigma".to_string(), s.matrix().clone());
    }

    let finish = |mut report: Report, checks: Checks, matrices: BTreeMap<String, ExactMatrix>| {
        report.checks = checks;
        if opts.emit_matrices {
            report.matrices = Some(matrices);
        }
        report.collect_failures();
        report
    };

    if cmd == Command::Check {
        return finish(report, checks, matrices);
    }
    let Some(sigma) = sigma else {
        let reason = "σ validation failed";
        checks.prolongation = Verdict::skipped(reason);
        skip_sections(&mut report, cmd, reason);
        return finish(report, checks, matrices);
    };

    // The calculus always reaches degree 3 so `Ω² ⊗ Ω¹` is available.
    let target = opts.max_degree.max(3);
    let mut built = None;
    let mut truncated_at = None;
    for top in (3..=target).rev() {
        match Calculus::new(g.clone(), sigma.clone(), top, opts.budget) {
            Ok(c) => {
                built = Some(c);
                break;
            }
            Err(FormError::Braid(BraidError::DegreeTooLarge { degree, .. })) => truncated_at = Some(degree),
            Err(e) => {
                checks.prolongation = Verdict::fail(e);
                break;
            }
        }
    }
    let Some(calc) = built else {
        if !checks.prolongation.is_fail() {
            checks.prolongation = Verdict::skipped("budget exceeded below degree 3");
        }
        skip_sections(&mut report, cmd, "prolongation unavailable");
        return finish(report, checks, matrices);
    };
    checks.prolongation = match truncated_at {
        Some(d) if d <= opts.max_degree => Verdict::skipped(&format!("budget stops the prolongation at degree {d}")),
        _ => Verdict::Pass,
    };
    let top = opts.max_degree.min(calc.max_degree());
    if opts.emit_matrices {
        matrices.insert("antisymmetrizer_2".to_string(), calc.space(2).antisymmetrizer().clone());
        for n in 0..2 {
            matrices.insert(format!("d_{n}"), calc.differential_matrix(n).expect("degree available"));
        }
    }

    let cs = match (&inputs.j, checks.j_valid.is_pass() && checks.j_sigma_commute.is_pass()) {
        (Some(j), true) => match ComplexStructure::new(calc.clone(), j.clone()) {
            Ok(cs) => {
                checks.j_descends = Verdict::Pass;
                Some(cs)
            }
            Err(e) => {
                checks.j_descends = Verdict::fail(e);
                None
            }
        },
        (Some(_), false) => {
            checks.j_descends = Verdict::skipped("J invalid or not σ-compatible");
            None
        }
        (None, _) => {
            checks.j_descends = Verdict::skipped("no J input");
            None
        }
    };

    let omega: Vec<usize> = (0..=top).map(|n| calc.dim(n)).collect();
    let pq = cs.as_ref().map(|cs| {
        (0..=top).map(|n| PqRow { degree: n, dims: (0..=n).map(|p| cs.decomposition(n).dim(p)).collect() }).collect()
    });
    report.dimensions = Some(Section::Computed(DimensionTable {
        omega,
        calculus_dimension: calc.calculus_dimension(top + 1),
        truncated_at: truncated_at.filter(|&d| d <= opts.max_degree),
        pq,
    }));

    let Some(cs) = cs else {
        let reason = "complex structure unavailable";
        checks.integrability = Verdict::skipped(reason);
        skip_sections(&mut report, cmd, reason);
        return finish(report, checks, matrices);
    };
    let integrability = cs.check_integrability();
    checks.integrability = Verdict::from_bool(integrability.all_pass(), "∂² , ∂̄² or the d-type conditions fail");
    if opts.emit_matrices {
        matrices.insert("j_1".to_string(), cs.j(1).clone());
        matrices.insert("del_0".to_string(), cs.del(0).clone());
        matrices.insert("delbar_0".to_string(), cs.delbar(0).clone());
        matrices.insert("delbar_1".to_string(), cs.delbar(1).clone());
    }

    if cmd.wants(Command::Cohomology) {
        let last = top.min(cs.operator_range() - 1);
        let groups = (0..=last)
            .flat_map(|p| cs.dolbeault_cohomology(p))
            .filter(|grp| grp.p + grp.q <= last)
            .map(|grp| CohomologyRow {
                p: grp.p,
                q: grp.q,
                kernel_dim: grp.kernel_dim,
                image_rank: grp.image_rank,
                dim: grp.dim,
                representatives: grp.representatives.iter().map(|v| render_form(&calc, grp.p + grp.q, v)).collect(),
            })
            .collect();
        report.cohomology = Some(Section::Computed(CohomologySection {
            integrability,
            delbar_chain: cs.delbar_chain_property(),
            groups,
        }));
    }

    if cmd.wants(Command::Holo) {
        report.holomorphic = Some(holomorphic_section(&cs, &mut matrices, opts.emit_matrices));
    }

    if cmd.wants(Command::Cocycle) {
        report.cocycles = Some(match verify_cocycle_identities(&cs, opts.orientation) {
            Ok((r, tables)) => {
                if opts.emit_matrices {
                    matrices.insert("gram".to_string(), positivity_gram(&tables.phi));
                }
                Section::Computed(r)
            }
            Err(e) => Section::Skipped { reason: e.to_string() },
        });
    }
    finish(report, checks, matrices)
}

fn skip_sections(report: &mut Report, cmd: Command, reason: &str) {
    if cmd.wants_dimensions() && report.dimensions.is_none() {
        report.dimensions = Some(Section::Skipped { reason: reason.to_string() });
    }
    if cmd.wants(Command::Cohomology) {
        report.cohomology = Some(Section::Skipped { reason: reason.to_string() });
    }
    if cmd.wants(Command::Holo) {
        report.holomorphic = Some(Section::Skipped { reason: reason.to_string() });
    }
    if cmd.wants(Command::Cocycle) {
        report.cocycles = Some(Section::Skipped { reason: reason.to_string() });
    }
}

fn holomorphic_section(
    cs: &ComplexStructure,
    matrices: &mut BTreeMap<String, ExactMatrix>,
    emit: bool,
) -> Section<HolomorphicSection> {
    let calc = cs.calculus();
    let conn = match connection_from_sigma(calc, None) {
        Ok(c) => c,
        Err(e) => return Section::Failed { witness: e.to_string() },
    };
    let (hs, tensor_square) = match build_holomorphic(cs, &conn) {
        Ok(x) => x,
        Err(e) => return Section::Failed { witness: e.to_string() },
    };
    let r = curvature(calc, &conn);
    let verdict = |res: Result<(), crate::holomorphic::HolomorphicError>| match res {
        Ok(()) => Verdict::Pass,
        Err(e) => Verdict::fail(e),
    };
    let sec = holomorphic_sections(cs, &hs);
    let ring: RingReport = section_ring(calc, &sec);
    let omega02_dim = if calc.max_degree() >= 2 { cs.decomposition(2).dim(0) } else { 0 };
    let holomorphic = hs.delbar_curvature(cs).is_zero();
    if emit {
        matrices.insert("connection".to_string(), conn.matrix.clone());
        matrices.insert("nabla_bar".to_string(), hs.nabla_bar.clone());
        matrices.insert("nabla_bar_2".to_string(), hs.nabla_bar2.clone());
        matrices.insert("curvature".to_string(), r.clone());
    }
    Section::Computed(HolomorphicSection {
        connection_leibniz: Verdict::Pass,
        curvature_zero: r.is_zero(),
        curvature_rank: r.rank(),
        sigma_restriction: hs.sigma_bar.report.clone(),
        delbar_leibniz: verdict(hs.check_delbar_leibniz(cs)),
        delbar2_leibniz: verdict(hs.check_delbar2_leibniz(cs)),
        tensor_square,
        omega02_dim,
        holomorphic,
        sections: SectionDims {
            functions: sec.functions.len(),
            one_forms: sec.one_forms.len(),
            two_forms: sec.two_forms.len(),
        },
        one_form_sections: sec.one_forms.iter().map(|v| render_form(calc, 1, v)).collect(),
        two_form_sections: sec.two_forms.iter().map(|v| render_form(calc, 2, v)).collect(),
        ring: RingSummary {
            table: ring.table.iter().map(|row| row.iter().map(|v| render_form(calc, 2, v)).collect()).collect(),
            dims: ring.dims,
            wedge_closed: ring.wedge_closed,
            squares_vanish: ring.squares_vanish,
            anticommute: ring.anticommute,
            wedges_span_top: ring.wedges_span_top,
            exterior_algebra: ring.exterior_algebra,
        },
        uniqueness: unique_bimodule_delbar_check(cs),
    })
}

/// The n-gon inputs, resolved.
pub fn polygon_inputs(n: usize) -> Result<ResolvedInputs, PolygonError> {
    let m = make_polygon(n)?;
    Ok(ResolvedInputs { graph: m.graph, sigma: m.sigma_spec, j: Some(m.j_spec) })
}

/// Full pipeline on the n-gon plus comparison against the expected table.
pub fn run_polygon(n: usize, opts: &PipelineOptions) -> Result<Report, PolygonError> {
    let inputs = polygon_inputs(n)?;
    let opts = PipelineOptions { command: Command::All, ..*opts };
    let mut report = run_pipeline(&inputs, &opts);
    let expected = golden_report(n)?;
    let computed = computed_golden(&inputs, &report, &opts);
    report.golden = Some(GoldenSection { n, differences: expected.compare(&computed), expected, computed });
    report.collect_failures();
    Ok(report)
}

/// Reads the golden-table quantities back out of a report. Degrees above the
/// reported range are recomputed directly.
fn computed_golden(inputs: &ResolvedInputs, report: &Report, opts: &PipelineOptions) -> GoldenReport {
    let dims = report.dimensions.as_ref().and_then(Section::computed);
    let omega = |n: usize| -> usize {
        dims.and_then(|d| d.omega.get(n).copied()).unwrap_or_else(|| {
            build_sigma(&inputs.graph, inputs.sigma.clone())
                .ok()
                .and_then(|s| Calculus::new(inputs.graph.clone(), s, n, opts.budget).ok())
                .map_or(usize::MAX, |c| c.dim(n))
        })
    };
    let pq = |n: usize, p: usize| -> usize {
        dims.and_then(|d| d.pq.as_ref()).and_then(|rows| rows.get(n)).and_then(|r| r.dims.get(p).copied()).unwrap_or(usize::MAX)
    };
    let coh = report.cohomology.as_ref().and_then(Section::computed);
    let h = |p: usize, q: usize| -> usize {
        coh.and_then(|c| c.groups.iter().find(|g| g.p == p && g.q == q)).map_or(usize::MAX, |g| g.dim)
    };
    let holo = report.holomorphic.as_ref().and_then(Section::computed);
    let cocycles = report.cocycles.as_ref().and_then(Section::computed);
    GoldenReport {
        dim_omega1: omega(1),
        dim_omega2: omega(2),
        dim_omega3: omega(3),
        dim_omega20: pq(2, 2),
        dim_omega02: pq(2, 0),
        dim_h10: h(1, 0),
        dim_h11: h(1, 1),
        dim_h00: h(0, 0),
        dim_sections_omega1: holo.map_or(usize::MAX, |h| h.sections.one_forms),
        dim_sections_omega2: holo.map_or(usize::MAX, |h| h.sections.two_forms),
        ring_dims: holo.map_or(vec![], |h| h.ring.dims.clone()),
        gram_psd: cocycles.is_some_and(|c| c.gram.is_psd),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polygon_report_matches_golden() {
        for n in [3, 4, 6] {
            let r = run_polygon(n, &PipelineOptions::default()).unwrap();
            assert!(r.all_pass(), "n = {n}: {:?}", r.failures);
            assert!(r.golden.as_ref().unwrap().differences.is_empty());
        }
    }

    #[test]
    fn report_is_deterministic() {
        let a = run_polygon(4, &PipelineOptions::default()).unwrap().to_json();
        let b = run_polygon(4, &PipelineOptions::default()).unwrap().to_json();
        assert_eq!(a, b);
        assert!(a.contains("\"schema_version\": 1"));
    }

    #[test]
    fn low_max_degree_still_fills_golden() {
        let opts = PipelineOptions { max_degree: 2, ..Default::default() };
        let r = run_polygon(5, &opts).unwrap();
        assert!(r.all_pass(), "{:?}", r.failures);
        let d = r.dimensions.as_ref().unwrap().computed().unwrap();
        assert_eq!(d.omega, vec![5, 10, 5]);
    }

    #[test]
    fn opposite_orientation_fails_positivity_only() {
        let opts = PipelineOptions { orientation: OrientationChoice::Opposite, ..Default::default() };
        let inputs = polygon_inputs(4).unwrap();
        let r = run_pipeline(&inputs, &PipelineOptions { command: Command::Cocycle, ..opts });
        assert_eq!(r.failures, vec!["cocycles.gram.is_psd".to_string()]);
    }

    #[test]
    fn invalid_orientation_is_a_verdict() {
        let mut inputs = polygon_inputs(3).unwrap();
        inputs.j.as_mut().unwrap().holomorphic.insert((1, 0));
        let r = run_pipeline(&inputs, &PipelineOptions::default());
        assert!(r.checks.j_valid.is_fail());
        assert!(matches!(r.holomorphic, Some(Section::Skipped { .. })));
        assert!(!r.all_pass());
    }
}
