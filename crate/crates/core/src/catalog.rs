//! Reference models and their leading-order cost constants, plus the data
//! behind the ball-bound and orthogonal-restriction figures.
//!
//! Every constant is either computed on demand by an operation of this crate
//! or cited from prior work. Constants are coefficients of `1/(k n²)` (CR)
//! or `1/N²` (MM) and may carry a power of `p`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bounds::{
    coupled_pair_joint_constant, jnt_lower_bound, orthogonal_restricted_sep_plus, sep_estimate,
    sep_plus_optimize, BoundStatus, CostEstimate, NuisanceOracle, Paradigm, ResourceBudget,
    Strategy,
};
use crate::error::{invalid, Result};
use crate::operators::{
    build_fixed_atom_generators, build_free_atom_generators, build_pauli_generators,
    orthogonal_bound_value, GeneratorSet, PauliAxis, ReparamMatrix,
};
use crate::qfi::{qfi_pure, trace_inverse};
use crate::states::{superposed_noon_state, PureState};
use crate::variational::{airy_lower_bound, ball_upper_bound};

/// Parameter count at which models with a free `p` are evaluated.
pub const REFERENCE_P: usize = 4;
/// First zero of `J₀`, as used in the cited two-component minimax result.
pub const BESSEL_J0_FIRST_ZERO: f64 = 2.404_825_557_695_773;
/// Angle grid used for the orthogonal-restriction figure.
pub const RATIO_ANGLE_GRID: usize = 90;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Computed,
    Cited,
}

/// Distinguishes several entries for the same paradigm and strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Standard,
    /// Parallel use of the gates.
    Parallel,
    /// Sequential use with feedback and ancillas.
    Adaptive,
    /// Lower end of a bracket.
    Lower,
    /// Upper end of a bracket.
    Upper,
}

#[derive(Debug, Clone, Copy)]
enum Evaluator {
    /// Leading constant at a given `p`.
    Computed(fn(usize) -> Result<f64>),
    /// Coefficient of `p^exponent`.
    Cited(f64),
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub paradigm: Paradigm,
    pub strategy: Strategy,
    pub variant: Variant,
    pub p_exponent: i32,
    /// The finite-`n` constant carries an extra factor `n/(n+2)`.
    pub finite_n: bool,
    pub status: BoundStatus,
    pub provenance: &'static str,
    evaluator: Evaluator,
}

impl CatalogEntry {
    pub fn source(&self) -> Source {
        match self.evaluator {
            Evaluator::Computed(_) => Source::Computed,
            Evaluator::Cited(_) => Source::Cited,
        }
    }

    /// Leading constant at `p` parameters in the large-`n` limit.
    pub fn constant(&self, p: usize) -> Result<f64> {
        match self.evaluator {
            Evaluator::Computed(f) => f(p),
            Evaluator::Cited(c) => Ok(c * (p as f64).powi(self.p_exponent)),
        }
    }

    /// Constant at a finite number of gates per trial.
    pub fn constant_at_n(&self, p: usize, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(invalid("n must be positive"));
        }
        let c = self.constant(p)?;
        Ok(if self.finite_n {
            c * n as f64 / (n as f64 + 2.0)
        } else {
            c
        })
    }

    /// `constant(p)/p^exponent`.
    pub fn coefficient(&self, p: usize) -> Result<f64> {
        Ok(self.constant(p)? / (p as f64).powi(self.p_exponent))
    }
}

#[derive(Debug, Clone)]
pub struct ModelRecord {
    pub name: &'static str,
    pub description: &'static str,
    /// Parameter count when the model fixes it.
    pub fixed_p: Option<usize>,
    pub entries: Vec<CatalogEntry>,
    pub notes: Vec<&'static str>,
}

impl ModelRecord {
    pub fn reference_p(&self) -> usize {
        self.fixed_p.unwrap_or(REFERENCE_P)
    }

    pub fn entries_for(
        &self,
        paradigm: Paradigm,
        strategy: Strategy,
    ) -> impl Iterator<Item = &CatalogEntry> {
        self.entries
            .iter()
            .filter(move |e| e.paradigm == paradigm && e.strategy == strategy)
    }

    /// Checks `JNT ≤ SEP+ ≤ SEP` and `SEP ≤ p^α·JNT` within each paradigm at
    /// `p` parameters (large-`n` limit). Returns a description of every
    /// violated inequality.
    pub fn ordering_violations(&self, p: usize) -> Result<Vec<String>> {
        let tol = 1e-9;
        let mut out = Vec::new();
        for paradigm in [Paradigm::Cr, Paradigm::Mm] {
            let values = |s: Strategy| -> Result<Vec<f64>> {
                self.entries_for(paradigm, s)
                    .map(|e| e.constant(p))
                    .collect()
            };
            let (sep, plus, jnt) = (
                values(Strategy::Sep)?,
                values(Strategy::SepPlus)?,
                values(Strategy::Jnt)?,
            );
            let mut chain = vec![(Strategy::Jnt, &jnt)];
            if !plus.is_empty() {
                chain.push((Strategy::SepPlus, &plus));
            }
            chain.push((Strategy::Sep, &sep));
            for pair in chain.windows(2) {
                let (lo_name, lo) = pair[0];
                let (hi_name, hi) = pair[1];
                for &a in lo.iter() {
                    for &b in hi.iter() {
                        if a > b * (1.0 + tol) {
                            out.push(format!(
                                "{} {}: {} {a} exceeds {} {b}",
                                self.name,
                                paradigm.label(),
                                lo_name.label(),
                                hi_name.label()
                            ));
                        }
                    }
                }
            }
            let scale = (p as f64).powi(paradigm.alpha() as i32);
            for &s in &sep {
                for &j in &jnt {
                    if s > scale * j * (1.0 + tol) {
                        out.push(format!(
                            "{} {}: SEP {s} exceeds p^{}·JNT {}",
                            self.name,
                            paradigm.label(),
                            paradigm.alpha(),
                            scale * j
                        ));
                    }
                }
            }
        }
        Ok(out)
    }
}

fn entry(
    paradigm: Paradigm,
    strategy: Strategy,
    p_exponent: i32,
    status: BoundStatus,
    provenance: &'static str,
    evaluator: Evaluator,
) -> CatalogEntry {
    CatalogEntry {
        paradigm,
        strategy,
        variant: Variant::Standard,
        p_exponent,
        finite_n: false,
        status,
        provenance,
        evaluator,
    }
}

fn variant(mut e: CatalogEntry, v: Variant) -> CatalogEntry {
    e.variant = v;
    e
}

fn budget(paradigm: Paradigm) -> ResourceBudget {
    match paradigm {
        Paradigm::Cr => ResourceBudget::Cr { n: 1, k: 1 },
        Paradigm::Mm => ResourceBudget::Mm { total: 1 },
    }
}

fn sep_of(gens: &GeneratorSet, paradigm: Paradigm) -> Result<f64> {
    Ok(sep_estimate(gens, &budget(paradigm))?.constant)
}

fn sep_plus_of(gens: &GeneratorSet, paradigm: Paradigm) -> Result<f64> {
    let oracle = NuisanceOracle { gens, paradigm };
    Ok(sep_plus_optimize(gens, &budget(paradigm), &oracle)?
        .estimate
        .constant)
}

fn jnt_bound_of(gens: &GeneratorSet, paradigm: Paradigm) -> Result<f64> {
    Ok(jnt_lower_bound(gens, &budget(paradigm))?.constant)
}

/// `n²·tr F⁻¹` for `n` parallel uses on `psi`, which is independent of `n`
/// for commuting generators.
fn joint_qfi_constant(gens: &GeneratorSet, psi: &PureState) -> Result<f64> {
    let f = qfi_pure(gens, &vec![0.0; gens.p()], psi, 1)?;
    Ok(trace_inverse(&f))
}

fn fixed(p: usize) -> Result<GeneratorSet> {
    build_fixed_atom_generators(p)
}

fn free(p: usize) -> Result<GeneratorSet> {
    build_free_atom_generators(p)
}

fn pauli(p: usize) -> Result<GeneratorSet> {
    match p {
        1 => build_pauli_generators(&[PauliAxis::Z]),
        2 => build_pauli_generators(&[PauliAxis::X, PauliAxis::Y]),
        3 => build_pauli_generators(&[PauliAxis::X, PauliAxis::Y, PauliAxis::Z]),
        _ => Err(invalid("Pauli models have one to three components")),
    }
}

fn fixed_atoms() -> ModelRecord {
    use BoundStatus::ExactAsymptotic as Exact;
    use Evaluator::Computed;
    use Paradigm::{Cr, Mm};
    use Strategy::{Jnt, Sep, SepPlus};
    ModelRecord {
        name: "fixed_atoms",
        description: "σ_z/2 on each of p spins, one spin per site in every layer",
        fixed_p: None,
        entries: vec![
            entry(
                Cr,
                Sep,
                2,
                Exact,
                "optimal split of single-site n00n costs",
                Computed(|p| sep_of(&fixed(p)?, Cr)),
            ),
            entry(
                Cr,
                SepPlus,
                1,
                Exact,
                "Walsh–Hadamard components, each sensed by all sites",
                Computed(|p| sep_plus_of(&fixed(p)?, Cr)),
            ),
            entry(
                Cr,
                Jnt,
                1,
                Exact,
                "tr F⁻¹ of a product of single-site n00n states",
                Computed(|p| joint_qfi_constant(&fixed(p)?, &PureState::uniform(1 << p)?)),
            ),
            entry(
                Mm,
                Sep,
                3,
                Exact,
                "optimal split of single-site SIN costs",
                Computed(|p| sep_of(&fixed(p)?, Mm)),
            ),
            entry(
                Mm,
                SepPlus,
                2,
                Exact,
                "Walsh–Hadamard components, each sensed by all sites",
                Computed(|p| sep_plus_of(&fixed(p)?, Mm)),
            ),
            entry(
                Mm,
                Jnt,
                1,
                Exact,
                "orthogonal bound at the identity, attained by a product of single-site SIN states",
                Computed(|p| {
                    let sum = orthogonal_bound_value(&fixed(p)?, &ReparamMatrix::identity(p))?
                        .ok_or_else(|| invalid("degenerate generator"))?;
                    Ok(Paradigm::Mm.factor() * sum)
                }),
            ),
        ],
        notes: vec!["SEP+ requires p to be a power of two for the Walsh–Hadamard seed"],
    }
}

fn free_atoms() -> ModelRecord {
    use BoundStatus::{Cited, ExactAsymptotic as Exact, LowerBound};
    use Evaluator::Computed;
    use Paradigm::{Cr, Mm};
    use Strategy::{Jnt, Sep, SepPlus};
    ModelRecord {
        name: "free_atoms",
        description: "|i⟩⟨i| ⊗ σ_z/2 for an atom free to sit at any of p sites",
        fixed_p: None,
        entries: vec![
            entry(
                Cr,
                Sep,
                2,
                Exact,
                "optimal split of single-site n00n costs",
                Computed(|p| sep_of(&free(p)?, Cr)),
            ),
            entry(
                Cr,
                SepPlus,
                2,
                Exact,
                "no combination of generators has a larger spread",
                Computed(|p| sep_plus_of(&free(p)?, Cr)),
            ),
            entry(
                Cr,
                Jnt,
                2,
                Exact,
                "tr F⁻¹ of the superposition of single-site n00n pairs",
                Computed(|p| joint_qfi_constant(&free(p)?, &superposed_noon_state(p, 1)?)),
            ),
            entry(
                Mm,
                Sep,
                3,
                Exact,
                "optimal split of single-site SIN costs",
                Computed(|p| sep_of(&free(p)?, Mm)),
            ),
            entry(
                Mm,
                SepPlus,
                3,
                Exact,
                "no combination of generators has a larger spread",
                Computed(|p| sep_plus_of(&free(p)?, Mm)),
            ),
            variant(
                entry(
                    Mm,
                    Jnt,
                    3,
                    LowerBound,
                    "Airy-function bound on the cross-polytope ground energy",
                    Computed(|p| Ok(airy_lower_bound()?.constant * (p as f64).powi(3))),
                ),
                Variant::Lower,
            ),
            variant(
                entry(
                    Mm,
                    Jnt,
                    3,
                    Cited,
                    "large-p limit of the inscribed-ball probe energy",
                    Evaluator::Cited(1.0),
                ),
                Variant::Upper,
            ),
        ],
        notes: vec![
            "the finite-p inscribed-ball energy is available from the ball figure data",
            "the orthogonal bound π²p² on the MM joint cost is not tight",
        ],
    }
}

fn pauli3() -> ModelRecord {
    use BoundStatus::{Cited, ExactAsymptotic as Exact, LowerBound};
    use Evaluator::Computed;
    use Paradigm::{Cr, Mm};
    use Strategy::{Jnt, Sep, SepPlus};
    let mut parallel = variant(
        entry(
            Cr,
            Jnt,
            0,
            Cited,
            "optimal parallel SU(2) probe, tr F⁻¹ = 9/(n(n+2)) for n ≥ 6",
            Evaluator::Cited(9.0),
        ),
        Variant::Parallel,
    );
    parallel.finite_n = true;
    ModelRecord {
        name: "pauli3",
        description: "σ_x/2, σ_y/2, σ_z/2 on a qubit, around θ = 0",
        fixed_p: Some(3),
        entries: vec![
            entry(
                Cr,
                Sep,
                0,
                Exact,
                "optimal split of n00n costs along each axis",
                Computed(|_| sep_of(&pauli(3)?, Cr)),
            ),
            entry(
                Cr,
                SepPlus,
                0,
                Exact,
                "every unit combination has spread 1",
                Computed(|_| sep_plus_of(&pauli(3)?, Cr)),
            ),
            parallel,
            variant(
                entry(
                    Cr,
                    Jnt,
                    0,
                    Cited,
                    "ancilla-assisted sequential scheme, tr F⁻¹ = 3/n²",
                    Evaluator::Cited(3.0),
                ),
                Variant::Adaptive,
            ),
            entry(
                Mm,
                Sep,
                0,
                LowerBound,
                "optimal split of SIN costs ignoring the other components",
                Computed(|_| sep_of(&pauli(3)?, Mm)),
            ),
            entry(
                Mm,
                SepPlus,
                0,
                LowerBound,
                "every unit combination has spread 1",
                Computed(|_| sep_plus_of(&pauli(3)?, Mm)),
            ),
            entry(
                Mm,
                Jnt,
                0,
                Cited,
                "covariant SU(2) estimation, 8π²/N² in the spin-1 cost",
                Evaluator::Cited(4.0 * PI * PI),
            ),
        ],
        notes: vec![
            "adaptiveness helps only in the CR paradigm",
            "no separate MM protocol attaining 27π² is known",
        ],
    }
}

fn pauli2() -> ModelRecord {
    use BoundStatus::{Cited, ExactAsymptotic as Exact, LowerBound};
    use Evaluator::Computed;
    use Paradigm::{Cr, Mm};
    use Strategy::{Jnt, Sep, SepPlus};
    let mut parallel = variant(
        entry(
            Cr,
            Jnt,
            0,
            Cited,
            "optimal parallel probe, tr F⁻¹ = 4/(n(n+2))",
            Evaluator::Cited(4.0),
        ),
        Variant::Parallel,
    );
    parallel.finite_n = true;
    ModelRecord {
        name: "pauli2",
        description: "σ_x/2, σ_y/2 on a qubit, around θ = 0",
        fixed_p: Some(2),
        entries: vec![
            entry(
                Cr,
                Sep,
                0,
                Exact,
                "optimal split of n00n costs along each axis",
                Computed(|_| sep_of(&pauli(2)?, Cr)),
            ),
            entry(
                Cr,
                SepPlus,
                0,
                Exact,
                "every unit combination has spread 1",
                Computed(|_| sep_plus_of(&pauli(2)?, Cr)),
            ),
            parallel,
            variant(
                entry(
                    Cr,
                    Jnt,
                    0,
                    Cited,
                    "ancilla-assisted sequential scheme, tr F⁻¹ = 2/n²",
                    Evaluator::Cited(2.0),
                ),
                Variant::Adaptive,
            ),
            entry(
                Mm,
                Sep,
                0,
                LowerBound,
                "optimal split of SIN costs ignoring the other component",
                Computed(|_| sep_of(&pauli(2)?, Mm)),
            ),
            entry(
                Mm,
                SepPlus,
                0,
                LowerBound,
                "every unit combination has spread 1",
                Computed(|_| sep_plus_of(&pauli(2)?, Mm)),
            ),
            entry(
                Mm,
                Jnt,
                0,
                Cited,
                "covariant U(1)-in-SU(2) estimation, 4ξ² with ξ the first zero of J₀",
                Evaluator::Cited(4.0 * BESSEL_J0_FIRST_ZERO * BESSEL_J0_FIRST_ZERO),
            ),
        ],
        notes: vec!["adaptiveness helps only in the CR paradigm"],
    }
}

fn pauli1() -> ModelRecord {
    use BoundStatus::ExactAsymptotic as Exact;
    use Evaluator::Computed;
    use Paradigm::{Cr, Mm};
    use Strategy::{Jnt, Sep, SepPlus};
    ModelRecord {
        name: "pauli1",
        description: "σ_z/2 on a qubit: a single phase",
        fixed_p: Some(1),
        entries: vec![
            entry(
                Cr,
                Sep,
                0,
                Exact,
                "n00n state",
                Computed(|_| sep_of(&pauli(1)?, Cr)),
            ),
            entry(
                Cr,
                SepPlus,
                0,
                Exact,
                "n00n state",
                Computed(|_| sep_plus_of(&pauli(1)?, Cr)),
            ),
            entry(
                Cr,
                Jnt,
                0,
                Exact,
                "tr F⁻¹ of the n00n state",
                Computed(|_| joint_qfi_constant(&pauli(1)?, &PureState::uniform(2)?)),
            ),
            entry(
                Mm,
                Sep,
                0,
                Exact,
                "SIN state",
                Computed(|_| sep_of(&pauli(1)?, Mm)),
            ),
            entry(
                Mm,
                SepPlus,
                0,
                Exact,
                "SIN state",
                Computed(|_| sep_plus_of(&pauli(1)?, Mm)),
            ),
            entry(
                Mm,
                Jnt,
                0,
                Exact,
                "SIN state",
                Computed(|_| jnt_bound_of(&pauli(1)?, Mm)),
            ),
        ],
        notes: vec!["the MM constants exceed the CR ones by exactly π²"],
    }
}

fn interferometer() -> ModelRecord {
    use BoundStatus::Cited;
    use Evaluator::Cited as C;
    use Paradigm::{Cr, Mm};
    use Strategy::{Jnt, Sep};
    ModelRecord {
        name: "interferometer_p_arms",
        description: "p phases against one reference arm in a (p+1)-arm interferometer",
        fixed_p: None,
        entries: vec![
            entry(
                Cr,
                Sep,
                2,
                Cited,
                "multiarm interferometry, separate phases",
                C(1.0),
            ),
            entry(
                Cr,
                Jnt,
                2,
                Cited,
                "multiarm interferometry, joint estimation",
                C(0.25),
            ),
            entry(
                Mm,
                Sep,
                3,
                Cited,
                "multiarm interferometry, separate phases",
                C(PI * PI),
            ),
            variant(
                entry(
                    Mm,
                    Jnt,
                    3,
                    Cited,
                    "multiarm interferometry, joint minimax bracket",
                    C(1.89),
                ),
                Variant::Lower,
            ),
            variant(
                entry(
                    Mm,
                    Jnt,
                    3,
                    Cited,
                    "multiarm interferometry, joint minimax bracket",
                    C(2.0),
                ),
                Variant::Upper,
            ),
        ],
        notes: vec!["reference rows only; no generator-level model"],
    }
}

/// The six reference models.
pub fn table_one() -> Vec<ModelRecord> {
    vec![
        fixed_atoms(),
        free_atoms(),
        pauli3(),
        pauli2(),
        pauli1(),
        interferometer(),
    ]
}

pub fn model(name: &str) -> Option<ModelRecord> {
    table_one().into_iter().find(|m| m.name == name)
}

/// One flattened catalog entry evaluated at the model's reference `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub model: String,
    pub paradigm: Paradigm,
    pub strategy: Strategy,
    pub variant: Variant,
    pub p: usize,
    /// Leading constant at `p`, large-`n` limit.
    pub constant: f64,
    /// `constant/p^p_exponent`.
    pub coefficient: f64,
    pub p_exponent: i32,
    pub finite_n: bool,
    pub status: BoundStatus,
    pub source: Source,
    pub provenance: String,
}

pub fn table_rows(records: &[ModelRecord]) -> Result<Vec<TableRow>> {
    let mut rows = Vec::new();
    for m in records {
        let p = m.reference_p();
        for e in &m.entries {
            let constant = e.constant(p)?;
            rows.push(TableRow {
                model: m.name.to_string(),
                paradigm: e.paradigm,
                strategy: e.strategy,
                variant: e.variant,
                p,
                constant,
                coefficient: constant / (p as f64).powi(e.p_exponent),
                p_exponent: e.p_exponent,
                finite_n: e.finite_n,
                status: e.status,
                source: e.source(),
                provenance: e.provenance.to_string(),
            });
        }
    }
    Ok(rows)
}

/// Converts a catalog entry into a [`CostEstimate`] at `p` and finite `n`.
pub fn entry_estimate(e: &CatalogEntry, p: usize, n: Option<u64>) -> Result<CostEstimate> {
    let constant = match n {
        Some(n) => e.constant_at_n(p, n)?,
        None => e.constant(p)?,
    };
    Ok(CostEstimate {
        paradigm: e.paradigm,
        strategy: e.strategy,
        constant,
        p_exponent: Some(e.p_exponent),
        status: e.status,
        provenance: e.provenance.to_string(),
    })
}

/// Costs normalized as `cost·N²/p³` for the free-atom joint minimax problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallRow {
    pub p: usize,
    pub sep_norm: f64,
    pub ball_norm: f64,
    pub airy_norm: f64,
    /// Exact ground energy over `p³`, known for `p = 1, 2`.
    pub analytic_norm: Option<f64>,
}

/// Exact cross-polytope ground energies: an interval of length 1 for
/// `p = 1` and a square of side `1/√2` for `p = 2`.
pub fn analytic_ground_energy(p: usize) -> Option<f64> {
    match p {
        1 => Some(PI * PI),
        2 => Some(4.0 * PI * PI),
        _ => None,
    }
}

/// One row per `p = 1..=p_max`, followed by the two analytically solved points.
pub fn figure_ball_data(p_max: usize) -> Result<Vec<BallRow>> {
    if p_max < 2 {
        return Err(invalid("p_max must be at least 2"));
    }
    let airy = airy_lower_bound()?.constant;
    let row = |p: usize, analytic: bool| -> Result<BallRow> {
        let p3 = (p as f64).powi(3);
        Ok(BallRow {
            p,
            sep_norm: PI * PI,
            ball_norm: ball_upper_bound(p)? / p3,
            airy_norm: airy,
            analytic_norm: if analytic {
                analytic_ground_energy(p).map(|e| e / p3)
            } else {
                None
            },
        })
    };
    let mut rows = (1..=p_max)
        .map(|p| row(p, false))
        .collect::<Result<Vec<_>>>()?;
    rows.push(row(1, true)?);
    rows.push(row(2, true)?);
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub beta_over_alpha: f64,
    /// Orthogonal-restricted SEP+ constant over the joint constant.
    pub ratio: f64,
}

/// `β = α·i/(steps+1)` for `i = 1..=steps`.
pub fn ratio_beta_grid(alpha: f64, steps: usize) -> Vec<f64> {
    (1..=steps)
        .map(|i| alpha * i as f64 / (steps as f64 + 1.0))
        .collect()
}

pub fn figure_ratio_data(alpha: f64, beta_grid: &[f64]) -> Result<Vec<RatioRow>> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(invalid("alpha must be positive and finite"));
    }
    beta_grid
        .iter()
        .map(|&beta| {
            if !(beta > 0.0 && beta < alpha) {
                return Err(invalid(format!("beta = {beta} must lie in (0, alpha)")));
            }
            let restricted = orthogonal_restricted_sep_plus(alpha, beta, RATIO_ANGLE_GRID)?;
            Ok(RatioRow {
                beta_over_alpha: beta / alpha,
                ratio: restricted / coupled_pair_joint_constant(alpha, beta),
            })
        })
        .collect()
}
