//! One function per subcommand. Each takes its merged arguments and returns
//! serializable records; rendering happens in the caller.

use std::f64::consts::PI;

use anyhow::{anyhow, bail, ensure, Context, Result};
use hl_metrology::bounds::{
    coupled_pair_joint_constant, jnt_lower_bound_with, sep_estimate, sep_plus_optimize_with,
    BoundStatus, CostEstimate, NuisanceOracle, Paradigm, ResourceBudget, Strategy,
};
use hl_metrology::catalog::{
    self, entry_estimate, figure_ball_data, figure_ratio_data, ratio_beta_grid, table_one,
    table_rows, BallRow, RatioRow, Source, TableRow, Variant,
};
use hl_metrology::operators::{
    build_coupled_pair_generators, build_fixed_atom_generators, build_free_atom_generators,
    build_pauli_generators, GeneratorSet, PauliAxis, SearchOptions,
};
use hl_metrology::qfi::{qfi_pure, saturability, trace_inverse};
use hl_metrology::states::{noon_coefficients, sin_coefficients, superposed_noon_state, PureState};
use hl_metrology::variational::{
    airy_lower_bound_with_cutoff, ball_upper_bound, default_grid, phase_cost_analytic,
    phase_cost_monte_carlo, richardson_ground_energy, simplex_ground_energy, special,
    PhaseMeasurementModel, AIRY_CUTOFF, DEFAULT_PDF_RESOLUTION,
};
use serde::{Deserialize, Serialize};

use crate::args::{
    AiryArgs, BallArgs, BoundsArgs, Family, FigureBallArgs, FigureRatioArgs, ModelName,
    ParadigmName, PhaseArgs, QfiArgs, SimplexArgs, StateName,
};
use crate::output::Num;

pub const DEFAULT_ALPHA: f64 = 1.0;
pub const DEFAULT_BETA: f64 = 0.5;
pub const DEFAULT_FIGURE_P_MAX: usize = 20;
pub const DEFAULT_BETA_STEPS: usize = 50;
pub const DEFAULT_PHASE_BUDGET: usize = 20;

fn positive<T: PartialOrd + Default + std::fmt::Display + Copy>(name: &str, v: T) -> Result<T> {
    ensure!(v > T::default(), "{name} must be positive, got {v}");
    Ok(v)
}

fn positive_f64(name: &str, v: f64) -> Result<f64> {
    ensure!(
        v > 0.0 && v.is_finite(),
        "{name} must be positive and finite, got {v}"
    );
    Ok(v)
}

fn parse_axes(s: &str) -> Result<Vec<PauliAxis>> {
    s.split(',')
        .map(|a| match a.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(PauliAxis::X),
            "y" => Ok(PauliAxis::Y),
            "z" => Ok(PauliAxis::Z),
            other => Err(anyhow!("unknown Pauli axis {other:?}")),
        })
        .collect()
}

fn model_label(m: ModelName) -> &'static str {
    match m {
        ModelName::CoupledPair => "coupled_pair",
        ModelName::FixedAtoms => "fixed_atoms",
        ModelName::FreeAtoms => "free_atoms",
        ModelName::Pauli => "pauli",
        ModelName::Pauli1 => "pauli1",
        ModelName::Pauli2 => "pauli2",
        ModelName::Pauli3 => "pauli3",
        ModelName::Interferometer => "interferometer_p_arms",
    }
}

/// Generators for every model that has them, with the parameter count used.
fn generators(
    model: ModelName,
    p: Option<usize>,
    alpha: f64,
    beta: f64,
    axes: Option<&str>,
) -> Result<GeneratorSet> {
    let fixed_p = |want: usize| -> Result<()> {
        if let Some(p) = p {
            ensure!(
                p == want,
                "model {} has p = {want}, got --p {p}",
                model_label(model)
            );
        }
        Ok(())
    };
    let gens = match model {
        ModelName::CoupledPair => {
            fixed_p(2)?;
            build_coupled_pair_generators(alpha, beta)?
        }
        ModelName::FixedAtoms => {
            build_fixed_atom_generators(positive("p", p.unwrap_or(catalog::REFERENCE_P))?)?
        }
        ModelName::FreeAtoms => {
            build_free_atom_generators(positive("p", p.unwrap_or(catalog::REFERENCE_P))?)?
        }
        ModelName::Pauli => {
            let axes = parse_axes(axes.unwrap_or("x,y,z"))?;
            fixed_p(axes.len())?;
            build_pauli_generators(&axes)?
        }
        ModelName::Pauli1 => {
            fixed_p(1)?;
            build_pauli_generators(&[PauliAxis::Z])?
        }
        ModelName::Pauli2 => {
            fixed_p(2)?;
            build_pauli_generators(&[PauliAxis::X, PauliAxis::Y])?
        }
        ModelName::Pauli3 => {
            fixed_p(3)?;
            build_pauli_generators(&[PauliAxis::X, PauliAxis::Y, PauliAxis::Z])?
        }
        ModelName::Interferometer => bail!("the interferometer model has cited constants only"),
    };
    Ok(gens)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QfiOutput {
    pub model: String,
    pub state: StateName,
    pub p: usize,
    pub n: usize,
    #[serde(rename = "F")]
    pub f: Vec<Vec<f64>>,
    pub trace_inverse: Num,
    pub saturable: bool,
    pub imag_max: f64,
}

pub fn qfi(args: &QfiArgs) -> Result<QfiOutput> {
    let model = args.model.context("--model is required")?;
    let alpha = args.alpha.unwrap_or(DEFAULT_ALPHA);
    let beta = args.beta.unwrap_or(DEFAULT_BETA);
    let n = positive("n", args.n.unwrap_or(1))?;
    let gens = generators(model, args.p, alpha, beta, args.axes.as_deref())?;
    let p = gens.p();
    let state = args.state.unwrap_or(match model {
        ModelName::FixedAtoms => StateName::Noon,
        ModelName::FreeAtoms => StateName::SuperposedNoon,
        _ => StateName::Uniform,
    });
    let psi = match (state, model) {
        (StateName::Uniform, _) => PureState::uniform(gens.dim())?,
        (StateName::Basis, _) => PureState::basis(gens.dim(), 0)?,
        // (|0⟩+|1⟩)/√2 on every site is the uniform state of the 2^p basis
        (StateName::Noon, ModelName::FixedAtoms | ModelName::Pauli1) => {
            PureState::uniform(gens.dim())?
        }
        (StateName::SuperposedNoon, ModelName::FreeAtoms) => superposed_noon_state(p, n)?,
        (s, m) => bail!("state {s:?} is not defined for model {}", model_label(m)),
    };
    let theta0 = vec![0.0; p];
    let f = qfi_pure(&gens, &theta0, &psi, n)?;
    let report = saturability(&gens.scaled(n as f64), &theta0, &psi)?;
    Ok(QfiOutput {
        model: model_label(model).into(),
        state,
        p,
        n,
        f: (0..p)
            .map(|i| (0..p).map(|j| f.get(i, j)).collect())
            .collect(),
        trace_inverse: Num(trace_inverse(&f)),
        saturable: report.saturable,
        imag_max: report.max_abs(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub model: String,
    pub paradigm: Paradigm,
    pub strategy: Strategy,
    pub variant: Variant,
    pub p: usize,
    /// Coefficient of `1/(k n²)` (CR) or `1/N²` (MM).
    pub constant: f64,
    /// Power of `p` in the closed form, when known.
    pub p_exponent: Option<i32>,
    /// Power of the gate count: `n` for CR, `N` for MM.
    pub gate_exponent: i32,
    /// Power of the trial count `k` (CR only).
    pub trial_exponent: Option<i32>,
    pub status: BoundStatus,
    pub source: Source,
    pub provenance: String,
    /// `constant` times the budget scaling, when a budget is given.
    pub cost: Option<f64>,
}

fn bound_row(
    model: &str,
    p: usize,
    variant: Variant,
    source: Source,
    e: CostEstimate,
    budget: Option<&ResourceBudget>,
) -> Result<BoundRow> {
    let cost = budget.map(|b| e.cost(b)).transpose()?;
    Ok(BoundRow {
        model: model.into(),
        paradigm: e.paradigm,
        strategy: e.strategy,
        variant,
        p,
        constant: e.constant,
        p_exponent: e.p_exponent,
        gate_exponent: -2,
        trial_exponent: (e.paradigm == Paradigm::Cr).then_some(-1),
        status: e.status,
        source,
        provenance: e.provenance,
        cost,
    })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

pub fn bounds(args: &BoundsArgs, seed: Option<u64>) -> Result<Vec<BoundRow>> {
    let model = args.model.context("--model is required")?;
    let paradigm = match args.paradigm.unwrap_or(ParadigmName::Cr) {
        ParadigmName::Cr => Paradigm::Cr,
        ParadigmName::Mm => Paradigm::Mm,
    };
    let budget = match paradigm {
        Paradigm::Cr => match (args.n, args.k) {
            (Some(n), k) => Some(ResourceBudget::cr(n, k.unwrap_or(1))?),
            (None, Some(_)) => bail!("--k requires --n"),
            (None, None) => None,
        },
        Paradigm::Mm => {
            ensure!(
                args.n.is_none() && args.k.is_none(),
                "the MM paradigm takes --N, not --n/--k"
            );
            args.total.map(ResourceBudget::mm).transpose()?
        }
    };
    if paradigm == Paradigm::Cr {
        ensure!(
            args.total.is_none(),
            "the CR paradigm takes --n and --k, not --N"
        );
    }
    let opts = SearchOptions {
        seed: seed.unwrap_or(SearchOptions::default().seed),
        ..SearchOptions::default()
    };
    let catalog_name = match model {
        ModelName::CoupledPair | ModelName::Pauli => None,
        other => Some(model_label(other)),
    };
    if let Some(name) = catalog_name {
        let record =
            catalog::model(name).with_context(|| format!("no catalog entry for {name}"))?;
        let p = match (record.fixed_p, args.p) {
            (Some(f), Some(p)) if f != p => bail!("model {name} has p = {f}, got --p {p}"),
            (Some(f), _) => f,
            (None, p) => positive("p", p.unwrap_or(catalog::REFERENCE_P))?,
        };
        let n = match budget {
            Some(ResourceBudget::Cr { n, .. }) => Some(n),
            _ => None,
        };
        return [Strategy::Sep, Strategy::SepPlus, Strategy::Jnt]
            .iter()
            .flat_map(|&s| record.entries_for(paradigm, s))
            .map(|e| {
                bound_row(
                    name,
                    p,
                    e.variant,
                    e.source(),
                    entry_estimate(e, p, n)?,
                    budget.as_ref(),
                )
            })
            .collect();
    }

    let alpha = args.alpha.unwrap_or(DEFAULT_ALPHA);
    let beta = args.beta.unwrap_or(DEFAULT_BETA);
    let gens = generators(model, args.p, alpha, beta, args.axes.as_deref())?;
    let name = model_label(model);
    let p = gens.p();
    let unit = match paradigm {
        Paradigm::Cr => ResourceBudget::cr(1, 1)?,
        Paradigm::Mm => ResourceBudget::mm(1)?,
    };
    let row = |variant, e| bound_row(name, p, variant, Source::Computed, e, budget.as_ref());

    let sep = sep_estimate(&gens, &unit)?;
    let oracle = NuisanceOracle {
        gens: &gens,
        paradigm,
    };
    let mut plus = sep_plus_optimize_with(&gens, &unit, &oracle, &opts)?;
    // meeting a proven lower bound makes the searched value the optimum
    let attainable = paradigm == Paradigm::Cr || gens.is_commuting();
    if attainable && plus.estimate.constant <= plus.floor * (1.0 + 1e-9) {
        plus.estimate.status = BoundStatus::ExactAsymptotic;
    }
    let jnt = jnt_lower_bound_with(&gens, &unit, &opts)?;
    let mut rows = vec![
        row(Variant::Standard, sep)?,
        row(Variant::Standard, plus.estimate)?,
    ];
    if model == ModelName::CoupledPair && paradigm == Paradigm::Cr {
        let f = qfi_pure(&gens, &[0.0, 0.0], &PureState::uniform(4)?, 1)?;
        let achieved = trace_inverse(&f);
        let exact = coupled_pair_joint_constant(alpha, beta);
        if close(achieved, jnt.constant) {
            rows.push(row(
                Variant::Standard,
                CostEstimate {
                    constant: exact,
                    status: BoundStatus::ExactAsymptotic,
                    provenance: "tr F⁻¹ of the uniform probe meets the orthogonal lower bound"
                        .into(),
                    ..jnt
                },
            )?);
        } else {
            rows.push(row(Variant::Lower, jnt.clone())?);
            rows.push(row(
                Variant::Upper,
                CostEstimate {
                    constant: achieved,
                    status: BoundStatus::UpperBound,
                    provenance: "tr F⁻¹ of the uniform probe".into(),
                    ..jnt
                },
            )?);
        }
    } else {
        rows.push(row(Variant::Lower, jnt)?);
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexOutput {
    pub p: usize,
    pub grid_points_per_axis: usize,
    pub h: f64,
    pub energy: f64,
    /// `energy/p³`, comparable with the Airy and ball constants.
    pub normalized_energy: f64,
    pub iterations: usize,
    pub inner_iterations: usize,
    pub residual: f64,
    pub relative_residual: f64,
    pub interior_nodes: usize,
    pub fine_grid_points_per_axis: Option<usize>,
    pub fine_energy: Option<f64>,
    pub fine_relative_residual: Option<f64>,
    pub extrapolated_energy: Option<f64>,
}

pub fn simplex(args: &SimplexArgs) -> Result<SimplexOutput> {
    let p = positive("p", args.p.unwrap_or(2))?;
    let grid = match args.grid {
        Some(g) => positive("grid", g)?,
        None => default_grid(p).with_context(|| format!("no default grid for p = {p}"))?,
    };
    let (coarse, fine, extrapolated) = if args.richardson {
        let r = richardson_ground_energy(p, grid)?;
        (r.coarse, Some(r.fine), Some(r.extrapolated))
    } else {
        (simplex_ground_energy(p, grid)?, None, None)
    };
    let p3 = (p as f64).powi(3);
    Ok(SimplexOutput {
        p,
        grid_points_per_axis: coarse.grid_points_per_axis,
        h: coarse.h,
        energy: coarse.energy,
        normalized_energy: extrapolated.unwrap_or(coarse.energy) / p3,
        iterations: coarse.iterations,
        inner_iterations: coarse.inner_iterations,
        residual: coarse.residual,
        relative_residual: coarse.residual / coarse.energy,
        interior_nodes: coarse.interior_nodes,
        fine_grid_points_per_axis: fine.as_ref().map(|f| f.grid_points_per_axis),
        fine_energy: fine.as_ref().map(|f| f.energy),
        fine_relative_residual: fine.as_ref().map(|f| f.residual / f.energy),
        extrapolated_energy: extrapolated,
    })
}

pub fn airy(args: &AiryArgs) -> Result<hl_metrology::variational::AiryBoundResult> {
    Ok(airy_lower_bound_with_cutoff(
        args.cutoff.unwrap_or(AIRY_CUTOFF),
    )?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallOutput {
    pub p: usize,
    pub bessel_order: f64,
    pub bessel_first_zero: f64,
    /// Dirichlet ground energy of the inscribed ball.
    pub energy: f64,
    pub normalized_energy: f64,
}

pub fn ball(args: &BallArgs) -> Result<BallOutput> {
    let p = positive("p", args.p.unwrap_or(3))?;
    let nu = p as f64 / 2.0 - 1.0;
    let energy = ball_upper_bound(p)?;
    Ok(BallOutput {
        p,
        bessel_order: nu,
        bessel_first_zero: special::bessel_first_zero(nu)?,
        energy,
        normalized_energy: energy / (p as f64).powi(3),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseOutput {
    pub family: Family,
    pub budget: usize,
    /// Exact expected cost `E[4 sin²(u/2)]`.
    pub analytic: f64,
    /// `budget²·analytic/π²`.
    pub normalized: f64,
    pub mc_mean: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub mc_samples: Option<usize>,
    pub seed: Option<u64>,
    pub resolution: Option<usize>,
    /// `|mc_mean − analytic|/mc_stderr`.
    pub deviation_in_stderr: Option<f64>,
}

pub fn phase(args: &PhaseArgs, seed: Option<u64>) -> Result<PhaseOutput> {
    let family = args.family.unwrap_or(Family::Sin);
    let budget = positive("N", args.budget.unwrap_or(DEFAULT_PHASE_BUDGET))?;
    let coeffs = match family {
        Family::Sin => sin_coefficients(budget)?,
        Family::Noon => noon_coefficients(budget)?,
    };
    let analytic = phase_cost_analytic(&coeffs);
    let mut out = PhaseOutput {
        family,
        budget,
        analytic,
        normalized: (budget as f64).powi(2) * analytic / (PI * PI),
        mc_mean: None,
        mc_stderr: None,
        mc_samples: None,
        seed: None,
        resolution: None,
        deviation_in_stderr: None,
    };
    if let Some(samples) = args.mc_samples {
        let resolution = positive(
            "resolution",
            args.resolution.unwrap_or(DEFAULT_PDF_RESOLUTION),
        )?;
        let seed = seed.unwrap_or(0);
        let model = PhaseMeasurementModel::with_resolution(coeffs, resolution)?;
        let mc = phase_cost_monte_carlo(&model, samples, seed)?;
        out.mc_mean = Some(mc.mean);
        out.mc_stderr = Some(mc.stderr);
        out.mc_samples = Some(mc.samples);
        out.seed = Some(seed);
        out.resolution = Some(resolution);
        out.deviation_in_stderr = Some((mc.mean - analytic).abs() / mc.stderr);
    } else {
        ensure!(
            args.resolution.is_none(),
            "--resolution only applies with --mc-samples"
        );
    }
    Ok(out)
}

pub fn table() -> Result<Vec<TableRow>> {
    Ok(table_rows(&table_one())?)
}

pub fn figure_ball(args: &FigureBallArgs) -> Result<Vec<BallRow>> {
    Ok(figure_ball_data(
        args.p_max.unwrap_or(DEFAULT_FIGURE_P_MAX),
    )?)
}

pub fn figure_ratio(args: &FigureRatioArgs) -> Result<Vec<RatioRow>> {
    let alpha = positive_f64("alpha", args.alpha.unwrap_or(DEFAULT_ALPHA))?;
    let steps = positive("beta-steps", args.beta_steps.unwrap_or(DEFAULT_BETA_STEPS))?;
    Ok(figure_ratio_data(alpha, &ratio_beta_grid(alpha, steps))?)
}
