//! Quantum Fisher information of pure output states, SLD compatibility
//! diagnostics, and the regularized inverse costs built from them.

use nalgebra::DMatrix;

use crate::error::{check_dim, invalid, Error, Result};
use crate::operators::GeneratorSet;
use crate::states::{evolve, PureState};
use crate::Complex;

const SYMMETRY_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;
/// Central-difference step for derivatives of non-commuting evolutions.
pub const FD_STEP: f64 = 1e-5;
/// Largest `|Im tr(ρ LᵢLⱼ)|` still reported as saturable.
pub const SATURABILITY_TOL: f64 = 1e-9;
const SINGULAR_REL_TOL: f64 = 1e-10;
const NULL_WEIGHT_TOL: f64 = 1e-12;

/// A symmetric positive-semidefinite Fisher information matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QfiMatrix {
    entries: DMatrix<f64>,
}

impl QfiMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() == 0 || !entries.is_square() {
            return Err(invalid("QFI matrix must be square and non-empty"));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(invalid("QFI entries must be finite"));
        }
        let asym = (&entries - entries.transpose()).amax();
        if asym > SYMMETRY_TOL * entries.amax().max(1.0) {
            return Err(invalid(format!(
                "QFI matrix is not symmetric (deviation {asym:e})"
            )));
        }
        let sym = (&entries + entries.transpose()).scale(0.5);
        let ev = sym.clone().symmetric_eigenvalues();
        let max = ev.max();
        if ev.min() < -PSD_TOL * max.max(1.0) {
            return Err(invalid("QFI matrix is not positive semidefinite"));
        }
        Ok(Self { entries: sym })
    }

    pub fn from_row_slice(p: usize, rows: &[f64]) -> Result<Self> {
        check_dim(p * p, rows.len())?;
        Self::new(DMatrix::from_row_slice(p, p, rows))
    }

    pub fn p(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }
}

/// `Im tr(ρ LᵢLⱼ)` for the symmetric logarithmic derivatives of a pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct SaturabilityReport {
    pub imag_parts: DMatrix<f64>,
    pub saturable: bool,
}

impl SaturabilityReport {
    pub fn p(&self) -> usize {
        self.imag_parts.nrows()
    }

    pub fn max_abs(&self) -> f64 {
        self.imag_parts.amax()
    }
}

fn inner(a: &[Complex], b: &[Complex]) -> Complex {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Output state and its parameter derivatives `∂ᵢ|ψ⟩` at `θ₀` for generators `scale·Λ`.
struct Tangent {
    psi: Vec<Complex>,
    derivatives: Vec<Vec<Complex>>,
}

fn tangent(gens: &GeneratorSet, theta0: &[f64], psi_in: &PureState, scale: f64) -> Result<Tangent> {
    check_dim(gens.p(), theta0.len())?;
    check_dim(gens.dim(), psi_in.dim())?;
    let p = gens.p();
    if gens.is_commuting() {
        // ∂ᵢ e^{iθ·Λ}|ψ⟩ = i·scale·Λᵢ e^{iθ·Λ}|ψ⟩ when the generators commute.
        let scaled_theta: Vec<f64> = theta0.iter().map(|t| t * scale).collect();
        let out = evolve(gens, &scaled_theta, psi_in)?;
        let derivatives = (0..p)
            .map(|i| {
                gens.generator(i).apply(out.amplitudes()).map(|v| {
                    v.into_iter()
                        .map(|z| z * Complex::new(0.0, scale))
                        .collect()
                })
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(Tangent {
            psi: out.amplitudes().to_vec(),
            derivatives,
        });
    }
    if theta0.iter().any(|&t| t != 0.0) {
        return Err(Error::Unsupported(
            "non-commuting generators are only evaluated at θ₀ = 0".into(),
        ));
    }
    let scaled = gens.scaled(scale);
    let derivatives = (0..p)
        .map(|i| {
            let mut t = vec![0.0; p];
            t[i] = FD_STEP;
            let plus = evolve(&scaled, &t, psi_in)?;
            t[i] = -FD_STEP;
            let minus = evolve(&scaled, &t, psi_in)?;
            Ok(plus
                .amplitudes()
                .iter()
                .zip(minus.amplitudes())
                .map(|(a, b)| (a - b) / (2.0 * FD_STEP))
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Tangent {
        psi: psi_in.amplitudes().to_vec(),
        derivatives,
    })
}

fn fisher_from_tangent(t: &Tangent) -> DMatrix<f64> {
    let p = t.derivatives.len();
    let overlaps: Vec<Complex> = t.derivatives.iter().map(|d| inner(d, &t.psi)).collect();
    DMatrix::from_fn(p, p, |i, j| {
        let dd = inner(&t.derivatives[i], &t.derivatives[j]);
        4.0 * (dd - overlaps[i] * overlaps[j].conj()).re
    })
}

/// QFI of `n` parallel uses of `exp(iθ·Λ)` applied to `psi_in`, modeled as
/// `Λ → nΛ`. Commuting sets are handled analytically at any `θ₀`;
/// non-commuting sets use central differences and require `θ₀ = 0`.
pub fn qfi_pure(
    gens: &GeneratorSet,
    theta0: &[f64],
    psi_in: &PureState,
    n: usize,
) -> Result<QfiMatrix> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let nf = n as f64;
    let f = if gens.is_commuting() {
        fisher_from_tangent(&tangent(gens, theta0, psi_in, 1.0)?) * (nf * nf)
    } else {
        fisher_from_tangent(&tangent(gens, theta0, psi_in, nf)?)
    };
    QfiMatrix::new(f)
}

/// QFI of the state at a single use, computed through central differences
/// regardless of commutativity. Used to cross-check the analytic path.
pub fn qfi_finite_difference(
    gens: &GeneratorSet,
    theta0: &[f64],
    psi_in: &PureState,
) -> Result<QfiMatrix> {
    check_dim(gens.p(), theta0.len())?;
    check_dim(gens.dim(), psi_in.dim())?;
    let p = gens.p();
    let psi = evolve(gens, theta0, psi_in)?;
    let derivatives = (0..p)
        .map(|i| {
            let mut t = theta0.to_vec();
            t[i] += FD_STEP;
            let plus = evolve(gens, &t, psi_in)?;
            t[i] = theta0[i] - FD_STEP;
            let minus = evolve(gens, &t, psi_in)?;
            Ok(plus
                .amplitudes()
                .iter()
                .zip(minus.amplitudes())
                .map(|(a, b)| (a - b) / (2.0 * FD_STEP))
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    QfiMatrix::new(fisher_from_tangent(&Tangent {
        psi: psi.amplitudes().to_vec(),
        derivatives,
    }))
}

/// Imaginary parts of `tr(ρ LᵢLⱼ)` with `L = 2(|∂ψ⟩⟨ψ| + |ψ⟩⟨∂ψ|)`.
pub fn saturability(
    gens: &GeneratorSet,
    theta0: &[f64],
    psi_in: &PureState,
) -> Result<SaturabilityReport> {
    let t = tangent(gens, theta0, psi_in, 1.0)?;
    // Lᵢ|ψ⟩ = 2(|∂ᵢψ⟩ + |ψ⟩⟨∂ᵢψ|ψ⟩)
    let sld_vectors: Vec<Vec<Complex>> = t
        .derivatives
        .iter()
        .map(|d| {
            let w = inner(d, &t.psi);
            d.iter()
                .zip(&t.psi)
                .map(|(a, s)| 2.0 * (a + s * w))
                .collect()
        })
        .collect();
    let p = sld_vectors.len();
    let imag_parts = DMatrix::from_fn(p, p, |i, j| {
        if i == j {
            0.0
        } else {
            inner(&sld_vectors[i], &sld_vectors[j]).im
        }
    });
    let saturable = imag_parts.amax() <= SATURABILITY_TOL;
    Ok(SaturabilityReport {
        imag_parts,
        saturable,
    })
}

fn singular_tol(eigenvalues: &[f64]) -> f64 {
    let max = eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    SINGULAR_REL_TOL * max.max(1.0)
}

/// `lim_{ε→0⁺} tr((F + ε𝟙)⁻¹)`; `+∞` when `F` is singular.
pub fn trace_inverse(f: &QfiMatrix) -> f64 {
    let ev: Vec<f64> = f
        .entries
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    let tol = singular_tol(&ev);
    if ev.iter().any(|&l| l <= tol) {
        return f64::INFINITY;
    }
    ev.iter().map(|l| 1.0 / l).sum()
}

/// `lim_{ε→0⁺} [(F + ε𝟙)⁻¹]ᵢᵢ`, the variance bound for parameter `i` with
/// all others treated as nuisance parameters.
pub fn nuisance_variance(f: &QfiMatrix, i: usize) -> Result<f64> {
    if i >= f.p() {
        return Err(invalid(format!("index {i} out of range for p = {}", f.p())));
    }
    let eig = f.entries.clone().symmetric_eigen();
    let ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let tol = singular_tol(&ev);
    let mut finite = 0.0;
    let mut null_weight = 0.0;
    for (k, &l) in ev.iter().enumerate() {
        let w = eig.eigenvectors[(i, k)].powi(2);
        if l > tol {
            finite += w / l;
        } else {
            null_weight += w;
        }
    }
    Ok(if null_weight > NULL_WEIGHT_TOL {
        f64::INFINITY
    } else {
        finite
    })
}
