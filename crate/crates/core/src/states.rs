//! Probe states and their exact unitary evolution.
//!
//! Parallel uses of a channel are represented in reduced bases (excitation
//! number or mode occupation), so `n` copies never require an `n`-fold
//! tensor product.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{check_dim, invalid, Result};
use crate::operators::{combine, GeneratorSet, HermitianOperator};
use crate::Complex;

const NORM_TOL: f64 = 1e-12;

/// A normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex>,
}

fn norm_squared(v: &[Complex]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

impl PureState {
    /// Accepts amplitudes with unit norm to 1e-12.
    pub fn new(amplitudes: Vec<Complex>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(invalid("a state needs at least one amplitude"));
        }
        let n2 = norm_squared(&amplitudes);
        if !n2.is_finite() || (n2 - 1.0).abs() > NORM_TOL {
            return Err(invalid(format!("state norm² is {n2}, expected 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales a non-zero vector to unit norm.
    pub fn normalized(amplitudes: Vec<Complex>) -> Result<Self> {
        let n = norm_squared(&amplitudes).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(invalid("cannot normalize a zero or non-finite vector"));
        }
        Self::new(amplitudes.into_iter().map(|a| a / n).collect())
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::normalized(amplitudes.iter().map(|&x| Complex::new(x, 0.0)).collect())
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(invalid(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut v = vec![Complex::new(0.0, 0.0); dim];
        v[index] = Complex::new(1.0, 0.0);
        Self::new(v)
    }

    /// Equal-weight superposition of all basis states.
    pub fn uniform(dim: usize) -> Result<Self> {
        Self::from_real(&vec![1.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<Complex> {
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn with_global_phase(&self, phase: f64) -> Self {
        let f = Complex::from_polar(1.0, phase);
        Self {
            amplitudes: self.amplitudes.iter().map(|a| a * f).collect(),
        }
    }
}

/// Amplitudes `c_m`, `m = 0…N`, of a single-phase probe in the excitation-number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseStateCoefficients {
    c: Vec<Complex>,
}

impl PhaseStateCoefficients {
    pub fn new(c: Vec<Complex>) -> Result<Self> {
        if c.len() < 2 {
            return Err(invalid("phase-state coefficients need N >= 1"));
        }
        let n2 = norm_squared(&c);
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(invalid(format!("coefficient norm² is {n2}, expected 1")));
        }
        Ok(Self { c })
    }

    pub fn from_real(c: &[f64]) -> Result<Self> {
        let n = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(invalid("cannot normalize a zero or non-finite vector"));
        }
        Self::new(c.iter().map(|&x| Complex::new(x / n, 0.0)).collect())
    }

    /// Excitation budget `N`.
    pub fn budget(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coefficients(&self) -> &[Complex] {
        &self.c
    }

    pub fn to_state(&self) -> PureState {
        PureState {
            amplitudes: self.c.clone(),
        }
    }
}

/// `(|0⟩ + |n⟩)/√2`.
pub fn noon_coefficients(n: usize) -> Result<PhaseStateCoefficients> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let mut c = vec![Complex::new(0.0, 0.0); n + 1];
    c[0] = Complex::new(FRAC_1_SQRT_2, 0.0);
    c[n] = Complex::new(FRAC_1_SQRT_2, 0.0);
    PhaseStateCoefficients::new(c)
}

/// `c_m = √(2/(N+2)) sin((m+1)π/(N+2))`, the minimum-cost probe for a single
/// phase with a budget of `N` excitations.
pub fn sin_coefficients(budget: usize) -> Result<PhaseStateCoefficients> {
    if budget == 0 {
        return Err(invalid("N must be at least 1"));
    }
    let d = (budget + 2) as f64;
    let scale = (2.0 / d).sqrt();
    let c = (0..=budget)
        .map(|m| Complex::new(scale * ((m + 1) as f64 * PI / d).sin(), 0.0))
        .collect();
    PhaseStateCoefficients::new(c)
}

/// The generator `diag(0, 1, …, N)` counting excitations.
pub fn excitation_number_generator(budget: usize) -> Result<GeneratorSet> {
    GeneratorSet::new(vec![HermitianOperator::diagonal(
        (0..=budget).map(|m| m as f64).collect(),
    )?])
}

/// `exp(i θ·Λ)|ψ⟩` via eigendecomposition of `θ·Λ`.
pub fn evolve(gens: &GeneratorSet, theta: &[f64], psi: &PureState) -> Result<PureState> {
    check_dim(gens.p(), theta.len())?;
    check_dim(gens.dim(), psi.dim())?;
    let h = combine(gens, theta)?;
    let amplitudes = if let Some(d) = h.diagonal_entries() {
        d.iter()
            .zip(&psi.amplitudes)
            .map(|(&x, a)| a * Complex::from_polar(1.0, x))
            .collect()
    } else {
        let (values, vectors) = h.eigen();
        let dim = psi.dim();
        // coefficients in the eigenbasis, phased, then mapped back
        let coeffs: Vec<Complex> = (0..dim)
            .map(|k| {
                let overlap: Complex = (0..dim)
                    .map(|s| vectors[(s, k)].conj() * psi.amplitudes[s])
                    .sum();
                overlap * Complex::from_polar(1.0, values[k])
            })
            .collect();
        (0..dim)
            .map(|s| (0..dim).map(|k| vectors[(s, k)] * coeffs[k]).sum())
            .collect()
    };
    Ok(PureState { amplitudes })
}

/// Equal superposition over the `p` free-atom locations of `n`-excitation
/// n00n pairs, at `θ = 0`, in the `2p`-dimensional mode-occupation basis.
/// The excitation number enters through the generator scaling `Λ → nΛ`.
pub fn superposed_noon_state(p: usize, n: usize) -> Result<PureState> {
    if p == 0 || n == 0 {
        return Err(invalid("p and n must be at least 1"));
    }
    PureState::uniform(2 * p)
}
