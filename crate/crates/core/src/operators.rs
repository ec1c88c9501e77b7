//! Generator algebra for unitary models `U_θ = exp(i θ·Λ)`.
//!
//! Operators are stored either as a real diagonal (every generator of the
//! spatially distributed field models) or as a dense complex matrix. Dense
//! storage is only needed for non-commuting models such as the Pauli
//! generators of a magnetic field vector.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};
use crate::search::{best_of, random_starts, Minimum, NelderMead};
use crate::Complex;

/// Largest number of qubit factors in a tensor-product construction.
pub const MAX_TENSOR_FACTORS: usize = 12;

const HERMITIAN_TOL: f64 = 1e-12;
const COMMUTING_TOL: f64 = 1e-10;
const INDEPENDENCE_TOL: f64 = 1e-10;
const ORTHOGONAL_TOL: f64 = 1e-10;
const SINGULAR_TOL: f64 = 1e-12;
/// Rotated generators with a smaller spread are rejected as bound candidates.
pub const DEGENERATE_SPREAD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Diagonal(Vec<f64>),
    Dense(DMatrix<Complex>),
}

/// A finite-dimensional Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    repr: Repr,
}

impl HermitianOperator {
    /// Real diagonal operator.
    pub fn diagonal(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(invalid("operator dimension must be at least 1"));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(invalid("operator entries must be finite"));
        }
        Ok(Self {
            repr: Repr::Diagonal(entries),
        })
    }

    /// Dense operator; rejected unless it equals its conjugate transpose to 1e-12.
    pub fn from_dense(matrix: DMatrix<Complex>) -> Result<Self> {
        if matrix.nrows() == 0 || !matrix.is_square() {
            return Err(invalid("operator matrix must be square and non-empty"));
        }
        let n = matrix.nrows();
        for i in 0..n {
            for j in 0..n {
                let a = matrix[(i, j)];
                if !a.re.is_finite() || !a.im.is_finite() {
                    return Err(invalid("operator entries must be finite"));
                }
                if (a - matrix[(j, i)].conj()).norm() > HERMITIAN_TOL {
                    return Err(invalid(format!("matrix is not Hermitian at ({i}, {j})")));
                }
            }
        }
        // Symmetrize away the sub-tolerance asymmetry.
        let sym = (&matrix + matrix.adjoint()).scale(0.5);
        Ok(Self {
            repr: Repr::Dense(sym),
        })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::diagonal(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        match &self.repr {
            Repr::Diagonal(d) => d.len(),
            Repr::Dense(m) => m.nrows(),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self.repr, Repr::Diagonal(_))
    }

    /// Diagonal entries when the operator is stored diagonally.
    pub fn diagonal_entries(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Diagonal(d) => Some(d),
            Repr::Dense(_) => None,
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex> {
        match &self.repr {
            Repr::Diagonal(d) => DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                d.len(),
                d.iter().map(|&x| Complex::new(x, 0.0)),
            )),
            Repr::Dense(m) => m.clone(),
        }
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev = match &self.repr {
            Repr::Diagonal(d) => d.clone(),
            Repr::Dense(m) => m.clone().symmetric_eigenvalues().iter().copied().collect(),
        };
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Eigenvalues with eigenvectors stored as the columns of the returned matrix.
    pub fn eigen(&self) -> (Vec<f64>, DMatrix<Complex>) {
        match &self.repr {
            Repr::Diagonal(d) => (d.clone(), DMatrix::identity(d.len(), d.len())),
            Repr::Dense(m) => {
                let eig = SymmetricEigen::new(m.clone());
                (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
            }
        }
    }

    pub fn apply(&self, v: &[Complex]) -> Result<Vec<Complex>> {
        check_dim(self.dim(), v.len())?;
        Ok(match &self.repr {
            Repr::Diagonal(d) => d.iter().zip(v).map(|(x, a)| a * *x).collect(),
            Repr::Dense(m) => (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
                .collect(),
        })
    }

    /// `⟨v|H|v⟩` (real for Hermitian `H`).
    pub fn expectation(&self, v: &[Complex]) -> Result<f64> {
        let hv = self.apply(v)?;
        Ok(v.iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum())
    }

    pub fn scaled(&self, s: f64) -> Self {
        let repr = match &self.repr {
            Repr::Diagonal(d) => Repr::Diagonal(d.iter().map(|x| x * s).collect()),
            Repr::Dense(m) => Repr::Dense(m.scale(s)),
        };
        Self { repr }
    }

    /// `Σ cᵢ opᵢ`; stays diagonal when every term is diagonal.
    pub fn linear_combination(ops: &[&HermitianOperator], coeffs: &[f64]) -> Result<Self> {
        check_dim(ops.len(), coeffs.len())?;
        let first = ops
            .first()
            .ok_or_else(|| invalid("empty linear combination"))?;
        let dim = first.dim();
        for op in ops {
            check_dim(dim, op.dim())?;
        }
        if ops.iter().all(|o| o.is_diagonal()) {
            let mut acc = vec![0.0; dim];
            for (op, &c) in ops.iter().zip(coeffs) {
                if let Repr::Diagonal(d) = &op.repr {
                    for (a, x) in acc.iter_mut().zip(d) {
                        *a += c * x;
                    }
                }
            }
            return Self::diagonal(acc);
        }
        let mut acc = DMatrix::<Complex>::zeros(dim, dim);
        for (op, &c) in ops.iter().zip(coeffs) {
            match &op.repr {
                Repr::Diagonal(d) => {
                    for (i, x) in d.iter().enumerate() {
                        acc[(i, i)] += Complex::new(c * x, 0.0);
                    }
                }
                Repr::Dense(m) => acc += m.scale(c),
            }
        }
        Ok(Self {
            repr: Repr::Dense(acc),
        })
    }

    /// Max-norm of the commutator `[self, other]`.
    pub fn commutator_norm(&self, other: &HermitianOperator) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        if self.is_diagonal() && other.is_diagonal() {
            return Ok(0.0);
        }
        let a = self.to_dense();
        let b = other.to_dense();
        let c = &a * &b - &b * &a;
        Ok(c.iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    /// Hilbert–Schmidt inner product `tr(self · other)`.
    pub fn hs_inner(&self, other: &HermitianOperator) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        if let (Repr::Diagonal(a), Repr::Diagonal(b)) = (&self.repr, &other.repr) {
            return Ok(a.iter().zip(b).map(|(x, y)| x * y).sum());
        }
        let a = self.to_dense();
        let b = other.to_dense();
        Ok((a.transpose().component_mul(&b)).iter().map(|z| z.re).sum())
    }

    /// `U H U†` for a unitary `U`.
    pub fn conjugated(&self, unitary: &DMatrix<Complex>) -> Result<Self> {
        check_dim(self.dim(), unitary.nrows())?;
        check_dim(self.dim(), unitary.ncols())?;
        let m = unitary * self.to_dense() * unitary.adjoint();
        Self::from_dense((&m + m.adjoint()).scale(0.5))
    }
}

/// Difference between the largest and smallest eigenvalue.
pub fn spread(op: &HermitianOperator) -> f64 {
    match &op.repr {
        Repr::Diagonal(d) => {
            let (lo, hi) = d
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                    (lo.min(x), hi.max(x))
                });
            hi - lo
        }
        Repr::Dense(_) => {
            let ev = op.eigenvalues();
            ev[ev.len() - 1] - ev[0]
        }
    }
}

/// The generator vector `Λ = [Λ₁, …, Λ_p]` of a unitary model.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    generators: Vec<HermitianOperator>,
    commuting: bool,
}

impl GeneratorSet {
    /// Validates equal dimensions and linear independence, and records
    /// whether all pairs commute.
    pub fn new(generators: Vec<HermitianOperator>) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| invalid("a generator set needs at least one generator"))?;
        let dim = first.dim();
        for g in &generators {
            check_dim(dim, g.dim())?;
        }
        let p = generators.len();
        let mut gram = DMatrix::<f64>::zeros(p, p);
        for i in 0..p {
            for j in i..p {
                let v = generators[i].hs_inner(&generators[j])?;
                gram[(i, j)] = v;
                gram[(j, i)] = v;
            }
        }
        let ev = gram.symmetric_eigenvalues();
        let largest = ev.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let smallest = ev.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
        if largest == 0.0 || smallest <= INDEPENDENCE_TOL * largest {
            return Err(invalid("generators are linearly dependent"));
        }
        let mut commuting = true;
        'outer: for i in 0..p {
            for j in i + 1..p {
                if generators[i].commutator_norm(&generators[j])? > COMMUTING_TOL {
                    commuting = false;
                    break 'outer;
                }
            }
        }
        Ok(Self {
            generators,
            commuting,
        })
    }

    pub fn p(&self) -> usize {
        self.generators.len()
    }

    pub fn dim(&self) -> usize {
        self.generators[0].dim()
    }

    pub fn generators(&self) -> &[HermitianOperator] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &HermitianOperator {
        &self.generators[i]
    }

    pub fn is_commuting(&self) -> bool {
        self.commuting
    }

    pub fn is_diagonal(&self) -> bool {
        self.generators.iter().all(HermitianOperator::is_diagonal)
    }

    /// `nΛ`, the generators of `n` parallel uses in a reduced representation.
    pub fn scaled(&self, n: f64) -> Self {
        Self {
            generators: self.generators.iter().map(|g| g.scaled(n)).collect(),
            commuting: self.commuting,
        }
    }

    pub fn spreads(&self) -> Vec<f64> {
        self.generators.iter().map(spread).collect()
    }
}

/// `Σᵢ aᵢ Λᵢ`.
pub fn combine(gens: &GeneratorSet, a: &[f64]) -> Result<HermitianOperator> {
    let ops: Vec<&HermitianOperator> = gens.generators.iter().collect();
    HermitianOperator::linear_combination(&ops, a)
}

/// `λ(Σᵢ aᵢ Λᵢ)`, without building the operator when the set is diagonal.
pub fn combined_spread(gens: &GeneratorSet, a: &[f64]) -> Result<f64> {
    check_dim(gens.p(), a.len())?;
    let diags: Option<Vec<&[f64]>> = gens
        .generators
        .iter()
        .map(HermitianOperator::diagonal_entries)
        .collect();
    match diags {
        Some(d) => {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for s in 0..gens.dim() {
                let v: f64 = d.iter().zip(a).map(|(g, c)| g[s] * c).sum();
                lo = lo.min(v);
                hi = hi.max(v);
            }
            Ok(hi - lo)
        }
        None => combine(gens, a).map(|op| spread(&op)),
    }
}

/// A linear reparametrization `θ = A θ'`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReparamMatrix {
    entries: DMatrix<f64>,
    orthogonal: bool,
}

impl ReparamMatrix {
    /// Accepts a square matrix whose column-normalized determinant exceeds 1e-12.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() == 0 || !entries.is_square() {
            return Err(invalid(
                "reparametrization must be a non-empty square matrix",
            ));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(invalid("reparametrization entries must be finite"));
        }
        if normalized_determinant(&entries).abs() <= SINGULAR_TOL {
            return Err(invalid("reparametrization matrix is singular"));
        }
        let p = entries.nrows();
        let gram = entries.transpose() * &entries;
        let orthogonal = (gram - DMatrix::<f64>::identity(p, p)).amax() <= ORTHOGONAL_TOL;
        Ok(Self {
            entries,
            orthogonal,
        })
    }

    pub fn identity(p: usize) -> Self {
        Self {
            entries: DMatrix::identity(p, p),
            orthogonal: true,
        }
    }

    pub fn p(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn is_orthogonal(&self) -> bool {
        self.orthogonal
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        self.entries.column(i).iter().copied().collect()
    }

    /// `[AᵀA]ᵢᵢ`, the squared norm of column `i`.
    pub fn gram_diagonal(&self, i: usize) -> f64 {
        self.entries.column(i).norm_squared()
    }

    pub fn inverse(&self) -> Result<DMatrix<f64>> {
        self.entries
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Numerical("matrix inversion failed".into()))
    }
}

/// Determinant after scaling every column to unit norm; lies in `[-1, 1]`.
pub(crate) fn normalized_determinant(m: &DMatrix<f64>) -> f64 {
    let mut scaled = m.clone();
    for mut col in scaled.column_iter_mut() {
        let n = col.norm();
        if n == 0.0 {
            return 0.0;
        }
        col /= n;
    }
    scaled.determinant()
}

/// Constructs `Λᵢ = 𝟙^{⊗(i−1)} ⊗ σ_z/2 ⊗ 𝟙^{⊗(p−i)}` on `2^p` dimensions.
pub fn build_fixed_atom_generators(p: usize) -> Result<GeneratorSet> {
    if p == 0 {
        return Err(invalid("p must be at least 1"));
    }
    if p > MAX_TENSOR_FACTORS {
        return Err(Error::ResourceLimit(format!(
            "fixed-atom model with p = {p} exceeds 2^{MAX_TENSOR_FACTORS} dimensions"
        )));
    }
    let dim = 1usize << p;
    let gens = (0..p)
        .map(|i| {
            let bit = p - 1 - i;
            let d = (0..dim)
                .map(|b| if (b >> bit) & 1 == 0 { 0.5 } else { -0.5 })
                .collect();
            HermitianOperator::diagonal(d)
        })
        .collect::<Result<Vec<_>>>()?;
    GeneratorSet::new(gens)
}

/// Constructs `Λᵢ = (|i,+⟩⟨i,+| − |i,−⟩⟨i,−|)/2` on the `2p`-dimensional
/// single-atom space ordered `|1,+⟩, |1,−⟩, |2,+⟩, …`.
pub fn build_free_atom_generators(p: usize) -> Result<GeneratorSet> {
    if p == 0 {
        return Err(invalid("p must be at least 1"));
    }
    let gens = (0..p)
        .map(|i| {
            let mut d = vec![0.0; 2 * p];
            d[2 * i] = 0.5;
            d[2 * i + 1] = -0.5;
            HermitianOperator::diagonal(d)
        })
        .collect::<Result<Vec<_>>>()?;
    GeneratorSet::new(gens)
}

/// The diagonal two-parameter model with
/// `Λ₁ = diag(α, −α, β, −β)/2` and `Λ₂ = diag(β, −β, α, −α)/2`.
pub fn build_coupled_pair_generators(alpha: f64, beta: f64) -> Result<GeneratorSet> {
    if !(alpha.is_finite() && beta.is_finite()) {
        return Err(invalid("alpha and beta must be finite"));
    }
    GeneratorSet::new(vec![
        HermitianOperator::diagonal(vec![alpha / 2.0, -alpha / 2.0, beta / 2.0, -beta / 2.0])?,
        HermitianOperator::diagonal(vec![beta / 2.0, -beta / 2.0, alpha / 2.0, -alpha / 2.0])?,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    fn half_matrix(self) -> DMatrix<Complex> {
        let (o, h) = (Complex::new(0.0, 0.0), 0.5);
        match self {
            PauliAxis::X => {
                DMatrix::from_row_slice(2, 2, &[o, Complex::new(h, 0.0), Complex::new(h, 0.0), o])
            }
            PauliAxis::Y => {
                DMatrix::from_row_slice(2, 2, &[o, Complex::new(0.0, -h), Complex::new(0.0, h), o])
            }
            PauliAxis::Z => {
                DMatrix::from_row_slice(2, 2, &[Complex::new(h, 0.0), o, o, Complex::new(-h, 0.0)])
            }
        }
    }
}

/// `{σ_c/2 : c ∈ components}` on a qubit.
pub fn build_pauli_generators(components: &[PauliAxis]) -> Result<GeneratorSet> {
    if components.is_empty() || components.len() > 3 {
        return Err(invalid(
            "between one and three Pauli components are required",
        ));
    }
    let mut seen = components.to_vec();
    seen.sort();
    seen.dedup();
    if seen.len() != components.len() {
        return Err(invalid("Pauli components must be distinct"));
    }
    let gens = components
        .iter()
        .map(|c| HermitianOperator::from_dense(c.half_matrix()))
        .collect::<Result<Vec<_>>>()?;
    GeneratorSet::new(gens)
}

/// `O = (1/√p) [[1, 1], [1, −1]]^{⊗r}` with `p = 2^r`.
pub fn walsh_hadamard(r: usize) -> Result<ReparamMatrix> {
    if r > MAX_TENSOR_FACTORS {
        return Err(Error::ResourceLimit(format!(
            "Walsh–Hadamard order 2^{r} exceeds the cap"
        )));
    }
    let p = 1usize << r;
    let norm = 1.0 / (p as f64).sqrt();
    let m = DMatrix::from_fn(p, p, |i, j| {
        if (i & j).count_ones() % 2 == 0 {
            norm
        } else {
            -norm
        }
    });
    ReparamMatrix::new(m)
}

/// `log₂ p` when `p` is a power of two within the tensor cap.
pub(crate) fn hadamard_order(p: usize) -> Option<usize> {
    (p.is_power_of_two() && p.trailing_zeros() as usize <= MAX_TENSOR_FACTORS)
        .then(|| p.trailing_zeros() as usize)
}

/// Generator `i` of the output is `Σⱼ Aⱼᵢ Λⱼ`, i.e. `Λ' = AᵀΛ`.
pub fn rotate_generators(gens: &GeneratorSet, a: &ReparamMatrix) -> Result<GeneratorSet> {
    check_dim(gens.p(), a.p())?;
    let rotated = (0..gens.p())
        .map(|i| combine(gens, &a.column(i)))
        .collect::<Result<Vec<_>>>()?;
    GeneratorSet::new(rotated)
}

/// Spreads `λ([AᵀΛ]ᵢ)` of the reparametrized generators.
pub fn rotated_spreads(gens: &GeneratorSet, a: &ReparamMatrix) -> Result<Vec<f64>> {
    check_dim(gens.p(), a.p())?;
    (0..gens.p())
        .map(|i| combined_spread(gens, &a.column(i)))
        .collect()
}

/// Multi-start settings for the parameter-space searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub random_starts: usize,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            random_starts: 8,
            seed: 0x5eed,
        }
    }
}

/// Best unit vector found for `max_{|a|=1} λ(a·Λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereMaximum {
    pub direction: Vec<f64>,
    pub value: f64,
}

pub fn max_spread_over_sphere(gens: &GeneratorSet) -> Result<SphereMaximum> {
    max_spread_over_sphere_with(gens, &SearchOptions::default())
}

/// Maximizes `λ(a·Λ)` over unit vectors. The value is attained at the
/// returned direction, so it never exceeds the true maximum.
pub fn max_spread_over_sphere_with(
    gens: &GeneratorSet,
    opts: &SearchOptions,
) -> Result<SphereMaximum> {
    let p = gens.p();
    let mut starts: Vec<Vec<f64>> = (0..p)
        .map(|i| {
            let mut e = vec![0.0; p];
            e[i] = 1.0;
            e
        })
        .collect();
    starts.push(vec![1.0 / (p as f64).sqrt(); p]);
    starts.extend(random_starts(p, opts.random_starts, 1.0, opts.seed));

    let objective = |x: &[f64]| -> f64 {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return f64::INFINITY;
        }
        let a: Vec<f64> = x.iter().map(|v| v / norm).collect();
        combined_spread(gens, &a)
            .map(|v| -v)
            .unwrap_or(f64::INFINITY)
    };
    let nm = NelderMead {
        initial_step: 0.3,
        ..Default::default()
    };
    let (_, best) = best_of(&starts, |s| {
        if p == 1 {
            return Minimum {
                x: s.to_vec(),
                value: objective(s),
            };
        }
        nm.minimize(objective, s)
    })
    .ok_or_else(|| Error::Numerical("sphere search produced no finite candidate".into()))?;
    let norm = best.x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut direction: Vec<f64> = best.x.iter().map(|v| v / norm).collect();
    // Report the representative with a non-negative leading component.
    if let Some(first) = direction.iter().find(|v| v.abs() > 1e-12) {
        if *first < 0.0 {
            direction.iter_mut().for_each(|v| *v = -*v);
        }
    }
    let value = spread(&combine(gens, &direction)?);
    Ok(SphereMaximum { direction, value })
}

/// Best orthogonal reparametrization found for `max_O Σᵢ 1/λ²([OᵀΛ]ᵢ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalBound {
    pub rotation: ReparamMatrix,
    pub value: f64,
    /// Candidates rejected because some rotated spread fell below [`DEGENERATE_SPREAD`].
    pub discarded_candidates: usize,
}

pub fn optimize_orthogonal_bound(gens: &GeneratorSet) -> Result<OrthogonalBound> {
    optimize_orthogonal_bound_with(gens, &SearchOptions::default())
}

/// `Σᵢ 1/λ²([OᵀΛ]ᵢ)`, or `None` when a rotated spread is degenerate.
pub fn orthogonal_bound_value(gens: &GeneratorSet, o: &ReparamMatrix) -> Result<Option<f64>> {
    let spreads = rotated_spreads(gens, o)?;
    if spreads.iter().any(|&s| s < DEGENERATE_SPREAD) {
        return Ok(None);
    }
    Ok(Some(spreads.iter().map(|s| 1.0 / (s * s)).sum()))
}

/// Maximizes the orthogonal bound over `O = B·exp(S)` with skew-symmetric `S`
/// and structured bases `B` (identity, and Walsh–Hadamard when `p = 2^r`).
pub fn optimize_orthogonal_bound_with(
    gens: &GeneratorSet,
    opts: &SearchOptions,
) -> Result<OrthogonalBound> {
    let p = gens.p();
    if p < 2 {
        return Err(invalid("the orthogonal bound search needs p >= 2"));
    }
    let mut bases = vec![DMatrix::<f64>::identity(p, p)];
    if let Some(r) = hadamard_order(p) {
        bases.push(walsh_hadamard(r)?.entries().clone());
    }
    let m = p * (p - 1) / 2;

    // Each start is tagged with its base index in the first slot.
    let mut starts: Vec<Vec<f64>> = (0..bases.len())
        .map(|b| {
            let mut s = vec![b as f64];
            s.extend(std::iter::repeat_n(0.0, m));
            s
        })
        .collect();
    for r in random_starts(m, opts.random_starts, std::f64::consts::PI, opts.seed) {
        let mut s = vec![0.0];
        s.extend(r);
        starts.push(s);
    }

    let build = |base: usize, skew: &[f64]| -> Option<ReparamMatrix> {
        let mut s = DMatrix::<f64>::zeros(p, p);
        let mut k = 0;
        for i in 0..p {
            for j in i + 1..p {
                s[(i, j)] = skew[k];
                s[(j, i)] = -skew[k];
                k += 1;
            }
        }
        ReparamMatrix::new(&bases[base] * s.exp()).ok()
    };
    let evaluate = |base: usize, skew: &[f64]| -> f64 {
        build(base, skew)
            .and_then(|o| orthogonal_bound_value(gens, &o).ok().flatten())
            .map(|v| -v)
            .unwrap_or(f64::INFINITY)
    };
    // Every rotation yields a valid bound, so a moderate budget suffices;
    // the objective is only piecewise smooth and full convergence is slow.
    let nm = NelderMead {
        initial_step: 0.2,
        max_evals: 500 * m + 1000,
        f_tol: 1e-12,
        restarts: 1,
        ..Default::default()
    };
    let discarded = std::sync::atomic::AtomicUsize::new(0);
    let (_, best) = best_of(&starts, |s| {
        let base = s[0] as usize;
        let start_value = evaluate(base, &s[1..]);
        if !start_value.is_finite() {
            discarded.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        }
        let mut found = nm.minimize(|x| evaluate(base, x), &s[1..]);
        if start_value <= found.value {
            found = Minimum {
                x: s[1..].to_vec(),
                value: start_value,
            };
        }
        let mut x = vec![s[0]];
        x.extend(found.x);
        Minimum {
            x,
            value: found.value,
        }
    })
    .ok_or_else(|| {
        Error::Numerical("every orthogonal candidate had a degenerate rotated generator".into())
    })?;
    let rotation = build(best.x[0] as usize, &best.x[1..])
        .ok_or_else(|| Error::Numerical("lost best rotation".into()))?;
    Ok(OrthogonalBound {
        value: -best.value,
        rotation,
        discarded_candidates: discarded.into_inner(),
    })
}
