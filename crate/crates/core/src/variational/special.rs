//! Airy functions and Bessel-function zeros for real arguments.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};

/// `Ai(0)`.
#[allow(clippy::excessive_precision)]
const AI0: f64 = 0.355_028_053_887_817_239;
/// `−Ai′(0)`.
#[allow(clippy::excessive_precision)]
const AIP0: f64 = 0.258_819_403_792_806_798;
/// The Maclaurin series is used on `[−NEGATIVE_SERIES_LIMIT, SERIES_LIMIT]`.
const SERIES_LIMIT: f64 = 5.0;
/// On the oscillatory side the series keeps full accuracy further out than
/// the asymptotic expansion reaches it.
const NEGATIVE_SERIES_LIMIT: f64 = 8.0;

/// `(Ai(x), Ai′(x))`.
pub fn airy(x: f64) -> (f64, f64) {
    if (-NEGATIVE_SERIES_LIMIT..=SERIES_LIMIT).contains(&x) {
        airy_series(x)
    } else if x > 0.0 {
        airy_asymptotic_positive(x)
    } else {
        airy_asymptotic_negative(-x)
    }
}

pub fn airy_ai(x: f64) -> f64 {
    airy(x).0
}

pub fn airy_ai_prime(x: f64) -> f64 {
    airy(x).1
}

fn airy_series(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    // f = Σ tₖ, g = Σ uₖ and their derivatives f′ = Σ aₖ, g′ = Σ bₖ.
    let (mut t, mut u) = (1.0, x);
    let (mut a, mut b) = (x * x / 2.0, 1.0);
    let (mut f, mut g, mut fp, mut gp) = (t, u, a, b);
    for k in 0..200 {
        let kf = k as f64;
        t *= x3 / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        u *= x3 / ((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        a *= x3 / ((3.0 * kf + 3.0) * (3.0 * kf + 5.0));
        b *= x3 / ((3.0 * kf + 1.0) * (3.0 * kf + 3.0));
        f += t;
        g += u;
        fp += a;
        gp += b;
        let scale = f.abs() + g.abs() + fp.abs() + gp.abs();
        if t.abs() + u.abs() + a.abs() + b.abs() <= 1e-18 * scale {
            break;
        }
    }
    (AI0 * f - AIP0 * g, AI0 * fp - AIP0 * gp)
}

/// Coefficients `uₖ` and `vₖ` of the large-argument expansions.
fn asymptotic_coefficients(count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![1.0];
    let mut v = vec![1.0];
    for k in 1..count {
        let kf = k as f64;
        let next = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
        u.push(next);
        v.push(-(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * next);
    }
    (u, v)
}

/// Sums `Σ sign(k) cₖ/ζᵏ` over the selected indices, stopping at the smallest term.
fn truncated_sum(
    coeffs: &[f64],
    zeta: f64,
    indices: impl Iterator<Item = usize>,
    alternate: bool,
) -> f64 {
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    for (j, k) in indices.enumerate() {
        if k >= coeffs.len() {
            break;
        }
        let term = coeffs[k] / zeta.powi(k as i32);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        let sign = if alternate && j % 2 == 1 { -1.0 } else { 1.0 };
        sum += sign * term;
    }
    sum
}

fn airy_asymptotic_positive(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let (u, v) = asymptotic_coefficients(40);
    let su = truncated_sum(&u, zeta, 0..40, true);
    let sv = truncated_sum(&v, zeta, 0..40, true);
    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    let q = x.powf(0.25);
    (e / q * su, -e * q * sv)
}

fn airy_asymptotic_negative(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let (u, v) = asymptotic_coefficients(40);
    let (s, c) = (zeta + PI / 4.0).sin_cos();
    let u_even = truncated_sum(&u, zeta, (0..40).step_by(2), true);
    let u_odd = truncated_sum(&u, zeta, (1..40).step_by(2), true);
    let v_even = truncated_sum(&v, zeta, (0..40).step_by(2), true);
    let v_odd = truncated_sum(&v, zeta, (1..40).step_by(2), true);
    let q = x.powf(0.25);
    let ai = (s * u_even - c * u_odd) / (PI.sqrt() * q);
    let aip = -q / PI.sqrt() * (c * v_even + s * v_odd);
    (ai, aip)
}

/// First zero of `Ai′`, by bisection on `[−1.5, −0.5]`.
pub fn airy_prime_first_zero() -> f64 {
    bisect(airy_ai_prime, -1.5, -0.5)
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `J_ν(x)·Γ(ν+1)/(x/2)^ν = Σₖ (−x²/4)ᵏ/(k!(ν+1)ₖ)`, which shares the
/// positive zeros of `J_ν` and needs no Gamma function. Cancellation limits
/// it to moderate `x`.
pub fn bessel_j_scaled(nu: f64, x: f64) -> Result<f64> {
    if nu <= -1.0 {
        return Err(invalid("order must exceed -1"));
    }
    let q = -x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..2000 {
        let kf = k as f64;
        term *= q / (kf * (nu + kf));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) && kf > (-q).sqrt() {
            return Ok(sum);
        }
        if !term.is_finite() {
            break;
        }
    }
    Err(Error::Numerical(format!(
        "Bessel series did not converge for nu = {nu}, x = {x}"
    )))
}

/// First positive zero `j_{ν,1}` of `J_ν`, `ν > −1`.
///
/// At a zero of `J_ν` the recurrence `J_{ν+k−1} + J_{ν+k+1} = 2(ν+k)/x·J_{ν+k}`
/// makes `(√(ν+k)·J_{ν+k})_{k≥1}` an eigenvector of the tridiagonal matrix with
/// zero diagonal and off-diagonal `1/(2√((ν+k)(ν+k+1)))`, with eigenvalue `1/x`.
/// The largest eigenvalue therefore gives the first zero. The vector decays
/// quickly once `ν+k` passes `x`, so a modest truncation suffices.
pub fn bessel_first_zero(nu: f64) -> Result<f64> {
    if nu <= -1.0 || !nu.is_finite() {
        return Err(invalid("order must be finite and exceed -1"));
    }
    // j_{ν,1} < ν + 2ν^{1/3} + 3 comfortably for every ν > −1
    let upper = nu.max(0.0) + 3.0 + 2.0 * nu.max(1.0).cbrt();
    let mut size = (upper - nu).ceil() as usize + (12.0 * upper.cbrt()).ceil() as usize + 20;
    let mut prev = largest_tridiagonal_eigenvalue(nu, size);
    for _ in 0..20 {
        size += size / 2;
        let next = largest_tridiagonal_eigenvalue(nu, size);
        if (next - prev).abs() <= 4.0 * f64::EPSILON * next {
            return Ok(1.0 / next);
        }
        prev = next;
    }
    Err(Error::Numerical(format!(
        "Bessel zero for order {nu} did not settle"
    )))
}

/// Largest eigenvalue of the `size × size` truncation, by Sturm-count bisection.
fn largest_tridiagonal_eigenvalue(nu: f64, size: usize) -> f64 {
    let off: Vec<f64> = (1..size)
        .map(|k| {
            let k = k as f64;
            0.5 / ((nu + k) * (nu + k + 1.0)).sqrt()
        })
        .collect();
    // number of eigenvalues above λ
    let count_above = |lambda: f64| -> usize {
        let mut d = -lambda;
        let mut count = usize::from(d > 0.0);
        for &b in &off {
            let prev = if d == 0.0 { f64::EPSILON * b } else { d };
            d = -lambda - b * b / prev;
            count += usize::from(d > 0.0);
        }
        count
    };
    // Gershgorin bound, nudged so the first midpoint avoids an exact zero pivot
    let hi = 2.0 * off.iter().cloned().fold(0.0, f64::max) * (1.0 + 1e-3);
    let (mut lo, mut hi) = (0.0, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_above(mid) >= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
