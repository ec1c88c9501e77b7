//! Adaptive Gauss–Kronrod (7/15) integration.

#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639,
    0.949_107_912_342_758_525,
    0.864_864_423_359_769_073,
    0.741_531_185_599_394_440,
    0.586_087_235_467_691_130,
    0.405_845_151_377_397_167,
    0.207_784_955_007_898_468,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_553,
    0.104_790_010_322_250_184,
    0.140_653_259_715_525_919,
    0.169_004_726_639_267_903,
    0.190_350_578_064_785_410,
    0.204_432_940_075_298_892,
    0.209_482_141_084_727_828,
];
// Gauss weights for the odd Kronrod nodes 1, 3, 5, 7.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693,
    0.279_705_391_489_276_668,
    0.381_830_050_505_118_945,
    0.417_959_183_673_469_388,
];

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// `∫_a^b f` to the requested absolute or relative tolerance.
pub(crate) fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    let mut intervals = vec![(a, b, kronrod(&f, a, b))];
    for _ in 0..5000 {
        let total: f64 = intervals.iter().map(|(_, _, (v, _))| v).sum();
        let err: f64 = intervals.iter().map(|(_, _, (_, e))| e).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        let (worst, _) = intervals.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, (_, _, (_, e)))| if *e > acc.1 { (i, *e) } else { acc },
        );
        let (lo, hi, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        intervals.push((lo, mid, kronrod(&f, lo, mid)));
        intervals.push((mid, hi, kronrod(&f, mid, hi)));
    }
    let err: f64 = intervals.iter().map(|(_, _, (_, e))| e).sum();
    Err(Error::Numerical(format!(
        "quadrature did not converge (error estimate {err:e})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomials_and_exponentials() {
        assert_abs_diff_eq!(
            integrate(|x| x * x, 0.0, 3.0, 1e-14, 1e-14).unwrap(),
            9.0,
            epsilon = 1e-12
        );
        let v = integrate(|x| (-x).exp(), 0.0, 40.0, 1e-15, 1e-14).unwrap();
        assert_abs_diff_eq!(v, 1.0 - (-40f64).exp(), epsilon = 1e-13);
        let v = integrate(|x| x.sqrt(), 0.0, 1.0, 1e-13, 1e-13).unwrap();
        assert_abs_diff_eq!(v, 2.0 / 3.0, epsilon = 1e-11);
    }
}
