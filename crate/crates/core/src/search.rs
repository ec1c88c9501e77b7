//! Derivative-free local search used by the parameter-space maximizations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub(crate) struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
}

/// Nelder–Mead simplex search with dimension-adaptive coefficients.
#[derive(Debug, Clone, Copy)]
pub(crate) struct NelderMead {
    pub max_evals: usize,
    pub f_tol: f64,
    pub x_tol: f64,
    pub initial_step: f64,
    /// Number of fresh-simplex restarts from the incumbent.
    pub restarts: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            max_evals: 20_000,
            f_tol: 1e-14,
            x_tol: 1e-12,
            initial_step: 0.25,
            restarts: 3,
        }
    }
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

impl NelderMead {
    pub fn minimize<F>(&self, mut f: F, x0: &[f64]) -> Minimum
    where
        F: FnMut(&[f64]) -> f64,
    {
        let mut best = self.single_run(&mut f, x0, self.initial_step);
        let mut step = self.initial_step;
        for _ in 0..self.restarts {
            step *= 0.5;
            let next = self.single_run(&mut f, &best.x, step.max(1e-6));
            let improved = next.value < best.value - self.f_tol * (1.0 + best.value.abs());
            if next.value < best.value {
                best = next;
            }
            if !improved {
                break;
            }
        }
        best
    }

    fn single_run<F>(&self, f: &mut F, x0: &[f64], step: f64) -> Minimum
    where
        F: FnMut(&[f64]) -> f64,
    {
        let n = x0.len();
        if n == 0 {
            return Minimum {
                x: Vec::new(),
                value: sanitize(f(x0)),
            };
        }
        let nf = n as f64;
        let (alpha, gamma) = (1.0, 1.0 + 2.0 / nf);
        let rho = 0.75 - 1.0 / (2.0 * nf);
        let sigma = 1.0 - 1.0 / nf;

        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        simplex.push(x0.to_vec());
        for i in 0..n {
            let mut v = x0.to_vec();
            v[i] += if v[i].abs() > 1e-8 {
                step * v[i].abs().max(1.0)
            } else {
                step
            };
            simplex.push(v);
        }
        let mut values: Vec<f64> = simplex.iter().map(|v| sanitize(f(v))).collect();
        let mut evals = n + 1;

        let mut order: Vec<usize> = (0..=n).collect();
        loop {
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            let best = order[0];
            let worst = order[n];
            let second_worst = order[n - 1];

            let f_spread = (values[worst] - values[best]).abs();
            let x_spread = simplex
                .iter()
                .map(|v| {
                    v.iter()
                        .zip(&simplex[best])
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if evals >= self.max_evals
                || (f_spread <= self.f_tol * (1.0 + values[best].abs())
                    && x_spread <= self.x_tol.max(1e-3 * step))
                || x_spread <= self.x_tol
            {
                return Minimum {
                    x: simplex[best].clone(),
                    value: values[best],
                };
            }

            let mut centroid = vec![0.0; n];
            for &i in &order[..n] {
                for (c, x) in centroid.iter_mut().zip(&simplex[i]) {
                    *c += x / nf;
                }
            }
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[worst])
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let reflected = along(alpha);
            let fr = sanitize(f(&reflected));
            evals += 1;
            if fr < values[best] {
                let expanded = along(gamma);
                let fe = sanitize(f(&expanded));
                evals += 1;
                if fe < fr {
                    simplex[worst] = expanded;
                    values[worst] = fe;
                } else {
                    simplex[worst] = reflected;
                    values[worst] = fr;
                }
                continue;
            }
            if fr < values[second_worst] {
                simplex[worst] = reflected;
                values[worst] = fr;
                continue;
            }
            let (contracted, fc) = if fr < values[worst] {
                let c = along(alpha * rho);
                let fc = sanitize(f(&c));
                (c, fc)
            } else {
                let c = along(-rho);
                let fc = sanitize(f(&c));
                (c, fc)
            };
            evals += 1;
            if fc < values[worst].min(fr) {
                simplex[worst] = contracted;
                values[worst] = fc;
                continue;
            }
            let anchor = simplex[best].clone();
            for &i in &order[1..] {
                for (x, a) in simplex[i].iter_mut().zip(&anchor) {
                    *x = a + sigma * (*x - a);
                }
                values[i] = sanitize(f(&simplex[i]));
                evals += 1;
            }
        }
    }
}

/// Runs `run` from every start (in parallel) and keeps the lowest value,
/// breaking ties by the earliest start so the result is independent of
/// scheduling.
pub(crate) fn best_of<F>(starts: &[Vec<f64>], run: F) -> Option<(usize, Minimum)>
where
    F: Fn(&[f64]) -> Minimum + Sync,
{
    let results: Vec<Minimum> = starts.par_iter().map(|s| run(s)).collect();
    results
        .into_iter()
        .enumerate()
        .filter(|(_, m)| m.value.is_finite())
        .fold(None, |acc: Option<(usize, Minimum)>, (i, m)| match acc {
            Some((j, b)) if b.value <= m.value => Some((j, b)),
            _ => Some((i, m)),
        })
}

/// Deterministic pseudo-random start points with entries uniform in `[-scale, scale]`.
pub(crate) fn random_starts(dim: usize, count: usize, scale: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..dim).map(|_| rng.random_range(-scale..=scale)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let nm = NelderMead::default();
        let m = nm.minimize(
            |x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2),
            &[0.0, 0.0],
        );
        assert!((m.x[0] - 1.0).abs() < 1e-6);
        assert!((m.x[1] + 2.0).abs() < 1e-6);
        assert!(m.value < 1e-12);
    }

    #[test]
    fn handles_piecewise_linear_convex() {
        let nm = NelderMead::default();
        let m = nm.minimize(
            |x| (x[0] - 0.3).abs().max((2.0 * x[0] + 1.0).abs() - 1.0),
            &[5.0],
        );
        // max(|x-0.3|, |2x+1|-1) is minimized where the branches cross
        let expected = (0.3f64 - 0.1).abs();
        assert!((m.value - expected).abs() < 1e-9, "{}", m.value);
    }

    #[test]
    fn rosenbrock() {
        let nm = NelderMead {
            max_evals: 50_000,
            ..Default::default()
        };
        let m = nm.minimize(
            |x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2),
            &[-1.2, 1.0],
        );
        assert!(m.value < 1e-10);
    }

    #[test]
    fn best_of_prefers_earliest_on_ties() {
        let starts = vec![vec![1.0], vec![2.0], vec![1.0]];
        let (i, m) = best_of(&starts, |s| Minimum {
            x: s.to_vec(),
            value: s[0],
        })
        .unwrap();
        assert_eq!(i, 0);
        assert_eq!(m.value, 1.0);
    }

    #[test]
    fn random_starts_are_reproducible() {
        assert_eq!(random_starts(3, 4, 1.0, 9), random_starts(3, 4, 1.0, 9));
        assert_ne!(random_starts(3, 4, 1.0, 9), random_starts(3, 4, 1.0, 10));
    }
}
