//! Deterministic Nelder-Mead simplex minimizer with standard coefficients.
//! No randomness, stable tie-breaking; identical inputs give bitwise
//! identical trajectories.

/// Coefficients and stopping rules. Reflection 1, expansion 2, contraction
/// 0.5, shrink 0.5.
#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iters: 2000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MinimizeResult {
    pub x: Vec<f64>,
    pub fval: f64,
    pub iterations: usize,
    pub converged: bool,
}

const ALPHA: f64 = 1.0; // reflection
const GAMMA: f64 = 2.0; // expansion
const RHO: f64 = 0.5; // contraction
const SIGMA: f64 = 0.5; // shrink

/// Minimizes `f` from `x0` with per-coordinate initial steps. The objective
/// may return infinity to reject a point (bounds, invalid parameters).
pub fn minimize(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    steps: &[f64],
    opts: &NelderMeadOptions,
) -> MinimizeResult {
    assert_eq!(x0.len(), steps.len(), "steps must match dimensionality");
    let dim = x0.len();
    assert!(dim > 0, "objective must have at least one coordinate");

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += steps[i];
        let fv = f(&v);
        simplex.push((v, fv));
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iters {
        // stable sort keeps insertion order on ties, so the walk is deterministic
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = &simplex[0];
        let worst = &simplex[dim];
        let spread_f = worst.1 - best.1;
        let spread_x = simplex
            .iter()
            .map(|(v, _)| {
                v.iter()
                    .zip(&best.0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        let x_scale = best.0.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        if spread_f.is_finite()
            && spread_f <= opts.tol * (1.0 + best.1.abs())
            && spread_x <= opts.tol * (1.0 + x_scale)
        {
            converged = true;
            break;
        }
        iterations += 1;

        // centroid of all but the worst vertex
        let mut centroid = vec![0.0; dim];
        for (v, _) in simplex.iter().take(dim) {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x;
            }
        }
        for c in &mut centroid {
            *c /= dim as f64;
        }

        let at = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[dim].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = at(ALPHA);
        let f_reflected = f(&reflected);
        if f_reflected < simplex[0].1 {
            let expanded = at(GAMMA);
            let f_expanded = f(&expanded);
            simplex[dim] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
            continue;
        }
        if f_reflected < simplex[dim - 1].1 {
            simplex[dim] = (reflected, f_reflected);
            continue;
        }
        // contraction: outside when the reflected point improves the worst,
        // inside otherwise
        let contracted = if f_reflected < simplex[dim].1 {
            at(RHO)
        } else {
            at(-RHO)
        };
        let f_contracted = f(&contracted);
        if f_contracted < simplex[dim].1.min(f_reflected) {
            simplex[dim] = (contracted, f_contracted);
            continue;
        }
        // shrink toward the best vertex
        let best_x = simplex[0].0.clone();
        for (v, fv) in simplex.iter_mut().skip(1) {
            for (x, b) in v.iter_mut().zip(&best_x) {
                *x = b + SIGMA * (*x - b);
            }
            *fv = f(v);
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, fval) = simplex.swap_remove(0);
    MinimizeResult {
        x,
        fval,
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl_converges_to_center() {
        let mut f = |x: &[f64]| (x[0] - 3.0).powi(2) + 2.0 * (x[1] + 1.0).powi(2);
        let r = minimize(
            &mut f,
            &[0.0, 0.0],
            &[0.5, 0.5],
            &NelderMeadOptions::default(),
        );
        assert!(r.converged);
        assert!((r.x[0] - 3.0).abs() < 1e-6);
        assert!((r.x[1] + 1.0).abs() < 1e-6);
        assert!(r.fval < 1e-10);
    }

    #[test]
    fn rosenbrock_converges() {
        let mut f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = minimize(
            &mut f,
            &[-1.2, 1.0],
            &[0.3, 0.3],
            &NelderMeadOptions {
                tol: 1e-12,
                max_iters: 5000,
            },
        );
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-4);
        assert!((r.x[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn repeat_runs_are_bitwise_identical() {
        let run = || {
            let mut f = |x: &[f64]| (x[0].sin() + x[1].cos()).powi(2) + 0.1 * x[0].powi(2);
            minimize(
                &mut f,
                &[1.0, -2.0],
                &[0.4, 0.4],
                &NelderMeadOptions::default(),
            )
        };
        let a = run();
        let b = run();
        assert_eq!(a.x, b.x);
        assert_eq!(a.fval, b.fval);
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn infinite_objective_regions_are_avoided() {
        // the valley floor lies outside the allowed box; the minimizer must
        // settle on the boundary-side minimum of the allowed region
        let mut f = |x: &[f64]| {
            if x[0] < 1.0 {
                f64::INFINITY
            } else {
                (x[0] - 0.5).powi(2)
            }
        };
        let r = minimize(&mut f, &[2.0], &[0.3], &NelderMeadOptions::default());
        assert!(r.x[0] >= 1.0);
        assert!((r.x[0] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn one_dimensional_problem_works() {
        let mut f = |x: &[f64]| (x[0] - 0.25).powi(2);
        let r = minimize(&mut f, &[5.0], &[1.0], &NelderMeadOptions::default());
        assert!(r.converged);
        assert!((r.x[0] - 0.25).abs() < 1e-7);
    }

    #[test]
    fn hitting_iteration_cap_reports_unconverged() {
        let mut f = |x: &[f64]| x[0].powi(2);
        let r = minimize(
            &mut f,
            &[100.0],
            &[1.0],
            &NelderMeadOptions {
                tol: 1e-15,
                max_iters: 3,
            },
        );
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
    }
}
