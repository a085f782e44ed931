//! Downhill simplex (Nelder–Mead) minimization.
//!
//! This follows the classic formulation with reflection, expansion, outside
//! and inside contraction, and shrink. It is deterministic: the result depends
//! only on the objective and the starting simplex.

use std::cmp::Ordering;

/// Coefficients and stopping rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Stop when `f_worst − f_best < tolerance · (1 + |f_best|)`.
    pub tolerance: f64,
    pub max_evaluations: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            tolerance: 1e-6,
            max_evaluations: 5000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Best cost after the initial simplex and after every iteration.
    pub trace: Vec<f64>,
}

/// `x0` plus one vertex per coordinate, offset by `steps[i]`.
pub fn coordinate_simplex(x0: &[f64], steps: &[f64]) -> Vec<Vec<f64>> {
    assert_eq!(x0.len(), steps.len());
    let mut simplex = vec![x0.to_vec()];
    for (i, step) in steps.iter().enumerate() {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    simplex
}

fn lerp(from: &[f64], to: &[f64], k: f64) -> Vec<f64> {
    // from + k (to − from)
    from.iter().zip(to).map(|(a, b)| a + k * (b - a)).collect()
}

fn by_cost(a: &(Vec<f64>, f64), b: &(Vec<f64>, f64)) -> Ordering {
    a.1.total_cmp(&b.1)
}

impl NelderMead {
    /// Minimizes `f` from the given `n + 1` vertices.
    pub fn minimize<F>(&self, mut f: F, simplex: Vec<Vec<f64>>) -> SimplexOutcome
    where
        F: FnMut(&[f64]) -> f64,
    {
        let n = simplex.len() - 1;
        assert!(n >= 1, "simplex needs at least two vertices");
        assert!(simplex.iter().all(|v| v.len() == n), "simplex vertices must have n coordinates");

        let mut evaluations = 0usize;
        let mut eval = |x: &[f64], evaluations: &mut usize| {
            *evaluations += 1;
            let v = f(x);
            if v.is_nan() { f64::INFINITY } else { v }
        };

        let mut verts: Vec<(Vec<f64>, f64)> = simplex
            .into_iter()
            .map(|x| {
                let fx = eval(&x, &mut evaluations);
                (x, fx)
            })
            .collect();
        verts.sort_by(by_cost);

        let mut trace = vec![verts[0].1];
        let mut iterations = 0;
        let mut converged = false;

        loop {
            let best = verts[0].1;
            let worst = verts[n].1;
            if worst - best < self.tolerance * (1.0 + best.abs()) {
                converged = true;
                break;
            }
            if evaluations >= self.max_evaluations {
                break;
            }
            iterations += 1;

            let mut centroid = vec![0.0; n];
            for (x, _) in &verts[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / n as f64;
                }
            }

            let xr = lerp(&centroid, &verts[n].0, -self.reflection);
            let fr = eval(&xr, &mut evaluations);

            if fr < verts[0].1 {
                let xe = lerp(&centroid, &verts[n].0, -self.reflection * self.expansion);
                let fe = eval(&xe, &mut evaluations);
                verts[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < verts[n - 1].1 {
                verts[n] = (xr, fr);
            } else {
                let accepted = if fr < verts[n].1 {
                    let xc = lerp(&centroid, &xr, self.contraction);
                    let fc = eval(&xc, &mut evaluations);
                    (fc <= fr).then_some((xc, fc))
                } else {
                    let xcc = lerp(&centroid, &verts[n].0, self.contraction);
                    let fcc = eval(&xcc, &mut evaluations);
                    (fcc < verts[n].1).then_some((xcc, fcc))
                };
                match accepted {
                    Some(v) => verts[n] = v,
                    None => {
                        let anchor = verts[0].0.clone();
                        for v in verts.iter_mut().skip(1) {
                            let x = lerp(&anchor, &v.0, self.shrink);
                            let fx = eval(&x, &mut evaluations);
                            *v = (x, fx);
                        }
                    }
                }
            }
            // Stable sort keeps the incumbent best first on ties.
            verts.sort_by(by_cost);
            trace.push(verts[0].1);
        }

        let (x, fx) = verts.swap_remove(0);
        SimplexOutcome { x, f: fx, iterations, evaluations, converged, trace }
    }
}
