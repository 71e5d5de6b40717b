//! Unconstrained Nelder–Mead simplex search.

use crate::error::{Error, Result};

const REFLECTION: f64 = 1.0;
const EXPANSION: f64 = 2.0;
const CONTRACTION: f64 = 0.5;
const SHRINK: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub max_iters: usize,
    /// Stop once `f(worst) − f(best)` falls below this.
    pub tol: f64,
    /// Edge length of the initial right-angled simplex.
    pub initial_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            tol: 1e-9,
            initial_step: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub argmin: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

struct Tracker<F> {
    objective: F,
    evaluations: usize,
    best: (Vec<f64>, f64),
}

impl<F: FnMut(&[f64]) -> f64> Tracker<F> {
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        let v = (self.objective)(x);
        self.evaluations += 1;
        if !v.is_finite() {
            return Err(Error::Search {
                best_point: self.best.0.clone(),
                best_value: self.best.1,
            });
        }
        if v < self.best.1 {
            self.best = (x.to_vec(), v);
        }
        Ok(v)
    }
}

/// Minimizes `objective` from `init` with reflection 1, expansion 2, contraction 1/2
/// and shrink 1/2.
pub fn nelder_mead<F>(objective: F, init: &[f64], options: &SimplexOptions) -> Result<SimplexResult>
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = init.len();
    assert!(dim >= 1, "Nelder-Mead needs at least one variable");
    let mut t = Tracker {
        objective,
        evaluations: 0,
        best: (init.to_vec(), f64::INFINITY),
    };

    let mut points: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    let mut values: Vec<f64> = Vec::with_capacity(dim + 1);
    points.push(init.to_vec());
    values.push(t.eval(init)?);
    for i in 0..dim {
        let mut p = init.to_vec();
        p[i] += options.initial_step;
        values.push(t.eval(&p)?);
        points.push(p);
    }

    let mut order: Vec<usize> = (0..=dim).collect();
    let mut centroid = vec![0.0; dim];
    let mut trial = vec![0.0; dim];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < options.max_iters {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let (best, worst, second) = (order[0], order[dim], order[dim - 1]);
        if values[worst] - values[best] < options.tol {
            converged = true;
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &i in &order[..dim] {
            centroid
                .iter_mut()
                .zip(&points[i])
                .for_each(|(c, x)| *c += x);
        }
        centroid.iter_mut().for_each(|c| *c /= dim as f64);

        let along = |coef: f64, from: &[f64], out: &mut Vec<f64>| {
            out.clear();
            out.extend(centroid.iter().zip(from).map(|(c, x)| c + coef * (c - x)));
        };

        along(REFLECTION, &points[worst], &mut trial);
        let reflected = trial.clone();
        let f_reflected = t.eval(&reflected)?;

        if f_reflected < values[best] {
            along(REFLECTION * EXPANSION, &points[worst], &mut trial);
            let f_expanded = t.eval(&trial)?;
            if f_expanded < f_reflected {
                points[worst].copy_from_slice(&trial);
                values[worst] = f_expanded;
            } else {
                points[worst] = reflected;
                values[worst] = f_reflected;
            }
            continue;
        }
        if f_reflected < values[second] {
            points[worst] = reflected;
            values[worst] = f_reflected;
            continue;
        }

        let accepted = if f_reflected < values[worst] {
            // outside contraction
            along(REFLECTION * CONTRACTION, &points[worst], &mut trial);
            let f = t.eval(&trial)?;
            (f <= f_reflected).then_some(f)
        } else {
            along(-CONTRACTION, &points[worst], &mut trial);
            let f = t.eval(&trial)?;
            (f < values[worst]).then_some(f)
        };
        if let Some(f) = accepted {
            points[worst].copy_from_slice(&trial);
            values[worst] = f;
            continue;
        }

        let anchor = points[best].clone();
        for &i in &order[1..] {
            points[i]
                .iter_mut()
                .zip(&anchor)
                .for_each(|(x, b)| *x = b + SHRINK * (*x - b));
            values[i] = t.eval(&points[i])?;
        }
    }

    let best = (0..=dim)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .expect("non-empty simplex");
    Ok(SimplexResult {
        argmin: points[best].clone(),
        value: values[best],
        iterations,
        evaluations: t.evaluations,
        converged,
    })
}

/// Re-seeds a fresh simplex at the incumbent until a full run improves the value by
/// less than `options.tol`, or `rounds` runs have been made.
///
/// `recentre` may map the incumbent to an equivalent point before each re-seed.
pub fn nelder_mead_restarted<F>(
    mut objective: F,
    init: &[f64],
    options: &SimplexOptions,
    rounds: usize,
    recentre: impl Fn(&mut [f64]),
) -> Result<SimplexResult>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut current = nelder_mead(&mut objective, init, options)?;
    if rounds <= 1 {
        return Ok(current);
    }
    for _ in 1..rounds {
        let mut start = current.argmin.clone();
        recentre(&mut start);
        let next = nelder_mead(&mut objective, &start, options)?;
        let improvement = current.value - next.value;
        let iterations = current.iterations + next.iterations;
        let evaluations = current.evaluations + next.evaluations;
        let settled = improvement < options.tol;
        let next_converged = next.converged;
        if next.value <= current.value {
            current = SimplexResult {
                iterations,
                evaluations,
                ..next
            };
        } else {
            current.iterations = iterations;
            current.evaluations = evaluations;
        }
        if settled {
            current.converged = next_converged;
            return Ok(current);
        }
    }
    current.converged = false;
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_quadratic() {
        let r = nelder_mead(
            |x| (x[0] - 3.0).powi(2),
            &[0.0],
            &SimplexOptions {
                tol: 1e-14,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(r.converged);
        assert!((r.argmin[0] - 3.0).abs() < 1e-6);
    }

    #[test]
    fn rosenbrock_with_restarts() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let options = SimplexOptions {
            tol: 1e-16,
            ..Default::default()
        };
        let r = nelder_mead_restarted(rosen, &[-1.2, 1.0], &options, 10, |_| {}).unwrap();
        assert!((r.argmin[0] - 1.0).abs() < 1e-4, "{:?}", r.argmin);
        assert!((r.argmin[1] - 1.0).abs() < 1e-4, "{:?}", r.argmin);
    }

    #[test]
    fn nan_objective_is_a_search_error() {
        let mut calls = 0;
        let r = nelder_mead(
            |x| {
                calls += 1;
                if calls > 5 {
                    f64::NAN
                } else {
                    x[0] * x[0] + x[1] * x[1]
                }
            },
            &[1.0, 1.0],
            &SimplexOptions::default(),
        );
        match r {
            Err(Error::Search { best_value, .. }) => assert!(best_value.is_finite()),
            other => panic!("expected search error, got {other:?}"),
        }
        assert!(matches!(
            nelder_mead(|_| f64::NAN, &[0.0], &SimplexOptions::default()),
            Err(Error::Search { .. })
        ));
    }

    #[test]
    fn hits_iteration_cap_without_converging() {
        let r = nelder_mead(
            |x| x.iter().map(|v| v * v).sum(),
            &[3.0, -2.0, 1.0],
            &SimplexOptions {
                max_iters: 3,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
    }
}
