//! Nelder-Mead simplex minimization with multistart.
//!
//! Uses the dimension-adaptive coefficients of Gao and Han, which behave far
//! better than the textbook values once the dimension passes ~10.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadConfig {
    pub max_iters: usize,
    /// Stop once every vertex lies within this distance of the best vertex.
    pub diameter_tol: f64,
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
    /// Stop as soon as the best value drops to or below this target.
    pub target_value: Option<f64>,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            diameter_tol: 1e-9,
            initial_step: 0.5,
            target_value: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Best value after each iteration (index 0 is the initial simplex).
    pub trace: Vec<f64>,
}

pub fn nelder_mead<F>(mut f: F, x0: &[f64], cfg: &NelderMeadConfig) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    assert!(n >= 1, "need at least one parameter");
    let nf = n as f64;
    let alpha = 1.0;
    let beta = 1.0 + 2.0 / nf;
    let gamma = 0.75 - 1.0 / (2.0 * nf);
    let delta = 1.0 - 1.0 / nf;
    let gamma = if n == 1 { 0.5 } else { gamma };
    let delta = if n == 1 { 0.5 } else { delta };

    let mut evaluations = 0usize;
    let mut eval = |x: &[f64], evaluations: &mut usize| {
        *evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += cfg.initial_step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| eval(p, &mut evaluations)).collect();

    let mut order: Vec<usize> = (0..=n).collect();
    let sort = |order: &mut Vec<usize>, values: &[f64]| {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    };
    sort(&mut order, &values);

    let mut trace = vec![values[order[0]]];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < cfg.max_iters {
        let best = order[0];
        if let Some(t) = cfg.target_value {
            if values[best] <= t {
                converged = true;
                break;
            }
        }
        let diameter = simplex
            .iter()
            .map(|p| dist(p, &simplex[best]))
            .fold(0.0, f64::max);
        if diameter < cfg.diameter_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let worst = order[n];
        let second_worst = order[n - 1];
        let mut centroid = vec![0.0; n];
        for &k in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&simplex[k]) {
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
        let f_r = eval(&reflected, &mut evaluations);
        if f_r < values[best] {
            let expanded = along(alpha * beta);
            let f_e = eval(&expanded, &mut evaluations);
            if f_e < f_r {
                simplex[worst] = expanded;
                values[worst] = f_e;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_r;
            }
        } else if f_r < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = f_r;
        } else {
            let (contracted, f_c, accept_against) = if f_r < values[worst] {
                let p = along(alpha * gamma);
                let v = eval(&p, &mut evaluations);
                (p, v, f_r)
            } else {
                let p = along(-gamma);
                let v = eval(&p, &mut evaluations);
                (p, v, values[worst])
            };
            if f_c <= accept_against {
                simplex[worst] = contracted;
                values[worst] = f_c;
            } else {
                let anchor = simplex[best].clone();
                for &k in &order[1..] {
                    let shrunk: Vec<f64> = anchor
                        .iter()
                        .zip(&simplex[k])
                        .map(|(a, x)| a + delta * (x - a))
                        .collect();
                    values[k] = eval(&shrunk, &mut evaluations);
                    simplex[k] = shrunk;
                }
            }
        }
        sort(&mut order, &values);
        trace.push(values[order[0]]);
    }

    let best = order[0];
    Minimum {
        x: simplex[best].clone(),
        value: values[best],
        iterations,
        evaluations,
        converged,
        trace,
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Result of a multistart run: every restart plus the index of the winner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiStart {
    pub runs: Vec<Minimum>,
    pub best: usize,
}

impl MultiStart {
    pub fn best(&self) -> &Minimum {
        &self.runs[self.best]
    }
}

/// Runs Nelder-Mead from `restarts` starting points in parallel. The winner is
/// the lowest value, ties broken by restart index.
pub fn multistart<F, S>(objective: F, start: S, restarts: usize, cfg: &NelderMeadConfig) -> MultiStart
where
    F: Fn(&[f64]) -> f64 + Sync,
    S: Fn(usize) -> Vec<f64> + Sync,
{
    assert!(restarts >= 1);
    let runs: Vec<Minimum> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let x0 = start(r);
            nelder_mead(&objective, &x0, cfg)
        })
        .collect();
    let best = runs
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(i.cmp(j)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    MultiStart { runs, best }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    #[test]
    fn minimizes_rosenbrock() {
        let cfg = NelderMeadConfig {
            max_iters: 5000,
            diameter_tol: 1e-10,
            ..Default::default()
        };
        let m = nelder_mead(rosenbrock, &[-1.2, 1.0], &cfg);
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-6, "{:?}", m.x);
        assert!(m.value < 1e-12);
    }

    #[test]
    fn trace_is_nonincreasing() {
        let m = nelder_mead(rosenbrock, &[0.0, 0.0], &NelderMeadConfig::default());
        assert!(m.trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(m.trace.len(), m.iterations + 1);
    }

    #[test]
    fn quadratic_in_many_dimensions() {
        let f = |x: &[f64]| x.iter().enumerate().map(|(i, v)| (i as f64 + 1.0) * v * v).sum::<f64>();
        let cfg = NelderMeadConfig {
            max_iters: 50_000,
            ..Default::default()
        };
        let m = nelder_mead(f, &[1.0; 12], &cfg);
        assert!(m.value < 1e-12, "{}", m.value);
    }

    #[test]
    fn target_stops_early() {
        let cfg = NelderMeadConfig {
            target_value: Some(1e-2),
            ..Default::default()
        };
        let m = nelder_mead(|x: &[f64]| x[0] * x[0] + x[1] * x[1], &[3.0, 3.0], &cfg);
        assert!(m.converged);
        assert!(m.value <= 1e-2 && m.value > 1e-8);
    }

    #[test]
    fn multistart_picks_lowest() {
        let f = |x: &[f64]| (x[0] * x[0] - 1.0).powi(2) + 0.1 * (x[0] - 1.0).powi(2);
        let cfg = NelderMeadConfig {
            initial_step: 0.05,
            ..Default::default()
        };
        let ms = multistart(f, |r| vec![if r % 2 == 0 { -1.5 } else { 1.5 }], 4, &cfg);
        assert!(ms.runs[0].x[0] < 0.0);
        assert_eq!(ms.best, 1);
        assert!((ms.best().x[0] - 1.0).abs() < 1e-6);
        assert_eq!(ms.runs.len(), 4);
    }
}
