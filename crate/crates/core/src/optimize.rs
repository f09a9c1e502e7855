//! Derivative-free minimization (Nelder-Mead simplex).

/// Outcome of a minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// True when the simplex shrank below the step tolerance before the
    /// iteration limit.
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    pub initial_step: f64,
    /// Stop once every vertex is within this distance of the best one.
    pub step_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self { initial_step: 0.1, step_tolerance: 1e-6, max_iterations: 2000 }
    }
}

impl NelderMead {
    /// Minimize `f` from `start` with the standard coefficients
    /// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
    pub fn minimize(&self, f: impl Fn(&[f64]) -> f64, start: &[f64]) -> Minimum {
        let dim = start.len();
        let eval = |x: &[f64]| {
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
        simplex.push((start.to_vec(), eval(start)));
        for i in 0..dim {
            let mut x = start.to_vec();
            x[i] += self.initial_step;
            let v = eval(&x);
            simplex.push((x, v));
        }
        let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
            a.iter().zip(b).map(|(a, b)| a + t * (b - a)).collect()
        };
        let mut iterations = 0;
        let mut converged = false;
        while iterations < self.max_iterations {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let best = simplex[0].0.clone();
            let spread = simplex[1..]
                .iter()
                .map(|(x, _)| x.iter().zip(&best).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if spread < self.step_tolerance {
                converged = true;
                break;
            }
            iterations += 1;
            let mut centroid = vec![0.0; dim];
            for (x, _) in &simplex[..dim] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / dim as f64;
                }
            }
            let (worst, worst_v) = simplex[dim].clone();
            let second_v = simplex[dim - 1].1;
            let reflected = lerp(&centroid, &worst, -1.0);
            let rv = eval(&reflected);
            if rv < simplex[0].1 {
                let expanded = lerp(&centroid, &worst, -2.0);
                let ev = eval(&expanded);
                simplex[dim] = if ev < rv { (expanded, ev) } else { (reflected, rv) };
                continue;
            }
            if rv < second_v {
                simplex[dim] = (reflected, rv);
                continue;
            }
            let (contracted, cv) = if rv < worst_v {
                let c = lerp(&centroid, &reflected, 0.5);
                let v = eval(&c);
                (c, v)
            } else {
                let c = lerp(&centroid, &worst, 0.5);
                let v = eval(&c);
                (c, v)
            };
            if cv < rv.min(worst_v) {
                simplex[dim] = (contracted, cv);
                continue;
            }
            for vertex in simplex.iter_mut().skip(1) {
                let x = lerp(&best, &vertex.0, 0.5);
                let v = eval(&x);
                *vertex = (x, v);
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (point, value) = simplex.swap_remove(0);
        Minimum { point, value, iterations, converged }
    }
}
