//! Derivative-free direct-search minimizer (Nelder-Mead simplex).
//!
//! The correlation objective is smooth but multimodal, and every evaluation
//! runs through eigendecompositions, so a gradient-free local search with
//! independent restarts is the right tool. Deterministic given the start.

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

const ALPHA: f64 = 1.0; // reflection
const GAMMA: f64 = 2.0; // expansion
const BETA: f64 = 0.5; // contraction
const SIGMA: f64 = 0.5; // shrink

/// Minimizes `f` starting from `x0` with an axis-aligned initial simplex of
/// the given scale. Stops when the simplex diameter drops below
/// `diameter_tol` or after `max_evals` objective evaluations.
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    scale: f64,
    diameter_tol: f64,
    max_evals: usize,
) -> SimplexResult {
    let n = x0.len();
    assert!(n > 0);

    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        f(x)
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += scale;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v, &mut evals)).collect();

    let mut converged = false;
    while evals < max_evals {
        // order ascending by value, stable so ties keep insertion order
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        let ordered: Vec<Vec<f64>> = idx.iter().map(|&i| simplex[i].clone()).collect();
        let ordered_vals: Vec<f64> = idx.iter().map(|&i| values[i]).collect();
        simplex = ordered;
        values = ordered_vals;

        if diameter(&simplex) < diameter_tol {
            converged = true;
            break;
        }

        // centroid of all but worst
        let mut centroid = vec![0.0; n];
        for v in simplex.iter().take(n) {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }

        let worst = simplex[n].clone();
        let reflected: Vec<f64> = centroid
            .iter()
            .zip(&worst)
            .map(|(c, w)| c + ALPHA * (c - w))
            .collect();
        let fr = eval(&reflected, &mut evals);

        if fr < values[0] {
            let expanded: Vec<f64> = centroid
                .iter()
                .zip(&worst)
                .map(|(c, w)| c + GAMMA * (c - w))
                .collect();
            let fe = eval(&expanded, &mut evals);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            let base = if fr < values[n] { &reflected } else { &worst };
            let fbase = fr.min(values[n]);
            let contracted: Vec<f64> = centroid
                .iter()
                .zip(base)
                .map(|(c, b)| c + BETA * (b - c))
                .collect();
            let fc = eval(&contracted, &mut evals);
            if fc < fbase {
                simplex[n] = contracted;
                values[n] = fc;
            } else {
                // shrink toward the best vertex
                let best = simplex[0].clone();
                for i in 1..=n {
                    for (x, b) in simplex[i].iter_mut().zip(&best) {
                        *x = b + SIGMA * (*x - b);
                    }
                    values[i] = eval(&simplex[i].clone(), &mut evals);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=n {
        if values[i] < values[best] {
            best = i;
        }
    }
    SimplexResult {
        x: simplex[best].clone(),
        value: values[best],
        evals,
        converged,
    }
}

fn diameter(simplex: &[Vec<f64>]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..simplex.len() {
        for j in (i + 1)..simplex.len() {
            let dist: f64 = simplex[i]
                .iter()
                .zip(&simplex[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            d = d.max(dist);
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_quadratic() {
        let r = nelder_mead(
            |x| (x[0] - 1.5).powi(2) + (x[1] + 0.5).powi(2),
            &[0.0, 0.0],
            0.3,
            1e-10,
            2000,
        );
        assert!((r.x[0] - 1.5).abs() < 1e-6);
        assert!((r.x[1] + 0.5).abs() < 1e-6);
        assert!(r.value < 1e-12);
    }

    #[test]
    fn minimizes_rosenbrock() {
        let r = nelder_mead(
            |x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2),
            &[-1.2, 1.0],
            0.3,
            1e-12,
            5000,
        );
        assert!((r.x[0] - 1.0).abs() < 1e-4, "{:?}", r);
    }

    #[test]
    fn result_never_worse_than_start() {
        let f = |x: &[f64]| x[0].sin() * 3.0 + x[0] * 0.1;
        let start = 2.0;
        let r = nelder_mead(f, &[start], 0.3, 1e-7, 2000);
        assert!(r.value <= f(&[start]));
    }

    #[test]
    fn deterministic_given_start() {
        let f = |x: &[f64]| (x[0] * 3.1).cos() + x[1].powi(2);
        let a = nelder_mead(f, &[0.4, -0.2], 0.3, 1e-7, 2000);
        let b = nelder_mead(f, &[0.4, -0.2], 0.3, 1e-7, 2000);
        assert_eq!(a.x, b.x);
        assert_eq!(a.value, b.value);
    }
}
